#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roadq::fuzzy {

// f(a) = 1 / (1 + exp(-m (a - n))). Strictly monotone in a, open toward the
// side selected by the sign of m. Throws std::invalid_argument on non-finite
// arguments.
double eval_sigmoid(double a, double m, double n);

// Product of two sigmoids; m1 and m2 must have opposite signs (left slope
// positive, right slope negative in the shipped configs).
double eval_psig(double a, double m1, double n1, double m2, double n2);

enum class MfKind { Sig, Psig };

struct MembershipFunction {
  MfKind kind = MfKind::Sig;
  // Sig parameters
  double m = 0.0;
  double n = 0.0;
  // Psig parameters
  double m1 = 0.0, n1 = 0.0, m2 = 0.0, n2 = 0.0;

  static MembershipFunction sig(double m, double n);
  static MembershipFunction psig(double m1, double n1, double m2, double n2);

  double eval(double a) const;
};

struct Term {
  std::string name;
  MembershipFunction mf;
};

struct LinguisticVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<Term> terms;  // declaration order matters for tie-breaks

  const Term* find_term(std::string_view term_name) const;
};

struct TermDegree {
  std::string term;
  double degree = 0.0;
};

struct FuzzifiedInput {
  std::string variable;
  std::vector<TermDegree> degrees;  // one per term, declaration order
  bool clamped = false;             // crisp value was outside [lo, hi]
};

// Out-of-universe values are clamped to [lo, hi]; the clamped flag reports it.
FuzzifiedInput fuzzify(const LinguisticVariable& var, double crisp);

// One AND-conjunction of (variable, term) atoms. Variables may be omitted;
// each variable appears at most once.
struct Conjunction {
  std::vector<std::pair<std::string, std::string>> atoms;
};

// OR of conjunctions, with a single consequent (output variable, term).
struct Rule {
  std::vector<Conjunction> branches;
  std::string output_variable;
  std::string output_term;
};

struct AggregatedOutput {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> samples;  // defuzz_grid_points values over [lo, hi]
};

struct ClampEvent {
  std::string variable;
  double given = 0.0;
  double clamped_to = 0.0;
};

struct ValidationReport {
  bool passed = false;
  int rule_count = 0;
  std::vector<std::string> issues;
};

class FisDefinition {
 public:
  FisDefinition(std::string name, std::vector<LinguisticVariable> inputs,
                LinguisticVariable output, std::vector<Rule> rules,
                int defuzz_grid_points = 1001);

  const std::string& name() const { return name_; }
  const std::vector<LinguisticVariable>& inputs() const { return inputs_; }
  const LinguisticVariable& output() const { return output_; }
  const std::vector<Rule>& rules() const { return rules_; }
  int defuzz_grid_points() const { return grid_points_; }

  const LinguisticVariable* find_input(std::string_view var_name) const;

  // Output-term membership curves sampled on the defuzzification grid,
  // one per output term in declaration order.
  const std::vector<std::vector<double>>& output_term_curves() const { return term_curves_; }
  double grid_x(int i) const;

  // Structural FNV-1a digest; identifies the loaded configuration.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::string name_;
  std::vector<LinguisticVariable> inputs_;
  LinguisticVariable output_;
  std::vector<Rule> rules_;
  int grid_points_;
  std::vector<std::vector<double>> term_curves_;
  std::uint64_t fingerprint_ = 0;
};

// Firing strength per rule: min over conjuncts, max over OR branches.
// Throws std::invalid_argument if a declared input is missing or an unknown
// input name is passed.
std::vector<double> rule_strengths(const FisDefinition& fis,
                                   const std::map<std::string, double>& crisp_inputs,
                                   std::vector<ClampEvent>* clamp_log = nullptr);

// Mamdani inference: min-implication clip per rule, pointwise max aggregation.
AggregatedOutput infer(const FisDefinition& fis,
                       const std::map<std::string, double>& crisp_inputs,
                       std::vector<ClampEvent>* clamp_log = nullptr);

// Centroid over the sampling grid. Throws NoRuleFiredError on an all-zero curve.
double defuzzify_centroid(const AggregatedOutput& agg);

// Output term with maximal membership at the crisp value; ties go to the
// earlier-declared term.
std::string classify(const FisDefinition& fis, double crisp);

// Checks term references, Psig slope signs, universe sanity, and rule
// coverage on a 21-point-per-axis grid (strength > 1e-9 everywhere).
ValidationReport validate_fis(const FisDefinition& fis);

}  // namespace roadq::fuzzy
