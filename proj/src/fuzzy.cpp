#include "roadq/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "roadq/errors.hpp"

namespace roadq::fuzzy {

double eval_sigmoid(double a, double m, double n) {
  if (!std::isfinite(a) || !std::isfinite(m) || !std::isfinite(n)) {
    throw std::invalid_argument("eval_sigmoid: non-finite argument");
  }
  return 1.0 / (1.0 + std::exp(-m * (a - n)));
}

double eval_psig(double a, double m1, double n1, double m2, double n2) {
  if (!std::isfinite(a) || !std::isfinite(m1) || !std::isfinite(n1) ||
      !std::isfinite(m2) || !std::isfinite(n2)) {
    throw std::invalid_argument("eval_psig: non-finite argument");
  }
  if ((m1 >= 0.0) == (m2 >= 0.0)) {
    throw std::invalid_argument("eval_psig: slopes must have opposite signs");
  }
  return eval_sigmoid(a, m1, n1) * eval_sigmoid(a, m2, n2);
}

MembershipFunction MembershipFunction::sig(double m, double n) {
  MembershipFunction f;
  f.kind = MfKind::Sig;
  f.m = m;
  f.n = n;
  return f;
}

MembershipFunction MembershipFunction::psig(double m1, double n1, double m2, double n2) {
  MembershipFunction f;
  f.kind = MfKind::Psig;
  f.m1 = m1;
  f.n1 = n1;
  f.m2 = m2;
  f.n2 = n2;
  return f;
}

double MembershipFunction::eval(double a) const {
  if (kind == MfKind::Sig) {
    return eval_sigmoid(a, m, n);
  }
  return eval_psig(a, m1, n1, m2, n2);
}

const Term* LinguisticVariable::find_term(std::string_view term_name) const {
  for (const Term& t : terms) {
    if (t.name == term_name) return &t;
  }
  return nullptr;
}

FuzzifiedInput fuzzify(const LinguisticVariable& var, double crisp) {
  FuzzifiedInput out;
  out.variable = var.name;
  double x = crisp;
  if (x < var.lo) {
    x = var.lo;
    out.clamped = true;
  } else if (x > var.hi) {
    x = var.hi;
    out.clamped = true;
  }
  out.degrees.reserve(var.terms.size());
  for (const Term& t : var.terms) {
    out.degrees.push_back({t.name, t.mf.eval(x)});
  }
  return out;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
  return fnv1a(h, s.data(), s.size());
}

std::uint64_t fnv1a_dbl(std::uint64_t h, double v) {
  return fnv1a(h, &v, sizeof v);
}

std::uint64_t hash_variable(std::uint64_t h, const LinguisticVariable& v) {
  h = fnv1a_str(h, v.name);
  h = fnv1a_dbl(h, v.lo);
  h = fnv1a_dbl(h, v.hi);
  for (const Term& t : v.terms) {
    h = fnv1a_str(h, t.name);
    h = fnv1a(h, &t.mf.kind, sizeof t.mf.kind);
    h = fnv1a_dbl(h, t.mf.m);
    h = fnv1a_dbl(h, t.mf.n);
    h = fnv1a_dbl(h, t.mf.m1);
    h = fnv1a_dbl(h, t.mf.n1);
    h = fnv1a_dbl(h, t.mf.m2);
    h = fnv1a_dbl(h, t.mf.n2);
  }
  return h;
}

}  // namespace

FisDefinition::FisDefinition(std::string name, std::vector<LinguisticVariable> inputs,
                             LinguisticVariable output, std::vector<Rule> rules,
                             int defuzz_grid_points)
    : name_(std::move(name)),
      inputs_(std::move(inputs)),
      output_(std::move(output)),
      rules_(std::move(rules)),
      grid_points_(defuzz_grid_points) {
  if (grid_points_ < 2) {
    throw std::invalid_argument("FisDefinition: defuzz_grid_points must be >= 2");
  }
  term_curves_.resize(output_.terms.size());
  for (std::size_t t = 0; t < output_.terms.size(); ++t) {
    term_curves_[t].resize(grid_points_);
    for (int i = 0; i < grid_points_; ++i) {
      term_curves_[t][i] = output_.terms[t].mf.eval(grid_x(i));
    }
  }
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a_str(h, name_);
  for (const auto& v : inputs_) h = hash_variable(h, v);
  h = hash_variable(h, output_);
  for (const Rule& r : rules_) {
    for (const Conjunction& c : r.branches) {
      for (const auto& [var, term] : c.atoms) {
        h = fnv1a_str(h, var);
        h = fnv1a_str(h, term);
      }
    }
    h = fnv1a_str(h, r.output_variable);
    h = fnv1a_str(h, r.output_term);
  }
  h = fnv1a(h, &grid_points_, sizeof grid_points_);
  fingerprint_ = h;
}

double FisDefinition::grid_x(int i) const {
  return output_.lo + static_cast<double>(i) * (output_.hi - output_.lo) /
                          static_cast<double>(grid_points_ - 1);
}

const LinguisticVariable* FisDefinition::find_input(std::string_view var_name) const {
  for (const LinguisticVariable& v : inputs_) {
    if (v.name == var_name) return &v;
  }
  return nullptr;
}

std::vector<double> rule_strengths(const FisDefinition& fis,
                                   const std::map<std::string, double>& crisp_inputs,
                                   std::vector<ClampEvent>* clamp_log) {
  for (const auto& [name, value] : crisp_inputs) {
    if (fis.find_input(name) == nullptr) {
      throw std::invalid_argument("infer: unknown input variable '" + name + "'");
    }
    (void)value;
  }
  // degree lookup per (variable, term)
  std::map<std::string, std::map<std::string, double>> degrees;
  for (const LinguisticVariable& var : fis.inputs()) {
    auto it = crisp_inputs.find(var.name);
    if (it == crisp_inputs.end()) {
      throw std::invalid_argument("infer: missing input variable '" + var.name + "'");
    }
    FuzzifiedInput f = fuzzify(var, it->second);
    if (f.clamped && clamp_log != nullptr) {
      clamp_log->push_back({var.name, it->second, std::clamp(it->second, var.lo, var.hi)});
    }
    auto& slot = degrees[var.name];
    for (const TermDegree& td : f.degrees) {
      slot[td.term] = td.degree;
    }
  }
  std::vector<double> strengths;
  strengths.reserve(fis.rules().size());
  for (const Rule& rule : fis.rules()) {
    double strength = 0.0;  // max over OR branches
    for (const Conjunction& conj : rule.branches) {
      double s = 1.0;  // min over AND atoms
      for (const auto& [var, term] : conj.atoms) {
        s = std::min(s, degrees.at(var).at(term));
      }
      strength = std::max(strength, s);
    }
    strengths.push_back(strength);
  }
  return strengths;
}

AggregatedOutput infer(const FisDefinition& fis,
                       const std::map<std::string, double>& crisp_inputs,
                       std::vector<ClampEvent>* clamp_log) {
  const std::vector<double> strengths = rule_strengths(fis, crisp_inputs, clamp_log);

  // max firing strength per output term (max aggregation is idempotent over
  // same-consequent rules)
  std::vector<double> clip(fis.output().terms.size(), 0.0);
  for (std::size_t r = 0; r < fis.rules().size(); ++r) {
    const Rule& rule = fis.rules()[r];
    for (std::size_t t = 0; t < fis.output().terms.size(); ++t) {
      if (fis.output().terms[t].name == rule.output_term) {
        clip[t] = std::max(clip[t], strengths[r]);
        break;
      }
    }
  }

  AggregatedOutput agg;
  agg.lo = fis.output().lo;
  agg.hi = fis.output().hi;
  agg.samples.assign(fis.defuzz_grid_points(), 0.0);
  for (std::size_t t = 0; t < clip.size(); ++t) {
    if (clip[t] == 0.0) continue;
    const std::vector<double>& curve = fis.output_term_curves()[t];
    for (int i = 0; i < fis.defuzz_grid_points(); ++i) {
      const double v = std::min(clip[t], curve[i]);
      if (v > agg.samples[i]) agg.samples[i] = v;
    }
  }
  return agg;
}

double defuzzify_centroid(const AggregatedOutput& agg) {
  double num = 0.0;
  double den = 0.0;
  const double step = (agg.hi - agg.lo) / static_cast<double>(agg.samples.size() - 1);
  for (std::size_t i = 0; i < agg.samples.size(); ++i) {
    const double x = agg.lo + static_cast<double>(i) * step;
    num += x * agg.samples[i];
    den += agg.samples[i];
  }
  if (den == 0.0) {
    throw NoRuleFiredError("defuzzify_centroid: all-zero aggregated curve");
  }
  return num / den;
}

std::string classify(const FisDefinition& fis, double crisp) {
  const LinguisticVariable& out = fis.output();
  std::size_t best = 0;
  double best_degree = -1.0;
  for (std::size_t t = 0; t < out.terms.size(); ++t) {
    const double d = out.terms[t].mf.eval(crisp);
    if (d > best_degree) {
      best_degree = d;
      best = t;
    }
  }
  return out.terms[best].name;
}

namespace {

void validate_variable(const LinguisticVariable& v, std::vector<std::string>& issues) {
  if (!(v.lo < v.hi)) {
    issues.push_back("variable '" + v.name + "': universe lo >= hi");
  }
  if (v.terms.size() < 2) {
    issues.push_back("variable '" + v.name + "': fewer than 2 terms");
  }
  std::set<std::string> seen;
  for (const Term& t : v.terms) {
    if (!seen.insert(t.name).second) {
      issues.push_back("variable '" + v.name + "': duplicate term '" + t.name + "'");
    }
    if (t.mf.kind == MfKind::Psig && (t.mf.m1 >= 0.0) == (t.mf.m2 >= 0.0)) {
      issues.push_back("variable '" + v.name + "': term '" + t.name +
                       "' has same-sign psig slopes");
    }
  }
}

}  // namespace

ValidationReport validate_fis(const FisDefinition& fis) {
  ValidationReport report;
  report.rule_count = static_cast<int>(fis.rules().size());
  std::vector<std::string>& issues = report.issues;

  for (const LinguisticVariable& v : fis.inputs()) validate_variable(v, issues);
  validate_variable(fis.output(), issues);

  if (fis.rules().empty()) {
    issues.push_back("rule base is empty");
  }
  for (std::size_t r = 0; r < fis.rules().size(); ++r) {
    const Rule& rule = fis.rules()[r];
    std::ostringstream where;
    where << "rule " << (r + 1);
    if (rule.branches.empty() ||
        std::all_of(rule.branches.begin(), rule.branches.end(),
                    [](const Conjunction& c) { return c.atoms.empty(); })) {
      issues.push_back(where.str() + ": empty antecedent");
    }
    for (const Conjunction& conj : rule.branches) {
      for (const auto& [var, term] : conj.atoms) {
        const LinguisticVariable* v = fis.find_input(var);
        if (v == nullptr) {
          issues.push_back(where.str() + ": unknown input variable '" + var + "'");
        } else if (v->find_term(term) == nullptr) {
          issues.push_back(where.str() + ": variable '" + var + "' has no term '" +
                           term + "'");
        }
      }
    }
    if (rule.output_variable != fis.output().name) {
      issues.push_back(where.str() + ": consequent variable '" + rule.output_variable +
                       "' is not the output variable");
    } else if (fis.output().find_term(rule.output_term) == nullptr) {
      issues.push_back(where.str() + ": output has no term '" + rule.output_term + "'");
    }
  }

  // Rule coverage on a 21-point-per-axis grid; only meaningful once the
  // structural checks above are clean.
  if (issues.empty()) {
    constexpr int kAxisPoints = 21;
    constexpr double kMinStrength = 1e-9;
    const std::size_t dims = fis.inputs().size();
    std::vector<int> idx(dims, 0);
    bool done = dims == 0;
    while (!done) {
      std::map<std::string, double> point;
      for (std::size_t d = 0; d < dims; ++d) {
        const LinguisticVariable& v = fis.inputs()[d];
        point[v.name] =
            v.lo + (v.hi - v.lo) * static_cast<double>(idx[d]) / (kAxisPoints - 1);
      }
      const std::vector<double> s = rule_strengths(fis, point);
      if (*std::max_element(s.begin(), s.end()) <= kMinStrength) {
        std::ostringstream msg;
        msg << "coverage hole: no rule fires at (";
        bool first = true;
        for (const auto& [name, value] : point) {
          if (!first) msg << ", ";
          msg << name << "=" << value;
          first = false;
        }
        msg << ")";
        issues.push_back(msg.str());
        break;
      }
      std::size_t d = 0;
      for (; d < dims; ++d) {
        if (++idx[d] < kAxisPoints) break;
        idx[d] = 0;
      }
      done = d == dims;
    }
  }

  report.passed = issues.empty();
  return report;
}

}  // namespace roadq::fuzzy
