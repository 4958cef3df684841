#pragma once

#include <stdexcept>
#include <string>

namespace roadq {

// Raised when an aggregated output curve is identically zero, i.e. no rule
// fired for the given inputs. Callers decide the fallback.
class NoRuleFiredError : public std::runtime_error {
 public:
  explicit NoRuleFiredError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by loaders on malformed or inconsistent configuration documents.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace roadq
