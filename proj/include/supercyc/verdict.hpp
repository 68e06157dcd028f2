// Typed conclusions with citation tags and ordered numeric evidence.
#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "supercyc/expr.hpp"

namespace supercyc {

/// Numerical breakdown (solver failure, non-convergent quadrature), as opposed
/// to bad input.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Conclusion { NotTauPSupercyclic, NotWeaklySupercyclic, NotCyclic, WitnessExhibited, Inconclusive };

inline const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::NotTauPSupercyclic: return "NotTauPSupercyclic";
    case Conclusion::NotWeaklySupercyclic: return "NotWeaklySupercyclic";
    case Conclusion::NotCyclic: return "NotCyclic";
    case Conclusion::WitnessExhibited: return "WitnessExhibited";
    case Conclusion::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Whether a conclusion covers the operator or only the tested functions.
enum class Scope { Operator, TestedFamily };

inline const char* to_string(Scope s) { return s == Scope::Operator ? "operator" : "tested_family"; }

// Subnormals print as 0 so reports do not depend on libm rounding noise.
inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", std::fpclassify(x) == FP_SUBNORMAL || x == 0.0 ? 0.0 : x);
  return buf;
}

// A component below 1e-15 of the modulus is rounding residue and prints as 0.
inline std::string fmt(Complex z) {
  const double floor = 1e-15 * std::abs(z);
  auto clean = [&](double c) { return std::abs(c) <= floor ? 0.0 : c; };
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", clean(z.real()), clean(z.imag()));
  return buf;
}

struct Verdict {
  std::string check;  // name of the check that produced it
  Conclusion conclusion = Conclusion::Inconclusive;
  std::string citation;  // empty for Inconclusive
  Scope scope = Scope::Operator;
  std::vector<std::pair<std::string, std::string>> evidence;
  std::vector<std::string> caveats;

  bool conclusive() const { return conclusion != Conclusion::Inconclusive; }

  Verdict& add(std::string key, std::string value) {
    evidence.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Verdict& add(std::string key, double value) { return add(std::move(key), fmt(value)); }
  Verdict& add(std::string key, Complex value) { return add(std::move(key), fmt(value)); }
  Verdict& add(std::string key, bool value) { return add(std::move(key), std::string(value ? "true" : "false")); }

  std::string evidence_value(const std::string& key) const {
    for (const auto& [k, v] : evidence)
      if (k == key) return v;
    return {};
  }
};

inline Verdict make_verdict(std::string check, Conclusion c, std::string citation = {}) {
  Verdict v;
  v.check = std::move(check);
  v.conclusion = c;
  v.citation = std::move(citation);
  return v;
}

inline Verdict inconclusive(std::string check, std::string reason) {
  Verdict v = make_verdict(std::move(check), Conclusion::Inconclusive);
  v.add("reason", std::move(reason));
  return v;
}

}  // namespace supercyc
