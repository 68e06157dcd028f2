// JSON scenario files. Errors name the offending field path; expression
// errors also carry file, line and column.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "supercyc/analysis.hpp"

namespace supercyc {

class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(std::string path, const std::string& what)
      : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace detail {

using nlohmann::json;

struct Loader {
  std::string file;
  std::string raw;

  // Line and column of a parse error inside the string value `src`, located
  // by searching the raw text for its JSON encoding. Falls back to line 0.
  std::string locate(const std::string& src, std::size_t offset) const {
    const std::string needle = json(src).dump();
    const auto pos = raw.find(needle);
    if (pos == std::string::npos) return file + ":0";
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (raw[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return file + ":" + std::to_string(line) + ":" + std::to_string(col + 1 + offset);
  }

  std::string expression(const json& j, const std::string& path) const {
    if (!j.is_string()) throw ScenarioError(path, "expected an expression string");
    const auto src = j.get<std::string>();
    try {
      (void)Expression::parse(src);
    } catch (const ParseError& e) {
      throw ScenarioError(path, locate(src, e.offset()) + ": " + e.what());
    }
    return src;
  }

  Complex point(const json& j, const std::string& path) const {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array()) {
      if (j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ScenarioError(path, "expected [re, im]");
      return {j[0].get<double>(), j[1].get<double>()};
    }
    const auto e = Expression::parse(expression(j, path));
    const auto v = e.eval(Complex{0.0, 0.0});
    if (!v) throw ScenarioError(path, "point expression does not evaluate to a finite number");
    return *v;
  }
};

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ScenarioError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

template <class T>
T field(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const std::string p = path.empty() ? key : path + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ScenarioError(p, "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ScenarioError(p, "expected an integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ScenarioError(p, "expected a number");
  } else {
    if (!v.is_string()) throw ScenarioError(p, "expected a string");
  }
  return v.get<T>();
}

inline GridParams parse_domain(const json& j) {
  GridParams g;
  const json* obj = &j;
  json wrapped;
  if (j.is_string()) {
    wrapped = json{{"kind", j}};
    obj = &wrapped;
  } else if (!j.is_object()) {
    throw ScenarioError("domain", "expected a kind string or an object");
  }
  reject_unknown(*obj,
                 {"kind", "radius", "innerCutoff", "outerCutoff", "range", "includesInfinityMarker", "resolution",
                  "tolerance"},
                 "domain");
  if (!obj->contains("kind")) throw ScenarioError("domain.kind", "missing");
  const auto kind = field<std::string>(*obj, "kind", "domain", "");
  const auto k = domain_kind_from_string(kind);
  if (!k) throw ScenarioError("domain.kind", "unknown domain kind '" + kind + "'");
  g.kind = *k;
  g.radius = field(*obj, "radius", "domain", g.radius);
  g.inner_cutoff = field(*obj, "innerCutoff", "domain", g.inner_cutoff);
  g.outer_cutoff = field(*obj, "outerCutoff", "domain", g.outer_cutoff);
  g.includes_infinity = field(*obj, "includesInfinityMarker", "domain", g.includes_infinity);
  g.resolution = field(*obj, "resolution", "domain", g.resolution);
  g.tolerance = field(*obj, "tolerance", "domain", g.tolerance);
  if (obj->contains("range")) {
    const auto& r = obj->at("range");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
      throw ScenarioError("domain.range", "expected [lo, hi] integers");
    g.lo = r[0].get<std::int64_t>();
    g.hi = r[1].get<std::int64_t>();
  }
  try {
    (void)build_grid(g);
  } catch (const DomainError& e) {
    throw ScenarioError("domain", e.what());
  }
  return g;
}

inline std::vector<Complex> parse_entries(const Loader& L, const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ScenarioError(path, "expected a non-empty array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(L.point(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline ShiftSpec parse_shift(const Loader& L, const json& j) {
  if (!j.is_object()) throw ScenarioError("shift", "expected an object");
  reject_unknown(j, {"kind", "weights", "weightCount", "targets", "epsilons", "codimension", "imageInside"}, "shift");
  ShiftSpec s;
  const auto kind = field<std::string>(j, "kind", "shift", "bilateralBackward");
  if (kind == "bilateralBackward") {
    s.op = ShiftOperator::bilateral();
  } else if (kind == "unilateralWeightedBackward") {
    std::vector<double> w;
    if (!j.contains("weights") || (j.at("weights").is_string() && j.at("weights") == "harmonic")) {
      w = harmonic_weights(static_cast<std::size_t>(field(j, "weightCount", "shift", 256)));
    } else if (j.at("weights").is_array()) {
      for (std::size_t i = 0; i < j.at("weights").size(); ++i) {
        const auto& x = j.at("weights")[i];
        if (!x.is_number() || !(x.get<double>() > 0.0))
          throw ScenarioError("shift.weights[" + std::to_string(i) + "]", "expected a positive number");
        w.push_back(x.get<double>());
      }
    } else {
      throw ScenarioError("shift.weights", "expected \"harmonic\" or a list of positive numbers");
    }
    s.op = ShiftOperator::weighted(std::move(w));
  } else {
    throw ScenarioError("shift.kind", "expected bilateralBackward or unilateralWeightedBackward");
  }
  if (j.contains("targets")) {
    const auto& ts = j.at("targets");
    if (!ts.is_array()) throw ScenarioError("shift.targets", "expected an array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string p = "shift.targets[" + std::to_string(i) + "]";
      if (!ts[i].is_object()) throw ScenarioError(p, "expected {lo, entries}");
      reject_unknown(ts[i], {"lo", "entries"}, p);
      SeqVector v;
      v.lo = field<std::int64_t>(ts[i], "lo", p, 0);
      if (!ts[i].contains("entries")) throw ScenarioError(p + ".entries", "missing");
      v.entries = parse_entries(L, ts[i].at("entries"), p + ".entries");
      v.tag = s.op.kind == ShiftKind::Bilateral ? SpaceTag::c0Z : SpaceTag::c0N;
      s.targets.push_back(std::move(v));
    }
  }
  if (j.contains("epsilons")) {
    const auto& e = j.at("epsilons");
    if (!e.is_array()) throw ScenarioError("shift.epsilons", "expected an array");
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i].is_number() || !(e[i].get<double>() > 0.0))
        throw ScenarioError("shift.epsilons[" + std::to_string(i) + "]", "expected a positive number");
      s.epsilons.push_back(e[i].get<double>());
    }
  }
  if (j.contains("codimension")) s.codimension = field(j, "codimension", "shift", 0);
  s.image_inside = field(j, "imageInside", "shift", true);
  return s;
}

}  // namespace detail

/// Parses scenario text. `file` is used only in error messages.
inline Scenario parse_scenario(const std::string& text, const std::string& file = "<scenario>") {
  using detail::field;
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", file + ": malformed JSON (" + std::string(e.what()) + ")");
  }
  if (!j.is_object()) throw ScenarioError("", file + ": top level must be an object");
  detail::reject_unknown(j,
                         {"name", "domain", "symbol", "weight", "testFunctions", "quotientPairs", "assertions",
                          "horizons", "tolerances", "shift"},
                         "");
  const detail::Loader L{file, text};
  Scenario s;
  s.name = field<std::string>(j, "name", "", s.name);
  if (!j.contains("domain")) throw ScenarioError("domain", "missing");
  s.grid = detail::parse_domain(j.at("domain"));
  if (!j.contains("symbol")) throw ScenarioError("symbol", "missing");
  s.symbol = L.expression(j.at("symbol"), "symbol");
  if (j.contains("weight")) s.weight = L.expression(j.at("weight"), "weight");
  if (j.contains("testFunctions")) {
    const auto& fs = j.at("testFunctions");
    if (!fs.is_array()) throw ScenarioError("testFunctions", "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i)
      s.test_functions.push_back(L.expression(fs[i], "testFunctions[" + std::to_string(i) + "]"));
  }
  if (j.contains("quotientPairs")) {
    const auto& qs = j.at("quotientPairs");
    if (!qs.is_array()) throw ScenarioError("quotientPairs", "expected an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string p = "quotientPairs[" + std::to_string(i) + "]";
      if (!qs[i].is_array() || qs[i].size() != 2) throw ScenarioError(p, "expected [z1, z2]");
      s.quotient_pairs.emplace_back(L.point(qs[i][0], p + "[0]"), L.point(qs[i][1], p + "[1]"));
    }
    if (!s.quotient_pairs.empty() && s.test_functions.empty())
      throw ScenarioError("testFunctions", "quotient checks need at least one test function");
  }
  if (j.contains("assertions")) {
    const auto& a = j.at("assertions");
    if (!a.is_object()) throw ScenarioError("assertions", "expected an object");
    detail::reject_unknown(a, {"analytic", "noWanderingInterval", "nowhereVanishingMember"}, "assertions");
    s.assertions.analytic = field(a, "analytic", "assertions", s.assertions.analytic);
    s.assertions.no_wandering_interval = field(a, "noWanderingInterval", "assertions", s.assertions.no_wandering_interval);
    s.assertions.nowhere_vanishing_member =
        field(a, "nowhereVanishingMember", "assertions", s.assertions.nowhere_vanishing_member);
  }
  if (j.contains("horizons")) {
    const auto& h = j.at("horizons");
    if (!h.is_object()) throw ScenarioError("horizons", "expected an object");
    detail::reject_unknown(h, {"orbitN", "quotientN", "witnessN", "rotationN"}, "horizons");
    auto positive = [&](const char* key, int fallback) {
      const int v = field(h, key, "horizons", fallback);
      if (v < 1) throw ScenarioError(std::string("horizons.") + key, "must be positive");
      return v;
    };
    s.horizons.orbit_n = positive("orbitN", s.horizons.orbit_n);
    s.horizons.quotient_n = positive("quotientN", s.horizons.quotient_n);
    s.horizons.witness_n = positive("witnessN", s.horizons.witness_n);
    s.horizons.rotation_n = positive("rotationN", s.horizons.rotation_n);
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) throw ScenarioError("tolerances", "expected an object");
    detail::reject_unknown(t,
                           {"cauchy", "cauchyWindow", "period", "burnIn", "maxPeriod", "escapeRadius",
                            "fixedPointResidual", "periodicResidual", "clusterRadius"},
                           "tolerances");
    auto& d = s.tolerances;
    d.cauchy = field(t, "cauchy", "tolerances", d.cauchy);
    d.cauchy_window = field(t, "cauchyWindow", "tolerances", d.cauchy_window);
    d.period = field(t, "period", "tolerances", d.period);
    d.burn_in = field(t, "burnIn", "tolerances", d.burn_in);
    d.max_period = field(t, "maxPeriod", "tolerances", d.max_period);
    d.escape_radius = field(t, "escapeRadius", "tolerances", d.escape_radius);
    d.fixed_point_residual = field(t, "fixedPointResidual", "tolerances", d.fixed_point_residual);
    d.periodic_residual = field(t, "periodicResidual", "tolerances", d.periodic_residual);
    d.cluster_radius = field(t, "clusterRadius", "tolerances", d.cluster_radius);
  }
  if (j.contains("shift")) s.shift = detail::parse_shift(L, j.at("shift"));
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace supercyc
