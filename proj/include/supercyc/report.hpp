// Plain-text reports and their JSON sidecar. Both are deterministic: no
// timestamps, fixed 12-significant-digit numbers, insertion-ordered keys.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "supercyc/analysis.hpp"

namespace supercyc {

inline constexpr const char* kToolVersion = "0.1.0";

struct Report {
  std::string title;
  std::vector<Section> sections;
  int exit_status = 0;
};

namespace detail {

inline std::string verdict_line(const Verdict& v) {
  std::string s = to_string(v.conclusion);
  if (!v.citation.empty()) s += " [" + v.citation + "]";
  if (v.conclusive()) s += std::string(" scope=") + to_string(v.scope);
  return s;
}

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["check"] = v.check;
  j["conclusion"] = to_string(v.conclusion);
  j["citation"] = v.citation;
  j["scope"] = to_string(v.scope);
  auto& ev = j["evidence"] = nlohmann::ordered_json::array();
  for (const auto& [k, val] : v.evidence) ev.push_back({{"key", k}, {"value", val}});
  j["caveats"] = v.caveats;
  return j;
}

}  // namespace detail

inline std::string render_text(const Report& r) {
  std::string out = "supercyc " + std::string(kToolVersion) + " report: " + r.title + "\n";
  for (const auto& sec : r.sections) {
    out += "\n== " + sec.name + "\n";
    for (const auto& [k, v] : sec.header) out += "  " + k + ": " + v + "\n";
    for (const auto& c : sec.checks) {
      out += "check " + c.check + ": " + detail::verdict_line(c) + "\n";
      for (const auto& [k, v] : c.evidence) out += "    " + k + " = " + v + "\n";
      for (const auto& cav : c.caveats) out += "    caveat: " + cav + "\n";
    }
    out += "final: " + detail::verdict_line(sec.final_verdict) + "\n";
  }
  out += "\nexit status: " + std::to_string(r.exit_status) + "\n";
  return out;
}

inline nlohmann::ordered_json render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["tool"] = "supercyc";
  j["version"] = kToolVersion;
  j["title"] = r.title;
  auto& secs = j["sections"] = nlohmann::ordered_json::array();
  for (const auto& sec : r.sections) {
    nlohmann::ordered_json s;
    s["name"] = sec.name;
    auto& h = s["header"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : sec.header) h[k] = v;
    auto& cs = s["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : sec.checks) cs.push_back(detail::verdict_json(c));
    s["final"] = detail::verdict_json(sec.final_verdict);
    secs.push_back(std::move(s));
  }
  j["exit_status"] = r.exit_status;
  return j;
}

}  // namespace supercyc
