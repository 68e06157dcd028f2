// Shipped reproductions. Every tolerance and horizon is pinned here; `scale`
// multiplies grid resolution and lattice extent (1 or 2).
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "supercyc/report.hpp"
#include "supercyc/scenario.hpp"

namespace supercyc {

inline constexpr std::array<const char*, 10> kPresetIds = {
    "thm6-disc",          "prop22-rotation",      "prop21-periodic",      "thm12-punctured-disc",
    "thm12-punctured-plane", "ex14-bilateral-shift", "prop16-weighted-shift", "ex17-multiplication",
    "thm19-isometry",     "cor18-disc-rotation"};

class UnknownPreset : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PresetRun {
  Report report;
  std::vector<Artifact> artifacts;
  // Set by presets that build a shift certificate, so callers can re-verify it.
  std::vector<SeqVector> witness_targets;
  std::optional<WitnessCertificate> certificate;
};

namespace detail {

inline Scenario preset_scenario(std::string name, DomainKind kind, int scale, std::string symbol, std::string weight) {
  Scenario s;
  s.name = std::move(name);
  s.grid.kind = kind;
  s.grid.resolution = 16 * scale;
  s.grid.lo = -16 * scale;
  s.grid.hi = 16 * scale;
  s.symbol = std::move(symbol);
  s.weight = std::move(weight);
  s.horizons = {256, 512, 1024, 100000};
  return s;
}

inline void add_section(PresetRun& run, AnalysisResult r, const std::string& prefix = {}) {
  for (auto& a : r.artifacts) run.artifacts.push_back({prefix + a.filename, std::move(a.content)});
  run.report.sections.push_back(std::move(r.section));
}

inline Section single_check_section(std::string name, std::vector<std::pair<std::string, std::string>> header,
                                    Verdict v) {
  Section s;
  s.name = std::move(name);
  s.header = std::move(header);
  s.checks.push_back(v);
  s.final_verdict = v;
  return s;
}

inline SeqVector geometric_sequence(int hi) {
  SeqVector f;
  f.lo = 0;
  f.tag = SpaceTag::c0N;
  for (int n = 0; n <= hi; ++n) f.entries.push_back({std::ldexp(1.0, -n), 0.0});
  return f;
}

}  // namespace detail

inline PresetRun reproduce(const std::string& id, int scale = 1) {
  using detail::preset_scenario;
  if (scale < 1) throw std::invalid_argument("scale must be positive");
  PresetRun run;
  run.report.title = id;

  if (id == "thm6-disc") {
    auto s = preset_scenario("thm6-disc", DomainKind::ClosedDisc, scale, "(z+0.5)/(1+0.5*z)", "exp(z)");
    s.assertions.analytic = true;
    s.test_functions = {"1"};
    s.quotient_pairs = {{{0.0, 0.0}, {0.5, 0.0}}};
    detail::add_section(run, analyze(s));
  } else if (id == "prop22-rotation") {
    auto s = preset_scenario("prop22-rotation", DomainKind::Circle, scale, "exp(i*0.3)*z", "z");
    s.assertions.no_wandering_interval = true;
    detail::add_section(run, analyze(s));
  } else if (id == "prop21-periodic") {
    detail::add_section(run, analyze(preset_scenario("prop21-periodic", DomainKind::Circle, scale, "-z", "1")));
  } else if (id == "thm12-punctured-disc") {
    auto s = preset_scenario("thm12-punctured-disc", DomainKind::PuncturedDisc, scale, "z/2", "1");
    s.assertions.analytic = true;
    s.test_functions = {"exp(z)+exp(1/z)"};
    detail::add_section(run, analyze(s));
    // z*z is not univalent, so the full pipeline stops at the necessary
    // conditions; the structural branch is run directly.
    const auto d = build_grid(s.grid);
    const auto v = punctured_disc_verdict(Expression::parse("z*z"), Expression::parse("1"), d,
                                          Expression::parse(s.test_functions.front()), true, s.horizons.orbit_n);
    run.report.sections.push_back(detail::single_check_section(
        "thm12-punctured-disc/z*z", {{"domain", to_string(d.kind())}, {"symbol", "z*z"}, {"weight", "1"}}, v));
  } else if (id == "thm12-punctured-plane") {
    const std::pair<const char*, const char*> branches[] = {
        {"2*z", "expansion_"}, {"0.5/z", "involution_"}, {"exp(i)*z", "rotation_"}};
    for (const auto& [sym, prefix] : branches) {
      auto s = preset_scenario(std::string("thm12-punctured-plane/") + sym, DomainKind::PuncturedPlane, scale, sym, "1");
      s.grid.inner_cutoff = 0.05;
      s.grid.outer_cutoff = 4.0;
      s.assertions.analytic = true;
      s.test_functions = {"exp(z)+exp(1/z)"};
      detail::add_section(run, analyze(s), prefix);
    }
  } else if (id == "ex14-bilateral-shift") {
    auto s = preset_scenario("ex14-bilateral-shift/c_inf(Z)", DomainKind::CompactifiedLattice, scale, "z+1", "1");
    detail::add_section(run, analyze(s));
    auto w = s;
    w.name = "ex14-bilateral-shift/witness";
    w.horizons.witness_n = 64 * scale;
    ShiftSpec sh;
    sh.op = ShiftOperator::bilateral();
    SeqVector e0;
    e0.lo = -2;
    e0.entries = {{0, 0}, {0, 0}, {1, 0}, {0, 0}, {0, 0}};
    SeqVector t2;
    t2.lo = -3;
    t2.entries = {{1, 0}, {-1, 0}, {0, 1}, {2, 0}, {0, -1}, {1, 0}, {0.5, 0}};
    sh.targets = {e0, t2};
    w.shift = sh;
    auto wr = witness(w);
    run.witness_targets = sh.targets;
    run.certificate = wr.certificate;
    for (auto& a : wr.artifacts) run.artifacts.push_back({"witness_" + a.filename, std::move(a.content)});
    run.report.sections.push_back(std::move(wr.section));
    auto c0 = preset_scenario("ex14-bilateral-shift/c0(Z)", DomainKind::Lattice, scale, "z+1", "1");
    detail::add_section(run, analyze(c0), "c0_");
  } else if (id == "prop16-weighted-shift") {
    auto s = preset_scenario("prop16-weighted-shift/c_inf(N)", DomainKind::CompactifiedLattice, scale, "z+1", "1/(z+2)");
    s.grid.lo = 0;
    s.grid.hi = 16 * scale;
    detail::add_section(run, analyze(s));

    Section lemma;
    lemma.name = "prop16-weighted-shift/invariant-subspace";
    lemma.header = {{"subspace", "c0(N) inside c_inf(N)"}, {"image", "B_w(c_inf) inside c0"}};
    lemma.checks.push_back(cyclicity_structure_check(2, true));
    lemma.checks.push_back(cyclicity_structure_check(1, true));
    lemma.final_verdict = lemma.checks.front();
    run.report.sections.push_back(std::move(lemma));

    const auto T = ShiftOperator::weighted(harmonic_weights(256));
    const auto g = preimage_in_c_inf(T, SeqVector::basis(0, SpaceTag::c0N));
    auto pv = make_verdict("preimage", Conclusion::Inconclusive);
    pv.add("target", std::string("e_0"));
    pv.add("solved", static_cast<bool>(g));
    if (g) {
      pv.add("g_1", g->at(1));
      pv.add("support", std::to_string(g->lo) + ".." + std::to_string(g->hi()));
      pv.add("limit", g->limit.value_or(Complex{0.0, 0.0}));
    }
    // n <= 36 keeps every window entry f_{n+j}, j <= 3, inside the stored
    // support, so the search never sees the artificial zero tail.
    const auto search = witness_search(T, detail::geometric_sequence(40), SeqVector::basis(0, SpaceTag::c0N), 0, 3, 36);
    auto sv = make_verdict("witness_search", Conclusion::Inconclusive);
    sv.add("candidate", std::string("f_n = 2^-n, n <= 40")).add("horizon", 36.0);
    sv.add("target", std::string("e_0 on [0, 3]"));
    sv.add("best_n", static_cast<double>(search.n)).add("best_lambda", search.lambda).add("best_max_error", search.error);
    sv.caveats.push_back("finite-scale evidence, not a proof");
    Section ev;
    ev.name = "prop16-weighted-shift/harmonic-weights";
    ev.header = {{"weights", "w_n = 1/(n+1), n <= 256"}};
    ev.checks = {pv, sv};
    ev.final_verdict = sv;
    run.report.sections.push_back(std::move(ev));
    run.artifacts.push_back({"search.csv", search_csv({{0, search}})});
  } else if (id == "ex17-multiplication") {
    const auto rep = multiplication_example(16 * scale, 16);
    Section sec;
    sec.name = "ex17-multiplication";
    sec.header = {{"space", "disc algebra"}, {"operator", "f -> z f"}};
    for (const auto& r : rep.fits) {
      auto v = make_verdict("fit " + r.target + " deg " + std::to_string(r.degree), Conclusion::Inconclusive);
      v.add("sup_error", r.sup_error);
      sec.checks.push_back(v);
    }
    sec.checks.push_back(rep.verdict);
    sec.final_verdict = rep.verdict;
    run.report.sections.push_back(std::move(sec));
  } else if (id == "thm19-isometry") {
    detail::add_section(run, analyze(preset_scenario("thm19-isometry", DomainKind::ClosedDisc, scale, "-conj(z)", "exp(i*re(z))")));
  } else if (id == "cor18-disc-rotation") {
    auto s = preset_scenario("cor18-disc-rotation", DomainKind::ClosedDisc, scale, "exp(i*0.7)*z", "2+z");
    s.assertions.analytic = true;
    detail::add_section(run, analyze(s));
  } else {
    throw UnknownPreset("unknown preset id '" + id + "'");
  }
  return run;
}

}  // namespace supercyc
