// Scenario model and the ordered analysis pipeline.
#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supercyc/criteria.hpp"
#include "supercyc/domains.hpp"
#include "supercyc/dynamics.hpp"
#include "supercyc/expr.hpp"
#include "supercyc/shiftlab.hpp"
#include "supercyc/verdict.hpp"

namespace supercyc {

struct Horizons {
  int orbit_n = 256;
  int quotient_n = 512;
  int witness_n = 1024;
  int rotation_n = 100000;
};

struct Assertions {
  bool analytic = false;
  bool no_wandering_interval = false;
  bool nowhere_vanishing_member = true;  // C(X) contains the constants
};

struct ShiftSpec {
  ShiftOperator op;
  std::vector<SeqVector> targets;
  std::vector<double> epsilons;  // empty: default schedule
  std::optional<int> codimension;
  bool image_inside = true;
};

struct Scenario {
  std::string name = "scenario";
  GridParams grid;
  std::string symbol;
  std::string weight = "1";
  std::vector<std::string> test_functions;
  std::vector<std::pair<Complex, Complex>> quotient_pairs;
  Assertions assertions;
  Horizons horizons;
  DynamicsTolerances tolerances;
  std::optional<ShiftSpec> shift;
};

struct Artifact {
  std::string filename;
  std::string content;
};

/// One analysed configuration: ordered checks and the final verdict.
struct Section {
  std::string name;
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<Verdict> checks;
  Verdict final_verdict;
};

struct AnalysisResult {
  Section section;
  std::vector<Artifact> artifacts;
};

// ---------------------------------------------------------------------------
// CSV emitters

namespace detail {
inline std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}
}  // namespace detail

inline std::string orbit_csv(const OrbitTrace& t) {
  std::string out = "step,re,im\n";
  for (std::size_t k = 0; k < t.points.size(); ++k)
    out += std::to_string(k) + "," + detail::csv_num(t.points[k].real()) + "," + detail::csv_num(t.points[k].imag()) + "\n";
  return out;
}

inline std::string rotation_csv(const RotationData& r) {
  std::string out = "step,lift\n";
  for (std::size_t k = 0; k < r.lift_samples.size(); ++k)
    out += std::to_string(k) + "," + detail::csv_num(r.lift_samples[k]) + "\n";
  return out;
}

inline std::string quotient_csv(const QuotientDiagnostic& q) {
  std::string out = "n,log_abs_q,arg_q\n";
  for (const auto& e : q.values)
    out += std::to_string(e.n) + "," + (std::isfinite(e.log_abs) ? detail::csv_num(e.log_abs) : std::string("-inf")) +
           "," + detail::csv_num(e.arg) + "\n";
  return out;
}

inline std::string search_csv(const std::vector<std::pair<std::size_t, WitnessSearchResult>>& searches) {
  std::string out = "target_id,n,re_lambda,im_lambda,error\n";
  for (const auto& [id, s] : searches)
    for (const auto& row : s.table)
      out += std::to_string(id) + "," + std::to_string(row.n) + "," + detail::csv_num(row.lambda.real()) + "," +
             detail::csv_num(row.lambda.imag()) + "," + detail::csv_num(row.error) + "\n";
  return out;
}

inline std::string certificate_csv(const WitnessCertificate& c) {
  std::string out = "target_id,n,re_lambda,im_lambda,error\n";
  for (const auto& a : c.approximations)
    out += std::to_string(a.target_id) + "," + std::to_string(a.n) + "," + detail::csv_num(a.lambda.real()) + "," +
           detail::csv_num(a.lambda.imag()) + "," + detail::csv_num(a.window_error) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

inline std::vector<std::pair<std::string, std::string>> scenario_header(const Scenario& s, const DomainSpec& d) {
  std::vector<std::pair<std::string, std::string>> h;
  h.emplace_back("domain", to_string(d.kind()));
  h.emplace_back("grid_points", std::to_string(d.grid().size()));
  h.emplace_back("resolution", std::to_string(s.grid.resolution));
  h.emplace_back("symbol", s.symbol);
  h.emplace_back("weight", s.weight);
  std::string fs;
  for (const auto& f : s.test_functions) fs += (fs.empty() ? "" : "; ") + f;
  h.emplace_back("test_functions", fs.empty() ? "none" : fs);
  return h;
}

/// Self-map check, necessary conditions, dynamical detectors, quotient
/// checks, then the structural verdicts for the domain kind. A failed
/// necessary condition skips everything but the quotient checks and is the
/// final verdict. Otherwise the final verdict is the last conclusive
/// structural verdict, else the last conclusive check, else Inconclusive.
inline AnalysisResult analyze(const Scenario& s) {
  const auto d = build_grid(s.grid);
  const auto phi = Expression::parse(s.symbol);
  const auto w = Expression::parse(s.weight);
  std::vector<FunctionHandle> fs;
  for (const auto& src : s.test_functions) fs.push_back(Expression::parse(src));

  AnalysisResult out;
  auto& sec = out.section;
  sec.name = s.name;
  sec.header = scenario_header(s, d);
  require_self_map(d, phi);
  sec.checks.push_back(make_verdict("self_map", Conclusion::Inconclusive).add("status", std::string("pass")));

  auto finish = [&](std::optional<Verdict> structural) {
    if (structural) {
      sec.final_verdict = *structural;
      return;
    }
    sec.final_verdict = inconclusive("final", "no check was conclusive");
    for (const auto& v : sec.checks)
      if (v.conclusive()) sec.final_verdict = v;
  };

  // Requested quotient pairs are evaluated even after a necessary condition
  // fails; they need neither a zero-free weight nor univalence.
  auto run_quotients = [&] {
    for (std::size_t i = 0; i < s.quotient_pairs.size(); ++i) {
      const auto& [z1, z2] = s.quotient_pairs[i];
      auto qa = quotient_verdict(phi, w, fs, z1, z2, s.horizons.quotient_n, d);
      qa.verdict.check = "quotient_" + std::to_string(i);
      sec.checks.push_back(qa.verdict);
      for (std::size_t j = 0; j < qa.per_function.size(); ++j)
        out.artifacts.push_back({"quotient_" + std::to_string(i) + "_f" + std::to_string(j) + ".csv",
                                 quotient_csv(qa.per_function[j])});
      if (i == 0) out.artifacts.push_back({"orbit.csv", orbit_csv(iterate(phi, z1, s.horizons.orbit_n, &d, s.tolerances))});
    }
  };

  const auto zero_free = zero_free_verdict(zero_free_weight_check(w, d));
  sec.checks.push_back(zero_free);
  if (zero_free.conclusive()) {
    run_quotients();
    finish(zero_free);
    return out;
  }
  const auto univalent = univalence_verdict(univalence_check(phi, d));
  sec.checks.push_back(univalent);
  if (univalent.conclusive()) {
    run_quotients();
    finish(univalent);
    return out;
  }

  ObstructionOptions opt;
  opt.orbit_n = s.horizons.orbit_n;
  opt.tol = s.tolerances;
  sec.checks.push_back(dynamical_obstructions(phi, w, d, opt));

  if (!fs.empty()) sec.checks.push_back(non_vanishing_orbit_check(phi, fs, d, std::min(64, s.horizons.orbit_n)));
  run_quotients();

  std::optional<Verdict> structural;
  auto structural_check = [&](Verdict v) {
    if (v.conclusive()) structural = v;
    sec.checks.push_back(std::move(v));
  };
  if (d.is_compact()) structural_check(compact_banach_obstruction(d, s.assertions.nowhere_vanishing_member));
  const FunctionHandle probe = fs.empty() ? Expression::parse("exp(z)+exp(1/z)") : fs.front();
  switch (d.kind()) {
    case DomainKind::ClosedDisc:
      structural_check(isometry_verdict(phi, w, d, s.horizons.quotient_n));
      if (s.assertions.analytic) structural_check(disc_algebra_verdict(phi, w, d, s.tolerances));
      structural_check(disc_rotation_verdict(phi, d));
      break;
    case DomainKind::Circle: {
      CircleOptions co;
      co.no_wandering_interval = s.assertions.no_wandering_interval;
      co.rotation_n = s.horizons.rotation_n;
      co.tol = s.tolerances;
      structural_check(circle_verdict(phi, w, d, co));
      try {
        out.artifacts.push_back({"rotation.csv", rotation_csv(rotation_number(phi, std::min(s.horizons.rotation_n, 4096), d.radius()))});
      } catch (const RotationError&) {
        // not an orientation-preserving homeomorphism; the verdict records it
      }
      break;
    }
    case DomainKind::PuncturedDisc:
      structural_check(punctured_disc_verdict(phi, w, d, probe, s.assertions.analytic, s.horizons.orbit_n));
      break;
    case DomainKind::PuncturedPlane:
      structural_check(punctured_plane_verdict(phi, w, d, probe, s.assertions.analytic, s.horizons.orbit_n));
      break;
    case DomainKind::Lattice:
    case DomainKind::CompactifiedLattice:
      if (s.shift && s.shift->codimension)
        structural_check(cyclicity_structure_check(*s.shift->codimension, s.shift->image_inside));
      break;
  }
  finish(structural);
  return out;
}

struct WitnessRun {
  Section section;
  WitnessCertificate certificate;
  std::vector<std::pair<std::size_t, WitnessSearchResult>> searches;
  std::vector<Artifact> artifacts;
};

/// Certificate construction on the bilateral shift, re-verified by a
/// least-squares search over n <= witness_n for each target.
inline WitnessRun witness(const Scenario& s) {
  if (!s.shift) throw PreconditionError("scenario has no shift section");
  if (s.shift->targets.empty()) throw PreconditionError("shift section lists no targets");
  WitnessRun run;
  run.section.name = s.name;
  run.section.header.emplace_back("shift", s.shift->op.kind == ShiftKind::Bilateral ? "bilateralBackward" : "unilateralWeightedBackward");
  run.section.header.emplace_back("targets", std::to_string(s.shift->targets.size()));
  if (s.shift->op.kind == ShiftKind::Bilateral) {
    run.certificate = construct_supercyclic_vector(s.shift->targets, s.shift->epsilons);
    auto v = witness_verdict(run.certificate);
    run.section.checks.push_back(v);
    run.artifacts.push_back({"certificate.csv", certificate_csv(run.certificate)});
  }
  const SeqVector f = s.shift->op.kind == ShiftKind::Bilateral ? run.certificate.vector : s.shift->targets.front();
  double worst = 0.0;
  for (std::size_t j = 0; j < s.shift->targets.size(); ++j) {
    const auto& g = s.shift->targets[j];
    const std::int64_t K = std::max(std::abs(g.lo), std::abs(g.hi()));
    const std::int64_t a = s.shift->op.kind == ShiftKind::Bilateral ? -K : 0;
    auto res = witness_search(s.shift->op, f, g, a, std::max(a, g.hi()), s.horizons.witness_n);
    worst = std::max(worst, res.error);
    run.searches.emplace_back(j, std::move(res));
  }
  auto sv = make_verdict("witness_search", Conclusion::Inconclusive).add("best_max_error", worst);
  sv.add("horizon", static_cast<double>(s.horizons.witness_n));
  sv.caveats.push_back("finite-scale evidence, not a proof");
  run.section.checks.push_back(sv);
  run.artifacts.push_back({"search.csv", search_csv(run.searches)});
  run.section.final_verdict = run.section.checks.front();
  return run;
}

}  // namespace supercyc
