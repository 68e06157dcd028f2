// The verdict engine: necessary conditions, dynamical obstructions, and the
// domain-specific structural results, each returning a cited Verdict.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "supercyc/domains.hpp"
#include "supercyc/dynamics.hpp"
#include "supercyc/expr.hpp"
#include "supercyc/verdict.hpp"

namespace supercyc {

class SelfMapError : public std::invalid_argument {
 public:
  explicit SelfMapError(const SelfMapReport& r)
      : std::invalid_argument(describe(r)), report_(r) {}
  const SelfMapReport& report() const { return report_; }

 private:
  static std::string describe(const SelfMapReport& r) {
    std::string msg = "symbol is not a self-map: " + std::to_string(r.violations.size()) + " grid point(s) leave X";
    const auto& v = r.violations.front();
    if (!v.point.is_infinity()) {
      msg += ", first at " + fmt(v.point.coordinate());
      msg += v.image ? " -> " + fmt(*v.image) : std::string(" (evaluation failure)");
    }
    return msg;
  }
  SelfMapReport report_;
};

inline void require_self_map(const DomainSpec& d, const FunctionHandle& phi) {
  auto r = self_map_check(d, phi);
  if (!r.ok()) throw SelfMapError(r);
}

// ---------------------------------------------------------------------------
// Necessary conditions on w and phi

struct CheckOutcome {
  bool pass = true;
  std::vector<DomainPoint> witnesses;  // offending point(s) when failing
};

/// The infinity marker is skipped: pointwise convergence on a compactified
/// lattice is taken over the integers only.
inline CheckOutcome zero_free_weight_check(const FunctionHandle& w, const DomainSpec& d) {
  for (const auto& p : d.grid()) {
    if (p.is_infinity()) continue;
    auto v = w.eval(p.coordinate());
    if (!v || std::abs(*v) < 1e-12) return {false, {p}};
  }
  return {};
}

/// Fails when two grid points further apart than 2*tolerance share an image
/// up to tolerance.
inline CheckOutcome univalence_check(const FunctionHandle& phi, const DomainSpec& d) {
  const double tol = d.tolerance();
  std::vector<std::pair<Complex, Complex>> pts;  // (point, image)
  for (const auto& p : d.grid()) {
    if (p.is_infinity()) continue;
    auto img = phi.eval(p.coordinate());
    if (img) pts.emplace_back(p.coordinate(), *img);
  }
  // Sorting by the real part of the image confines the pair scan to a band.
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.second.real() != b.second.real()) return a.second.real() < b.second.real();
    return a.second.imag() < b.second.imag();
  });
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size() && pts[j].second.real() - pts[i].second.real() <= tol; ++j)
      if (std::abs(pts[i].second - pts[j].second) <= tol && std::abs(pts[i].first - pts[j].first) > 2 * tol) {
        auto a = d.snap(pts[i].first), b = d.snap(pts[j].first);
        return {false, {a, b}};
      }
  return {};
}

inline std::string fmt(const DomainPoint& p) {
  if (p.is_infinity()) return "inf";
  if (p.is_index()) return std::to_string(p.index());
  return fmt(p.coordinate());
}

inline Verdict zero_free_verdict(const CheckOutcome& o) {
  if (o.pass) return make_verdict("zero_free_weight", Conclusion::Inconclusive).add("status", std::string("pass"));
  return make_verdict("zero_free_weight", Conclusion::NotTauPSupercyclic, "Prop 2 (i)")
      .add("status", std::string("fail"))
      .add("zero_at", fmt(o.witnesses.front()));
}

inline Verdict univalence_verdict(const CheckOutcome& o) {
  if (o.pass) return make_verdict("univalence", Conclusion::Inconclusive).add("status", std::string("pass"));
  return make_verdict("univalence", Conclusion::NotTauPSupercyclic, "Prop 2 (ii)")
      .add("status", std::string("fail"))
      .add("z1", fmt(o.witnesses[0]))
      .add("z2", fmt(o.witnesses[1]));
}

// ---------------------------------------------------------------------------
// Quotient sequences

enum class QuotientClass { Bounded, ConvergesTo, Unbounded, ApparentlyDense, Indeterminate };

inline const char* to_string(QuotientClass c) {
  switch (c) {
    case QuotientClass::Bounded: return "Bounded";
    case QuotientClass::ConvergesTo: return "ConvergesTo";
    case QuotientClass::Unbounded: return "Unbounded";
    case QuotientClass::ApparentlyDense: return "ApparentlyDense";
    case QuotientClass::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct QuotientEntry {
  int n;
  double log_abs;  // -inf when the numerator vanishes
  double arg;      // principal value

  Complex value() const {
    if (std::isinf(log_abs) && log_abs < 0) return {0.0, 0.0};
    return std::polar(std::exp(log_abs), arg);
  }
};

struct QuotientDiagnostic {
  Complex z1, z2;
  std::vector<QuotientEntry> values;  // non-skipped indices only
  std::vector<int> skipped;           // n where the denominator vanished or failed to evaluate
  QuotientClass classification = QuotientClass::Indeterminate;
  double bound = 0.0;  // max |Q_n| over computed values (Bounded)
  Complex limit{};     // ConvergesTo
};

namespace detail {

inline QuotientClass classify_quotient(QuotientDiagnostic& q) {
  const auto& v = q.values;
  if (v.empty()) return QuotientClass::Indeterminate;
  std::array<bool, 144> hit{};
  for (const auto& e : v) {
    if (!std::isfinite(e.log_abs)) continue;
    const double l10 = e.log_abs / std::numbers::ln10;
    if (l10 < -3.0 || l10 > 3.0) continue;
    const int r = std::clamp(static_cast<int>((l10 + 3.0) / 0.5), 0, 11);
    const int a = std::clamp(static_cast<int>((e.arg + std::numbers::pi) / (std::numbers::pi / 6.0)), 0, 11);
    hit[static_cast<std::size_t>(r * 12 + a)] = true;
  }
  if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) return QuotientClass::ApparentlyDense;

  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& e : v) max_log = std::max(max_log, e.log_abs);
  if (max_log > 700.0) return QuotientClass::Unbounded;
  q.bound = std::exp(max_log);

  const Complex first = v.front().value();
  const bool constant = std::all_of(v.begin(), v.end(), [&](const QuotientEntry& e) {
    return std::abs(e.value() - first) <= 1e-9 * (1.0 + std::abs(first));
  });
  if (constant) return QuotientClass::Bounded;

  const std::size_t window = std::min(v.size(), std::max<std::size_t>(10, v.size() / 8));
  const Complex last = v.back().value();
  bool cauchy = true;
  for (std::size_t k = v.size() - window; k < v.size() && cauchy; ++k)
    cauchy = std::abs(v[k].value() - last) <= 1e-9 * (1.0 + std::abs(last));
  if (cauchy) {
    q.limit = last;
    return QuotientClass::ConvergesTo;
  }

  const std::size_t half = v.size() / 2;
  double first_max = -std::numeric_limits<double>::infinity(), second_max = first_max;
  for (std::size_t k = 0; k < v.size(); ++k) {
    double& m = k < half ? first_max : second_max;
    m = std::max(m, v[k].log_abs);
  }
  if (half > 0 && second_max > first_max + std::numbers::ln2) return QuotientClass::Unbounded;
  return QuotientClass::Bounded;
}

}  // namespace detail

/// Q_n = [prod_{m<n} w(phi^m z1) f(phi^n z1)] / [prod_{m<n} w(phi^m z2) f(phi^n z2)]
/// for n = 0..N, accumulated as log-magnitude plus phase.
inline QuotientDiagnostic quotient_sequence(const FunctionHandle& phi, const FunctionHandle& w, const FunctionHandle& f,
                                            Complex z1, Complex z2, int N) {
  if (z1 == z2) throw PreconditionError("quotient needs two distinct points");
  if (N < 1) throw PreconditionError("quotient horizon must be positive");
  QuotientDiagnostic q;
  q.z1 = z1;
  q.z2 = z2;
  struct Side {
    std::optional<Complex> z;
    double log_mag = 0.0, phase = 0.0;
    bool alive = true;  // no zero factor in the weight product so far
  };
  Side a{z1}, b{z2};
  const double two_pi = 2.0 * std::numbers::pi;
  for (int n = 0; n <= N; ++n) {
    std::optional<Complex> fa, fb;
    if (a.z) fa = f.eval(*a.z);
    if (b.z) fb = f.eval(*b.z);
    const bool den_zero = !b.alive || !fb || *fb == Complex{0.0, 0.0};
    if (den_zero || !fa) {
      q.skipped.push_back(n);
    } else if (!a.alive || *fa == Complex{0.0, 0.0}) {
      q.values.push_back({n, -std::numeric_limits<double>::infinity(), 0.0});
    } else {
      const double l = a.log_mag + std::log(std::abs(*fa)) - b.log_mag - std::log(std::abs(*fb));
      const double ph = std::remainder(a.phase + std::arg(*fa) - b.phase - std::arg(*fb), two_pi);
      q.values.push_back({n, l, ph <= -std::numbers::pi ? ph + two_pi : ph});
    }
    for (Side* s : {&a, &b}) {
      if (!s->z) continue;
      auto wv = w.eval(*s->z);
      if (!wv || *wv == Complex{0.0, 0.0}) {
        s->alive = false;
      } else {
        s->log_mag += std::log(std::abs(*wv));
        s->phase = std::remainder(s->phase + std::arg(*wv), two_pi);
      }
      s->z = phi.eval(*s->z);
    }
  }
  q.classification = detail::classify_quotient(q);
  return q;
}

inline bool quotient_excludes_density(QuotientClass c) {
  return c == QuotientClass::Bounded || c == QuotientClass::ConvergesTo;
}

struct QuotientAnalysis {
  std::vector<QuotientDiagnostic> per_function;
  std::optional<QuotientDiagnostic> pure_weight;  // present when both orbits converge in X
  Verdict verdict;
};

/// Applies the density condition to one point pair. The pure weight form
/// covers every f and gives an operator-level verdict; the f-dependent form
/// only rules out the tested functions.
inline QuotientAnalysis quotient_verdict(const FunctionHandle& phi, const FunctionHandle& w,
                                         const std::vector<FunctionHandle>& fs, Complex z1, Complex z2, int N,
                                         const DomainSpec& d) {
  QuotientAnalysis out;
  for (const auto& f : fs) out.per_function.push_back(quotient_sequence(phi, w, f, z1, z2, N));
  const auto o1 = iterate(phi, z1, N, &d), o2 = iterate(phi, z2, N, &d);
  const bool both_converge = o1.classification == OrbitClass::ConvergesTo &&
                             o2.classification == OrbitClass::ConvergesTo && d.contains(DomainPoint(o1.limit)) &&
                             d.contains(DomainPoint(o2.limit));
  if (both_converge) out.pure_weight = quotient_sequence(phi, w, w, z1, z2, N);

  Verdict v = make_verdict("quotient", Conclusion::Inconclusive);
  v.add("z1", z1).add("z2", z2).add("horizon", static_cast<double>(N));
  for (std::size_t i = 0; i < out.per_function.size(); ++i) {
    const auto& q = out.per_function[i];
    v.add("f" + std::to_string(i) + "_class", std::string(to_string(q.classification)));
    if (q.classification == QuotientClass::ConvergesTo) v.add("f" + std::to_string(i) + "_limit", q.limit);
    if (q.classification == QuotientClass::Bounded) v.add("f" + std::to_string(i) + "_bound", q.bound);
  }
  if (out.pure_weight) {
    const auto& p = *out.pure_weight;
    v.add("orbit_limits", fmt(o1.limit) + " " + fmt(o2.limit));
    v.add("pure_weight_class", std::string(to_string(p.classification)));
    if (quotient_excludes_density(p.classification)) {
      v.conclusion = Conclusion::NotTauPSupercyclic;
      v.citation = "Prop 4";
      v.scope = Scope::Operator;
      out.verdict = v;
      return out;
    }
  }
  const bool all_excluded =
      !out.per_function.empty() && std::all_of(out.per_function.begin(), out.per_function.end(), [](const auto& q) {
        return quotient_excludes_density(q.classification);
      });
  if (all_excluded) {
    v.conclusion = Conclusion::NotTauPSupercyclic;
    v.citation = "Prop 4";
    v.scope = Scope::TestedFamily;
  }
  out.verdict = v;
  return out;
}

/// A τp-supercyclic f cannot vanish along a whole orbit. Lists the tested
/// functions that do, on the first `steps` iterates of each grid point.
inline Verdict non_vanishing_orbit_check(const FunctionHandle& phi, const std::vector<FunctionHandle>& fs,
                                         const DomainSpec& d, int steps) {
  Verdict v = make_verdict("non_vanishing_orbit", Conclusion::Inconclusive);
  std::string excluded;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (const auto& z0 : d.coordinates()) {
      bool nonzero = false;
      std::optional<Complex> z = z0;
      for (int n = 0; n <= steps && z && !nonzero; ++n) {
        auto fv = fs[i].eval(*z);
        nonzero = fv && std::abs(*fv) >= 1e-12;
        z = phi.eval(*z);
      }
      if (!nonzero) {
        excluded += (excluded.empty() ? "" : " ") + std::to_string(i) + "@" + fmt(z0);
        break;
      }
    }
  }
  v.add("excluded_functions", excluded.empty() ? std::string("none") : excluded);
  v.add("criterion", std::string("Remark 3"));
  return v;
}

// ---------------------------------------------------------------------------
// Structural and dynamical obstructions

inline Verdict compact_banach_obstruction(const DomainSpec& d, bool has_nowhere_vanishing) {
  if (!d.is_compact()) return inconclusive("compact_banach", "X is not compact");
  if (!has_nowhere_vanishing) return inconclusive("compact_banach", "no nowhere-vanishing member asserted");
  return make_verdict("compact_banach", Conclusion::NotWeaklySupercyclic, "Thm 4")
      .add("domain", std::string(to_string(d.kind())))
      .add("nowhere_vanishing_member", true);
}

struct ObstructionOptions {
  int orbit_n = 256;
  int max_period = 16;
  DynamicsTolerances tol{};
};

/// Compactness for the pointwise analysis. The compactified lattice carries
/// the pointwise topology of the integers, which is not compact.
inline bool pointwise_compact(const DomainSpec& d) {
  return d.is_compact() && d.kind() != DomainKind::CompactifiedLattice;
}

inline double neighbourhood_scale(const DomainSpec& d) {
  switch (d.kind()) {
    case DomainKind::PuncturedPlane: return d.params().outer_cutoff;
    default: return d.radius();
  }
}

inline Verdict dynamical_obstructions(const FunctionHandle& phi, const FunctionHandle& w, const DomainSpec& d,
                                      const ObstructionOptions& opt = {}) {
  const auto fixed = find_fixed_points(phi, d, opt.tol);
  auto fire = [](const char* clause) {
    return make_verdict("dynamical", Conclusion::NotTauPSupercyclic, std::string("Thm 5 ") + clause)
        .add("clause", std::string(clause));
  };
  if (fixed.size() >= 2) return fire("(i)").add("z1", fixed[0]).add("z2", fixed[1]);

  for (const auto& z1 : d.coordinates()) {
    auto step = phi.eval(z1);
    if (!step || std::abs(*step - z1) <= d.tolerance()) continue;
    const auto t = iterate(phi, z1, opt.orbit_n, &d, opt.tol);
    if (t.classification == OrbitClass::ConvergesTo && d.contains(DomainPoint(t.limit)))
      return fire("(ii)").add("z1", z1).add("limit", t.limit).add("residual", t.residual);
  }

  if (pointwise_compact(d)) {
    const auto periodic = find_periodic_points(phi, d, opt.max_period, opt.tol);
    if (!periodic.empty())
      return fire("(iii)").add("z1", periodic.front().point).add("period", static_cast<double>(periodic.front().period));

    double wmax = 0.0;
    bool w_ok = true;
    for (const auto& z : d.coordinates()) {
      auto v = w.eval(z);
      if (!v) {
        w_ok = false;
        break;
      }
      wmax = std::max(wmax, std::abs(*v));
    }
    if (w_ok)
      for (const auto& z2 : fixed) {
        auto v = w.eval(z2);
        if (v && std::abs(*v) * (1.0 + 1e-12) + 1e-15 >= wmax)
          return fire("(iv)").add("z2", z2).add("w_at_z2", std::abs(*v)).add("max_w", wmax);
      }
  }

  if (!d.is_discrete()) {
    const double s = neighbourhood_scale(d);
    const std::vector<double> radii = {0.5 * s, 0.25 * s, 0.125 * s};
    for (const auto& z0 : fixed) {
      try {
        const auto res = stable_orbit_check(phi, d, z0, radii, opt.tol);
        if (std::all_of(res.begin(), res.end(), [](const auto& r) { return r.invariant; })) {
          auto v = fire("(v)").add("z0", z0);
          for (const auto& r : res) v.add("stable_radius", r.radius);
          return v;
        }
      } catch (const PreconditionError&) {
        // z0 fails the accumulation proxy; try the next fixed point
      }
    }
  }
  auto v = inconclusive("dynamical", "no detector fired");
  v.add("fixed_points", static_cast<double>(fixed.size()));
  return v;
}

/// Structural verdict for an analytic self-map of the closed disc. The
/// evidence names the attracting point when orbits settle, otherwise the
/// fixed point with its stable neighbourhoods.
inline Verdict disc_algebra_verdict(const FunctionHandle& phi, const FunctionHandle& /*w*/, const DomainSpec& disc,
                                    const DynamicsTolerances& tol = {}) {
  if (disc.kind() != DomainKind::ClosedDisc) throw PreconditionError("disc algebra verdict needs a closed disc");
  require_self_map(disc, phi);
  auto v = make_verdict("disc_algebra", Conclusion::NotTauPSupercyclic, "Thm 6");
  const auto dw = denjoy_wolff_point(phi, disc, {}, 4096, tol);
  if (dw.applicable) {
    v.add("denjoy_wolff_point", dw.point)
        .add("denjoy_wolff_kind", std::string(dw.interior ? "interior" : "boundary"))
        .add("seed_agreement", dw.agreement);
    return v;
  }
  v.add("denjoy_wolff", std::string("not applicable: ") + dw.diagnostic);
  const auto fixed = find_fixed_points(phi, disc, tol);
  if (fixed.empty()) return v.add("fixed_point", std::string("none found"));
  v.add("fixed_point", fixed.front());
  const double R = disc.radius();
  try {
    for (const auto& r : stable_orbit_check(phi, disc, fixed.front(), {0.5 * R, 0.25 * R, 0.125 * R}, tol))
      v.add("stable_radius_" + fmt(r.radius), r.invariant);
  } catch (const PreconditionError& e) {
    v.add("stable_orbits", std::string("not checked: ") + e.what());
  }
  return v;
}

/// Rotations z -> lambda z of the closed disc with |lambda| <= 1.
inline Verdict disc_rotation_verdict(const FunctionHandle& phi, const DomainSpec& disc) {
  if (disc.kind() != DomainKind::ClosedDisc) throw PreconditionError("needs a closed disc");
  const double R = disc.radius();
  auto at_r = phi.eval({R, 0.0});
  if (!at_r) return inconclusive("disc_rotation", "symbol fails to evaluate at the radius");
  const Complex lambda = *at_r / R;
  for (const auto& z : disc.coordinates()) {
    auto v = phi.eval(z);
    if (!v || std::abs(*v - lambda * z) > 1e-9 * std::max(1.0, std::abs(z)))
      return inconclusive("disc_rotation", "symbol is not of the form lambda*z");
  }
  if (std::abs(lambda) > 1.0 + 1e-12) return inconclusive("disc_rotation", "|lambda| > 1");
  auto v = make_verdict("disc_rotation", Conclusion::NotTauPSupercyclic, "Cor 18").add("lambda", lambda);
  for (const auto& r : stable_orbit_check(phi, disc, {0.0, 0.0}, {0.5 * R, 0.25 * R, 0.125 * R}))
    v.add("stable_radius_" + fmt(r.radius), r.invariant);
  return v;
}

/// Surjective isometries of C(closed disc): |w| = 1 and phi a homeomorphism,
/// checked as injective on the grid and boundary-preserving.
inline Verdict isometry_verdict(const FunctionHandle& phi, const FunctionHandle& w, const DomainSpec& disc, int N = 512) {
  if (disc.kind() != DomainKind::ClosedDisc) throw PreconditionError("needs a closed disc");
  const double R = disc.radius();
  for (const auto& z : disc.coordinates()) {
    auto wv = w.eval(z);
    if (!wv || std::abs(std::abs(*wv) - 1.0) > 1e-9) return inconclusive("isometry", "|w| is not identically 1");
  }
  if (!univalence_check(phi, disc).pass) return inconclusive("isometry", "symbol is not injective");
  for (const auto& z : disc.coordinates()) {
    if (std::abs(std::abs(z) - R) > disc.tolerance()) continue;
    auto img = phi.eval(z);
    if (!img || std::abs(std::abs(*img) - R) > disc.tolerance())
      return inconclusive("isometry", "boundary circle is not preserved");
  }
  const auto fixed = find_fixed_points(phi, disc);
  if (fixed.empty()) return inconclusive("isometry", "no fixed point located");
  const Complex z0 = fixed.front();
  std::optional<Complex> z1;
  for (const auto& z : disc.coordinates())
    if (std::abs(z - z0) > disc.spacing()) {
      z1 = z;
      break;
    }
  if (!z1) return inconclusive("isometry", "no second point");
  const auto q = quotient_sequence(phi, w, FunctionHandle::constant(1.0), *z1, z0, N);
  auto v = make_verdict("isometry", Conclusion::NotTauPSupercyclic, "Thm 19");
  v.add("fixed_point", z0).add("z1", *z1).add("quotient_class", std::string(to_string(q.classification)));
  v.add("quotient_bound", q.bound);
  return v;
}

// ---------------------------------------------------------------------------
// Spectral diagnostic on finite matrices

struct OperatorMatrix {
  Eigen::MatrixXcd entries;

  std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
  double norm_estimate() const {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(entries);
    return svd.singularValues()(0);
  }
};

inline Verdict spectral_obstruction(const OperatorMatrix& T) {
  const auto& A = T.entries;
  if (A.rows() != A.cols()) throw PreconditionError("matrix must be square");
  if (A.rows() < 2) throw PreconditionError("dimension must be at least 2");
  if (!A.allFinite()) throw NumericError("matrix has non-finite entries");
  auto spectral_radius = [](const Eigen::MatrixXcd& M) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
  };
  const double rho = spectral_radius(A);
  const double rho_adj = spectral_radius(A.adjoint());
  const double norm = T.norm_estimate();
  Verdict v = make_verdict("spectral", Conclusion::Inconclusive);
  v.add("dimension", static_cast<double>(A.rows()))
      .add("norm", norm)
      .add("spectral_radius", rho)
      .add("adjoint_spectral_radius", rho_adj);
  v.caveats.push_back("truncation diagnostic");
  if (std::max(rho, rho_adj) >= norm - 1e-9) {
    v.conclusion = Conclusion::NotWeaklySupercyclic;
    v.citation = "Cor 10";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Laurent projections and the punctured domains

struct LaurentRow {
  int k;
  Complex p_f;        // P_k(f)
  Complex p_fg;       // P_k(f o g_a)
  Complex a_k_p_f;    // a^k P_k(f)
  double residual;    // |P_k(f o g_a) - a^k P_k(f)|
};

struct LaurentResult {
  std::vector<LaurentRow> rows;
  int quadrature_points = 0;
  double max_residual = 0.0;
  bool identity_holds = false;  // residual <= 1e-9 (1 + |P_k(f)|) for every k
  Verdict verdict;
};

namespace detail {

using LComplex = std::complex<long double>;

// Trapezoid sums for P_k(f) on |z| = r and P_k(f o g_a) on |z| = r/|a|. The
// second contour is rotated by -arg(a) so that a*z_j lands on the same nodes
// as the first; both projections then use the same samples of f.
struct LaurentSums {
  std::vector<LComplex> p_f, p_fg;
};

inline LaurentSums laurent_sums(Complex a, const FunctionHandle& f, double r, const std::vector<int>& ks, int M) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double abs_a = std::abs(LComplex(a.real(), a.imag()));
  const long double arg_a = std::atan2(static_cast<long double>(a.imag()), static_cast<long double>(a.real()));
  const long double rho = static_cast<long double>(r) / abs_a;
  LaurentSums s;
  s.p_f.assign(ks.size(), 0.0L);
  s.p_fg.assign(ks.size(), 0.0L);
  for (int j = 0; j < M; ++j) {
    const long double theta = two_pi * j / M;
    const Complex node{static_cast<double>(r * std::cos(theta)), static_cast<double>(r * std::sin(theta))};
    auto fv = f.eval(node);
    if (!fv) throw PreconditionError("test function fails to evaluate on the contour at " + fmt(node));
    const LComplex sample(fv->real(), fv->imag());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const int k = ks[i];
      s.p_f[i] += sample * std::polar(std::pow(static_cast<long double>(r), -k), -k * theta);
      s.p_fg[i] += sample * std::polar(std::pow(rho, -k), -k * (theta - arg_a));
    }
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    s.p_f[i] /= static_cast<long double>(M);
    s.p_fg[i] /= static_cast<long double>(M);
  }
  return s;
}

// Starts at M = 4 max|k| + 64 and doubles until both projections move by at
// most 1e-6 (relative), up to eight doublings.
inline LaurentSums converged_laurent_sums(Complex a, const FunctionHandle& f, double r, const std::vector<int>& ks,
                                          int& M) {
  int kmax = 0;
  for (int k : ks) kmax = std::max(kmax, std::abs(k));
  M = 4 * kmax + 64;
  auto sums = laurent_sums(a, f, r, ks, M);
  for (int doubling = 0;; ++doubling) {
    auto finer = laurent_sums(a, f, r, ks, 2 * M);
    bool converged = true;
    for (std::size_t i = 0; i < ks.size() && converged; ++i)
      converged = std::abs(finer.p_f[i] - sums.p_f[i]) <= 1e-6L * (1.0L + std::abs(finer.p_f[i])) &&
                  std::abs(finer.p_fg[i] - sums.p_fg[i]) <= 1e-6L * (1.0L + std::abs(finer.p_fg[i]));
    sums = std::move(finer);
    M *= 2;
    if (converged) return sums;
    if (doubling >= 8) throw NumericError("Laurent quadrature did not converge");
  }
}

inline Complex to_double(LComplex z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

}  // namespace detail

/// Laurent coefficients P_k(f) on the circle of radius r.
inline std::vector<Complex> laurent_projections(const FunctionHandle& f, double r, const std::vector<int>& ks) {
  int M = 0;
  const auto sums = detail::converged_laurent_sums({1.0, 0.0}, f, r, ks, M);
  std::vector<Complex> out;
  for (const auto& p : sums.p_f) out.push_back(detail::to_double(p));
  return out;
}

/// Checks P_k(f o g_a) = a^k P_k(f) for g_a(z) = a z and uses the witness
/// projection (k = -1 for |a| < 1, k = +1 for |a| > 1), whose coefficient
/// grows by |a|^{-k} per iterate, for the obstruction.
inline LaurentResult laurent_obstruction(Complex a, const FunctionHandle& f, double radius, std::vector<int> ks) {
  const double abs_a = std::abs(a);
  if (!(abs_a > 0.0) || std::abs(abs_a - 1.0) < 1e-12) throw PreconditionError("need 0 < |a| < 1 or |a| > 1");
  if (!(radius > 0.0)) throw PreconditionError("contour radius must be positive");
  const int witness_k = abs_a < 1.0 ? -1 : 1;
  if (std::find(ks.begin(), ks.end(), witness_k) == ks.end()) ks.push_back(witness_k);
  if (std::find(ks.begin(), ks.end(), 0) == ks.end()) ks.push_back(0);

  int M = 0;
  const auto sums = detail::converged_laurent_sums(a, f, radius, ks, M);

  LaurentResult res;
  res.quadrature_points = M;
  res.identity_holds = true;
  const detail::LComplex la(a.real(), a.imag());
  Complex p_witness{}, p_zero{};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const int k = ks[i];
    detail::LComplex ak = 1.0L;
    for (int m = 0; m < std::abs(k); ++m) ak *= la;
    if (k < 0) ak = 1.0L / ak;
    const detail::LComplex rhs = ak * sums.p_f[i];
    const long double resid = std::abs(sums.p_fg[i] - rhs);
    LaurentRow row{k, detail::to_double(sums.p_f[i]), detail::to_double(sums.p_fg[i]), detail::to_double(rhs),
                   static_cast<double>(resid)};
    res.max_residual = std::max(res.max_residual, row.residual);
    if (row.residual > 1e-9 * (1.0 + std::abs(row.p_f))) res.identity_holds = false;
    if (k == witness_k) p_witness = row.p_f;
    if (k == 0) p_zero = row.p_f;
    res.rows.push_back(row);
  }

  Verdict v = make_verdict("laurent", Conclusion::Inconclusive);
  v.add("a", a).add("quadrature_points", static_cast<double>(M)).add("max_identity_residual", res.max_residual);
  v.add("witness_projection", static_cast<double>(witness_k)).add("P_witness_f", p_witness).add("P_0_f", p_zero);
  v.add("growth_per_iterate", std::pow(abs_a, -witness_k));
  if (res.identity_holds) {
    v.conclusion = Conclusion::NotWeaklySupercyclic;
    v.citation = "Thm 12";
  } else {
    v.add("reason", std::string("projection identity residual above tolerance"));
  }
  res.verdict = v;
  return res;
}

enum class PuncturedForm { Linear, Inversion, NotInjectiveForm };

inline const char* to_string(PuncturedForm f) {
  switch (f) {
    case PuncturedForm::Linear: return "az";
    case PuncturedForm::Inversion: return "a/z";
    case PuncturedForm::NotInjectiveForm: return "notInjectiveForm";
  }
  return "?";
}

struct PuncturedClassification {
  PuncturedForm form = PuncturedForm::NotInjectiveForm;
  Complex a{};
  bool self_map = false;
};

/// Fits a from phi(1) and tests a*z, then a/z, on the whole grid.
inline PuncturedClassification punctured_self_map_classifier(const FunctionHandle& phi, const DomainSpec& d) {
  PuncturedClassification out;
  out.self_map = self_map_check(d, phi).ok();
  auto at_one = phi.eval({1.0, 0.0});
  if (!at_one || *at_one == Complex{0.0, 0.0}) return out;
  out.a = *at_one;
  auto fits = [&](auto model) {
    for (const auto& z : d.coordinates()) {
      auto v = phi.eval(z);
      const Complex m = model(z);
      if (!v || std::abs(*v - m) > 1e-8 * std::abs(m)) return false;
    }
    return true;
  };
  if (fits([&](Complex z) { return out.a * z; }))
    out.form = PuncturedForm::Linear;
  else if (fits([&](Complex z) { return out.a / z; }))
    out.form = PuncturedForm::Inversion;
  return out;
}

inline bool weight_is_one(const FunctionHandle& w, const DomainSpec& d) {
  for (const auto& z : d.coordinates()) {
    auto v = w.eval(z);
    if (!v || std::abs(*v - Complex{1.0, 0.0}) > 1e-12) return false;
  }
  return true;
}

inline std::vector<Complex> ring_sample(double r, int n = 64) {
  std::vector<Complex> K;
  for (int j = 0; j < n; ++j) K.push_back(std::polar(r, 2.0 * std::numbers::pi * j / n));
  return K;
}

/// Composition operators on the punctured disc: extension at 0, then
/// injectivity and runaway, then the Laurent projection argument.
inline Verdict punctured_disc_verdict(const FunctionHandle& phi, const FunctionHandle& w, const DomainSpec& d,
                                      const FunctionHandle& f, bool analytic, int N = 64) {
  if (d.kind() != DomainKind::PuncturedDisc) throw PreconditionError("needs a punctured disc");
  if (!analytic) return inconclusive("punctured_disc", "symbol not asserted holomorphic");
  if (!weight_is_one(w, d)) return inconclusive("punctured_disc", "only unweighted composition operators are covered");
  require_self_map(d, phi);
  const double r0 = 0.5 * (d.params().inner_cutoff + d.radius());
  // The holomorphic extension has value P_0(phi) and derivative P_1(phi) at 0.
  const auto proj = laurent_projections(phi, r0, {0, 1});
  const Complex at_zero = proj[0];
  const Complex derivative = proj[1];
  if (std::abs(at_zero) > 1e-8)
    return make_verdict("punctured_disc", Conclusion::NotWeaklySupercyclic, "Thm 12")
        .add("branch", std::string("extends across 0"))
        .add("extension_at_0", at_zero);
  if (!univalence_check(phi, d).pass || std::abs(derivative) < 1e-8)
    return make_verdict("punctured_disc", Conclusion::NotWeaklySupercyclic, "Cor 11")
        .add("branch", std::string("not injective"))
        .add("derivative_at_0", derivative);
  const auto run = strongly_runaway_check(phi, ring_sample(r0), N);
  if (!run.resolved) return inconclusive("punctured_disc", "runaway check unresolved at this horizon");
  if (!run.runaway)
    return make_verdict("punctured_disc", Conclusion::NotWeaklySupercyclic, "Cor 11")
        .add("branch", std::string("not strongly runaway"))
        .add("derivative_at_0", derivative);
  auto v = laurent_obstruction(derivative, f, r0, {-2, -1, 0, 1, 2}).verdict;
  v.check = "punctured_disc";
  v.add("branch", std::string("model map g_a"));
  v.add("runaway_n0", static_cast<double>(*run.n0));
  return v;
}

inline Verdict punctured_plane_verdict(const FunctionHandle& phi, const FunctionHandle& w, const DomainSpec& d,
                                       const FunctionHandle& f, bool analytic, int N = 64) {
  if (d.kind() != DomainKind::PuncturedPlane) throw PreconditionError("needs a punctured plane");
  if (!analytic) return inconclusive("punctured_plane", "symbol not asserted holomorphic");
  if (!weight_is_one(w, d)) return inconclusive("punctured_plane", "only unweighted composition operators are covered");
  const auto cls = punctured_self_map_classifier(phi, d);
  if (!cls.self_map) throw SelfMapError(self_map_check(d, phi));
  const auto& p = d.params();
  const double r = (p.inner_cutoff < 1.0 && 1.0 < p.outer_cutoff) ? 1.0 : std::sqrt(p.inner_cutoff * p.outer_cutoff);
  switch (cls.form) {
    case PuncturedForm::NotInjectiveForm:
      return make_verdict("punctured_plane", Conclusion::NotWeaklySupercyclic, "Thm 12")
          .add("form", std::string(to_string(cls.form)))
          .add("branch", std::string("not injective"));
    case PuncturedForm::Inversion: {
      double worst = 0.0;
      for (const auto& z : d.coordinates()) {
        auto once = phi.eval(z);
        auto twice = once ? phi.eval(*once) : std::nullopt;
        worst = twice ? std::max(worst, std::abs(*twice - z)) : std::numeric_limits<double>::infinity();
      }
      return make_verdict("punctured_plane", Conclusion::NotWeaklySupercyclic, "Thm 12")
          .add("form", std::string(to_string(cls.form)))
          .add("a", cls.a)
          .add("branch", std::string("involution"))
          .add("max_square_residual", worst);
    }
    case PuncturedForm::Linear: break;
  }
  if (std::abs(std::abs(cls.a) - 1.0) <= 1e-12) {
    const auto run = strongly_runaway_check(phi, ring_sample(r), N);
    auto v = make_verdict("punctured_plane", Conclusion::NotWeaklySupercyclic, "Cor 11")
                 .add("form", std::string(to_string(cls.form)))
                 .add("a", cls.a)
                 .add("branch", std::string("rotation"))
                 .add("runaway", run.runaway);
    if (run.runaway || !run.resolved) {
      v.conclusion = Conclusion::Inconclusive;
      v.citation.clear();
      v.add("reason", std::string("rotation sample did not return within the horizon"));
    }
    return v;
  }
  auto v = laurent_obstruction(cls.a, f, r, {-2, -1, 0, 1, 2}).verdict;
  v.check = "punctured_plane";
  v.add("form", std::string(to_string(cls.form)));
  v.add("branch", std::string(std::abs(cls.a) < 1.0 ? "contraction" : "expansion"));
  return v;
}

// ---------------------------------------------------------------------------
// The circle

struct CircleOptions {
  bool no_wandering_interval = false;  // user assertion
  int rotation_n = 100000;
  int max_period = 16;
  DynamicsTolerances tol{};
};

inline Verdict circle_verdict(const FunctionHandle& phi, const FunctionHandle& w, const DomainSpec& d,
                              const CircleOptions& opt = {}) {
  if (d.kind() != DomainKind::Circle) throw PreconditionError("needs a circle");
  require_self_map(d, phi);
  const auto inj = univalence_check(phi, d);
  if (!inj.pass) return univalence_verdict(inj);

  auto base = [&](const char* citation) {
    return make_verdict("circle", Conclusion::NotTauPSupercyclic, citation)
        .add("homeomorphism", std::string("injective on the grid (Lemma 20)"));
  };
  const auto fixed = find_fixed_points(phi, d, opt.tol);
  if (!fixed.empty()) return base("Prop 21").add("periodic_point", fixed.front()).add("period", 1.0);
  const auto periodic = find_periodic_points(phi, d, opt.max_period, opt.tol);
  if (!periodic.empty())
    return base("Prop 21")
        .add("periodic_point", periodic.front().point)
        .add("period", static_cast<double>(periodic.front().period));

  bool unimodular = true;
  for (const auto& z : d.coordinates()) {
    auto v = w.eval(z);
    if (!v || std::abs(std::abs(*v) - 1.0) > 1e-9) {
      unimodular = false;
      break;
    }
  }
  const double R = d.radius();
  if (auto at_r = phi.eval({R, 0.0})) {
    const Complex lambda = *at_r / R;
    bool rotation = std::abs(std::abs(lambda) - 1.0) <= 1e-9;
    for (const auto& z : d.coordinates()) {
      if (!rotation) break;
      auto v = phi.eval(z);
      rotation = v && std::abs(*v - lambda * z) <= 1e-9 * R;
    }
    if (rotation && unimodular) return base("Prop 22").add("lambda", lambda).add("unimodular_weight", true);
  }

  RotationData rot;
  try {
    rot = rotation_number(phi, opt.rotation_n, R);
  } catch (const RotationError& e) {
    return inconclusive("circle", e.what());
  }
  Verdict v = make_verdict("circle", Conclusion::Inconclusive);
  v.add("rotation_number", rot.rotation_number).add("rotation_confidence", rot.confidence);
  if (rot.rational) v.add("likely_rational", std::to_string(rot.rational->first) + "/" + std::to_string(rot.rational->second));
  v.add("unimodular_weight", unimodular).add("no_wandering_interval_asserted", opt.no_wandering_interval);
  if (!rot.rational && unimodular && opt.no_wandering_interval) {
    v.conclusion = Conclusion::NotTauPSupercyclic;
    v.citation = "Thm 23";
  } else {
    v.add("reason", std::string("hypotheses for the conjugacy argument not all met"));
  }
  return v;
}

}  // namespace supercyc
