// Backward shifts on sequence spaces, supercyclic-vector construction, witness
// search, and the polynomial density experiment for multiplication by z.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "supercyc/domains.hpp"
#include "supercyc/dynamics.hpp"
#include "supercyc/expr.hpp"
#include "supercyc/verdict.hpp"

namespace supercyc {

enum class SpaceTag { c0Z, cInfZ, c0N, cInfN, lInf };

inline const char* to_string(SpaceTag t) {
  switch (t) {
    case SpaceTag::c0Z: return "c0Z";
    case SpaceTag::cInfZ: return "cInfZ";
    case SpaceTag::c0N: return "c0N";
    case SpaceTag::cInfN: return "cInfN";
    case SpaceTag::lInf: return "lInf";
  }
  return "?";
}

/// A sequence stored on the integer interval [lo, hi]. Without a limit value
/// the entries outside the support are zero; with one, the stored entries are
/// a leading window of a sequence whose tail tends to that limit.
struct SeqVector {
  std::int64_t lo = 0;
  std::vector<Complex> entries;
  SpaceTag tag = SpaceTag::c0Z;
  std::optional<Complex> limit;

  std::int64_t hi() const { return lo + static_cast<std::int64_t>(entries.size()) - 1; }
  bool empty() const { return entries.empty(); }

  Complex at(std::int64_t j) const {
    if (j < lo || j > hi()) return {0.0, 0.0};
    return entries[static_cast<std::size_t>(j - lo)];
  }

  static SeqVector basis(std::int64_t j, SpaceTag tag = SpaceTag::c0Z) { return {j, {{1.0, 0.0}}, tag, std::nullopt}; }

  friend bool operator==(const SeqVector&, const SeqVector&) = default;
};

/// Maximum modulus over the stored entries.
inline double sup_norm(const SeqVector& f) {
  double m = 0.0;
  for (const auto& e : f.entries) m = std::max(m, std::abs(e));
  return m;
}

/// alpha*f + beta*g on the union of supports.
inline SeqVector combine(Complex alpha, const SeqVector& f, Complex beta, const SeqVector& g) {
  SeqVector out;
  out.tag = f.tag;
  if (f.empty() && g.empty()) return out;
  out.lo = f.empty() ? g.lo : g.empty() ? f.lo : std::min(f.lo, g.lo);
  const std::int64_t hi = f.empty() ? g.hi() : g.empty() ? f.hi() : std::max(f.hi(), g.hi());
  for (std::int64_t j = out.lo; j <= hi; ++j) out.entries.push_back(alpha * f.at(j) + beta * g.at(j));
  return out;
}

/// c0 decay proxy: the outer 10% of the support at each end is at most
/// 1e-6 times the largest entry.
inline bool c0_decay_proxy(const SeqVector& f) {
  const double peak = sup_norm(f);
  if (peak == 0.0) return true;
  const auto n = f.entries.size();
  const auto edge = std::max<std::size_t>(1, n / 10);
  for (std::size_t i = 0; i < edge; ++i)
    if (std::abs(f.entries[i]) > 1e-6 * peak || std::abs(f.entries[n - 1 - i]) > 1e-6 * peak) return false;
  return true;
}

enum class ShiftKind { Bilateral, UnilateralWeighted };

struct ShiftOperator {
  ShiftKind kind = ShiftKind::Bilateral;
  std::vector<double> weights;  // weights[n - 1] = w_n, unilateral only
  bool decays = true;           // lim w_n = 0

  static ShiftOperator bilateral() { return {}; }
  static ShiftOperator weighted(std::vector<double> w, bool decays = true) {
    for (double x : w)
      if (!(x > 0.0)) throw PreconditionError("shift weights must be positive");
    return {ShiftKind::UnilateralWeighted, std::move(w), decays};
  }

  double weight(std::int64_t n) const {
    if (n < 1 || n > static_cast<std::int64_t>(weights.size()))
      throw PreconditionError("weight w_" + std::to_string(n) + " is not stored");
    return weights[static_cast<std::size_t>(n - 1)];
  }
};

/// w_n = 1/(n+1) for n = 1..count.
inline std::vector<double> harmonic_weights(std::size_t count) {
  std::vector<double> w(count);
  for (std::size_t n = 1; n <= count; ++n) w[n - 1] = 1.0 / static_cast<double>(n + 1);
  return w;
}

namespace detail {

inline SeqVector weighted_step(const ShiftOperator& T, const SeqVector& f) {
  SeqVector g;
  g.tag = T.decays ? SpaceTag::c0N : f.tag;
  if (f.limit) g.limit = T.decays ? Complex{0.0, 0.0} : *f.limit;
  const std::int64_t lo = std::max<std::int64_t>(f.lo, 1);
  if (f.empty() || f.hi() < lo) {
    g.lo = 0;
    return g;
  }
  g.lo = lo - 1;
  for (std::int64_t j = lo; j <= f.hi(); ++j) g.entries.push_back(T.weight(j) * f.at(j));
  return g;
}

}  // namespace detail

/// B^n f. Bilateral: (Bf)_j = f_{j+1}. Unilateral weighted:
/// B_w e_j = w_j e_{j-1}, B_w e_0 = 0, applied one step at a time.
inline SeqVector apply_shift(const ShiftOperator& T, const SeqVector& f, int n) {
  if (n < 0) throw PreconditionError("shift power must be non-negative");
  if (T.kind == ShiftKind::Bilateral) {
    SeqVector g = f;
    g.lo -= n;
    return g;
  }
  if (f.lo < 0) throw PreconditionError("unilateral sequences are indexed from 0");
  SeqVector g = f;
  for (int k = 0; k < n; ++k) g = detail::weighted_step(T, g);
  return g;
}

struct Approximation {
  std::size_t target_id;
  int n;
  Complex lambda;
  double window_error;
};

struct WitnessCertificate {
  SeqVector vector;
  std::vector<Approximation> approximations;
  std::vector<std::pair<std::int64_t, std::int64_t>> windows;  // [-K_j, K_j] per target
  double tolerance = 1e-9;
};

/// max over the window of |lambda (T^n f)_i - g_i|.
inline double window_error(const ShiftOperator& T, const SeqVector& f, const SeqVector& g, int n, Complex lambda,
                           std::int64_t a, std::int64_t b) {
  const auto h = apply_shift(T, f, n);
  double err = 0.0;
  for (std::int64_t i = a; i <= b; ++i) err = std::max(err, std::abs(lambda * h.at(i) - g.at(i)));
  return err;
}

/// Default schedule eps_j = 10^{-3j}.
inline std::vector<double> default_epsilons(std::size_t count) {
  std::vector<double> e(count);
  for (std::size_t j = 0; j < count; ++j) e[j] = std::pow(10.0, -3.0 * static_cast<double>(j + 1));
  return e;
}

/// Places eps_j g_j at offset n_j so that B^{n_j} f equals eps_j g_j on the
/// window [-K_j, K_j]; offsets n_1 = 0, n_j = n_{j-1} + K_{j-1} + K_j + 8
/// keep the translated windows disjoint. The support is padded with zeros so
/// the stored vector passes the c0 decay proxy.
inline WitnessCertificate construct_supercyclic_vector(const std::vector<SeqVector>& targets,
                                                       std::vector<double> eps = {}, double tol = 1e-9,
                                                       std::int64_t offset_budget = 1 << 20) {
  if (targets.empty()) throw PreconditionError("need at least one target");
  if (eps.empty()) eps = default_epsilons(targets.size());
  if (eps.size() < targets.size()) throw PreconditionError("epsilon schedule shorter than the target list");
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (!(eps[j] > 0.0)) throw PreconditionError("epsilons must be positive");
    if (j > 0 && eps[j] > 1e-3 * eps[j - 1])
      throw PreconditionError("epsilon schedule violates the interference bound eps_{j+1} <= 1e-3 eps_j");
  }
  WitnessCertificate cert;
  cert.tolerance = tol;
  std::vector<std::int64_t> K, offsets;
  for (const auto& g : targets) {
    if (g.limit) throw PreconditionError("targets must be finitely supported");
    K.push_back(g.empty() ? 0 : std::max(std::abs(g.lo), std::abs(g.hi())));
  }
  for (std::size_t j = 0; j < targets.size(); ++j) {
    offsets.push_back(j == 0 ? 0 : offsets[j - 1] + K[j - 1] + K[j] + 8);
    if (offsets[j] > offset_budget) throw PreconditionError("windows too large for the offset budget");
  }
  const std::int64_t lo = -K.front(), hi = offsets.back() + K.back();
  const std::int64_t pad = (hi - lo + 1) / 8 + 1;
  SeqVector f;
  f.tag = SpaceTag::c0Z;
  f.lo = lo - pad;
  f.entries.assign(static_cast<std::size_t>(hi - lo + 1 + 2 * pad), Complex{0.0, 0.0});
  for (std::size_t j = 0; j < targets.size(); ++j)
    for (std::int64_t i = -K[j]; i <= K[j]; ++i)
      f.entries[static_cast<std::size_t>(offsets[j] + i - f.lo)] = eps[j] * targets[j].at(i);
  cert.vector = f;
  const auto B = ShiftOperator::bilateral();
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const Complex lambda{1.0 / eps[j], 0.0};
    const int n = static_cast<int>(offsets[j]);
    const double err = window_error(B, f, targets[j], n, lambda, -K[j], K[j]);
    if (err >= tol) throw NumericError("window error " + fmt(err) + " exceeds tolerance for target " + std::to_string(j));
    cert.approximations.push_back({j, n, lambda, err});
    cert.windows.emplace_back(-K[j], K[j]);
  }
  return cert;
}

struct SearchRow {
  int n;
  Complex lambda;
  double error;
};

struct WitnessSearchResult {
  int n = 0;
  Complex lambda{};
  double error = std::numeric_limits<double>::infinity();
  std::vector<SearchRow> table;
};

/// Least-squares lambda for each n <= N on the window, keeping the first n
/// with the smallest max-error.
inline WitnessSearchResult witness_search(const ShiftOperator& T, const SeqVector& f, const SeqVector& g,
                                          std::int64_t a, std::int64_t b, int N) {
  if (b < a) throw PreconditionError("empty window");
  WitnessSearchResult res;
  SeqVector h = f;
  for (int n = 0; n <= N; ++n) {
    if (n > 0) h = apply_shift(T, h, 1);
    Complex num{0.0, 0.0};
    double den = 0.0;
    for (std::int64_t i = a; i <= b; ++i) {
      num += std::conj(h.at(i)) * g.at(i);
      den += std::norm(h.at(i));
    }
    const Complex lambda = den > 0.0 ? num / den : Complex{0.0, 0.0};
    double err = 0.0;
    for (std::int64_t i = a; i <= b; ++i) err = std::max(err, std::abs(lambda * h.at(i) - g.at(i)));
    res.table.push_back({n, lambda, err});
    if (err < res.error) {
      res.error = err;
      res.n = n;
      res.lambda = lambda;
    }
  }
  return res;
}

inline Verdict witness_verdict(const WitnessCertificate& cert) {
  double worst = 0.0;
  for (const auto& a : cert.approximations) worst = std::max(worst, a.window_error);
  auto v = make_verdict("witness", Conclusion::WitnessExhibited, "Example 14");
  v.add("targets", static_cast<double>(cert.approximations.size()))
      .add("max_window_error", worst)
      .add("tolerance", cert.tolerance)
      .add("support", std::to_string(cert.vector.lo) + ".." + std::to_string(cert.vector.hi()));
  v.caveats.push_back("finite windows only");
  return v;
}

inline Verdict cyclicity_structure_check(int codimension, bool image_inside) {
  if (codimension > 1 && image_inside)
    return make_verdict("cyclicity_structure", Conclusion::NotCyclic, "Lemma 15")
        .add("codimension", static_cast<double>(codimension))
        .add("image_inside_subspace", true);
  auto v = inconclusive("cyclicity_structure", codimension <= 1 ? "codimension at most 1" : "image not inside the subspace");
  v.add("codimension", static_cast<double>(codimension)).add("image_inside_subspace", image_inside);
  return v;
}

/// Solves B_w g = f with g_0 = 0 and g_{n+1} = f_n / w_{n+1}. Returns g when
/// its tail settles (Cauchy at 1e-8 over the last quarter of the stored
/// window, at least four entries).
inline std::optional<SeqVector> preimage_in_c_inf(const ShiftOperator& T, const SeqVector& f) {
  if (T.kind != ShiftKind::UnilateralWeighted) throw PreconditionError("needs a unilateral weighted shift");
  if (f.lo < 0) throw PreconditionError("unilateral sequences are indexed from 0");
  SeqVector g;
  g.tag = SpaceTag::cInfN;
  g.lo = 0;
  g.entries.push_back({0.0, 0.0});
  for (std::int64_t n = 0; n <= f.hi(); ++n) g.entries.push_back(f.at(n) / T.weight(n + 1));
  if (!f.limit) {
    g.limit = Complex{0.0, 0.0};  // finitely supported f gives finitely supported g
    return g;
  }
  const std::size_t tail = std::max<std::size_t>(4, g.entries.size() / 4);
  if (g.entries.size() < tail + 1) return std::nullopt;
  const auto first = g.entries.end() - static_cast<std::ptrdiff_t>(tail);
  for (auto it = first; it != g.entries.end(); ++it)
    for (auto jt = first; jt != g.entries.end(); ++jt)
      if (std::abs(*it - *jt) > 1e-8) return std::nullopt;
  g.limit = g.entries.back();
  return g;
}

struct FitRow {
  std::string target;
  int degree;
  double sup_error;
};

struct MultiplicationReport {
  std::vector<FitRow> fits;
  Verdict verdict;
};

/// Least-squares polynomial fits to disc-algebra targets on a closed-disc
/// grid, as evidence that the polynomials are dense, followed by the
/// structural verdict for multiplication by z.
inline MultiplicationReport multiplication_example(int grid_resolution, int max_degree) {
  if (max_degree < 1 || max_degree > 40) throw PreconditionError("max degree must lie in [1, 40]");
  GridParams gp;
  gp.kind = DomainKind::ClosedDisc;
  gp.resolution = std::max(grid_resolution, 2 * max_degree + 8);
  const auto disc = build_grid(gp);
  const auto pts = disc.coordinates();
  const std::vector<std::string> targets = {"exp(z)", "1/(2-z)", "z"};
  std::vector<int> degrees;
  for (int d : {1, 2, 4, 8, 12, 16, 24, 32, 40})
    if (d <= max_degree) degrees.push_back(d);
  if (degrees.back() != max_degree) degrees.push_back(max_degree);

  MultiplicationReport rep;
  const auto rows = static_cast<Eigen::Index>(pts.size());
  for (const auto& src : targets) {
    const auto g = Expression::parse(src);
    Eigen::VectorXcd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) y(i) = *g.eval(pts[static_cast<std::size_t>(i)]);
    for (int deg : degrees) {
      Eigen::MatrixXcd V(rows, deg + 1);
      for (Eigen::Index i = 0; i < rows; ++i) {
        Complex p{1.0, 0.0};
        for (int k = 0; k <= deg; ++k, p *= pts[static_cast<std::size_t>(i)]) V(i, k) = p;
      }
      const Eigen::VectorXcd c = V.colPivHouseholderQr().solve(y);
      const double err = (V * c - y).cwiseAbs().maxCoeff();
      if (!std::isfinite(err)) throw NumericError("polynomial fit failed for " + src);
      rep.fits.push_back({src, deg, err});
    }
  }
  auto v = make_verdict("multiplication", Conclusion::NotTauPSupercyclic, "Example 17");
  for (const auto& r : rep.fits)
    if (r.degree == degrees.back()) v.add("sup_error_" + r.target + "_deg" + std::to_string(r.degree), r.sup_error);
  v.add("cyclic_vector", std::string("1"));
  v.add("obstruction", std::string("independent eigenvectors of the adjoint (point evaluations)"));
  rep.verdict = v;
  return rep;
}

}  // namespace supercyc
