// Iteration of symbols and the orbit-level detectors built on it.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "supercyc/domains.hpp"
#include "supercyc/expr.hpp"
#include "supercyc/parallel.hpp"

namespace supercyc {

class PreconditionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DynamicsTolerances {
  double cauchy = 1e-9;  // tail displacement threshold for convergence
  int cauchy_window = 10;
  double period = 1e-9;
  int burn_in = 64;
  int max_period = 16;
  double escape_radius = 1e100;
  double fixed_point_residual = 1e-10;
  double periodic_residual = 1e-8;
  double cluster_radius = 1e-6;
};

enum class OrbitClass { ConvergesTo, Periodic, Escaping, Unresolved };

inline const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::ConvergesTo: return "ConvergesTo";
    case OrbitClass::Periodic: return "PeriodicWithPeriod";
    case OrbitClass::Escaping: return "Escaping";
    case OrbitClass::Unresolved: return "Unresolved";
  }
  return "?";
}

struct OrbitTrace {
  Complex start;
  std::vector<Complex> points;  // phi^0(start) .. phi^N(start)
  OrbitClass classification = OrbitClass::Unresolved;
  Complex limit{};  // ConvergesTo only
  int period = 0;   // Periodic only
  double residual = 0.0;  // last-step displacement
  std::optional<std::size_t> escape_step;  // Escaping only
};

namespace detail {

inline double scale_of(Complex z) { return std::max(1.0, std::abs(z)); }

inline void classify_orbit(OrbitTrace& t, const DynamicsTolerances& tol) {
  const auto& p = t.points;
  const std::size_t n = p.size() - 1;
  if (n == 0) {
    t.classification = OrbitClass::Unresolved;
    return;
  }
  t.residual = std::abs(p[n] - p[n - 1]);
  const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(tol.cauchy_window), n);
  bool cauchy = true;
  for (std::size_t k = n - window + 1; k <= n && cauchy; ++k)
    cauchy = std::abs(p[k] - p[k - 1]) <= tol.cauchy * scale_of(p[n]);
  if (cauchy) {
    t.classification = OrbitClass::ConvergesTo;
    t.limit = p[n];
    return;
  }
  const std::size_t burn = std::min<std::size_t>(static_cast<std::size_t>(tol.burn_in), n / 2);
  for (int per = 2; per <= tol.max_period; ++per) {
    const auto q = static_cast<std::size_t>(per);
    if (n < burn + 2 * q) break;
    bool periodic = true;
    for (std::size_t k = burn; k + q <= n && periodic; ++k)
      periodic = std::abs(p[k + q] - p[k]) <= tol.period * scale_of(p[k]);
    if (periodic) {
      t.classification = OrbitClass::Periodic;
      t.period = per;
      return;
    }
  }
  t.classification = OrbitClass::Unresolved;
}

inline std::optional<Complex> iterate_map(const FunctionHandle& phi, Complex z, int times) {
  for (int k = 0; k < times; ++k) {
    auto next = phi.eval(z);
    if (!next) return std::nullopt;
    z = *next;
  }
  return z;
}

}  // namespace detail

/// Iterates phi from z for n steps. With a domain, leaving X counts as escaping
/// and lattice images are snapped to integers.
inline OrbitTrace iterate(const FunctionHandle& phi, Complex z, int n, const DomainSpec* domain = nullptr,
                          const DynamicsTolerances& tol = {}) {
  OrbitTrace t;
  t.start = z;
  t.points.reserve(static_cast<std::size_t>(n) + 1);
  t.points.push_back(z);
  for (int k = 1; k <= n; ++k) {
    auto img = phi.eval(t.points.back());
    if (img && domain) {
      if (!domain->contains(DomainPoint(*img)))
        img.reset();
      else if (domain->is_discrete())
        img = Complex{std::nearbyint(img->real()), 0.0};
    }
    if (!img || std::abs(*img) > tol.escape_radius) {
      t.classification = OrbitClass::Escaping;
      t.escape_step = static_cast<std::size_t>(k);
      if (t.points.size() > 1) t.residual = std::abs(t.points.back() - t.points[t.points.size() - 2]);
      return t;
    }
    t.points.push_back(*img);
  }
  detail::classify_orbit(t, tol);
  return t;
}

inline OrbitTrace iterate(const FunctionHandle& phi, const DomainPoint& p, int n, const DomainSpec* domain = nullptr,
                          const DynamicsTolerances& tol = {}) {
  if (p.is_infinity()) throw PreconditionError("the infinity marker is fixed by every extended symbol");
  return iterate(phi, p.coordinate(), n, domain, tol);
}

namespace detail {

// Roots of phi^p(z) = z on the circle, found in the angle variable.
inline std::vector<Complex> circle_cycle_roots(const FunctionHandle& phi, const DomainSpec& d, int p, double residual) {
  const double R = d.radius();
  const double two_pi = 2.0 * std::numbers::pi;
  auto h = [&](double theta) -> std::optional<double> {
    const Complex z = std::polar(R, two_pi * theta);
    auto img = iterate_map(phi, z, p);
    if (!img || *img == Complex{0.0, 0.0}) return std::nullopt;
    double diff = std::arg(*img) / two_pi - theta;
    diff -= std::nearbyint(diff);
    return diff;
  };
  auto residual_at = [&](double theta) {
    const Complex z = std::polar(R, two_pi * theta);
    auto img = iterate_map(phi, z, p);
    return img ? std::abs(*img - z) : std::numeric_limits<double>::infinity();
  };
  const int n = static_cast<int>(d.grid().size());
  const int sub = 8;
  const int scan = n * sub;
  std::vector<double> roots;
  std::optional<double> prev = h(0.0);
  for (int k = 0; k < scan; ++k) {
    const double a = static_cast<double>(k) / scan;
    const double b = static_cast<double>(k + 1) / scan;
    const auto ha = prev;
    const auto hb = h(b);
    prev = hb;
    if (!ha || !hb) continue;
    if (residual_at(a) < residual) {
      roots.push_back(a);
      continue;
    }
    if (std::abs(*ha) > 0.25 || std::abs(*hb) > 0.25) continue;  // wrap-around, not a crossing
    if ((*ha < 0) == (*hb < 0) || residual_at(b) < residual) continue;
    double lo = a, hi = b, hlo = *ha;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto hm = h(mid);
      if (!hm) break;
      if ((*hm < 0) == (hlo < 0)) {
        lo = mid;
        hlo = *hm;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    if (residual_at(t) < residual) roots.push_back(t);
  }
  std::vector<Complex> out;
  out.reserve(roots.size());
  for (double t : roots) out.push_back(std::polar(R, two_pi * t));
  return out;
}

// Damped Gauss-Newton on G(z) = phi^p(z) - z in real coordinates. A
// pseudo-inverse step handles maps whose fixed sets are curves.
inline std::optional<Complex> planar_cycle_root(const FunctionHandle& phi, Complex z, int p, double residual) {
  auto G = [&](Complex w) -> std::optional<Complex> {
    auto img = iterate_map(phi, w, p);
    if (!img) return std::nullopt;
    return *img - w;
  };
  auto g = G(z);
  if (!g) return std::nullopt;
  for (int it = 0; it < 60 && std::abs(*g) >= residual * 1e-3; ++it) {
    const double h = 1e-7 * std::max(1.0, std::abs(z));
    auto gx = G(z + Complex{h, 0.0});
    auto gy = G(z + Complex{0.0, h});
    if (!gx || !gy) return std::nullopt;
    Eigen::Matrix2d J;
    J << (gx->real() - g->real()) / h, (gy->real() - g->real()) / h, (gx->imag() - g->imag()) / h,
        (gy->imag() - g->imag()) / h;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (!(s(0) > 0.0)) break;
    Eigen::Vector2d rhs(-g->real(), -g->imag());
    Eigen::Vector2d ut = svd.matrixU().transpose() * rhs;
    for (int i = 0; i < 2; ++i) ut(i) = s(i) > 1e-8 * s(0) ? ut(i) / s(i) : 0.0;
    const Eigen::Vector2d step = svd.matrixV() * ut;
    const Complex dz{step(0), step(1)};
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half, lambda *= 0.5) {
      auto trial = G(z + lambda * dz);
      if (trial && std::abs(*trial) < std::abs(*g)) {
        z += lambda * dz;
        g = trial;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (std::abs(*g) < residual) return z;
  return std::nullopt;
}

inline std::vector<Complex> cycle_roots(const FunctionHandle& phi, const DomainSpec& d, int p, double residual,
                                        double coarse) {
  if (d.kind() == DomainKind::Circle) return circle_cycle_roots(phi, d, p, residual);
  const auto pts = d.coordinates();
  if (d.is_discrete()) {
    std::vector<Complex> out;
    for (const auto& z : pts) {
      auto img = iterate_map(phi, z, p);
      if (img && std::abs(*img - z) < residual) out.push_back(z);
    }
    return out;
  }
  auto found = parallel_map(pts.size(), [&](std::size_t i) -> std::optional<Complex> {
    auto img = iterate_map(phi, pts[i], p);
    if (!img || std::abs(*img - pts[i]) > coarse) return std::nullopt;
    auto root = planar_cycle_root(phi, pts[i], p, residual);
    if (root && d.contains(DomainPoint(*root))) return root;
    return std::nullopt;
  });
  std::vector<Complex> out;
  for (auto& r : found)
    if (r) out.push_back(*r);
  return out;
}

inline void append_unique(std::vector<Complex>& into, Complex z, double radius) {
  for (const auto& w : into)
    if (std::abs(w - z) < radius) return;
  into.push_back(z);
}

}  // namespace detail

/// Fixed points of phi in X, refined to |phi(z) - z| < fixed_point_residual
/// and merged within cluster_radius. Order follows the grid.
inline std::vector<Complex> find_fixed_points(const FunctionHandle& phi, const DomainSpec& d,
                                              const DynamicsTolerances& tol = {}) {
  // Every grid point seeds a refinement; the coarse filter only skips points
  // whose residual exceeds the diameter of the sampled region.
  const double coarse = std::numeric_limits<double>::infinity();
  std::vector<Complex> out;
  for (const auto& z : detail::cycle_roots(phi, d, 1, tol.fixed_point_residual, coarse))
    detail::append_unique(out, z, tol.cluster_radius);
  return out;
}

struct PeriodicPoint {
  Complex point;
  int period;
};

/// Points of minimal period 2..max_period with residual below periodic_residual.
inline std::vector<PeriodicPoint> find_periodic_points(const FunctionHandle& phi, const DomainSpec& d, int max_period,
                                                       const DynamicsTolerances& tol = {}) {
  if (max_period < 2) throw PreconditionError("max period must be at least 2");
  std::vector<PeriodicPoint> out;
  const double coarse = 4.0 * d.spacing();
  for (int p = 2; p <= max_period; ++p) {
    std::vector<Complex> seen;
    for (const auto& z : detail::cycle_roots(phi, d, p, tol.periodic_residual, coarse)) {
      int minimal = p;
      Complex w = z;
      for (int q = 1; q < p; ++q) {
        auto next = phi.eval(w);
        if (!next) break;
        w = *next;
        if (p % q == 0 && std::abs(w - z) < tol.periodic_residual) {
          minimal = q;
          break;
        }
      }
      if (minimal != p) continue;
      const std::size_t before = seen.size();
      detail::append_unique(seen, z, tol.cluster_radius);
      if (seen.size() != before) out.push_back({z, p});
    }
  }
  return out;
}

struct DenjoyWolffResult {
  bool applicable = false;
  Complex point{};
  bool interior = false;
  double agreement = std::numeric_limits<double>::infinity();  // max pairwise distance of seed limits
  std::vector<Complex> seed_limits;
  std::string diagnostic;
};

/// Common limit of the orbits of several interior seeds, if they all settle.
/// Identity and elliptic automorphisms show up as orbits that do not settle or
/// settle at different points.
inline DenjoyWolffResult denjoy_wolff_point(const FunctionHandle& phi, const DomainSpec& disc,
                                            const std::vector<Complex>& extra_seeds = {}, int steps = 4096,
                                            const DynamicsTolerances& tol = {}) {
  if (disc.kind() != DomainKind::ClosedDisc) throw PreconditionError("Denjoy-Wolff estimation needs a closed disc");
  const double R = disc.radius();
  std::vector<Complex> seeds = {{0.0, 0.0}, {0.5 * R, 0.0}, {-0.5 * R, 0.0}, {0.0, 0.5 * R}, {0.0, -0.5 * R}};
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  DenjoyWolffResult res;
  for (const auto& s : seeds) {
    const auto t = iterate(phi, s, steps, &disc, tol);
    if (t.classification != OrbitClass::ConvergesTo) {
      res.diagnostic = std::string("orbit did not settle (") + to_string(t.classification) + ")";
      return res;
    }
    res.seed_limits.push_back(t.limit);
  }
  double spread = 0.0;
  for (const auto& a : res.seed_limits)
    for (const auto& b : res.seed_limits) spread = std::max(spread, std::abs(a - b));
  res.agreement = spread;
  if (spread >= 1e-6) {
    res.diagnostic = "seed orbits converge to different limits";
    return res;
  }
  res.applicable = true;
  res.point = res.seed_limits.front();
  res.interior = std::abs(res.point) < R - 1e-6;
  return res;
}

struct StableOrbitResult {
  double radius;
  bool invariant;
  std::size_t grid_points_inside;
  std::size_t samples;
};

/// Checks phi(V_r) ⊆ V_r for V_r = closed ball B(z0, r) ∩ X, sampled by the
/// grid points inside plus two rings of 64 points at radii r and r/2.
inline std::vector<StableOrbitResult> stable_orbit_check(const FunctionHandle& phi, const DomainSpec& d, Complex z0,
                                                         const std::vector<double>& radii,
                                                         const DynamicsTolerances& tol = {}) {
  if (d.is_discrete()) throw PreconditionError("a lattice point is never an accumulation point");
  if (!d.contains(DomainPoint(z0))) throw PreconditionError("z0 is not a point of the domain");
  auto image = phi.eval(z0);
  if (!image || std::abs(*image - z0) >= tol.periodic_residual) throw PreconditionError("z0 is not a fixed point");
  const auto pts = d.coordinates();
  std::vector<StableOrbitResult> out;
  for (double r : radii) {
    if (!(r > 0.0)) throw PreconditionError("radii must be positive");
    std::vector<Complex> samples;
    std::size_t inside = 0;
    for (const auto& z : pts)
      if (std::abs(z - z0) <= r) {
        samples.push_back(z);
        ++inside;
      }
    if (inside < 8)
      throw PreconditionError("fewer than 8 grid points within radius " + std::to_string(r) + " of z0");
    for (double rr : {r, 0.5 * r})
      for (int j = 0; j < 64; ++j) {
        const Complex z = z0 + std::polar(rr, 2.0 * std::numbers::pi * j / 64);
        if (d.contains(DomainPoint(z))) samples.push_back(z);
      }
    bool ok = true;
    for (const auto& v : samples) {
      auto img = phi.eval(v);
      if (!img || !d.contains(DomainPoint(*img)) || std::abs(*img - z0) > r + d.tolerance()) {
        ok = false;
        break;
      }
    }
    out.push_back({r, ok, inside, samples.size()});
  }
  return out;
}

struct RunawayResult {
  bool runaway = false;
  std::optional<int> n0;  // least n0 with phi^n(K) ∩ K = ∅ for n0 <= n <= N
  bool resolved = true;
  std::vector<double> distances;  // dist(phi^n(K), K), n = 1..N
};

/// Sampled test of phi^n(K) ∩ K = ∅ for all large n. A hit after a miss is a
/// return; hits persisting through the horizon count as non-runaway; a miss
/// streak shorter than a quarter of the horizon is left unresolved.
inline RunawayResult strongly_runaway_check(const FunctionHandle& phi, const std::vector<Complex>& K, int N,
                                            std::optional<double> hit_tolerance = std::nullopt) {
  if (K.empty() || N < 1) throw PreconditionError("need a non-empty sample of K and N >= 1");
  double tol = 0.0;
  if (hit_tolerance) {
    tol = *hit_tolerance;
  } else {
    // Half the largest nearest-neighbour gap of the sample.
    for (std::size_t i = 0; i < K.size(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < K.size(); ++j)
        if (i != j) nearest = std::min(nearest, std::abs(K[i] - K[j]));
      if (std::isfinite(nearest)) tol = std::max(tol, 0.5 * nearest);
    }
    tol = std::max(tol, 1e-9);
  }
  RunawayResult res;
  std::vector<std::optional<Complex>> cur(K.begin(), K.end());
  std::vector<bool> hit;
  for (int n = 1; n <= N; ++n) {
    double dist = std::numeric_limits<double>::infinity();
    for (auto& c : cur) {
      if (!c) continue;
      c = phi.eval(*c);
      if (!c) continue;
      for (const auto& k : K) dist = std::min(dist, std::abs(*c - k));
    }
    res.distances.push_back(dist);
    hit.push_back(dist <= tol);
  }
  int last_hit = 0;
  bool left = false;
  for (int n = 1; n <= N; ++n) {
    if (hit[n - 1]) {
      if (left) {
        res.runaway = false;
        return res;  // returned to K after leaving it
      }
      last_hit = n;
    } else {
      left = true;
    }
  }
  if (last_hit == N) return res;
  if (N - last_hit < std::max(1, N / 4)) {
    res.resolved = false;
    return res;
  }
  res.runaway = true;
  res.n0 = last_hit + 1;
  return res;
}

class RotationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RotationData {
  std::vector<double> lift_samples;  // lift orbit of the first seed, x_0..x_N
  std::vector<double> seed_estimates;
  double rotation_number = 0.0;  // in [0, 1)
  double confidence = 0.0;       // max circular disagreement between seeds
  std::optional<std::pair<int, int>> rational;  // p/q within 1e-4, q <= 32
};

inline double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

/// Rotation number of the circle map induced by phi on the circle of radius R,
/// through the angle action theta -> arg(phi(R e^{2 pi i theta}))/(2 pi) and
/// an unwrapped lift. Throws RotationError unless the lift is an increasing
/// degree-one map on a 4096-point grid.
inline RotationData rotation_number(const FunctionHandle& phi, int N, double R = 1.0,
                                    const std::vector<double>& seeds = {0.0, 1.0 / 3.0, 2.0 / 3.0}) {
  if (N < 1 || seeds.size() < 3) throw PreconditionError("need N >= 1 and at least three seeds");
  const double two_pi = 2.0 * std::numbers::pi;
  auto angle = [&](double u) {
    auto img = phi.eval(std::polar(R, two_pi * u));
    if (!img || *img == Complex{0.0, 0.0}) throw RotationError("symbol fails to evaluate on the circle");
    double a = std::arg(*img) / two_pi;
    return a - std::floor(a);
  };
  constexpr int M = 4096;
  std::vector<double> delta(M + 1);
  {
    double raw = angle(0.0);
    delta[0] = raw;
    for (int k = 1; k <= M; ++k) {
      const double u = static_cast<double>(k) / M;
      double d = angle(u) - u;
      d += std::nearbyint(delta[k - 1] - d);
      delta[k] = d;
      if (u + d <= (u - 1.0 / M) + delta[k - 1])
        throw RotationError("lift is not increasing: the circle map is not an orientation-preserving homeomorphism");
    }
    if (std::abs(delta[M] - delta[0]) > 1e-6)
      throw RotationError("circle map does not have degree one");
  }
  auto displacement = [&](double u) {
    const double pos = u * M;
    const int k = std::clamp(static_cast<int>(pos), 0, M - 1);
    const double frac = pos - k;
    const double guess = delta[k] * (1.0 - frac) + delta[k + 1] * frac;
    double d = angle(u) - u;
    d += std::nearbyint(guess - d);
    return d;
  };
  RotationData out;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    double u = seeds[s] - std::floor(seeds[s]);
    double total = 0.0;
    if (s == 0) {
      out.lift_samples.reserve(static_cast<std::size_t>(N) + 1);
      out.lift_samples.push_back(u);
    }
    for (int n = 0; n < N; ++n) {
      const double d = displacement(u);
      total += d;
      u += d;
      u -= std::floor(u);
      if (s == 0) out.lift_samples.push_back(seeds[0] + total);
    }
    double rho = total / N;
    out.seed_estimates.push_back(rho - std::floor(rho));
  }
  const double ref = out.seed_estimates.front();
  double sum = 0.0;
  for (double e : out.seed_estimates) {
    double adj = e + std::nearbyint(ref - e);
    sum += adj;
    out.confidence = std::max(out.confidence, circular_distance(e, ref));
  }
  for (double a : out.seed_estimates)
    for (double b : out.seed_estimates) out.confidence = std::max(out.confidence, circular_distance(a, b));
  double rho = sum / static_cast<double>(out.seed_estimates.size());
  rho -= std::floor(rho);
  if (rho >= 1.0) rho = 0.0;
  out.rotation_number = rho;
  for (int q = 1; q <= 32 && !out.rational; ++q) {
    const int p = static_cast<int>(std::nearbyint(rho * q));
    if (circular_distance(rho, static_cast<double>(p) / q) < 1e-4) out.rational = std::make_pair(p % q, q);
  }
  return out;
}

}  // namespace supercyc
