// Finite stand-ins for the spaces X on which the operators act.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "supercyc/expr.hpp"

namespace supercyc {

enum class DomainKind { ClosedDisc, Circle, PuncturedDisc, PuncturedPlane, Lattice, CompactifiedLattice };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::ClosedDisc: return "ClosedDisc";
    case DomainKind::Circle: return "Circle";
    case DomainKind::PuncturedDisc: return "PuncturedDisc";
    case DomainKind::PuncturedPlane: return "PuncturedPlane";
    case DomainKind::Lattice: return "Lattice";
    case DomainKind::CompactifiedLattice: return "CompactifiedLattice";
  }
  return "?";
}

inline std::optional<DomainKind> domain_kind_from_string(const std::string& s) {
  for (auto k : {DomainKind::ClosedDisc, DomainKind::Circle, DomainKind::PuncturedDisc, DomainKind::PuncturedPlane,
                 DomainKind::Lattice, DomainKind::CompactifiedLattice})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

/// The point at infinity of a compactified lattice.
struct Infinity {
  friend bool operator==(Infinity, Infinity) { return true; }
};

/// A complex coordinate, a lattice index, or the infinity marker.
class DomainPoint {
 public:
  DomainPoint(Complex z) : v_(z) {}
  DomainPoint(std::int64_t j) : v_(j) {}
  DomainPoint(Infinity inf) : v_(inf) {}

  bool is_complex() const { return std::holds_alternative<Complex>(v_); }
  bool is_index() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_infinity() const { return std::holds_alternative<Infinity>(v_); }

  std::int64_t index() const { return std::get<std::int64_t>(v_); }

  /// Coordinate used when a symbol is evaluated here; lattice index j maps to j + 0i.
  Complex coordinate() const {
    if (is_complex()) return std::get<Complex>(v_);
    if (is_index()) return {static_cast<double>(index()), 0.0};
    throw std::logic_error("the infinity marker has no complex coordinate");
  }

  friend bool operator==(const DomainPoint&, const DomainPoint&) = default;

 private:
  std::variant<Complex, std::int64_t, Infinity> v_;
};

struct GridParams {
  DomainKind kind = DomainKind::ClosedDisc;
  double radius = 1.0;         // discs and circles
  double inner_cutoff = 0.05;  // punctured kinds
  double outer_cutoff = 4.0;   // punctured plane
  std::int64_t lo = -16;       // lattices
  std::int64_t hi = 16;
  bool includes_infinity = true;  // compactified lattice
  int resolution = 16;            // points per dimension
  double tolerance = 1e-9;
};

class DomainError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A sampled space. Immutable after construction.
class DomainSpec {
 public:
  DomainKind kind() const { return params_.kind; }
  const GridParams& params() const { return params_; }
  const std::vector<DomainPoint>& grid() const { return grid_; }
  double tolerance() const { return params_.tolerance; }
  double radius() const { return params_.radius; }

  /// Characteristic distance between neighbouring grid points.
  double spacing() const { return spacing_; }

  bool is_compact() const {
    return kind() == DomainKind::ClosedDisc || kind() == DomainKind::Circle ||
           kind() == DomainKind::CompactifiedLattice;
  }
  bool is_discrete() const { return kind() == DomainKind::Lattice || kind() == DomainKind::CompactifiedLattice; }

  /// Hyperbolicity is declared by kind, never computed.
  bool is_hyperbolic() const { return kind() == DomainKind::ClosedDisc || kind() == DomainKind::PuncturedDisc; }

  /// Membership in the space X itself (not in the finite grid), within tolerance.
  bool contains(const DomainPoint& p) const {
    const double tol = tolerance();
    if (p.is_infinity()) return kind() == DomainKind::CompactifiedLattice;
    if (p.is_index()) {
      if (is_discrete()) return true;
      return contains(DomainPoint(p.coordinate()));
    }
    const Complex z = p.coordinate();
    if (!is_finite(z)) return false;
    const double r = std::abs(z);
    switch (kind()) {
      case DomainKind::ClosedDisc: return r <= radius() + tol;
      case DomainKind::Circle: return std::abs(r - radius()) <= tol;
      case DomainKind::PuncturedDisc: return r > tol && r <= radius() + tol;
      case DomainKind::PuncturedPlane: return r > tol;
      case DomainKind::Lattice:
      case DomainKind::CompactifiedLattice:
        return std::abs(z.imag()) <= tol && std::abs(z.real() - std::nearbyint(z.real())) <= tol;
    }
    return false;
  }

  /// Maps an image value back to a domain point: lattice images snap to the
  /// nearest index, everything else stays complex.
  DomainPoint snap(Complex image) const {
    if (is_discrete() && contains(DomainPoint(image)))
      return DomainPoint(static_cast<std::int64_t>(std::nearbyint(image.real())));
    return DomainPoint(image);
  }

  /// Grid points as complex coordinates (the infinity marker is skipped).
  std::vector<Complex> coordinates() const {
    std::vector<Complex> out;
    out.reserve(grid_.size());
    for (const auto& p : grid_)
      if (!p.is_infinity()) out.push_back(p.coordinate());
    return out;
  }

  friend DomainSpec build_grid(const GridParams& params);

 private:
  GridParams params_;
  std::vector<DomainPoint> grid_;
  double spacing_ = 1.0;
};

inline DomainSpec build_grid(const GridParams& params) {
  if (!(params.tolerance > 0.0)) throw DomainError("tolerance must be positive");
  DomainSpec d;
  d.params_ = params;
  const int n = params.resolution;
  const double two_pi = 2.0 * std::numbers::pi;
  auto need_resolution = [&] {
    if (n < 8) throw DomainError("resolution must be at least 8 points per dimension");
  };
  switch (params.kind) {
    case DomainKind::ClosedDisc: {
      need_resolution();
      if (!(params.radius > 0.0)) throw DomainError("radius must be positive");
      d.grid_.emplace_back(Complex{0.0, 0.0});
      for (int k = 1; k <= n; ++k)
        for (int j = 0; j < n; ++j)
          d.grid_.emplace_back(std::polar(params.radius * k / n, two_pi * j / n));
      d.spacing_ = two_pi * params.radius / n;
      break;
    }
    case DomainKind::Circle: {
      need_resolution();
      if (!(params.radius > 0.0)) throw DomainError("radius must be positive");
      for (int j = 0; j < n; ++j) d.grid_.emplace_back(std::polar(params.radius, two_pi * j / n));
      d.spacing_ = two_pi * params.radius / n;
      break;
    }
    case DomainKind::PuncturedDisc: {
      need_resolution();
      if (!(params.radius > 0.0)) throw DomainError("radius must be positive");
      if (!(params.inner_cutoff > 0.0) || params.inner_cutoff >= params.radius)
        throw DomainError("inner cutoff must lie in (0, radius)");
      for (int k = 0; k < n; ++k) {
        const double r = params.inner_cutoff + (params.radius - params.inner_cutoff) * k / n;
        for (int j = 0; j < n; ++j) d.grid_.emplace_back(std::polar(r, two_pi * j / n));
      }
      d.spacing_ = two_pi * params.radius / n;
      break;
    }
    case DomainKind::PuncturedPlane: {
      need_resolution();
      if (!(params.inner_cutoff > 0.0) || !(params.outer_cutoff > params.inner_cutoff))
        throw DomainError("cutoffs must satisfy 0 < inner < outer");
      const double ratio = params.outer_cutoff / params.inner_cutoff;
      for (int k = 0; k < n; ++k) {
        const double r = params.inner_cutoff * std::pow(ratio, static_cast<double>(k) / (n - 1));
        for (int j = 0; j < n; ++j) d.grid_.emplace_back(std::polar(r, two_pi * j / n));
      }
      d.spacing_ = two_pi * params.outer_cutoff / n;
      break;
    }
    case DomainKind::Lattice:
    case DomainKind::CompactifiedLattice: {
      if (params.hi < params.lo) throw DomainError("empty lattice range");
      if (params.hi == params.lo && !(params.kind == DomainKind::CompactifiedLattice && params.includes_infinity))
        throw DomainError("lattice grid needs at least two distinct points");
      for (std::int64_t j = params.lo; j <= params.hi; ++j) d.grid_.emplace_back(j);
      if (params.kind == DomainKind::CompactifiedLattice && params.includes_infinity) d.grid_.emplace_back(Infinity{});
      d.spacing_ = 1.0;
      break;
    }
  }
  return d;
}

/// Deterministic text form of a grid (one point per line, 17 significant digits).
inline std::string serialize_grid(const DomainSpec& d) {
  std::string out = std::string(to_string(d.kind())) + " " + std::to_string(d.grid().size()) + "\n";
  char buf[96];
  for (const auto& p : d.grid()) {
    if (p.is_infinity())
      out += "inf\n";
    else if (p.is_index())
      out += std::to_string(p.index()) + "\n";
    else {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.coordinate().real(), p.coordinate().imag());
      out += buf;
    }
  }
  return out;
}

/// Images of grid points that leave X (or fail to evaluate).
struct SelfMapViolation {
  DomainPoint point;
  std::optional<Complex> image;  // nullopt: evaluation failure
};

struct SelfMapReport {
  std::vector<SelfMapViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Image of a domain point under a symbol; the infinity marker is fixed
/// (the one-point extension of a homeomorphism).
inline std::optional<DomainPoint> apply_symbol(const DomainSpec& d, const FunctionHandle& phi, const DomainPoint& p) {
  if (p.is_infinity()) return p;
  auto img = phi.eval(p.coordinate());
  if (!img) return std::nullopt;
  return d.snap(*img);
}

inline SelfMapReport self_map_check(const DomainSpec& d, const FunctionHandle& phi) {
  SelfMapReport report;
  for (const auto& p : d.grid()) {
    if (p.is_infinity()) continue;
    auto img = phi.eval(p.coordinate());
    if (!img || !d.contains(DomainPoint(*img))) report.violations.push_back({p, img});
  }
  return report;
}

/// Value at the infinity marker: the limit of f(n) as |n| runs to the ends
/// of the lattice range, accepted only when the outermost samples agree to
/// `cauchy_tol` (a Cauchy check on both tails).
inline std::optional<Complex> infinity_value(const DomainSpec& d, const FunctionHandle& f, double cauchy_tol = 1e-8) {
  if (!d.is_discrete()) throw DomainError("infinity value is only defined on lattices");
  const auto& p = d.params();
  const std::int64_t span = p.hi - p.lo + 1;
  const std::int64_t tail = std::max<std::int64_t>(2, std::min<std::int64_t>(4, span / 4));
  std::vector<Complex> samples;
  for (std::int64_t k = 0; k < tail; ++k) {
    for (std::int64_t j : {p.hi - k, p.lo + k}) {
      auto v = f.eval({static_cast<double>(j), 0.0});
      if (!v) return std::nullopt;
      samples.push_back(*v);
    }
  }
  for (const auto& a : samples)
    for (const auto& b : samples)
      if (std::abs(a - b) > cauchy_tol) return std::nullopt;
  Complex mean{0.0, 0.0};
  for (const auto& s : samples) mean += s;
  return mean / static_cast<double>(samples.size());
}

}  // namespace supercyc
