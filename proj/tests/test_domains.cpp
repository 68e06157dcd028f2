#include <gtest/gtest.h>

#include "supercyc/domains.hpp"

using namespace supercyc;

namespace {

GridParams params(DomainKind kind, int resolution = 16) {
  GridParams p;
  p.kind = kind;
  p.resolution = resolution;
  return p;
}

}  // namespace

TEST(BuildGrid, CircleEightAngles) {
  const auto d = build_grid(params(DomainKind::Circle, 8));
  ASSERT_EQ(d.grid().size(), 8u);
  for (int k = 0; k < 8; ++k)
    EXPECT_LT(std::abs(d.grid()[k].coordinate() - std::polar(1.0, 2.0 * std::numbers::pi * k / 8)), 1e-15);
}

TEST(BuildGrid, LatticeRange) {
  auto p = params(DomainKind::Lattice);
  p.lo = -3;
  p.hi = 3;
  const auto d = build_grid(p);
  ASSERT_EQ(d.grid().size(), 7u);
  for (int k = 0; k < 7; ++k) {
    ASSERT_TRUE(d.grid()[k].is_index());
    EXPECT_EQ(d.grid()[k].index(), k - 3);
  }
}

TEST(BuildGrid, PuncturedDiscAvoidsCutoff) {
  auto p = params(DomainKind::PuncturedDisc);
  p.inner_cutoff = 0.05;
  const auto d = build_grid(p);
  for (const auto& z : d.coordinates()) EXPECT_GE(std::abs(z), 0.05 - 1e-15);
}

TEST(BuildGrid, CompactifiedLatticeCarriesInfinity) {
  auto p = params(DomainKind::CompactifiedLattice);
  p.lo = 0;
  p.hi = 4;
  const auto d = build_grid(p);
  EXPECT_TRUE(d.grid().back().is_infinity());
  EXPECT_EQ(d.coordinates().size(), 5u);
}

TEST(BuildGrid, DegenerateParameters) {
  auto p = params(DomainKind::ClosedDisc);
  p.radius = 0.0;
  EXPECT_THROW(build_grid(p), DomainError);
  EXPECT_THROW(build_grid(params(DomainKind::Circle, 4)), DomainError);
  auto l = params(DomainKind::Lattice);
  l.lo = 2;
  l.hi = 1;
  EXPECT_THROW(build_grid(l), DomainError);
  auto pp = params(DomainKind::PuncturedPlane);
  pp.inner_cutoff = 0.0;
  EXPECT_THROW(build_grid(pp), DomainError);
}

TEST(Contains, Examples) {
  EXPECT_TRUE(build_grid(params(DomainKind::ClosedDisc)).contains(DomainPoint(Complex{0.5, 0.5})));
  EXPECT_FALSE(build_grid(params(DomainKind::PuncturedDisc)).contains(DomainPoint(Complex{0.0, 0.0})));
  EXPECT_TRUE(build_grid(params(DomainKind::CompactifiedLattice)).contains(DomainPoint(Infinity{})));
  EXPECT_FALSE(build_grid(params(DomainKind::Lattice)).contains(DomainPoint(Infinity{})));
  const auto c = build_grid(params(DomainKind::Circle));
  EXPECT_TRUE(c.contains(DomainPoint(Complex{1.0 + 5e-10, 0.0})));
  EXPECT_FALSE(c.contains(DomainPoint(Complex{1.0 + 5e-9, 0.0})));
}

TEST(SelfMap, Examples) {
  const auto disc = build_grid(params(DomainKind::ClosedDisc));
  EXPECT_TRUE(self_map_check(disc, Expression::parse("z/2")).ok());
  const auto bad = self_map_check(disc, Expression::parse("z+1"));
  ASSERT_FALSE(bad.ok());
  bool saw_one = false;
  for (const auto& v : bad.violations)
    if (std::abs(v.point.coordinate() - Complex{1.0, 0.0}) < 1e-12) {
      saw_one = true;
      EXPECT_LT(std::abs(*v.image - Complex{2.0, 0.0}), 1e-12);
    }
  EXPECT_TRUE(saw_one);
  for (int res : {8, 16, 33}) {
    auto p = params(DomainKind::PuncturedPlane, res);
    EXPECT_TRUE(self_map_check(build_grid(p), Expression::parse("0.5/z")).ok());
  }
}

TEST(SelfMap, EvaluationFailureIsAViolation) {
  auto p = params(DomainKind::ClosedDisc);
  const auto r = self_map_check(build_grid(p), Expression::parse("1/z"));
  ASSERT_FALSE(r.ok());
  EXPECT_FALSE(r.violations.front().image.has_value());
}

TEST(InfinityValue, CauchyTail) {
  auto p = params(DomainKind::CompactifiedLattice);
  p.lo = -200;
  p.hi = 200;
  const auto d = build_grid(p);
  const auto v = infinity_value(d, Expression::parse("2+exp(-abs(z))"));
  ASSERT_TRUE(v);
  EXPECT_NEAR(v->real(), 2.0, 1e-4);
  EXPECT_FALSE(infinity_value(d, Expression::parse("z")).has_value());
}

TEST(Property, GridDeterministicAndContained) {
  for (auto kind : {DomainKind::ClosedDisc, DomainKind::Circle, DomainKind::PuncturedDisc, DomainKind::PuncturedPlane,
                    DomainKind::Lattice, DomainKind::CompactifiedLattice}) {
    for (int res : {8, 13, 32}) {
      const auto p = params(kind, res);
      const auto a = build_grid(p), b = build_grid(p);
      EXPECT_EQ(serialize_grid(a), serialize_grid(b));
      std::size_t distinct = 0;
      for (const auto& pt : a.grid()) {
        EXPECT_TRUE(a.contains(pt)) << to_string(kind);
        distinct += pt.is_infinity() || std::abs(pt.coordinate() - a.grid().front().coordinate()) > 0 ? 1 : 0;
      }
      EXPECT_GE(distinct, 1u);
    }
  }
}
