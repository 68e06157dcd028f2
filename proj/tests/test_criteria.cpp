#include <gtest/gtest.h>

#include <random>

#include "supercyc/criteria.hpp"

using namespace supercyc;

namespace {

FunctionHandle F(const char* s) { return Expression::parse(s); }

DomainSpec grid(DomainKind kind, int resolution = 16) {
  GridParams p;
  p.kind = kind;
  p.resolution = resolution;
  return build_grid(p);
}

// Direct product oracle: prod_{m<n} (1 + 2^-m).
double half_product(int n) {
  double p = 1.0;
  for (int m = 0; m < n; ++m) p *= 1.0 + std::ldexp(1.0, -m);
  return p;
}

}  // namespace

TEST(ZeroFree, Examples) {
  const auto disc = grid(DomainKind::ClosedDisc);
  const auto z = zero_free_weight_check(F("z"), disc);
  EXPECT_FALSE(z.pass);
  ASSERT_FALSE(z.witnesses.empty());
  EXPECT_LT(std::abs(z.witnesses.front().coordinate()), 1e-15);
  EXPECT_TRUE(zero_free_weight_check(F("exp(z)"), disc).pass);
  EXPECT_TRUE(zero_free_weight_check(F("1"), disc).pass);
  const auto v = zero_free_verdict(z);
  EXPECT_EQ(v.conclusion, Conclusion::NotTauPSupercyclic);
  EXPECT_EQ(v.citation, "Prop 2 (i)");
}

TEST(ZeroFree, InfinityMarkerSkipped) {
  // w = 1/(z+2) tends to 0 at infinity; the check runs over the integers only.
  GridParams p;
  p.kind = DomainKind::CompactifiedLattice;
  p.lo = 0;
  p.hi = 16;
  EXPECT_TRUE(zero_free_weight_check(F("1/(z+2)"), build_grid(p)).pass);
}

TEST(Univalence, Examples) {
  const auto disc = grid(DomainKind::ClosedDisc);
  const auto sq = univalence_check(F("z*z"), disc);
  ASSERT_FALSE(sq.pass);
  ASSERT_EQ(sq.witnesses.size(), 2u);
  EXPECT_LT(std::abs(sq.witnesses[0].coordinate() + sq.witnesses[1].coordinate()), 1e-12);  // r and -r
  EXPECT_EQ(univalence_verdict(sq).citation, "Prop 2 (ii)");
  EXPECT_TRUE(univalence_check(F("z/2"), disc).pass);
  EXPECT_TRUE(univalence_check(F("conj(z)"), grid(DomainKind::Circle)).pass);
}

TEST(Quotient, ConstantIsBounded) {
  const auto q = quotient_sequence(F("z/2"), F("1"), F("1"), 0.5, 0.25, 512);
  EXPECT_EQ(q.classification, QuotientClass::Bounded);
  EXPECT_NEAR(q.bound, 1.0, 1e-12);
  for (const auto& e : q.values) EXPECT_LT(std::abs(e.value() - 1.0), 1e-12);
}

TEST(Quotient, HalfProductConverges) {
  const auto q = quotient_sequence(F("z/2"), F("1+z"), F("1"), 1.0, 0.0, 512);
  ASSERT_EQ(q.classification, QuotientClass::ConvergesTo);
  EXPECT_LT(std::abs(q.limit - half_product(64)), 1e-9);
  const double partial[] = {1.0, 2.0, 3.0, 3.75, 4.21875};
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(q.values[n].value().real(), partial[n], 1e-12);
}

TEST(Quotient, UnimodularRotation) {
  const auto q = quotient_sequence(F("i*z"), F("1"), F("z"), 1.0, Complex{0.0, 1.0}, 512);
  EXPECT_EQ(q.classification, QuotientClass::Bounded);
  EXPECT_NEAR(q.bound, 1.0, 1e-12);
  for (const auto& e : q.values) EXPECT_NEAR(e.log_abs, 0.0, 1e-12);
}

TEST(Quotient, UnboundedAndSkipped) {
  const auto up = quotient_sequence(F("z"), F("2"), F("1"), 1.0, 0.5, 128);
  EXPECT_EQ(up.classification, QuotientClass::Bounded);  // identical weights cancel
  const auto grow = quotient_sequence(F("z/2"), F("2+z"), F("1"), 1.0, 0.0, 2048);
  EXPECT_EQ(grow.classification, QuotientClass::ConvergesTo);
  const auto skip = quotient_sequence(F("z/2"), F("1"), F("z"), 1.0, 0.0, 16);
  EXPECT_EQ(skip.skipped.size(), 17u);
  EXPECT_EQ(skip.classification, QuotientClass::Indeterminate);
  const auto blow = quotient_sequence(F("2*z"), F("1"), F("z"), 1.0, 0.5, 2000);
  EXPECT_EQ(blow.classification, QuotientClass::Bounded);  // f(2^n)/f(2^{n-1}) = 2
}

TEST(QuotientVerdict, PureWeightGivesOperatorScope) {
  const auto disc = grid(DomainKind::ClosedDisc);
  const auto a = quotient_verdict(F("z/2"), F("1+z"), {F("1")}, 1.0, 0.0, 512, disc);
  EXPECT_EQ(a.verdict.conclusion, Conclusion::NotTauPSupercyclic);
  EXPECT_EQ(a.verdict.citation, "Prop 4");
  EXPECT_EQ(a.verdict.scope, Scope::Operator);
  ASSERT_TRUE(a.pure_weight);
}

TEST(QuotientVerdict, TestedFamilyScope) {
  // Rotation orbits do not converge, so only the tested functions are excluded.
  const auto circle = grid(DomainKind::Circle);
  const auto a = quotient_verdict(F("i*z"), F("1"), {F("z"), F("1")}, 1.0, Complex{0.0, 1.0}, 256, circle);
  EXPECT_FALSE(a.pure_weight);
  EXPECT_EQ(a.verdict.conclusion, Conclusion::NotTauPSupercyclic);
  EXPECT_EQ(a.verdict.scope, Scope::TestedFamily);
}

TEST(NonVanishing, ExcludesFunctionsVanishingAlongAnOrbit) {
  const auto disc = grid(DomainKind::ClosedDisc);
  const auto v = non_vanishing_orbit_check(F("z/2"), {F("1"), F("z")}, disc, 16);
  EXPECT_NE(v.evidence_value("excluded_functions").find("1@"), std::string::npos);
  EXPECT_EQ(v.evidence_value("excluded_functions").find("0@"), std::string::npos);
}

TEST(CompactBanach, Examples) {
  GridParams p;
  p.kind = DomainKind::CompactifiedLattice;
  const auto c = compact_banach_obstruction(build_grid(p), true);
  EXPECT_EQ(c.conclusion, Conclusion::NotWeaklySupercyclic);
  EXPECT_EQ(c.citation, "Thm 4");
  p.kind = DomainKind::Lattice;
  EXPECT_EQ(compact_banach_obstruction(build_grid(p), true).conclusion, Conclusion::Inconclusive);
  EXPECT_EQ(compact_banach_obstruction(grid(DomainKind::Circle), true).citation, "Thm 4");
  EXPECT_EQ(compact_banach_obstruction(grid(DomainKind::Circle), false).conclusion, Conclusion::Inconclusive);
}

TEST(Dynamical, Examples) {
  const auto disc = grid(DomainKind::ClosedDisc);
  EXPECT_EQ(dynamical_obstructions(F("z*z"), F("1"), disc).citation, "Thm 5 (i)");
  EXPECT_EQ(dynamical_obstructions(F("(z+1)/2"), F("exp(z)"), disc).citation, "Thm 5 (ii)");
  EXPECT_EQ(dynamical_obstructions(F("-z"), F("1"), grid(DomainKind::Circle)).citation, "Thm 5 (iii)");
}

TEST(Dynamical, StableOrbitsClause) {
  // Rotation of the disc: one fixed point, no convergent orbit, no periodic
  // points for an irrational angle, |w| maximal away from 0.
  const auto v = dynamical_obstructions(F("exp(i*0.7)*z"), F("2+z"), grid(DomainKind::ClosedDisc));
  EXPECT_EQ(v.citation, "Thm 5 (v)");
}

TEST(Dynamical, WeightMaximumClause) {
  const auto v = dynamical_obstructions(F("exp(i*0.7)*z"), F("2-abs(z)"), grid(DomainKind::ClosedDisc));
  EXPECT_EQ(v.citation, "Thm 5 (iv)");
}

TEST(DiscAlgebra, Examples) {
  const auto disc = grid(DomainKind::ClosedDisc);
  const auto a = disc_algebra_verdict(F("(z+0.5)/(1+0.5*z)"), F("exp(z)"), disc);
  EXPECT_EQ(a.citation, "Thm 6");
  EXPECT_EQ(a.evidence_value("denjoy_wolff_point"), "1+0i");
  const auto b = disc_algebra_verdict(F("z/2"), F("1"), disc);
  EXPECT_EQ(b.citation, "Thm 6");
  EXPECT_EQ(b.evidence_value("denjoy_wolff_point"), "0+0i");
  EXPECT_THROW(disc_algebra_verdict(F("z+1"), F("1"), disc), SelfMapError);
}

TEST(Spectral, Examples) {
  OperatorMatrix d{Eigen::MatrixXcd::Zero(2, 2)};
  d.entries(0, 0) = 1.0;
  d.entries(1, 1) = 0.5;
  EXPECT_EQ(spectral_obstruction(d).citation, "Cor 10");
  OperatorMatrix r{Eigen::MatrixXcd(2, 2)};
  r.entries << 0.9 * std::cos(0.4), -0.9 * std::sin(0.4), 0.9 * std::sin(0.4), 0.9 * std::cos(0.4);
  EXPECT_EQ(spectral_obstruction(r).conclusion, Conclusion::NotWeaklySupercyclic);
  for (int n : {2, 4, 8, 16}) {
    OperatorMatrix b{Eigen::MatrixXcd::Zero(n, n)};
    for (int j = 1; j < n; ++j) b.entries(j - 1, j) = 1.0 / (j + 1);
    const auto v = spectral_obstruction(b);
    EXPECT_EQ(v.conclusion, Conclusion::Inconclusive) << n;
    EXPECT_NEAR(b.norm_estimate(), 0.5, 1e-12);
  }
  OperatorMatrix one{Eigen::MatrixXcd::Ones(1, 1)};
  EXPECT_THROW(spectral_obstruction(one), PreconditionError);
}

TEST(Laurent, Examples) {
  const auto inv = laurent_obstruction(0.5, F("1/z"), 0.7, {-1});
  const auto& row = inv.rows.front();
  ASSERT_EQ(row.k, -1);
  EXPECT_LT(std::abs(row.p_f - 1.0), 1e-12);
  EXPECT_LT(std::abs(row.p_fg - 2.0), 1e-12);

  const auto cube = laurent_obstruction(0.5, F("z^3"), 0.7, {3});
  EXPECT_LT(std::abs(cube.rows.front().p_fg - 0.125), 1e-12);

  const auto sq = laurent_obstruction(0.5, F("z^2"), 0.7, {1});
  EXPECT_LT(std::abs(sq.rows.front().p_f), 1e-12);
  EXPECT_LT(std::abs(sq.rows.front().p_fg), 1e-12);
  EXPECT_EQ(sq.verdict.citation, "Thm 12");

  EXPECT_THROW(laurent_obstruction(1.0, F("z"), 1.0, {1}), PreconditionError);
  EXPECT_THROW(laurent_obstruction(0.5, F("1/(z-0.7)"), 0.7, {1}), PreconditionError);
}

TEST(Punctured, ClassifierExamples) {
  GridParams p;
  p.kind = DomainKind::PuncturedPlane;
  const auto d = build_grid(p);
  const auto a = punctured_self_map_classifier(F("2*z"), d);
  EXPECT_EQ(a.form, PuncturedForm::Linear);
  EXPECT_LT(std::abs(a.a - 2.0), 1e-15);
  const auto b = punctured_self_map_classifier(F("0.5/z"), d);
  EXPECT_EQ(b.form, PuncturedForm::Inversion);
  EXPECT_LT(std::abs(b.a - 0.5), 1e-15);
  const auto c = punctured_self_map_classifier(F("z+1"), d);
  EXPECT_EQ(c.form, PuncturedForm::NotInjectiveForm);
  // the self-map test only sees grid samples, so z+1 slips through; the
  // zero map does not
  EXPECT_FALSE(punctured_self_map_classifier(F("z-z"), d).self_map);
}

TEST(Punctured, DiscBranches) {
  GridParams p;
  p.kind = DomainKind::PuncturedDisc;
  const auto d = build_grid(p);
  const auto f = F("exp(z)+exp(1/z)");
  EXPECT_EQ(punctured_disc_verdict(F("z/2"), F("1"), d, f, true).citation, "Thm 12");
  EXPECT_EQ(punctured_disc_verdict(F("z*z"), F("1"), d, f, true).citation, "Cor 11");
  EXPECT_EQ(punctured_disc_verdict(F("0.5+0.25*z"), F("1"), d, f, true).evidence_value("branch"), "extends across 0");
  EXPECT_EQ(punctured_disc_verdict(F("z/2"), F("1"), d, f, false).conclusion, Conclusion::Inconclusive);
  EXPECT_EQ(punctured_disc_verdict(F("z/2"), F("2"), d, f, true).conclusion, Conclusion::Inconclusive);
}

TEST(Circle, Examples) {
  const auto c = grid(DomainKind::Circle);
  EXPECT_EQ(circle_verdict(F("-z"), F("exp(z)"), c).citation, "Prop 21");
  EXPECT_EQ(circle_verdict(F("exp(i*0.3)*z"), F("z"), c).citation, "Prop 22");
  CircleOptions opt;
  opt.no_wandering_interval = true;
  const auto golden = circle_verdict(F("z*exp(i*(2*pi*0.6180339887 + 0.05*im(z)))"), F("1"), c, opt);
  EXPECT_EQ(golden.citation, "Thm 23");
  opt.no_wandering_interval = false;
  EXPECT_EQ(circle_verdict(F("z*exp(i*(2*pi*0.6180339887 + 0.05*im(z)))"), F("1"), c, opt).conclusion,
            Conclusion::Inconclusive);
  EXPECT_EQ(circle_verdict(F("z*z"), F("1"), c).citation, "Prop 2 (ii)");
}

TEST(Isometry, Examples) {
  const auto disc = grid(DomainKind::ClosedDisc);
  EXPECT_EQ(isometry_verdict(F("-conj(z)"), F("exp(i*re(z))"), disc).citation, "Thm 19");
  EXPECT_EQ(isometry_verdict(F("z/2"), F("1"), disc).conclusion, Conclusion::Inconclusive);
}

// ---------------------------------------------------------------------------
// Properties

TEST(Property, LogFormMatchesNaiveProduct) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.8, 0.8), c(0.3, 1.7);
  for (int trial = 0; trial < 200; ++trial) {
    char phi_src[96], w_src[96];
    std::snprintf(phi_src, sizeof phi_src, "(%.6f+%.6f*i)*z+(%.6f)", 0.6 * u(rng), 0.6 * u(rng), 0.2 * u(rng));
    std::snprintf(w_src, sizeof w_src, "%.6f+(%.6f+%.6f*i)*z", c(rng), 0.3 * u(rng), 0.3 * u(rng));
    const auto phi = F(phi_src), w = F(w_src), f = F("2+z*z");
    const Complex z1{u(rng), u(rng)}, z2{u(rng), u(rng)};
    const int N = 200;
    const auto q = quotient_sequence(phi, w, f, z1, z2, N);
    Complex a = z1, b = z2, pa = 1.0, pb = 1.0;
    std::size_t idx = 0;
    for (int n = 0; n <= N; ++n) {
      const Complex naive = pa * *f.eval(a) / (pb * *f.eval(b));
      if (std::abs(naive) > 1e-300 && std::abs(naive) < 1e300) {
        ASSERT_LT(idx, q.values.size());
        ASSERT_EQ(q.values[idx].n, n);
        EXPECT_LE(std::abs(q.values[idx].value() - naive), 1e-9 * std::abs(naive)) << phi_src << " " << w_src;
      }
      ++idx;
      pa *= *w.eval(a);
      pb *= *w.eval(b);
      a = *phi.eval(a);
      b = *phi.eval(b);
    }
  }
}

TEST(Property, QuotientSymmetry) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex z1{u(rng), u(rng)}, z2{u(rng), u(rng)};
    const auto phi = F("z/2"), w = F("1.5+z"), f = F("exp(z)");
    const auto q = quotient_sequence(phi, w, f, z1, z2, 256);
    const auto r = quotient_sequence(phi, w, f, z2, z1, 256);
    if (q.classification != QuotientClass::Bounded) continue;
    for (const auto& e : r.values) EXPECT_GE(std::abs(e.value()), (1.0 / q.bound) * (1.0 - 1e-12));
  }
}

TEST(Property, LaurentIdentityForTrigPolynomials) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<Complex> as = {0.3, 0.5, 0.8, 1.25, 2.0};
  for (int degree = 0; degree <= 16; ++degree) {
    std::string src = "0";
    for (int k = -degree; k <= degree; ++k) {
      char term[96];
      std::snprintf(term, sizeof term, "+(%.9f+%.9f*i)*z^(%d)", u(rng), u(rng), k);
      src += term;
    }
    const auto f = F(src.c_str());
    std::vector<int> ks;
    for (int k = -degree - 1; k <= degree + 1; ++k) ks.push_back(k);
    for (const auto& a : as) {
      const auto res = laurent_obstruction(a, f, 1.0, ks);
      for (const auto& row : res.rows) EXPECT_LT(row.residual, 1e-9) << "deg " << degree << " a " << a << " k " << row.k;
    }
  }
}

TEST(Property, SpectralFiresOnScaledUnitaries) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = {g(rng), g(rng)};
    const Eigen::MatrixXcd U = Eigen::HouseholderQR<Eigen::MatrixXcd>(A).householderQ();
    for (double c : {0.5, 1.0, 2.0}) {
      OperatorMatrix T{c * U};
      EXPECT_GE(T.norm_estimate(), 0.0);
      EXPECT_EQ(spectral_obstruction(T).conclusion, Conclusion::NotWeaklySupercyclic) << "n=" << n << " c=" << c;
    }
  }
}

TEST(Property, NormDominatesSpectralRadius) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    OperatorMatrix T{Eigen::MatrixXcd(n, n)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T.entries(i, j) = {g(rng), g(rng)};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T.entries);
    EXPECT_GE(T.norm_estimate(), es.eigenvalues().cwiseAbs().maxCoeff() - 1e-8);
  }
}
