#include <gtest/gtest.h>

#include <cmath>

#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/special.hpp"
#include "oracles.hpp"

using namespace mcmccoup;

TEST(HRho, EndpointsAndForm) {
  for (double l : {0.5, 2.38, 6.0}) {
    EXPECT_NEAR(h_rho(1.0, l), 2 * oracle::Phi(-l / 2), 1e-15);
    const double p = oracle::Phi(-l / 2);
    EXPECT_NEAR(h_rho(0.0, l), p * p + 2 * oracle::bvn(-l / 2, -l / std::sqrt(2.0), 1 / std::sqrt(2.0)), 1e-13);
  }
  EXPECT_THROW(h_rho(1.01, 1.0), DomainError);
  EXPECT_THROW(h_rho(0.3, 0.0), DomainError);
}

TEST(HRho, MonteCarloAtZero) {
  const double l = 2.38;
  oracle::Mt mt(21);
  oracle::Welford w;
  for (int i = 0; i < 2000000; ++i) {
    const double a = std::exp(-l * mt.normal() - l * l / 2), b = std::exp(-l * mt.normal() - l * l / 2);
    w.add(std::min({1.0, a, b}));
  }
  EXPECT_NEAR(h_rho(0.0, l), w.mean, 3 * w.se());
}

TEST(HRho, IncreasingInRho) {
  for (double l : {1.0, 2.38, 4.0}) {
    double prev = h_rho(-1.0, l);
    for (int k = 1; k <= 200; ++k) {
      const double h = h_rho(-1.0 + 0.01 * k, l);
      EXPECT_GT(h, prev) << l << " " << k;
      prev = h;
    }
  }
}

TEST(SolveFixedPoint, CrnAtOptimalScale) {
  const auto r = solve_fixed_point(LimitKind::crn, 2.38);
  EXPECT_NEAR(r.v_star, 0.538409299015723, 1e-11);
  EXPECT_DOUBLE_EQ(r.s_inf, 2 * (1 - r.v_star));
  EXPECT_EQ(r.stability, Stability::stable);
  EXPECT_LT(r.derivative, 0);
  EXPECT_LE(std::abs(fixed_point_lhs(LimitKind::crn, r.v_star, 2.38, 1.0)), 1e-12);
  // same value for every ellipticity
  for (double eps : {1.5, 10.0, 100.0}) EXPECT_EQ(solve_fixed_point(LimitKind::crn, 2.38, eps).v_star, r.v_star);
}

TEST(SolveFixedPoint, GcrnAndSphericalReflection) {
  for (double l : {0.1, 2.38, 10.0}) {
    for (double eps : {1.0, 3.0}) {
      const auto g = solve_fixed_point(LimitKind::gcrn, l, eps);
      EXPECT_EQ(g.v_star, 1.0);
      EXPECT_EQ(g.s_inf, 0.0);
    }
    EXPECT_EQ(solve_fixed_point(LimitKind::reflection, l, 1.0).s_inf, 0.0);
  }
}

TEST(SolveFixedPoint, ReflectionKnownEllipticities) {
  EXPECT_NEAR(solve_fixed_point(LimitKind::reflection, 2.38, 5.0 / 3).s_inf, 0.362038, 2e-6);
  EXPECT_NEAR(solve_fixed_point(LimitKind::reflection, 2.38, 3.0).s_inf, 0.607601, 2e-6);
  EXPECT_NEAR(solve_fixed_point(LimitKind::reflection, 2.38, 625.0 / 96).s_inf, 0.776396, 2e-6);
}

TEST(SolveFixedPoint, ReflectionResidualInRhoForm) {
  for (double eps : {1.2, 4.0, 30.0}) {
    const auto r = solve_fixed_point(LimitKind::reflection, 1.7, eps);
    EXPECT_LE(std::abs(fixed_point_lhs(LimitKind::reflection, r.v_star, 1.7, eps)), 1e-11);
    EXPECT_EQ(r.stability, Stability::stable);
  }
}

TEST(SolveFixedPoint, Errors) {
  EXPECT_THROW(solve_fixed_point(LimitKind::crn, 0.0), DomainError);
  EXPECT_THROW(solve_fixed_point(LimitKind::crn, 1.0, 0.9), DomainError);
  EXPECT_THROW(solve_fixed_point(LimitKind::optimal, 1.0), DomainError);
}

TEST(SolveFixedPoint, DerivativeBlowsUpNearOne) {
  for (auto [k, eps] : {std::pair{LimitKind::crn, 1.0}, {LimitKind::reflection, 4.0}}) {
    double prev = -1e300;
    for (int p = 2; p <= 6; ++p) {
      const double v = 1 - std::pow(10.0, -p), h = 0.01 * std::pow(10.0, -p);
      const double der = (fixed_point_lhs(k, v + h, 2.38, eps) - fixed_point_lhs(k, v - h, 2.38, eps)) / (2 * h);
      EXPECT_GT(der, prev) << p;
      prev = der;
    }
    EXPECT_GT(prev, 0);
  }
}

TEST(Sweep, OrderingAndMonotonicity) {
  std::vector<double> ls, es;
  for (double l = 0.5; l <= 5.0 + 1e-9; l += 0.25) ls.push_back(l);
  for (double e : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0}) es.push_back(e);
  const auto crn = sweep_asymptotes(LimitKind::crn, ls, es);
  const auto ref = sweep_asymptotes(LimitKind::reflection, ls, es);
  ASSERT_EQ(crn.size(), ls.size() * es.size());
  for (std::size_t i = 0; i < crn.size(); ++i) {
    EXPECT_EQ(crn[i].l, ref[i].l);
    EXPECT_LT(crn[i].v_star, ref[i].v_star);
    EXPECT_LT(ref[i].v_star, 1.0);
  }
  for (std::size_t e = 0; e < es.size(); ++e)
    for (std::size_t j = 1; j < ls.size(); ++j)
      EXPECT_LT(crn[e * ls.size() + j].v_star, crn[e * ls.size() + j - 1].v_star);
  for (std::size_t j = 0; j < ls.size(); ++j)
    for (std::size_t e = 1; e < es.size(); ++e)
      EXPECT_LT(ref[e * ls.size() + j].v_star, ref[(e - 1) * ls.size() + j].v_star);
  EXPECT_THROW(sweep_asymptotes(LimitKind::crn, {}, {1.0}), std::invalid_argument);
}

TEST(Sweep, Limits) {
  EXPECT_GT(solve_fixed_point(LimitKind::crn, 0.01).v_star, 0.99);
  EXPECT_LT(solve_fixed_point(LimitKind::crn, 50.0).v_star, 0.01);
  const double vc = solve_fixed_point(LimitKind::crn, 2.38).v_star;
  EXPECT_NEAR(solve_fixed_point(LimitKind::reflection, 2.38, 1e6).v_star, vc, 1e-4);
  EXPECT_GT(solve_fixed_point(LimitKind::reflection, 2.38, 1.0001).v_star, 0.99);
}

TEST(Esjd, PeakNearOptimalScale) {
  double best = 0, arg = 0;
  for (double l = 1.0; l <= 4.0; l += 0.01)
    if (esjd_limit(l) > best) best = esjd_limit(l), arg = l;
  EXPECT_NEAR(arg, 2.38, 0.02);
}
