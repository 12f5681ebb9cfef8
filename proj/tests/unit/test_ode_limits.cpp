#include <gtest/gtest.h>

#include "drift_oracle.hpp"
#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/ode_limits.hpp"
#include "mcmccoup/special.hpp"
#include "oracles.hpp"

using namespace mcmccoup;

TEST(DriftA, FixedPointAndSigns) {
  for (double l : {0.3, 1.0, 2.38, 5.0}) EXPECT_NEAR(drift_a(1.0, l), 0.0, 1e-15);
  EXPECT_GT(drift_a(0.01, 2.38), 0.0);
  EXPECT_GT(drift_a(1e-6, 2.38), 0.0);
  EXPECT_LT(drift_a(2.0, 2.38), 0.0);
  EXPECT_LT(drift_a(10.0, 2.38), 0.0);
  EXPECT_THROW(drift_a(0.0, 1.0), DomainError);
}

TEST(DriftA, MonteCarloOfNormIncrement) {
  // d E[change of |X|^2/d] from the exact reduced simulation
  for (double x : {0.01, 2.0}) {
    const auto p = drift::make_plane(5000, x, 1.0, 0.0, 2.38);
    RngStream rng(1, 0);
    oracle::Welford w;
    for (int i = 0; i < 200000; ++i) w.add(drift::draw(p, CouplingKind::crn, rng).dx);
    const double a = 2.38 * 2.38 * drift_a(x, 2.38);
    EXPECT_NEAR(w.mean, a, 4 * w.se() + 0.01 * std::abs(a)) << x;
    EXPECT_EQ(w.mean > 0, a > 0);
  }
}

TEST(RhoLimit, Forms) {
  EXPECT_EQ(rho_limit(LimitKind::gcrn, {1.3, 0.4, 0.1}), 1.0);
  for (double v : {-1.0, -0.5, 0.0, 0.7, 0.999}) EXPECT_EQ(rho_limit(LimitKind::reflection, {1, 1, v}), 1.0);
  EXPECT_EQ(rho_limit(LimitKind::crn, {1, 1, 0}), 0.0);
  const OdeState w{1.5, 0.5, 0.2};
  EXPECT_NEAR(rho_limit(LimitKind::reflection, w),
              (2 * 1.5 * 0.5 - 2.0 * 0.2) / (std::sqrt(0.75) * (2.0 - 0.4)), 1e-15);
}

TEST(GValue, ClosedFormsAndContinuity) {
  for (double l : {0.5, 2.38, 4.0}) EXPECT_NEAR(g_value(1, 1, 1, l), 2 * std_normal_cdf(-l / 2), 1e-15);
  for (auto [x, y] : {std::pair{1.0, 1.0}, {1.5, 0.5}, {0.3, 2.0}}) {
    // g has a square-root cusp at rho = 1 when x != y; the branch switch must not add a jump
    const double g1 = g_value(x, y, 1.0, 2.38);
    for (double dr : {1e-3, 1e-5, 1.01e-6, 0.99e-6, 1e-8})
      EXPECT_LE(std::abs(g_value(x, y, 1 - dr, 2.38) - g1), 0.3 * std::sqrt(dr) + 1e-12) << dr;
  }
  EXPECT_THROW(g_value(1, 1, 1.1, 1), DomainError);
}

TEST(GValue, MonteCarloOracle) {
  const double x = 1.5, y = 0.5, r = 0.3, l = 2.38;
  oracle::Mt mt(5);
  oracle::Welford w;
  for (int i = 0; i < 2000000; ++i) {
    const double z1 = mt.normal(), z2 = r * z1 + std::sqrt(1 - r * r) * mt.normal();
    const double a = std::exp(-l * std::sqrt(x) * z1 - l * l / 2);
    const double b = std::exp(-l * std::sqrt(y) * z2 - l * l / 2);
    w.add(std::min({1.0, a, b}));
  }
  EXPECT_NEAR(g_value(x, y, r, l), w.mean, 3 * w.se());
}

TEST(GValue, MonotoneInRho) {
  double prev = g_value(1, 1, -1, 2.38);
  for (double r = -0.99; r <= 1.0 + 1e-12; r += 0.01) {
    const double g = g_value(1, 1, std::min(1.0, r), 2.38);
    EXPECT_GT(g, prev - 1e-14) << r;
    prev = g;
  }
}

TEST(DriftC, FixedPointsAndOptimal) {
  for (auto k : {LimitKind::gcrn, LimitKind::reflection, LimitKind::optimal}) {
    const auto c = drift_c({1, 1, 1}, 2.38, k);
    EXPECT_NEAR(c.x, 0, 1e-15);
    EXPECT_NEAR(c.y, 0, 1e-15);
    EXPECT_NEAR(c.v, 0, 1e-14);
  }
  for (double v : {-0.5, 0.0, 0.6}) {
    const double l = 2.38;
    const auto c = drift_c({1, 1, v}, l, LimitKind::gcrn);
    EXPECT_NEAR(c.v, l * l * 2 * std_normal_cdf(-l / 2) * (1 - v), 1e-14);
    EXPECT_GT(c.v, 0);
    EXPECT_NEAR(drift_c({1, 1, v}, l, LimitKind::optimal).v, c.v, 1e-14);
  }
  EXPECT_NEAR(g_opt(1, 1, 2.38), 2 * std_normal_cdf(-1.19), 1e-15);
}

TEST(DriftC, OptimalDominatesCouplings) {
  oracle::Mt mt(6);
  for (int i = 0; i < 200; ++i) {
    const double x = 0.2 + 2 * mt.uniform(), y = 0.2 + 2 * mt.uniform();
    const double v = (2 * mt.uniform() - 1) * std::sqrt(x * y) * 0.99;
    const double opt = g_opt(x, y, 2.38);
    for (auto k : {LimitKind::crn, LimitKind::reflection, LimitKind::gcrn})
      EXPECT_LE(g_value(x, y, rho_limit(k, {x, y, v}), 2.38), opt + 1e-12);
  }
}

TEST(Integrate, ConstantAtFixedPoint) {
  const auto tr = integrate_w({1, 1, 1}, 2.38, LimitKind::gcrn, 3.0);
  for (const auto& s : tr) {
    EXPECT_NEAR(s.w.x, 1, 1e-14);
    EXPECT_NEAR(s.w.v, 1, 1e-14);
  }
}

TEST(Integrate, GcrnConvergesMonotonically) {
  const auto tr = integrate_w({1, 1, 0}, 2.38, LimitKind::gcrn, 20.0);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_LE(tr[i].w.s(), tr[i - 1].w.s() + 1e-15);
  EXPECT_LT(tr.back().w.s(), 1e-6);
  EXPECT_NEAR(tr.back().w.v, 1.0, 1e-6);
}

TEST(Integrate, CrnPlateauMatchesFixedPoint) {
  const auto tr = integrate_w({1, 1, 0}, 2.38, LimitKind::crn, 60.0);
  const double s_inf = solve_fixed_point(LimitKind::crn, 2.38).s_inf;
  EXPECT_NEAR(tr.back().w.s(), s_inf, 1e-3);
  // rounded value used in the literature
  EXPECT_NEAR(tr.back().w.s(), 0.92, 0.005);
}

TEST(Integrate, StepHalvingAndSdIdentity) {
  for (auto k : {LimitKind::crn, LimitKind::reflection, LimitKind::gcrn, LimitKind::optimal}) {
    const OdeState w0{1.5, 0.5, 0.3};
    IntegrateOptions fine;
    fine.dt = 5e-4;
    const auto a = integrate_w(w0, 1.414, k, 3.0);
    const auto b = integrate_w(w0, 1.414, k, 3.0, fine);
    EXPECT_NEAR(a.back().w.x, b.back().w.x, 1e-8);
    EXPECT_NEAR(a.back().w.v, b.back().w.v, 1e-8);
    const auto sd = integrate_sd(w0, 1.414, k, 3.0);
    ASSERT_EQ(sd.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(sd[i].w.s(), a[i].w.s(), 1e-9);
      EXPECT_NEAR(sd[i].t, a[i].t, 1e-12);
    }
  }
}

TEST(Integrate, StartOutsideStateSpace) {
  EXPECT_THROW(integrate_w({1, 1, 1.5}, 2.38, LimitKind::crn, 1.0), DomainError);
  EXPECT_THROW(integrate_w({1, 1, 0}, 2.38, LimitKind::crn, 1.0, {0.0, 0.01, 1e-8}), std::invalid_argument);
}

TEST(Elliptical, Infinitesimals) {
  const auto e = elliptical_infinitesimal(1, 1, 0.3, 1, 1, 0.5, 1.7);
  EXPECT_NEAR(e.ax, 0.0, 1e-15);
  EXPECT_NEAR(e.ay, 0.0, 1e-15);
  for (double x1 : {0.4, 1.0, 2.2}) {
    const auto f = elliptical_infinitesimal(x1, x1, 0.1, x1, x1, 1.0, 1.7);
    EXPECT_NEAR(f.ax, drift_a(x1, 1.7), 1e-15);
  }
  // b_k vanishes at a common v for every level once x = y = 1
  const double g = g_value(1, 1, 0.4, 2.0);
  const double vstar = g / (2 * accept_exp_term(1, 2.0));
  for (double xk : {0.5, 1.0, 3.0}) {
    const auto h = elliptical_infinitesimal(xk, xk, vstar, 1, 1, 0.4, 2.0);
    EXPECT_NEAR(h.bv, 0.0, 1e-15);
  }
}

TEST(TwoEigenvalue, SphericalDispatch) {
  const OdeState w{1, 1, 0};
  const auto a = two_eigenvalue_ode(1.0, {w, w}, 2.38, LimitKind::crn, 4.0);
  const auto b = integrate_w(w, 2.38, LimitKind::crn, 4.0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].scaled_sq_dist, b[i].w.s(), 1e-12);
}

TEST(TwoEigenvalue, NearSphericalIsContinuous) {
  const OdeState w{1, 1, 0};
  const auto a = two_eigenvalue_ode(1.0 + 1e-6, {w, w}, 2.38, LimitKind::reflection, 4.0);
  const auto b = integrate_w(w, 2.38, LimitKind::reflection, 4.0);
  EXPECT_NEAR(a.back().scaled_sq_dist, b.back().w.s(), 1e-4);
}

TEST(TwoEigenvalue, AsymptotesMatchFixedPoints) {
  const double s2 = 24.0;
  const double z1 = std::sqrt(0.5 * (1 + 1 / s2));
  const double l = 2.38 / z1;  // l_1 = 2.38
  const double eps = 625.0 / 96.0;
  const OdeState w{1, 1, 0};
  IntegrateOptions o;
  o.record_every = 1.0;
  const auto g = two_eigenvalue_ode(s2, {w, w}, l, LimitKind::gcrn, 250.0, o);
  // the low-variance block contracts s2 times slower
  EXPECT_LT(g.back().scaled_sq_dist, 1e-3);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LE(g[i].scaled_sq_dist, g[i - 1].scaled_sq_dist + 1e-12);
  const auto r = two_eigenvalue_ode(s2, {w, w}, l, LimitKind::reflection, 80.0, o);
  EXPECT_NEAR(r.back().scaled_sq_dist, solve_fixed_point(LimitKind::reflection, 2.38, eps).s_inf, 2e-3);
  const auto c = two_eigenvalue_ode(s2, {w, w}, l, LimitKind::crn, 80.0, o);
  EXPECT_NEAR(c.back().scaled_sq_dist, solve_fixed_point(LimitKind::crn, 2.38).s_inf, 2e-3);
}

TEST(TwoEigenvalue, BlockDriftMatchesDirectSixDimensionalForm) {
  // direct drift of the odd/even triplets for Sigma = diag(1, s2, 1, s2, ...)
  const double s2 = 5.0, l = 1.9;
  const double z1sq = 0.5 * (1 + 1 / s2), l1 = l * std::sqrt(z1sq);
  const BlockState w{{1.2, 0.8, 0.3}, {0.7, 1.1, -0.2}};
  const double x1 = (w.odd.x + w.even.x / s2) / (1 + 1 / s2);
  const double y1 = (w.odd.y + w.even.y / s2) / (1 + 1 / s2);
  for (auto k : {LimitKind::crn, LimitKind::reflection, LimitKind::gcrn}) {
    const double rho = block_rho(k, w, s2);
    const double g = g_value(x1, y1, rho, l1);
    const double ex = accept_exp_term(x1, l1), ey = accept_exp_term(y1, l1);
    const double px = std_normal_cdf(-l1 / (2 * std::sqrt(x1))), py = std_normal_cdf(-l1 / (2 * std::sqrt(y1)));
    const auto d = block_drift(w, s2, l, k);
    const double l2 = l * l;
    EXPECT_NEAR(d.odd.x, l2 * ((1 - 2 * w.odd.x) * ex + px), 1e-12);
    EXPECT_NEAR(d.even.x, l2 / s2 * ((1 - 2 * w.even.x) * ex + px), 1e-12);
    EXPECT_NEAR(d.odd.y, l2 * ((1 - 2 * w.odd.y) * ey + py), 1e-12);
    EXPECT_NEAR(d.odd.v, l2 * (g - w.odd.v * (ex + ey)), 1e-12);
    EXPECT_NEAR(d.even.v, l2 / s2 * (g - w.even.v * (ex + ey)), 1e-12);
  }
}

namespace {

struct DriftCheck {
  double mc[3], se[3];
};

DriftCheck mc_drift(const OdeState& w, double l, LimitKind k, int d, int n, std::uint64_t seed) {
  const auto p = drift::make_plane(d, w.x, w.y, w.v, l);
  RngStream rng(seed, 0);
  oracle::Welford a, b, c;
  for (int i = 0; i < n; ++i) {
    const auto s = drift::draw(p, drift::as_coupling(k), rng);
    a.add(s.dx);
    b.add(s.dy);
    c.add(s.dv);
  }
  return {{a.mean, b.mean, c.mean}, {a.se(), b.se(), c.se()}};
}

}  // namespace

TEST(DriftConsistency, ReducedSimulationMatchesLimit) {
  oracle::Mt mt(7);
  int misses = 0, total = 0;
  for (int i = 0; i < 20; ++i) {
    const double x = 0.3 + 1.7 * mt.uniform(), y = 0.3 + 1.7 * mt.uniform();
    const double v = (2 * mt.uniform() - 1) * 0.95 * std::sqrt(x * y);
    const double l = 1.0 + 2.0 * mt.uniform();
    for (auto k : {LimitKind::crn, LimitKind::reflection, LimitKind::gcrn}) {
      const auto c = drift_c({x, y, v}, l, k);
      const auto m = mc_drift({x, y, v}, l, k, 5000, 100000, 100 + i);
      const double lim[3] = {c.x, c.y, c.v};
      for (int j = 0; j < 3; ++j) {
        ++total;
        if (std::abs(m.mc[j] - lim[j]) > 3 * m.se[j]) ++misses;
      }
    }
  }
  // 180 comparisons at 3 SE: a handful of exceedances is chance, a systematic bias is not
  EXPECT_LE(misses, 6) << misses << " of " << total;
}

TEST(DriftConsistency, ReducedOracleAgreesWithFullSimulation) {
  const int d = 200;
  const double l = 2.0;
  RngStream init(8, 0);
  Eigen::VectorXd X(d), Y(d);
  init.fill_normal(X);
  init.fill_normal(Y);
  Y = 0.6 * X + 0.8 * Y;
  const auto t = TargetModel::spherical(d);
  const OdeState w{X.squaredNorm() / d, Y.squaredNorm() / d, X.dot(Y) / d};
  for (auto k : {LimitKind::crn, LimitKind::reflection, LimitKind::gcrn}) {
    RngStream rng(9, static_cast<std::uint64_t>(k));
    oracle::Welford full;
    const auto s0 = make_coupled_state(t, X, Y);
    for (int i = 0; i < 40000; ++i) {
      auto s = s0;
      coupled_rwm_step(s, CouplingSpec{drift::as_coupling(k), 0}, l / std::sqrt(double(d)), t, rng);
      full.add(s.X().dot(s.Y()) - X.dot(Y));
    }
    const auto m = mc_drift(w, l, k, d, 200000, 10);
    EXPECT_NEAR(full.mean, m.mc[2], 3 * std::hypot(full.se(), m.se[2])) << to_string(k);
  }
}

TEST(DriftConsistency, FluctuationsStayBounded) {
  const OdeState w{1.2, 0.8, 0.3};
  double prev = 0.0;
  for (int d : {1000, 2000, 5000}) {
    const auto p = drift::make_plane(d, w.x, w.y, w.v, 2.38);
    RngStream rng(11, d);
    oracle::Welford m2;
    for (int i = 0; i < 100000; ++i) {
      const auto s = drift::draw(p, CouplingKind::crn, rng);
      m2.add(s.dx * s.dx + s.dy * s.dy + s.dv * s.dv);  // d^2 |dW|^2
    }
    EXPECT_TRUE(std::isfinite(m2.mean));
    if (prev > 0) {
      EXPECT_LT(m2.mean / prev, 2.0);
      EXPECT_GT(m2.mean / prev, 0.5);
    }
    prev = m2.mean;
  }
}
