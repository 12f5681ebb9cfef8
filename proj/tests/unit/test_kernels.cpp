#include <gtest/gtest.h>

#include "mcmccoup/couplings.hpp"
#include "mcmccoup/kernels.hpp"
#include "mcmccoup/special.hpp"
#include "oracles.hpp"

using namespace mcmccoup;
using Eigen::VectorXd;

TEST(Rwm, ZeroIncrementAlwaysAccepted) {
  auto t = TargetModel::spherical(5);
  const VectorXd x = VectorXd::LinSpaced(5, -1, 1);
  const auto r = rwm_step({x, VectorXd::Zero(5), 1.0, 0.3}, t);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.x_next, x);
}

TEST(Rwm, SphericalAcceptanceIndicator) {
  auto t = TargetModel::spherical(20);
  oracle::Mt mt(1);
  for (int i = 0; i < 5000; ++i) {
    const VectorXd x = mt.normals(20), z = mt.normals(20);
    const double u = mt.uniform(), h = 0.53;
    const bool expect = u <= std::exp(-h * x.dot(z) - 0.5 * h * h * z.squaredNorm());
    const auto r = rwm_step({x, z, u, h}, t);
    EXPECT_EQ(r.accepted, expect);
    EXPECT_EQ(r.x_next, expect ? VectorXd(x + h * z) : x);
  }
}

TEST(Rwm, Deterministic) {
  auto t = TargetModel::ar1(10, 0.5);
  oracle::Mt mt(2);
  const RwmStepInputs in{mt.normals(10), mt.normals(10), 0.3, 0.7};
  const auto a = rwm_step(in, t), b = rwm_step(in, t);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.x_next, b.x_next);
}

TEST(Rwm, InPlaceUpdateAgreesWithPureStep) {
  auto t = TargetModel::ar1(8, 0.3);
  oracle::Mt mt(3);
  ChainPoint p = make_point(t, mt.normals(8)), scratch;
  for (int i = 0; i < 1000; ++i) {
    const VectorXd z = mt.normals(8);
    const double u = mt.uniform();
    const auto ref = rwm_step({p.x, z, u, 0.6}, t);
    const bool acc = rwm_update(p, z, u, 0.6, t, scratch);
    EXPECT_EQ(acc, ref.accepted);
    EXPECT_EQ(p.x, ref.x_next);
    EXPECT_DOUBLE_EQ(p.logpi, t.log_density(p.x));
  }
}

TEST(Rwm, OptimalScalingAcceptance) {
  const int d = 1000;
  auto t = TargetModel::spherical(d);
  RngStream rng(10, 0);
  VectorXd x0(d), z(d);
  rng.fill_normal(x0);
  ChainPoint p = make_point(t, x0), scratch;
  const double h = 2.38 / std::sqrt(double(d));
  long acc = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    rng.fill_normal(z);
    acc += rwm_update(p, z, rng.uniform(), h, t, scratch);
  }
  EXPECT_NEAR(double(acc) / n, 0.234, 0.01);
}

TEST(Hug, SphericalLevelSetAndAcceptance) {
  const int d = 50;
  auto t = TargetModel::spherical(d);
  oracle::Mt mt(4);
  for (int i = 0; i < 200; ++i) {
    const VectorXd x = mt.normals(d), v = mt.normals(d);
    VectorXd xp = x, vp = v;
    ASSERT_TRUE(hug_trajectory(xp, vp, HugParams{0.5, 10}, t));
    EXPECT_NEAR(xp.squaredNorm(), x.squaredNorm(), 1e-10 * x.squaredNorm());
    EXPECT_NEAR(vp.norm(), v.norm(), 1e-12 * v.norm());
    // ratio is 1 up to rounding of the log densities
    const auto r = hug_step(x, v, HugParams{0.5, 10}, 1.0 - 1e-9, t);
    EXPECT_TRUE(r.accepted);
  }
}

TEST(Hug, SingleBounceLinearMap) {
  const int d = 200000;
  const double delta = 0.5;
  auto t = TargetModel::spherical(d);
  RngStream rng(5, 0);
  VectorXd x(d), v(d);
  rng.fill_normal(x);
  rng.fill_normal(v);
  VectorXd xp = x, vp = v;
  hug_trajectory(xp, vp, HugParams{delta, 1}, t);
  const double k = delta * delta / (4 + delta * delta);
  const VectorXd approx = (1 - 2 * k) * x + delta * (1 - k) * v;
  EXPECT_LE((xp - approx).norm() / xp.norm(), 0.01);
}

TEST(Hug, ZeroGradientFlagged) {
  auto t = TargetModel::spherical(3);
  // v chosen so the single half step lands at the origin
  const VectorXd x = VectorXd::Ones(3), v = -4.0 * VectorXd::Ones(3);
  const auto r = hug_step(x, v, HugParams{0.5, 1}, 0.5, t);
  EXPECT_TRUE(r.flagged);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.x_next, x);
}

TEST(Hop, IsotropicDegeneracy) {
  auto t = TargetModel::ar1(6, 0.4);
  oracle::Mt mt(6);
  const HopParams hp{1.7, 1.7};
  for (int i = 0; i < 50; ++i) {
    const ChainPoint p = make_point(t, mt.normals(6));
    const VectorXd z = mt.normals(6);
    const double z1 = mt.normal();
    const HopLaw law = hop_law(p.x, p.grad, hp);
    const double g = p.grad.norm();
    const VectorXd y = law.draw(z, z1);
    // isotropic: y = x + (lambda / g) (z with its n-component replaced by z1)
    const VectorXd n = p.grad / g;
    EXPECT_LE((y - (p.x + (hp.lambda / g) * (z - n.dot(z) * n + z1 * n))).norm(), 1e-12);
    const double expect = 6 * std::log(g) - std::log(hp.lambda) - 5 * std::log(hp.mu) -
                          0.5 * g * g * (y - p.x).squaredNorm() / (hp.lambda * hp.lambda);
    EXPECT_NEAR(law.log_density(y), expect, 1e-10);
  }
}

TEST(Hop, LogDensityIsNormalised) {
  // exp(log_density) integrates to (2 pi)^{d/2} in d = 2: check by importance sampling on the draw map
  auto t = TargetModel::ar1(2, 0.6);
  const ChainPoint p = make_point(t, VectorXd::Constant(2, 0.8));
  const HopLaw law = hop_law(p.x, p.grad, HopParams{3.0, 0.5});
  oracle::Mt mt(7);
  oracle::Welford w;
  for (int i = 0; i < 200000; ++i) {
    const VectorXd y = law.draw(mt.normals(2), mt.normal());
    // -log q(y) - d/2 log(2 pi) should average to the Gaussian entropy
    w.add(-law.log_density(y) + std::log(2 * M_PI));
  }
  const double entropy = 1.0 + std::log(2 * M_PI) - (2 * std::log(law.gnorm) - std::log(3.0) - std::log(0.5));
  EXPECT_NEAR(w.mean, entropy, 4 * w.se());
}

TEST(Hop, ZeroGradientFlagged) {
  auto t = TargetModel::spherical(4);
  const auto r = hop_step(VectorXd::Zero(4), VectorXd::Ones(4), 0.1, 0.5, HopParams{}, t);
  EXPECT_TRUE(r.flagged);
  EXPECT_THROW(hop_law(VectorXd::Zero(4), VectorXd::Zero(4), HopParams{}), DomainError);
}

TEST(Hop, SphericalInvariance) {
  const int d = 100;
  auto t = TargetModel::spherical(d);
  RngStream rng(8, 0);
  VectorXd x(d), z(d);
  rng.fill_normal(x);
  oracle::Welford w;
  for (long i = 0; i < 1000000; ++i) {
    rng.fill_normal(z);
    const double z1 = rng.normal();
    x = hop_step(x, z, z1, rng.uniform(), HopParams{20, 1}, t).x_next;
    if (i >= 1000) w.add(x.squaredNorm() / d);
  }
  EXPECT_NEAR(w.mean, 1.0, 0.02);
}

namespace {

struct Moments {
  VectorXd mean, var;
};

template <class Step>
Moments run_chain(int d, long n, std::uint64_t seed, Step step) {
  RngStream rng(seed, 0);
  // off the mode: gradient-driven kernels cannot leave a zero-gradient point
  VectorXd x = VectorXd::Constant(d, 0.5);
  VectorXd s1 = VectorXd::Zero(d), s2 = VectorXd::Zero(d);
  for (long i = 0; i < n; ++i) {
    step(x, rng);
    s1 += x;
    s2 += x.cwiseProduct(x);
  }
  Moments m;
  m.mean = s1 / n;
  m.var = s2 / n - m.mean.cwiseProduct(m.mean);
  return m;
}

void expect_moments(const Moments& m, const VectorXd& var, const char* what) {
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    EXPECT_NEAR(m.mean[i], 0.0, 0.02) << what << " coord " << i;
    EXPECT_NEAR(m.var[i] / var[i], 1.0, 0.03) << what << " coord " << i;
  }
}

}  // namespace

class KernelInvariance : public ::testing::TestWithParam<int> {};

TEST_P(KernelInvariance, RwmAndHugHopPreserveMoments) {
  const int d = GetParam();
  VectorXd var(d);
  for (int i = 0; i < d; ++i) var[i] = 0.6 + 0.8 * i / std::max(1, d - 1);
  for (const auto& t : {TargetModel::spherical(d), TargetModel::diagonal(var)}) {
    const VectorXd tv = t.kind() == TargetKind::spherical ? VectorXd::Ones(d) : var;
    const double h = 2.38 / std::sqrt(double(d));
    auto rwm = [&](VectorXd& x, RngStream& rng) {
      VectorXd z(d);
      rng.fill_normal(z);
      x = rwm_step({x, z, rng.uniform(), h}, t).x_next;
    };
    expect_moments(run_chain(d, 1000000, 11, rwm), tv, "rwm");
    auto hh = [&](VectorXd& x, RngStream& rng) {
      ChainPoint p = make_point(t, x);
      hug_hop_step(p, HugParams{0.5, 10}, HopParams{2.0, 1.0}, t, rng);
      x = p.x;
    };
    expect_moments(run_chain(d, 1000000, 12, hh), tv, "hug-hop");
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, KernelInvariance, ::testing::Values(2, 10));

TEST(HugHop, SvmHopAcceptance) {
  const int T = 360;
  RngStream rng(1, 0);
  const auto data = svm_simulate(T, SvmParams{}, rng);
  auto t = TargetModel::svm(data.y, SvmParams{});
  const auto fit = laplace_fit(t, VectorXd::Zero(T));
  VectorXd x = fit.mean(), z(T), v(T);
  long acc = 0;
  const long n = 20000;
  for (long i = 0; i < n; ++i) {
    rng.fill_normal(v);
    x = hug_step(x, v, HugParams{0.5, 10}, rng.uniform(), t).x_next;
    rng.fill_normal(z);
    const double z1 = rng.normal();
    const auto r = hop_step(x, z, z1, rng.uniform(), HopParams{20, 1}, t);
    acc += r.accepted;
    x = r.x_next;
  }
  // measured 0.45 on in-repo data against 0.40 reported for a different realization
  EXPECT_NEAR(double(acc) / n, 0.40, 0.06);
}

TEST(Params, Validation) {
  EXPECT_THROW(validate(HugParams{0.0, 10}), std::invalid_argument);
  EXPECT_THROW(validate(HugParams{0.5, 0}), std::invalid_argument);
  EXPECT_THROW(validate(HopParams{20, 0}), std::invalid_argument);
  EXPECT_NO_THROW(validate(HopParams{}));
}
