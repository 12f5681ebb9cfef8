#include "mcmccoup/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mcmccoup {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) {
  if (std::isnan(x)) throw DomainError("std_normal_cdf: NaN argument");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double log_std_normal_cdf(double x) {
  if (x > 0.0) return std::log1p(-std_normal_cdf(-x));
  if (x > -37.0) return std::log(std_normal_cdf(x));
  // Mills ratio series; five terms are far below double precision here
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(kTwoPi) + std::log(series);
}

double exp_times_cdf(double c, double u) {
  if (u == -std::numeric_limits<double>::infinity()) return 0.0;
  if (c < 700.0 && c > -700.0 && u > -37.0) return std::exp(c) * std_normal_cdf(u);
  return std::exp(c + log_std_normal_cdf(u));
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -std_normal_quantile(1.0 - p);
  double lo = -40.0, hi = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, -lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std_normal_cdf(mid) < p) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  const double dens = std_normal_pdf(x);
  if (dens > 0.0) x -= (std_normal_cdf(x) - p) / dens;
  return x;
}

namespace {

// Gauss-Legendre half rules (positive nodes) of orders 6, 12 and 20
constexpr double kW6[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double kX6[3] = {0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
constexpr double kW12[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                            0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
constexpr double kX12[6] = {0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                            0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
constexpr double kW20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                             0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                             0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                             0.1527533871307259};
constexpr double kX20[10] = {0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                             0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                             0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                             0.07652652113349733};

// Upper orthant P(Z1 > h, Z2 > k) after Genz's BVNU; finite h, k and |r| < 1.
double bvnu_core(double h, double k, double r) {
  const double* w;
  const double* x;
  int ng;
  const double ar = std::fabs(r);
  if (ar < 0.3) { w = kW6; x = kX6; ng = 3; }
  else if (ar < 0.75) { w = kW12; x = kX12; ng = 6; }
  else { w = kW20; x = kX20; ng = 10; }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = 0.5 * std::asin(r);
    for (int i = 0; i < ng; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double sn = std::sin(asr * (1.0 + sgn * x[i]));
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return bvn * asr / kTwoPi + std_normal_cdf(-h) * std_normal_cdf(-k);
  }

  if (r < 0.0) { k = -k; hk = -hk; }
  const double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  const double bs = (h - k) * (h - k);
  const double c = (4.0 - hk) / 8.0;
  const double d = (12.0 - hk) / 80.0;
  double asr = -0.5 * (bs / as + hk);
  if (asr > -100.0) bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
  if (hk > -100.0) {
    const double b = std::sqrt(bs);
    const double sp = std::sqrt(kTwoPi) * std_normal_cdf(-b / a);
    bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
  }
  a *= 0.5;
  double sum = 0.0;
  for (int i = 0; i < ng; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      const double xi = a * (1.0 + sgn * x[i]);
      const double xs = xi * xi;
      asr = -0.5 * (bs / xs + hk);
      if (asr > -100.0) {
        const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
        const double rs = std::sqrt(1.0 - xs);
        const double ep = std::exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
        sum += w[i] * std::exp(asr) * (sp - ep);
      }
    }
  }
  bvn = (a * sum - bvn) / kTwoPi;
  if (r > 0.0) return bvn + std_normal_cdf(-std::max(h, k));
  if (h >= k) return -bvn;
  const double span = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                              : std_normal_cdf(-h) - std_normal_cdf(-k);
  return span - bvn;
}

}  // namespace

double bvn_low(double a, double b, double rho) {
  if (std::isnan(a) || std::isnan(b) || std::isnan(rho) || rho < -1.0 || rho > 1.0)
    throw DomainError("bvn_low: invalid query");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a == -inf || b == -inf) return 0.0;
  if (a == inf) return std_normal_cdf(b);
  if (b == inf) return std_normal_cdf(a);
  if (rho == 0.0) return std_normal_cdf(a) * std_normal_cdf(b);
  if (rho == 1.0) return std_normal_cdf(std::min(a, b));
  if (rho == -1.0) return a + b > 0.0 ? std_normal_cdf(a) - std_normal_cdf(-b) : 0.0;
  return std::clamp(bvnu_core(-a, -b, rho), 0.0, 1.0);
}

double bvn_low(const BvnQuery& q) { return bvn_low(q.a, q.b, q.rho); }

double bvn_up(double a, double b, double rho) { return bvn_low(-a, -b, rho); }

GaussianIntegrals gaussian_integrals(double alpha, double beta, double l) {
  if (!(alpha > 0.0 && beta > 0.0 && l > 0.0))
    throw DomainError("gaussian_integrals: alpha, beta and l must be positive");
  const double l2 = l * l;
  GaussianIntegrals out;
  out.first = -l * alpha * exp_times_cdf(0.5 * l2 * (alpha * alpha - 1.0), l / (2.0 * alpha) - l * alpha);
  const double m = std::min(alpha, beta);
  const double M = std::max(alpha, beta);
  const double cm = 0.5 * l2 * (m * m - 1.0);
  out.second = std_normal_cdf(-l / (2.0 * m)) + exp_times_cdf(cm, l / (2.0 * m) - l * m) -
               exp_times_cdf(cm, -l * m) + exp_times_cdf(0.5 * l2 * (M * M - 1.0), -l * M);
  return out;
}

}  // namespace mcmccoup
