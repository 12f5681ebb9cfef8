#pragma once

// Test-side oracles kept independent of the library code paths they check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

// Streaming accumulator so 1e7-sample oracles do not store their draws.
struct Welford {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)); }
};

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// Adaptive Gauss-Kronrod-free composite Gauss-Legendre (5 nodes) with panel bisection.
inline double gl5(const std::function<double(double)>& f, double a, double b) {
  static const double x[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640,
                              -0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += w[i] * f(c + h * x[i]);
  return s * h;
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double l = gl5(f, a, m), r = gl5(f, m, b);
  if (depth <= 0 || std::abs(l + r - whole) <= tol) return l + r;
  return adapt(f, a, m, l, tol / 2, depth - 1) + adapt(f, m, b, r, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double panel = 0.01, double tol = 1e-17) {
  double total = 0.0;
  for (double lo = a; lo < b; lo += panel) {
    const double hi = std::min(b, lo + panel);
    total += adapt(f, lo, hi, gl5(f, lo, hi), tol, 30);
  }
  return total;
}

// P(Z1 <= a, Z2 <= b), corr rho, |rho| < 1, via int_{-inf}^{a} phi(z) Phi((b - rho z)/sqrt(1-rho^2)) dz.
inline double bvn(double a, double b, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  auto f = [&](double z) { return phi(z) * Phi((b - rho * z) / s); };
  const double lo = -12.0;
  const double hi = std::min(a, 12.0);
  if (hi <= lo) return 0.0;
  // split at the kink of the inner CDF so panels straddle it cleanly
  if (rho != 0.0) {
    const double k = b / rho;
    if (k > lo && k < hi) return integrate(f, lo, k) + integrate(f, k, hi);
  }
  return integrate(f, lo, hi);
}

// Central difference of a scalar function along coordinate i.
inline Eigen::VectorXd fd_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += step;
    b[i] -= step;
    g[i] = (f(a) - f(b)) / (2.0 * step);
  }
  return g;
}

// Independent engine so Monte Carlo oracles do not reuse the library generator.
struct Mt {
  std::mt19937_64 eng;
  std::normal_distribution<double> n{0.0, 1.0};
  std::uniform_real_distribution<double> u{0.0, 1.0};
  explicit Mt(std::uint64_t seed) : eng(seed) {}
  double normal() { return n(eng); }
  double uniform() { return u(eng); }
  Eigen::VectorXd normals(int d) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z[i] = normal();
    return z;
  }
};

}  // namespace oracle
