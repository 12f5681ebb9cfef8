#include "mcmccoup/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcmccoup/special.hpp"

namespace mcmccoup {

std::string to_string(Stability s) { return s == Stability::stable ? "stable" : "unstable"; }

double h_rho(double rho, double l) {
  if (!(l > 0.0)) throw DomainError("h_rho: l must be positive");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("h_rho: rho outside [-1, 1]");
  const double c = std::sqrt(0.5 * (1.0 - rho));
  return bvn_low(-0.5 * l, -0.5 * l, rho) + 2.0 * bvn_low(-0.5 * l, -l * c, c);
}

double esjd_limit(double l) { return 2.0 * l * l * std_normal_cdf(-0.5 * l); }

namespace {

double rho_of_v(LimitKind kind, double v, double eps) {
  switch (kind) {
    case LimitKind::crn: return v;
    case LimitKind::reflection: return v + (1.0 - v) / eps;
    default: return 1.0;
  }
}

void check_args(LimitKind kind, double l, double eps) {
  if (!(l > 0.0)) throw DomainError("solve_fixed_point: l must be positive");
  if (!(eps >= 1.0)) throw DomainError("solve_fixed_point: ellipticity must be >= 1");
  if (kind == LimitKind::optimal) throw DomainError("solve_fixed_point: no fixed-point equation for the optimal kind");
}

template <class F>
double bisect(F f, double lo, double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo > 0.0 && fhi < 0.0))
    throw NoSignChange("fixed point: no sign change on the bracket [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm > 0.0) { lo = mid; flo = fm; } else { hi = mid; }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double fixed_point_lhs(LimitKind kind, double v, double l, double eps) {
  check_args(kind, l, eps);
  return h_rho(rho_of_v(kind, v, eps), l) - 2.0 * v * std_normal_cdf(-0.5 * l);
}

FixedPointResult solve_fixed_point(LimitKind kind, double l, double eps) {
  check_args(kind, l, eps);
  FixedPointResult r{kind, l, eps, 1.0, 0.0, Stability::stable, 0.0};
  if (kind == LimitKind::gcrn || (kind == LimitKind::reflection && eps == 1.0)) return r;

  constexpr double kEdge = 1e-9;
  constexpr double kTol = 1e-12;
  // lower end 0 rather than 1e-9: for large l the crn root sits far below 1e-9.
  // Reflection is bisected in v; rho = 1/eps + v (1 - 1/eps) maps (0, 1) onto (1/eps, 1).
  r.v_star = bisect([&](double v) { return fixed_point_lhs(kind, v, l, eps); }, 0.0, 1.0 - kEdge, kTol);
  r.s_inf = 2.0 * (1.0 - r.v_star);
  const double step = std::min(1e-6, 0.1 * std::min(r.v_star, 1.0 - r.v_star));
  if (step > 0.0) {
    r.derivative = (fixed_point_lhs(kind, r.v_star + step, l, eps) -
                    fixed_point_lhs(kind, r.v_star - step, l, eps)) / (2.0 * step);
  } else {
    r.derivative = -2.0 * std_normal_cdf(-0.5 * l);
  }
  r.stability = r.derivative < 0.0 ? Stability::stable : Stability::unstable;
  return r;
}

std::vector<FixedPointResult> sweep_asymptotes(LimitKind kind, const std::vector<double>& l_grid,
                                               const std::vector<double>& eps_grid) {
  if (l_grid.empty() || eps_grid.empty()) throw std::invalid_argument("sweep_asymptotes: empty grid");
  std::vector<FixedPointResult> out;
  out.reserve(l_grid.size() * eps_grid.size());
  for (double eps : eps_grid)
    for (double l : l_grid) out.push_back(solve_fixed_point(kind, l, eps));
  return out;
}

}  // namespace mcmccoup
