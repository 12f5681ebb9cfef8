#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mcmccoup/ode_limits.hpp"

namespace mcmccoup {

enum class Stability { stable, unstable };

std::string to_string(Stability s);

struct FixedPointResult {
  LimitKind kind;
  double l;        // l for spherical, l_1 for elliptical targets
  double eps;      // ellipticity
  double v_star;
  double s_inf;    // 2 (1 - v_star)
  Stability stability;
  double derivative;  // d/dv of the fixed-point equation at v_star (0 when v_star = 1)
};

// E[1 ^ e^{-l Z1 - l^2/2} ^ e^{-l Z2 - l^2/2}] with corr(Z1, Z2) = rho
double h_rho(double rho, double l);

// Left-hand side of the fixed-point equation in v for the given coupling.
double fixed_point_lhs(LimitKind kind, double v, double l, double eps);

struct NoSignChange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FixedPointResult solve_fixed_point(LimitKind kind, double l, double eps = 1.0);

std::vector<FixedPointResult> sweep_asymptotes(LimitKind kind, const std::vector<double>& l_grid,
                                               const std::vector<double>& eps_grid);

// ESJD context column l^2 2 Phi(-l/2)
double esjd_limit(double l);

}  // namespace mcmccoup
