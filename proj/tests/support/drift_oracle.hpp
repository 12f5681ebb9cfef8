#pragma once

// Exact reduced simulation of one coupled RWM step for the standard Gaussian target.
// Every coupling map acts inside span{X, Y} and leaves the orthogonal part of Z alone,
// so a step only needs the two in-plane coordinates of Z and |Z_perp|^2 ~ chi^2_{d-2}.

#include <cmath>

#include <Eigen/Dense>

#include "mcmccoup/couplings.hpp"
#include "mcmccoup/ode_limits.hpp"
#include "mcmccoup/rng.hpp"

namespace drift {

using Eigen::Vector2d;
using mcmccoup::CouplingKind;

struct Plane {
  int d;
  double l;
  double h;
  Vector2d X, Y, nx, ny, e;
};

// (x, y, v) = (|X|^2, |Y|^2, X'Y) / d
inline Plane make_plane(int d, double x, double y, double v, double l) {
  Plane p;
  p.d = d;
  p.l = l;
  p.h = l / std::sqrt(static_cast<double>(d));
  const double nX = std::sqrt(d * x);
  const double alpha = d * v / nX;
  const double beta = std::sqrt(std::max(0.0, d * y - alpha * alpha));
  p.X = {nX, 0.0};
  p.Y = {alpha, beta};
  p.nx = -p.X.normalized();
  p.ny = -p.Y.normalized();
  const Vector2d diff = p.X - p.Y;
  p.e = diff.norm() > 0 ? Vector2d(diff.normalized()) : Vector2d(1.0, 0.0);
  return p;
}

struct StepDraw {
  double dx, dy, dv;  // d times the change in (x, y, v)
  double term5;       // h^2 Z_x.Z_y B_x B_y
};

inline CouplingKind as_coupling(mcmccoup::LimitKind k) {
  switch (k) {
    case mcmccoup::LimitKind::crn: return CouplingKind::crn;
    case mcmccoup::LimitKind::reflection: return CouplingKind::reflection;
    default: return CouplingKind::gcrn;
  }
}

inline StepDraw draw(const Plane& p, CouplingKind kind, mcmccoup::RngStream& rng) {
  const Eigen::VectorXd z = Eigen::Vector2d(rng.normal(), rng.normal());
  const double z1 = rng.normal();
  const double perp = rng.chi_squared(p.d - 2);
  const double u = rng.uniform();
  const auto inc = mcmccoup::couple_increments(kind, z, z1, p.nx, p.ny, p.e);
  const Vector2d zx = inc.zx, zy = inc.zy;
  const double h = p.h;
  const double nzx = zx.squaredNorm() + perp, nzy = zy.squaredNorm() + perp, zxy = zx.dot(zy) + perp;
  const double xz = p.X.dot(zx), yz = p.Y.dot(zy);
  const bool bx = std::log(u) <= -h * xz - 0.5 * h * h * nzx;
  const bool by = std::log(u) <= -h * yz - 0.5 * h * h * nzy;
  StepDraw s;
  s.dx = bx ? 2 * h * xz + h * h * nzx : 0.0;
  s.dy = by ? 2 * h * yz + h * h * nzy : 0.0;
  s.dv = (by ? h * p.X.dot(zy) : 0.0) + (bx ? h * p.Y.dot(zx) : 0.0) + (bx && by ? h * h * zxy : 0.0);
  s.term5 = bx && by ? h * h * zxy : 0.0;
  return s;
}

}  // namespace drift
