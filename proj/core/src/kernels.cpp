#include "mcmccoup/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "mcmccoup/special.hpp"

namespace mcmccoup {

ChainPoint make_point(const TargetModel& target, Eigen::VectorXd x) {
  ChainPoint p;
  p.logpi = target.log_density_and_grad(x, p.grad);
  p.x = std::move(x);
  return p;
}

StepResult rwm_step(const RwmStepInputs& in, const TargetModel& target) {
  if (in.z.size() != in.x.size()) throw std::invalid_argument("rwm_step: len(z) != len(x)");
  if (!(in.u >= 0.0 && in.u <= 1.0)) throw std::invalid_argument("rwm_step: u outside [0, 1]");
  StepResult r;
  Eigen::VectorXd prop = in.x + in.h * in.z;
  const double delta = target.log_density(prop) - target.log_density(in.x);
  r.accepted = mh_accept(in.u, delta);
  r.x_next = r.accepted ? std::move(prop) : in.x;
  return r;
}

bool rwm_update(ChainPoint& p, const Eigen::VectorXd& z, double u, double h,
                const TargetModel& target, ChainPoint& scratch) {
  scratch.x = p.x + h * z;
  scratch.logpi = target.log_density_and_grad(scratch.x, scratch.grad);
  if (!mh_accept(u, scratch.logpi - p.logpi)) return false;
  std::swap(p, scratch);
  return true;
}

void validate(const HugParams& p) {
  if (!(p.T > 0.0) || p.B < 1) throw std::invalid_argument("hug: need T > 0 and B >= 1");
}

void validate(const HopParams& p) {
  if (!(p.lambda > 0.0) || !(p.mu > 0.0)) throw std::invalid_argument("hop: need lambda, mu > 0");
}

bool hug_trajectory(Eigen::VectorXd& x, Eigen::VectorXd& v, const HugParams& params,
                    const TargetModel& target) {
  const double half = 0.5 * params.delta();
  Eigen::VectorXd g;
  for (int b = 0; b < params.B; ++b) {
    x += half * v;
    target.log_density_and_grad(x, g);
    const double gn = g.norm();
    if (!(gn > 0.0)) return false;
    g /= gn;
    v -= 2.0 * v.dot(g) * g;
    x += half * v;
  }
  return true;
}

StepResult hug_step(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const HugParams& params,
                    double u, const TargetModel& target) {
  validate(params);
  if (v.size() != x.size()) throw std::invalid_argument("hug_step: len(v) != len(x)");
  StepResult r;
  Eigen::VectorXd xp = x, vp = v;
  if (!hug_trajectory(xp, vp, params, target)) {
    r.x_next = x;
    r.flagged = true;
    return r;
  }
  r.accepted = mh_accept(u, target.log_density(xp) - target.log_density(x));
  r.x_next = r.accepted ? std::move(xp) : x;
  return r;
}

Eigen::VectorXd HopLaw::draw(const Eigen::VectorXd& z, double z1) const {
  const double zn = n.dot(z);
  return center + ((lambda * z1 - mu * zn) / gnorm) * n + (mu / gnorm) * z;
}

double HopLaw::log_density(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd diff = y - center;
  const double par = diff.dot(n);
  const double d = static_cast<double>(center.size());
  const double quad = diff.squaredNorm() / (mu * mu) + par * par * (1.0 / (lambda * lambda) - 1.0 / (mu * mu));
  return d * std::log(gnorm) - std::log(lambda) - (d - 1.0) * std::log(mu) - 0.5 * gnorm * gnorm * quad;
}

HopLaw hop_law(const Eigen::VectorXd& x, const Eigen::VectorXd& grad, const HopParams& params) {
  const double gn = grad.norm();
  if (!(gn > 0.0)) throw DomainError("hop: zero gradient");
  return HopLaw{x, grad / gn, gn, params.lambda, params.mu};
}

double hop_log_ratio(const ChainPoint& p, const ChainPoint& y, const HopParams& params) {
  const HopLaw fwd = hop_law(p.x, p.grad, params);
  const double gy = y.grad.norm();
  if (!(gy > 0.0)) return -std::numeric_limits<double>::infinity();
  const HopLaw bwd{y.x, y.grad / gy, gy, params.lambda, params.mu};
  return y.logpi - p.logpi + bwd.log_density(p.x) - fwd.log_density(y.x);
}

StepResult hop_step(const Eigen::VectorXd& x, const Eigen::VectorXd& z, double z1, double u,
                    const HopParams& params, const TargetModel& target) {
  validate(params);
  if (z.size() != x.size()) throw std::invalid_argument("hop_step: len(z) != len(x)");
  StepResult r;
  const ChainPoint p = make_point(target, x);
  if (!(p.grad.norm() > 0.0)) {
    r.x_next = x;
    r.flagged = true;
    return r;
  }
  const HopLaw law = hop_law(p.x, p.grad, params);
  const ChainPoint y = make_point(target, law.draw(z, z1));
  r.accepted = mh_accept(u, hop_log_ratio(p, y, params));
  r.x_next = r.accepted ? y.x : x;
  return r;
}

}  // namespace mcmccoup
