#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "mcmccoup/targets.hpp"

namespace mcmccoup {

// Position together with its cached log-density and gradient.
struct ChainPoint {
  Eigen::VectorXd x;
  double logpi = 0.0;
  Eigen::VectorXd grad;
};

ChainPoint make_point(const TargetModel& target, Eigen::VectorXd x);

struct RwmStepInputs {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  double u;
  double h;
};

struct StepResult {
  Eigen::VectorXd x_next;
  bool accepted = false;
  bool flagged = false;  // zero gradient met during the step
};

inline bool mh_accept(double u, double log_ratio) { return std::log(u) <= log_ratio; }

StepResult rwm_step(const RwmStepInputs& in, const TargetModel& target);

// In-place variant used by chain loops: proposal p.x + h z, shared uniform u.
bool rwm_update(ChainPoint& p, const Eigen::VectorXd& z, double u, double h,
                const TargetModel& target, ChainPoint& scratch);

struct HugParams {
  double T = 0.5;
  int B = 10;
  double delta() const { return T / B; }
};

struct HopParams {
  double lambda = 20.0;
  double mu = 1.0;
};

void validate(const HugParams& p);
void validate(const HopParams& p);

// Runs the bounce dynamics only; returns false on a zero gradient.
bool hug_trajectory(Eigen::VectorXd& x, Eigen::VectorXd& v, const HugParams& params,
                    const TargetModel& target);

StepResult hug_step(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const HugParams& params,
                    double u, const TargetModel& target);

// Gaussian Hop proposal law centred at x, anisotropic along the gradient.
struct HopLaw {
  Eigen::VectorXd center;
  Eigen::VectorXd n;  // unit gradient direction
  double gnorm;
  double lambda;
  double mu;

  Eigen::VectorXd draw(const Eigen::VectorXd& z, double z1) const;
  // log density without the -(d/2) log(2 pi) term
  double log_density(const Eigen::VectorXd& y) const;
};

// Throws DomainError when the gradient vanishes.
HopLaw hop_law(const Eigen::VectorXd& x, const Eigen::VectorXd& grad, const HopParams& params);

StepResult hop_step(const Eigen::VectorXd& x, const Eigen::VectorXd& z, double z1, double u,
                    const HopParams& params, const TargetModel& target);

// Hop MH log-ratio for a proposal y from current point p; y_point holds y's cache.
double hop_log_ratio(const ChainPoint& p, const ChainPoint& y_point, const HopParams& params);

}  // namespace mcmccoup
