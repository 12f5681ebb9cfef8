#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mcmccoup/kernels.hpp"
#include "mcmccoup/rng.hpp"
#include "mcmccoup/targets.hpp"

namespace mcmccoup {

enum class CouplingKind {
  crn,
  reflection,
  gcrn,
  gcrn_rotation,
  gcrn_reflect,
  reflection_maximal,
  two_scale,
  maximal_independent,
};

std::string to_string(CouplingKind k);
CouplingKind coupling_kind_from_string(const std::string& s);

struct CouplingSpec {
  CouplingKind kind = CouplingKind::gcrn;
  double delta = 0.0;  // squared-distance threshold of the two-scale coupling
};

void validate(const CouplingSpec& spec);

struct IncrementPair {
  Eigen::VectorXd zx;
  Eigen::VectorXd zy;
};

// Pure increment map; e is only read by reflection, n_x and n_y only by gcrn kinds.
IncrementPair couple_increments(CouplingKind kind, const Eigen::VectorXd& z, double z1,
                                const Eigen::VectorXd& n_x, const Eigen::VectorXd& n_y,
                                const Eigen::VectorXd& e);

struct CoupledChainState {
  ChainPoint x;
  ChainPoint y;
  bool met = false;
  long t = 0;

  const Eigen::VectorXd& X() const { return x.x; }
  const Eigen::VectorXd& Y() const { return y.x; }
  double sq_dist() const { return (x.x - y.x).squaredNorm(); }
};

CoupledChainState make_coupled_state(const TargetModel& target_x, const TargetModel& target_y,
                                     Eigen::VectorXd x0, Eigen::VectorXd y0);
CoupledChainState make_coupled_state(const TargetModel& target, Eigen::VectorXd x0,
                                     Eigen::VectorXd y0);

// Correlation of the gradient projections n_x'Z_x and n_y'Z_y.
double grad_projection_correlation(CouplingKind kind, const CoupledChainState& state);

struct ProposalPair {
  Eigen::VectorXd xp;
  Eigen::VectorXd yp;
  bool equal = false;
};

ProposalPair reflection_maximal_pair(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                                     RngStream& rng);

struct RejectionCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ProposalPair maximal_independent_pair(const HopLaw& qx, const HopLaw& qy, RngStream& rng,
                                      long max_tries = 1000000);

// Per-step bookkeeping returned by the coupled step functions.
struct CoupledStepInfo {
  bool accepted_x = false;
  bool accepted_y = false;
  bool proposals_equal = false;
  bool used_gcrn_branch = false;
};

CoupledStepInfo coupled_rwm_step(CoupledChainState& state, const CouplingSpec& spec, double h,
                                 const TargetModel& target, RngStream& rng);

CoupledStepInfo two_scale_rwm_step(CoupledChainState& state, double delta, double h,
                                   const TargetModel& target, RngStream& rng);

// Bias mode: the X-chain targets target_x, the Y-chain target_y. Only crn,
// reflection and gcrn kinds are meaningful here.
CoupledStepInfo cross_target_step(CoupledChainState& state, CouplingKind kind, double h,
                                  const TargetModel& target_x, const TargetModel& target_y,
                                  RngStream& rng);

CoupledStepInfo cross_target_gcrn_step(CoupledChainState& state, double h,
                                       const TargetModel& target_x, const TargetModel& target_y,
                                       RngStream& rng);

// One Hug move followed by one Hop move.
CoupledStepInfo coupled_hug_hop_step(CoupledChainState& state, const HugParams& hug,
                                     const HopParams& hop, double delta_hop,
                                     const TargetModel& target, RngStream& rng);

// Single-chain Hug then Hop with the same draw order as the coupled step.
void hug_hop_step(ChainPoint& p, const HugParams& hug, const HopParams& hop,
                  const TargetModel& target, RngStream& rng);

}  // namespace mcmccoup
