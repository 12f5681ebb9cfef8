#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmccoup/couplings.hpp"
#include "mcmccoup/diagnostics.hpp"
#include "mcmccoup/ode_limits.hpp"
#include "mcmccoup/targets.hpp"

namespace mcmccoup::exp {

struct Start {
  double x0;
  double y0;
  double rho0;
  std::string label;
};

// independent, positively correlated, over/under-dispersed, negatively correlated
std::vector<Start> standard_starts();
// "x0,y0,rho0;x0,y0,rho0;..."
std::vector<Start> parse_starts(const std::string& text);

// X0 = x0^{1/2} Z, Y0 = y0^{1/2} (rho0 Z + (1 - rho0^2)^{1/2} Z*). With `exact` the pair
// (Z, Z*) is orthogonalised and rescaled so that (x, y, v) at time 0 equals the ODE start.
void spherical_start(const Start& s, RngStream& rng, Eigen::VectorXd& X, Eigen::VectorXd& Y,
                     bool exact = true);

// Samples (|X|^2, |Y|^2, X'Y, |X - Y|^2) / norm every `every` iterations; t = iteration / d.
std::vector<OdeSample> coupled_rwm_trace(const TargetModel& target, Eigen::VectorXd X,
                                         Eigen::VectorXd Y, const CouplingSpec& spec, double h,
                                         long n_iter, long every, double norm, RngStream& rng);

// ODE value at the MCMC sample times by linear interpolation; sup over the common range.
double sup_gap(const std::vector<OdeSample>& mcmc, const std::vector<OdeSample>& ode);

struct EllipticalCase {
  std::string name;  // ar1, chi2, two-eigen
  TargetModel target;
  SpectralSummary spectrum;
};

EllipticalCase make_elliptical(const std::string& name, int d, RngStream& rng);

// h for the natural parameter l1 = l z_1, h = l / sqrt(d)
double elliptical_h(const EllipticalCase& c, double l1);

struct SvmSetup {
  int T = 0;
  SvmParams params;
  std::vector<double> y;
  TargetModel posterior;
  TargetModel laplace;
  double h = 0.0;
  double ellipticity = 0.0;
};

// Simulated data of length T from data_seed, or the CSV at data_path when non-empty.
SvmSetup svm_setup(int T, const SvmParams& params, std::uint64_t data_seed,
                   const std::string& data_path, double l1 = 2.38);

Eigen::VectorXd svm_prior_draw(const SvmSetup& s, RngStream& rng);

// Both chains from the prior; X advanced alone by RWM during the lag.
LaggedRunner svm_rwm_runner(const SvmSetup& s, const CouplingSpec& spec);

LaggedRunner svm_hug_hop_runner(const SvmSetup& s, const HugParams& hug, const HopParams& hop,
                                double delta_hop);

// Advances a single RWM chain n steps in place.
void rwm_chain(ChainPoint& p, const TargetModel& target, double h, long n, RngStream& rng);

// |X_t - Y_t|^2 of one cross-target replicate, stored every `thin` iterations.
std::vector<double> cross_target_trace(const TargetModel& tx, const TargetModel& ty,
                                       Eigen::VectorXd X, Eigen::VectorXd Y, CouplingKind kind,
                                       double h, long n_iter, long thin, RngStream& rng);

std::vector<long> linear_grid(long lo, long hi, int n);

}  // namespace mcmccoup::exp
