#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmccoup/couplings.hpp"
#include "mcmccoup/rng.hpp"

namespace mcmccoup {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be written by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct MeetingRecord {
  int replicate = 0;
  long tau = -1;  // first t > L with X_t == Y_{t-L}
  long L = 1;
  bool capped = false;
};

// sq[k] = |X_{L + k thin} - Y_{k thin}|^2 up to the meeting; zero afterwards (not stored).
struct DistanceTrace {
  long thin = 1;
  std::vector<double> sq;
};

struct LaggedRunner {
  // draws (X_0, Y_0) for a replicate
  std::function<CoupledChainState(RngStream&)> init;
  // advances the X-chain alone (used for the first L steps)
  std::function<void(ChainPoint&, RngStream&)> marginal_step;
  std::function<void(CoupledChainState&, RngStream&)> coupled_step;
};

struct ReplicateOptions {
  long L = 1;
  int R = 1;
  long max_iter = 1000000;  // cap on t, the X-chain iteration count
  long thin = 1;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ReplicateResult {
  std::vector<MeetingRecord> records;
  std::vector<DistanceTrace> traces;
  int n_capped() const;
};

ReplicateResult run_replicates(const LaggedRunner& runner, const ReplicateOptions& opts);

enum class BoundMetric { tv, w2sq };
std::string to_string(BoundMetric m);

struct BoundCurve {
  BoundMetric metric;
  std::vector<long> t;
  std::vector<double> estimate;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  int n_replicates = 0;
  int n_capped = 0;
};

BoundCurve tv_bound_curve(const std::vector<MeetingRecord>& records, const std::vector<long>& t_grid);

BoundCurve w2_bound_curve(const std::vector<MeetingRecord>& records,
                          const std::vector<DistanceTrace>& traces, const std::vector<long>& t_grid,
                          long L);

struct Estimate {
  double estimate;
  double ci_low;
  double ci_high;
};

// traces[r][t] = |X_t - Y_t|^2 of replicate r, stored every `thin` iterations
Estimate stationary_bias_bound(const std::vector<std::vector<double>>& traces, long burn_in,
                               long thin = 1);

struct SymEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
  int sweeps;
};

// Cyclic two-sided Jacobi rotations until the off-diagonal Frobenius norm is <= tol.
SymEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-12, int max_sweeps = 100);

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a);

double gelbrich_bound(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& sigma1,
                      const Eigen::VectorXd& mu2, const Eigen::MatrixXd& sigma2);

struct ChainTrace {
  std::vector<std::uint8_t> accepted;
  std::vector<double> sq_jump;  // |X_{t+1} - X_t|^2
  std::vector<double> sq_norm;  // |X_{t+1}|^2 / d
};

struct Band {
  double mean;
  double lo;
  double hi;
  double se;
};

struct SummaryStats {
  Band acceptance;
  Band esjd;
  Band sq_norm;
  long n_steps;
  int n_replicates;
};

SummaryStats summary_stats(const std::vector<ChainTrace>& traces);

}  // namespace mcmccoup
