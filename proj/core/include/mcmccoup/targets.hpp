#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcmccoup/rng.hpp"

namespace mcmccoup {

enum class TargetKind { spherical, diagonal, ar1, dense, svm };

std::string to_string(TargetKind k);

struct SvmParams {
  double beta = 0.65;
  double phi = 0.98;
  double sigma = 0.15;
};

struct SvmData {
  std::vector<double> x;  // latent log-volatilities (empty when loaded from file)
  std::vector<double> y;
};

class TargetModel {
 public:
  static TargetModel spherical(int d);
  static TargetModel diagonal(Eigen::VectorXd variances);
  static TargetModel ar1(int d, double r);
  static TargetModel dense(Eigen::VectorXd mu, Eigen::MatrixXd sigma);
  static TargetModel svm(std::vector<double> y, SvmParams params);

  int dim() const;
  TargetKind kind() const;
  bool is_gaussian() const { return kind() != TargetKind::svm; }

  // log-density up to an additive constant
  double log_density(const Eigen::VectorXd& x) const;
  double log_density_and_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;

  // Gaussian kinds only
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;
  Eigen::MatrixXd precision() const;
  // Omega * x without forming Omega where possible
  Eigen::VectorXd apply_precision(const Eigen::VectorXd& x) const;
  void sample_stationary(RngStream& rng, Eigen::Ref<Eigen::VectorXd> out) const;

  // kind-specific parameters
  const Eigen::VectorXd& variances() const;  // diagonal
  double ar1_corr() const;                   // ar1
  const std::vector<double>& svm_y() const;  // svm
  const SvmParams& svm_params() const;       // svm

  struct Impl;

 private:
  explicit TargetModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct SpectralSummary {
  // z_sq[k + 2] = tr(Omega^k) / d for k = -2..2
  double z_sq[5];
  double ellipticity;
  double z(int k) const { return z_sq[k + 2]; }
};

SpectralSummary spectral_summary(const TargetModel& target);

SvmData svm_simulate(int T, const SvmParams& params, RngStream& rng);

struct LaplaceOptions {
  int max_iter = 200000;
  double grad_tol = 1e-7;
  double fd_rel_step = 1e-4;
};

TargetModel laplace_fit(const TargetModel& target, const Eigen::VectorXd& x0,
                        const LaplaceOptions& opts = {});

// Laplace fit of an arbitrary smooth log-density given as a gradient oracle;
// used by tests on non-Gaussian 1-d toys.
struct LaplaceResult {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  int iterations;
};

using LogDensityFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

LaplaceResult laplace_fit_fn(const LogDensityFn& f, const Eigen::VectorXd& x0,
                             const LaplaceOptions& opts = {});

}  // namespace mcmccoup
