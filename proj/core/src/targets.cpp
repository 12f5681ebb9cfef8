#include "mcmccoup/targets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mcmccoup/special.hpp"

namespace mcmccoup {

std::string to_string(TargetKind k) {
  switch (k) {
    case TargetKind::spherical: return "spherical";
    case TargetKind::diagonal: return "diagonal";
    case TargetKind::ar1: return "ar1";
    case TargetKind::dense: return "dense";
    case TargetKind::svm: return "svm";
  }
  return "?";
}

struct TargetModel::Impl {
  TargetKind kind;
  int d;
  // diagonal
  Eigen::VectorXd var, inv_var, sd;
  // ar1
  double r = 0.0;
  // dense
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma, omega, chol_l;
  // svm
  std::vector<double> y;
  Eigen::ArrayXd y_sq;
  SvmParams svm;
};

namespace {

void check_dim(const TargetModel::Impl& m, const Eigen::VectorXd& x) {
  if (x.size() != m.d)
    throw std::invalid_argument("target: position has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(m.d));
}

Eigen::VectorXd ar1_apply_precision(double r, const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd out(d);
  if (d == 1) {
    out[0] = x[0];
    return out;
  }
  const double s = 1.0 / (1.0 - r * r);
  out[0] = s * (x[0] - r * x[1]);
  for (Eigen::Index i = 1; i + 1 < d; ++i)
    out[i] = s * ((1.0 + r * r) * x[i] - r * (x[i - 1] + x[i + 1]));
  out[d - 1] = s * (x[d - 1] - r * x[d - 2]);
  return out;
}

// SVM: returns log posterior and fills grad when non-null
double svm_eval(const TargetModel::Impl& m, const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
  const int T = m.d;
  const double inv_b2 = 1.0 / (m.svm.beta * m.svm.beta);
  const double phi = m.svm.phi;
  const double inv_s2 = 1.0 / (m.svm.sigma * m.svm.sigma);
  const Eigen::ArrayXd lik = m.y_sq * (-x.array()).exp() * inv_b2;
  double twice_neg = x.sum() + lik.sum() + (1.0 - phi * phi) * inv_s2 * x[0] * x[0];
  for (int t = 0; t + 1 < T; ++t) {
    const double diff = x[t + 1] - phi * x[t];
    twice_neg += inv_s2 * diff * diff;
  }
  if (grad) {
    grad->resize(T);
    for (int t = 0; t < T; ++t) (*grad)[t] = -0.5 + 0.5 * lik[t];
    if (T == 1) {
      (*grad)[0] -= (1.0 - phi * phi) * inv_s2 * x[0];
    } else {
      (*grad)[0] -= inv_s2 * (x[0] - phi * x[1]);
      for (int t = 1; t + 1 < T; ++t)
        (*grad)[t] -= inv_s2 * ((x[t] - phi * x[t - 1]) - phi * (x[t + 1] - phi * x[t]));
      (*grad)[T - 1] -= inv_s2 * (x[T - 1] - phi * x[T - 2]);
    }
  }
  return -0.5 * twice_neg;
}

}  // namespace

TargetModel TargetModel::spherical(int d) {
  if (d < 1) throw std::invalid_argument("spherical target: dimension must be positive");
  auto m = std::make_shared<Impl>();
  m->kind = TargetKind::spherical;
  m->d = d;
  return TargetModel(m);
}

TargetModel TargetModel::diagonal(Eigen::VectorXd variances) {
  if (variances.size() < 1) throw std::invalid_argument("diagonal target: empty variance vector");
  if ((variances.array() <= 0.0).any())
    throw std::invalid_argument("diagonal target: variances must be positive");
  auto m = std::make_shared<Impl>();
  m->kind = TargetKind::diagonal;
  m->d = static_cast<int>(variances.size());
  m->inv_var = variances.cwiseInverse();
  m->sd = variances.cwiseSqrt();
  m->var = std::move(variances);
  return TargetModel(m);
}

TargetModel TargetModel::ar1(int d, double r) {
  if (d < 1) throw std::invalid_argument("ar1 target: dimension must be positive");
  if (!(std::fabs(r) < 1.0)) throw std::invalid_argument("ar1 target: |r| must be < 1");
  auto m = std::make_shared<Impl>();
  m->kind = TargetKind::ar1;
  m->d = d;
  m->r = r;
  return TargetModel(m);
}

TargetModel TargetModel::dense(Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
  const Eigen::Index d = mu.size();
  if (d < 1 || sigma.rows() != d || sigma.cols() != d)
    throw std::invalid_argument("dense target: mean/covariance shape mismatch");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw std::invalid_argument("dense target: covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("dense target: covariance is not positive definite");
  auto m = std::make_shared<Impl>();
  m->kind = TargetKind::dense;
  m->d = static_cast<int>(d);
  m->chol_l = llt.matrixL();
  m->omega = llt.solve(Eigen::MatrixXd::Identity(d, d));
  m->omega = 0.5 * (m->omega + m->omega.transpose());
  m->mu = std::move(mu);
  m->sigma = std::move(sigma);
  return TargetModel(m);
}

TargetModel TargetModel::svm(std::vector<double> y, SvmParams p) {
  if (y.empty()) throw std::invalid_argument("svm target: no observations");
  if (!(p.beta > 0.0) || !(p.sigma > 0.0) || !(std::fabs(p.phi) < 1.0))
    throw std::invalid_argument("svm target: need beta > 0, sigma > 0, |phi| < 1");
  auto m = std::make_shared<Impl>();
  m->kind = TargetKind::svm;
  m->d = static_cast<int>(y.size());
  m->y_sq = Eigen::Map<const Eigen::ArrayXd>(y.data(), m->d).square();
  m->y = std::move(y);
  m->svm = p;
  return TargetModel(m);
}

int TargetModel::dim() const { return impl_->d; }
TargetKind TargetModel::kind() const { return impl_->kind; }

double TargetModel::log_density(const Eigen::VectorXd& x) const {
  const Impl& m = *impl_;
  check_dim(m, x);
  switch (m.kind) {
    case TargetKind::spherical: return -0.5 * x.squaredNorm();
    case TargetKind::diagonal: return -0.5 * (x.array().square() * m.inv_var.array()).sum();
    case TargetKind::ar1: return -0.5 * x.dot(ar1_apply_precision(m.r, x));
    case TargetKind::dense: {
      const Eigen::VectorXd c = x - m.mu;
      return -0.5 * c.dot(m.omega * c);
    }
    case TargetKind::svm: return svm_eval(m, x, nullptr);
  }
  return 0.0;
}

double TargetModel::log_density_and_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  const Impl& m = *impl_;
  check_dim(m, x);
  switch (m.kind) {
    case TargetKind::spherical:
      grad = -x;
      return -0.5 * x.squaredNorm();
    case TargetKind::diagonal:
      grad = -(x.array() * m.inv_var.array()).matrix();
      return 0.5 * x.dot(grad);
    case TargetKind::ar1:
      grad = -ar1_apply_precision(m.r, x);
      return 0.5 * x.dot(grad);
    case TargetKind::dense: {
      const Eigen::VectorXd c = x - m.mu;
      grad = -(m.omega * c);
      return 0.5 * c.dot(grad);
    }
    case TargetKind::svm: return svm_eval(m, x, &grad);
  }
  return 0.0;
}

Eigen::VectorXd TargetModel::mean() const {
  const Impl& m = *impl_;
  if (!is_gaussian()) throw std::logic_error("mean: target is not Gaussian");
  if (m.kind == TargetKind::dense) return m.mu;
  return Eigen::VectorXd::Zero(m.d);
}

Eigen::MatrixXd TargetModel::covariance() const {
  const Impl& m = *impl_;
  switch (m.kind) {
    case TargetKind::spherical: return Eigen::MatrixXd::Identity(m.d, m.d);
    case TargetKind::diagonal: return m.var.asDiagonal();
    case TargetKind::ar1: {
      Eigen::MatrixXd s(m.d, m.d);
      for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) s(i, j) = std::pow(m.r, std::abs(i - j));
      return s;
    }
    case TargetKind::dense: return m.sigma;
    case TargetKind::svm: break;
  }
  throw std::logic_error("covariance: target is not Gaussian");
}

Eigen::MatrixXd TargetModel::precision() const {
  const Impl& m = *impl_;
  switch (m.kind) {
    case TargetKind::spherical: return Eigen::MatrixXd::Identity(m.d, m.d);
    case TargetKind::diagonal: return m.inv_var.asDiagonal();
    case TargetKind::ar1: {
      Eigen::MatrixXd o = Eigen::MatrixXd::Zero(m.d, m.d);
      for (int j = 0; j < m.d; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(m.d, j);
        o.col(j) = ar1_apply_precision(m.r, e);
      }
      return o;
    }
    case TargetKind::dense: return m.omega;
    case TargetKind::svm: break;
  }
  throw std::logic_error("precision: target is not Gaussian");
}

Eigen::VectorXd TargetModel::apply_precision(const Eigen::VectorXd& x) const {
  const Impl& m = *impl_;
  check_dim(m, x);
  switch (m.kind) {
    case TargetKind::spherical: return x;
    case TargetKind::diagonal: return (x.array() * m.inv_var.array()).matrix();
    case TargetKind::ar1: return ar1_apply_precision(m.r, x);
    case TargetKind::dense: return m.omega * x;
    case TargetKind::svm: break;
  }
  throw std::logic_error("apply_precision: target is not Gaussian");
}

void TargetModel::sample_stationary(RngStream& rng, Eigen::Ref<Eigen::VectorXd> out) const {
  const Impl& m = *impl_;
  if (out.size() != m.d) throw std::invalid_argument("sample_stationary: dimension mismatch");
  switch (m.kind) {
    case TargetKind::spherical: rng.fill_normal(out); return;
    case TargetKind::diagonal:
      rng.fill_normal(out);
      out.array() *= m.sd.array();
      return;
    case TargetKind::ar1: {
      const double innov = std::sqrt(1.0 - m.r * m.r);
      out[0] = rng.normal();
      for (int i = 1; i < m.d; ++i) out[i] = m.r * out[i - 1] + innov * rng.normal();
      return;
    }
    case TargetKind::dense: {
      Eigen::VectorXd z(m.d);
      rng.fill_normal(z);
      out = m.mu + m.chol_l * z;
      return;
    }
    case TargetKind::svm: break;
  }
  throw std::logic_error("sample_stationary: target is not Gaussian");
}

const Eigen::VectorXd& TargetModel::variances() const {
  if (kind() != TargetKind::diagonal) throw std::logic_error("variances: not a diagonal target");
  return impl_->var;
}
double TargetModel::ar1_corr() const {
  if (kind() != TargetKind::ar1) throw std::logic_error("ar1_corr: not an ar1 target");
  return impl_->r;
}
const std::vector<double>& TargetModel::svm_y() const {
  if (kind() != TargetKind::svm) throw std::logic_error("svm_y: not an svm target");
  return impl_->y;
}
const SvmParams& TargetModel::svm_params() const {
  if (kind() != TargetKind::svm) throw std::logic_error("svm_params: not an svm target");
  return impl_->svm;
}

SpectralSummary spectral_summary(const TargetModel& target) {
  if (!target.is_gaussian()) throw std::logic_error("spectral_summary: target is not Gaussian");
  const double d = target.dim();
  SpectralSummary s{};
  switch (target.kind()) {
    case TargetKind::spherical:
      for (double& z : s.z_sq) z = 1.0;
      break;
    case TargetKind::diagonal: {
      const Eigen::ArrayXd v = target.variances().array();
      s.z_sq[0] = v.square().sum() / d;
      s.z_sq[1] = v.sum() / d;
      s.z_sq[2] = 1.0;
      s.z_sq[3] = v.inverse().sum() / d;
      s.z_sq[4] = v.inverse().square().sum() / d;
      break;
    }
    case TargetKind::ar1: {
      const double r = target.ar1_corr();
      const double r2 = r * r;
      const int n = target.dim();
      double tr_s2 = n;
      double p = 1.0;
      for (int k = 1; k < n; ++k) {
        p *= r2;
        tr_s2 += 2.0 * (n - k) * p;
      }
      const double sc = 1.0 / (1.0 - r2);
      double tr_o = 1.0, tr_o2 = 1.0;
      if (n > 1) {
        tr_o = sc * (2.0 + (n - 2) * (1.0 + r2));
        tr_o2 = sc * sc * (2.0 + (n - 2) * (1.0 + r2) * (1.0 + r2) + 2.0 * (n - 1) * r2);
      }
      s.z_sq[0] = tr_s2 / d;
      s.z_sq[1] = 1.0;
      s.z_sq[2] = 1.0;
      s.z_sq[3] = tr_o / d;
      s.z_sq[4] = tr_o2 / d;
      break;
    }
    case TargetKind::dense: {
      const Eigen::MatrixXd sig = target.covariance();
      const Eigen::MatrixXd om = target.precision();
      s.z_sq[0] = sig.squaredNorm() / d;
      s.z_sq[1] = sig.trace() / d;
      s.z_sq[2] = 1.0;
      s.z_sq[3] = om.trace() / d;
      s.z_sq[4] = om.squaredNorm() / d;
      break;
    }
    case TargetKind::svm: break;
  }
  s.ellipticity = s.z_sq[1] * s.z_sq[3];
  return s;
}

SvmData svm_simulate(int T, const SvmParams& p, RngStream& rng) {
  if (T < 1) throw DomainError("svm_simulate: T must be positive");
  if (!(std::fabs(p.phi) < 1.0)) throw DomainError("svm_simulate: |phi| must be < 1");
  if (!(p.sigma >= 0.0)) throw DomainError("svm_simulate: sigma must be non-negative");
  if (!(p.beta > 0.0)) throw DomainError("svm_simulate: beta must be positive");
  SvmData out;
  out.x.resize(T);
  out.y.resize(T);
  out.x[0] = p.sigma / std::sqrt(1.0 - p.phi * p.phi) * rng.normal();
  for (int t = 1; t < T; ++t) out.x[t] = p.phi * out.x[t - 1] + p.sigma * rng.normal();
  for (int t = 0; t < T; ++t) out.y[t] = p.beta * rng.normal() * std::exp(0.5 * out.x[t]);
  return out;
}

LaplaceResult laplace_fit_fn(const LogDensityFn& f, const Eigen::VectorXd& x0,
                             const LaplaceOptions& opts) {
  if (!x0.allFinite()) throw std::invalid_argument("laplace_fit: non-finite starting point");
  const Eigen::Index d = x0.size();
  Eigen::VectorXd x = x0, g(d), g_new(d), x_new(d);
  double fx = f(x, g);
  double step = 1.0;
  int it = 0;
  // gradient ascent with Armijo backtracking and a Barzilai-Borwein trial step
  for (; it < opts.max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol) break;
    double t = step;
    double f_new;
    for (int bt = 0;; ++bt) {
      x_new = x + t * g;
      f_new = f(x_new, g_new);
      // near the mode the decrease drops below rounding of f itself; allow that slack
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(fx);
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * t * g.squaredNorm() - slack) break;
      t *= 0.5;
      if (bt > 80) throw std::runtime_error("laplace_fit: line search failed");
    }
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g - g_new;
    const double sy = s.dot(yv);
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * t;
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
  }
  if (g.lpNorm<Eigen::Infinity>() > opts.grad_tol)
    throw std::runtime_error("laplace_fit: no convergence after " + std::to_string(it) + " iterations");

  Eigen::MatrixXd H(d, d);
  Eigen::VectorXd gp(d), gm(d), xp(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double hstep = opts.fd_rel_step * std::max(1.0, std::fabs(x[i]));
    xp = x;
    xp[i] = x[i] + hstep;
    f(xp, gp);
    xp[i] = x[i] - hstep;
    f(xp, gm);
    H.col(i) = (gp - gm) / (2.0 * hstep);
  }
  const Eigen::MatrixXd neg_h = -0.5 * (H + H.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(neg_h);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("laplace_fit: Hessian at the optimum is not negative definite");
  Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(d, d));
  sigma = 0.5 * (sigma + sigma.transpose());
  return {x, sigma, it};
}

TargetModel laplace_fit(const TargetModel& target, const Eigen::VectorXd& x0,
                        const LaplaceOptions& opts) {
  auto fn = [&target](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    return target.log_density_and_grad(x, g);
  };
  LaplaceResult r = laplace_fit_fn(fn, x0, opts);
  return TargetModel::dense(std::move(r.mu), std::move(r.sigma));
}

}  // namespace mcmccoup
