#include "sim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mcmccoup/io.hpp"
#include "mcmccoup/kernels.hpp"
#include "mcmccoup/special.hpp"

namespace mcmccoup::exp {

using Eigen::VectorXd;

std::vector<Start> standard_starts() {
  return {{1.0, 1.0, 0.0, "i"}, {1.0, 1.0, 0.9, "ii"}, {1.5, 0.5, 0.0, "iii"}, {0.4, 0.01, -0.5, "iv"}};
}

std::vector<Start> parse_starts(const std::string& text) {
  std::vector<Start> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    Start s{};
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> s.x0 >> c1 >> s.y0 >> c2 >> s.rho0) || c1 != ',' || c2 != ',')
      throw std::invalid_argument("start '" + item + "' is not x0,y0,rho0");
    if (!(s.x0 > 0 && s.y0 > 0 && std::fabs(s.rho0) <= 1))
      throw std::invalid_argument("start '" + item + "' needs x0, y0 > 0 and |rho0| <= 1");
    s.label = "s" + std::to_string(out.size() + 1);
    out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("no starting conditions given");
  return out;
}

void spherical_start(const Start& s, RngStream& rng, VectorXd& X, VectorXd& Y, bool exact) {
  VectorXd z(X.size()), zs(X.size());
  rng.fill_normal(z);
  rng.fill_normal(zs);
  if (exact) {
    // same directions, with |Z|^2 = |Z*|^2 = d and Z'Z* = 0 imposed
    const double d = static_cast<double>(X.size());
    z *= std::sqrt(d) / z.norm();
    zs -= zs.dot(z) / d * z;
    zs *= std::sqrt(d) / zs.norm();
  }
  X = std::sqrt(s.x0) * z;
  Y = std::sqrt(s.y0) * (s.rho0 * z + std::sqrt(1.0 - s.rho0 * s.rho0) * zs);
}

std::vector<OdeSample> coupled_rwm_trace(const TargetModel& target, VectorXd X, VectorXd Y,
                                         const CouplingSpec& spec, double h, long n_iter, long every,
                                         double norm, RngStream& rng) {
  const double d = target.dim();
  CoupledChainState s = make_coupled_state(target, std::move(X), std::move(Y));
  std::vector<OdeSample> out;
  auto record = [&](long i) {
    out.push_back({i / d, {s.X().squaredNorm() / norm, s.Y().squaredNorm() / norm, s.X().dot(s.Y()) / norm}});
  };
  record(0);
  for (long i = 1; i <= n_iter; ++i) {
    coupled_rwm_step(s, spec, h, target, rng);
    if (i % every == 0 || i == n_iter) record(i);
  }
  return out;
}

double sup_gap(const std::vector<OdeSample>& mcmc, const std::vector<OdeSample>& ode) {
  if (ode.size() < 2) throw std::invalid_argument("sup_gap: ODE trajectory too short");
  double gap = 0.0;
  std::size_t j = 0;
  for (const auto& m : mcmc) {
    if (m.t > ode.back().t + 1e-12) break;
    while (j + 2 < ode.size() && ode[j + 1].t < m.t) ++j;
    const double t0 = ode[j].t, t1 = ode[j + 1].t;
    const double a = std::clamp((m.t - t0) / (t1 - t0), 0.0, 1.0);
    const double s = (1 - a) * ode[j].w.s() + a * ode[j + 1].w.s();
    gap = std::max(gap, std::fabs(m.w.s() - s));
  }
  return gap;
}

EllipticalCase make_elliptical(const std::string& name, int d, RngStream& rng) {
  if (name == "ar1") {
    auto t = TargetModel::ar1(d, 0.5);
    return {name, t, spectral_summary(t)};
  }
  if (name == "chi2") {
    VectorXd var(d);
    for (int i = 0; i < d; ++i) var[i] = rng.chi_squared(3.0);
    auto t = TargetModel::diagonal(var);
    return {name, t, spectral_summary(t)};
  }
  if (name == "two-eigen") {
    VectorXd var(d);
    for (int i = 0; i < d; ++i) var[i] = i % 2 == 0 ? 1.0 : 24.0;
    auto t = TargetModel::diagonal(var);
    return {name, t, spectral_summary(t)};
  }
  throw std::invalid_argument("unknown elliptical target '" + name + "' (ar1, chi2, two-eigen)");
}

double elliptical_h(const EllipticalCase& c, double l1) {
  return l1 / std::sqrt(c.spectrum.z(1)) / std::sqrt(static_cast<double>(c.target.dim()));
}

SvmSetup svm_setup(int T, const SvmParams& params, std::uint64_t data_seed, const std::string& data_path,
                   double l1) {
  std::vector<double> y;
  if (data_path.empty()) {
    RngStream rng(data_seed, 0);
    y = svm_simulate(T, params, rng).y;
  } else {
    y = read_svm_data_csv(data_path);
  }
  const int n = static_cast<int>(y.size());
  TargetModel post = TargetModel::svm(y, params);
  TargetModel lap = laplace_fit(post, VectorXd::Zero(n));
  const double h = l1 / std::sqrt(lap.precision().trace());
  const double eps = spectral_summary(lap).ellipticity;
  return {n, params, std::move(y), std::move(post), std::move(lap), h, eps};
}

VectorXd svm_prior_draw(const SvmSetup& s, RngStream& rng) {
  const auto x = svm_simulate(s.T, s.params, rng).x;
  return Eigen::Map<const VectorXd>(x.data(), s.T);
}

void rwm_chain(ChainPoint& p, const TargetModel& target, double h, long n, RngStream& rng) {
  ChainPoint scratch;
  VectorXd z(p.x.size());
  for (long i = 0; i < n; ++i) {
    rng.fill_normal(z);
    rwm_update(p, z, rng.uniform(), h, target, scratch);
  }
}

LaggedRunner svm_rwm_runner(const SvmSetup& s, const CouplingSpec& spec) {
  LaggedRunner r;
  const TargetModel t = s.posterior;
  const double h = s.h;
  r.init = [s](RngStream& rng) {
    VectorXd x = svm_prior_draw(s, rng);
    VectorXd y = svm_prior_draw(s, rng);
    return make_coupled_state(s.posterior, std::move(x), std::move(y));
  };
  r.marginal_step = [t, h](ChainPoint& p, RngStream& rng) { rwm_chain(p, t, h, 1, rng); };
  r.coupled_step = [t, h, spec](CoupledChainState& st, RngStream& rng) { coupled_rwm_step(st, spec, h, t, rng); };
  return r;
}

LaggedRunner svm_hug_hop_runner(const SvmSetup& s, const HugParams& hug, const HopParams& hop,
                                double delta_hop) {
  LaggedRunner r;
  const TargetModel t = s.posterior;
  r.init = [s](RngStream& rng) {
    VectorXd x = svm_prior_draw(s, rng);
    VectorXd y = svm_prior_draw(s, rng);
    return make_coupled_state(s.posterior, std::move(x), std::move(y));
  };
  r.marginal_step = [t, hug, hop](ChainPoint& p, RngStream& rng) { hug_hop_step(p, hug, hop, t, rng); };
  r.coupled_step = [t, hug, hop, delta_hop](CoupledChainState& st, RngStream& rng) {
    coupled_hug_hop_step(st, hug, hop, delta_hop, t, rng);
  };
  return r;
}

std::vector<double> cross_target_trace(const TargetModel& tx, const TargetModel& ty, VectorXd X, VectorXd Y,
                                       CouplingKind kind, double h, long n_iter, long thin, RngStream& rng) {
  CoupledChainState s = make_coupled_state(tx, ty, std::move(X), std::move(Y));
  std::vector<double> out{s.sq_dist()};
  for (long i = 1; i <= n_iter; ++i) {
    cross_target_step(s, kind, h, tx, ty, rng);
    if (i % thin == 0) out.push_back(s.sq_dist());
  }
  return out;
}

std::vector<long> linear_grid(long lo, long hi, int n) {
  std::vector<long> g;
  if (n < 2 || hi <= lo) return {lo};
  for (int i = 0; i < n; ++i) {
    const long v = lo + static_cast<long>(std::llround(static_cast<double>(hi - lo) * i / (n - 1)));
    if (g.empty() || v != g.back()) g.push_back(v);
  }
  return g;
}

}  // namespace mcmccoup::exp
