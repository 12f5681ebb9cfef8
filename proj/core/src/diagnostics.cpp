#include "mcmccoup/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mcmccoup {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

int ReplicateResult::n_capped() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const MeetingRecord& r) { return r.capped; }));
}

ReplicateResult run_replicates(const LaggedRunner& runner, const ReplicateOptions& o) {
  if (o.L < 1 || o.R < 1) throw std::invalid_argument("run_replicates: need L >= 1 and R >= 1");
  if (o.thin < 1) throw std::invalid_argument("run_replicates: thin must be >= 1");
  ReplicateResult res;
  res.records.resize(o.R);
  res.traces.resize(o.R);
  parallel_for(o.R, o.threads, [&](int r) {
    RngStream rng(o.seed, static_cast<std::uint64_t>(r));
    CoupledChainState s = runner.init(rng);
    for (long i = 0; i < o.L; ++i) runner.marginal_step(s.x, rng);
    s.met = s.x.x == s.y.x;
    s.t = o.L;
    MeetingRecord& rec = res.records[r];
    DistanceTrace& tr = res.traces[r];
    rec.replicate = r;
    rec.L = o.L;
    tr.thin = o.thin;
    tr.sq.push_back(s.sq_dist());
    while (!s.met && s.t < o.max_iter) {
      runner.coupled_step(s, rng);
      if (!s.met && (s.t - o.L) % o.thin == 0) tr.sq.push_back(s.sq_dist());
    }
    if (s.met) {
      rec.tau = s.t;
    } else {
      rec.capped = true;
      rec.tau = -1;
    }
  });
  return res;
}

std::string to_string(BoundMetric m) { return m == BoundMetric::tv ? "tv" : "w2sq"; }

namespace {

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

constexpr double kZ95 = 1.959963984540054;

}  // namespace

BoundCurve tv_bound_curve(const std::vector<MeetingRecord>& records, const std::vector<long>& t_grid) {
  BoundCurve c;
  c.metric = BoundMetric::tv;
  std::vector<const MeetingRecord*> ok;
  for (const auto& r : records) {
    if (r.capped) ++c.n_capped; else ok.push_back(&r);
  }
  if (ok.empty()) throw std::runtime_error("tv_bound_curve: every replicate is capped");
  c.n_replicates = static_cast<int>(ok.size());
  std::vector<double> vals(ok.size());
  for (long t : t_grid) {
    for (std::size_t i = 0; i < ok.size(); ++i) {
      const long L = ok[i]->L;
      const long num = ok[i]->tau - L - t;
      // ceil(num / L) for positive num, integer arithmetic
      vals[i] = num > 0 ? static_cast<double>((num + L - 1) / L) : 0.0;
    }
    const MeanSe ms = mean_se(vals);
    c.t.push_back(t);
    c.estimate.push_back(ms.mean);
    c.ci_low.push_back(std::max(0.0, ms.mean - kZ95 * ms.se));
    c.ci_high.push_back(ms.mean + kZ95 * ms.se);
  }
  return c;
}

BoundCurve w2_bound_curve(const std::vector<MeetingRecord>& records,
                          const std::vector<DistanceTrace>& traces, const std::vector<long>& t_grid,
                          long L) {
  if (records.size() != traces.size()) throw std::invalid_argument("w2_bound_curve: records/traces size mismatch");
  BoundCurve c;
  c.metric = BoundMetric::w2sq;
  std::vector<const DistanceTrace*> ok;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].capped) ++c.n_capped; else ok.push_back(&traces[i]);
  }
  if (ok.empty()) throw std::runtime_error("w2_bound_curve: every replicate is capped");
  c.n_replicates = static_cast<int>(ok.size());
  const long thin = ok.front()->thin;
  for (const auto* tr : ok)
    if (tr->thin != thin) throw std::invalid_argument("w2_bound_curve: mixed thinning");
  if (L % thin != 0) throw std::invalid_argument("w2_bound_curve: insufficient trace storage (L not a multiple of thin)");
  std::size_t longest = 0;
  for (const auto* tr : ok) longest = std::max(longest, tr->sq.size());

  std::vector<double> vals(ok.size());
  for (long t : t_grid) {
    if (t < 0 || t % thin != 0)
      throw std::invalid_argument("w2_bound_curve: insufficient trace storage (t not a multiple of thin)");
    double sum = 0.0, sum_lo = 0.0, sum_hi = 0.0;
    // term j compares X_{t+jL} with Y_{t+(j-1)L}; the stored index is (t + (j-1)L)/thin
    for (long j = 1;; ++j) {
      const std::size_t k = static_cast<std::size_t>((t + (j - 1) * L) / thin);
      if (k >= longest) break;
      for (std::size_t i = 0; i < ok.size(); ++i) vals[i] = k < ok[i]->sq.size() ? ok[i]->sq[k] : 0.0;
      const MeanSe ms = mean_se(vals);
      sum += std::sqrt(ms.mean);
      sum_lo += std::sqrt(std::max(0.0, ms.mean - kZ95 * ms.se));
      sum_hi += std::sqrt(ms.mean + kZ95 * ms.se);
    }
    c.t.push_back(t);
    c.estimate.push_back(sum * sum);
    c.ci_low.push_back(sum_lo * sum_lo);
    c.ci_high.push_back(sum_hi * sum_hi);
  }
  return c;
}

Estimate stationary_bias_bound(const std::vector<std::vector<double>>& traces, long burn_in,
                               long thin) {
  if (traces.empty()) throw std::invalid_argument("stationary_bias_bound: no traces");
  if (thin < 1) throw std::invalid_argument("stationary_bias_bound: thin must be >= 1");
  std::vector<double> per_rep;
  for (const auto& tr : traces) {
    const std::size_t first = static_cast<std::size_t>(burn_in / thin) + 1;
    if (tr.size() <= first) throw std::invalid_argument("stationary_bias_bound: trace shorter than burn-in");
    double s = 0.0;
    for (std::size_t i = first; i < tr.size(); ++i) s += tr[i];
    per_rep.push_back(s / static_cast<double>(tr.size() - first));
  }
  const MeanSe ms = mean_se(per_rep);
  return {ms.mean, std::max(0.0, ms.mean - kZ95 * ms.se), ms.mean + kZ95 * ms.se};
}

SymEigen jacobi_eigen(const Eigen::MatrixXd& a_in, double tol, int max_sweeps) {
  const Eigen::Index n = a_in.rows();
  if (a_in.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix is not square");
  Eigen::MatrixXd a = 0.5 * (a_in + a_in.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  auto off = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  const double scale = std::max(1.0, a.norm());
  int sweep = 0;
  for (; sweep < max_sweeps && off() > tol * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return {a.diagonal(), v, sweep};
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a) {
  const SymEigen e = jacobi_eigen(a);
  const double tol = 1e-12 * std::max(1.0, e.values.cwiseAbs().maxCoeff());
  if ((e.values.array() < -tol).any()) throw std::domain_error("spd_sqrt: matrix is not positive semi-definite");
  const Eigen::VectorXd r = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * r.asDiagonal() * e.vectors.transpose();
}

double gelbrich_bound(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1,
                      const Eigen::VectorXd& mu2, const Eigen::MatrixXd& s2) {
  const Eigen::Index d = mu1.size();
  if (mu2.size() != d || s1.rows() != d || s1.cols() != d || s2.rows() != d || s2.cols() != d)
    throw std::invalid_argument("gelbrich_bound: dimension mismatch");
  for (const Eigen::MatrixXd* s : {&s1, &s2}) {
    Eigen::LLT<Eigen::MatrixXd> llt(*s);
    if (llt.info() != Eigen::Success || !s->isApprox(s->transpose(), 1e-10))
      throw std::domain_error("gelbrich_bound: covariance is not symmetric positive definite");
  }
  const Eigen::MatrixXd r1 = spd_sqrt(s1);
  const Eigen::MatrixXd cross = spd_sqrt(r1 * s2 * r1);
  const double v = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross.trace();
  return std::max(0.0, v);
}

namespace {

Band band_from(const std::vector<double>& per_unit) {
  const MeanSe ms = mean_se(per_unit);
  return {ms.mean, ms.mean - kZ95 * ms.se, ms.mean + kZ95 * ms.se, ms.se};
}

}  // namespace

SummaryStats summary_stats(const std::vector<ChainTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("summary_stats: no traces");
  long total = 0;
  for (const auto& tr : traces) {
    if (tr.accepted.size() != tr.sq_jump.size() || tr.sq_jump.size() != tr.sq_norm.size())
      throw std::invalid_argument("summary_stats: ragged trace");
    total += static_cast<long>(tr.accepted.size());
  }
  if (total == 0) throw std::invalid_argument("summary_stats: empty trace");

  // units: replicates, or 20 contiguous batches of a single replicate
  std::vector<double> acc, jump, norm;
  auto add_unit = [&](const ChainTrace& tr, std::size_t b, std::size_t e) {
    double a = 0.0, j = 0.0, q = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      a += tr.accepted[i];
      j += tr.sq_jump[i];
      q += tr.sq_norm[i];
    }
    const double n = static_cast<double>(e - b);
    acc.push_back(a / n);
    jump.push_back(j / n);
    norm.push_back(q / n);
  };
  if (traces.size() >= 2) {
    for (const auto& tr : traces)
      if (!tr.accepted.empty()) add_unit(tr, 0, tr.accepted.size());
  } else {
    const ChainTrace& tr = traces.front();
    const std::size_t n = tr.accepted.size();
    const std::size_t nb = std::min<std::size_t>(20, n);
    for (std::size_t b = 0; b < nb; ++b) add_unit(tr, b * n / nb, (b + 1) * n / nb);
  }
  return {band_from(acc), band_from(jump), band_from(norm), total, static_cast<int>(traces.size())};
}

}  // namespace mcmccoup
