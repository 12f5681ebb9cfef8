#include <algorithm>
#include <cmath>

#include "experiments.hpp"
#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/io.hpp"
#include "sim.hpp"

namespace mcmccoup::exp {

namespace {

std::vector<Param> svm_params(const char* T_desk) {
  return {
      {"T", T_desk, "360", "number of observations when data are simulated"},
      {"data", "", "", "CSV with columns t,Y_t; empty means simulate"},
      {"data_seed", "1", "1", "seed of the simulated data set"},
      {"beta", "0.65", "0.65", "model beta"},
      {"phi", "0.98", "0.98", "model phi"},
      {"sigma", "0.15", "0.15", "model sigma"},
      {"l1", "2.38", "2.38", "natural step parameter; h = l1 / sqrt(tr precision of the Laplace fit)"},
  };
}

std::vector<Param> with(std::vector<Param> a, const std::vector<Param>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

long positive_int(const Config& c, const std::string& key) {
  const long v = c.integer(key);
  if (v < 1) throw ConfigError("field '" + key + "': must be >= 1");
  return v;
}

SvmSetup setup_from(Context& ctx) {
  const auto& c = ctx.cfg();
  const long T = positive_int(c, "T");
  SvmParams p{c.num("beta"), c.num("phi"), c.num("sigma")};
  if (!(p.beta > 0 && std::fabs(p.phi) < 1 && p.sigma > 0))
    throw ConfigError("field 'phi': need beta > 0, |phi| < 1, sigma > 0");
  SvmSetup s = svm_setup(static_cast<int>(T), p, c.u64("data_seed"), c.str("data"), c.num("l1"));
  write_svm_data_csv(ctx.file("svm_data.csv"), s.y);
  write_gaussian_fit_json(ctx.file("laplace.json"), GaussianFit{s.laplace.mean(), s.laplace.covariance()});
  ctx.log() << "svm: T=" << s.T << " h=" << s.h << " laplace ellipticity=" << s.ellipticity << "\n";
  return s;
}

CouplingSpec spec_of(const std::string& name, double delta) {
  CouplingKind k;
  try {
    k = coupling_kind_from_string(name);
  } catch (const std::exception&) {
    throw ConfigError("field 'couplings': unknown coupling '" + name + "'");
  }
  if (k == CouplingKind::maximal_independent) throw ConfigError("field 'couplings': maximal-independent is a Hop coupling");
  return {k, k == CouplingKind::two_scale ? delta : 0.0};
}

void write_records(CsvWriter& w, const std::string& label, const std::vector<MeetingRecord>& rs) {
  for (const auto& r : rs) {
    w.cell(label).cell(r.replicate).cell(r.tau).cell(r.L).cell(r.capped ? 1 : 0);
    w.end_row();
  }
}

// t grid on multiples of thin, up to the largest post-lag meeting offset
std::vector<long> bound_grid(const std::vector<MeetingRecord>& rs, long thin, int points) {
  long last = 0;
  for (const auto& r : rs)
    if (!r.capped) last = std::max(last, r.tau - r.L);
  std::vector<long> g;
  for (long t : linear_grid(0, last + thin, points)) {
    const long v = t / thin * thin;
    if (g.empty() || v != g.back()) g.push_back(v);
  }
  return g;
}

double mean_tau(const std::vector<MeetingRecord>& rs) {
  double s = 0.0;
  int n = 0;
  for (const auto& r : rs)
    if (!r.capped) s += static_cast<double>(r.tau), ++n;
  return n ? s / n : std::nan("");
}

int run_svm_convergence(Context& ctx) {
  const auto& c = ctx.cfg();
  const SvmSetup s = setup_from(ctx);
  ReplicateOptions o;
  o.L = positive_int(c, "L");
  o.R = static_cast<int>(positive_int(c, "R"));
  o.max_iter = positive_int(c, "max_iter");
  o.thin = positive_int(c, "thin");
  o.seed = ctx.seed();
  o.threads = ctx.threads();
  if (o.L % o.thin) throw ConfigError("field 'thin': must divide L");
  if (o.max_iter <= o.L) throw ConfigError("field 'max_iter': must exceed L");
  const double delta = c.num("delta");
  if (!(delta > 0)) throw ConfigError("field 'delta': must be positive");
  const int points = static_cast<int>(positive_int(c, "grid_points"));

  CsvWriter meet(ctx.file("meetings.csv"), {"coupling", "replicate", "tau", "L", "capped"});
  CsvWriter sum(ctx.file("summary.csv"), {"coupling", "n_replicates", "n_capped", "mean_tau", "h", "laplace_eps"});
  CsvWriter tr(ctx.file("traces.csv"), {"coupling", "t", "sq_dist"});
  std::vector<BoundCurve> curves;
  for (const auto& name : c.strs("couplings")) {
    const CouplingSpec spec = spec_of(name, delta);
    const ReplicateResult res = run_replicates(svm_rwm_runner(s, spec), o);
    write_records(meet, name, res.records);
    sum.cell(name).cell(o.R).cell(res.n_capped()).cell(mean_tau(res.records)).cell(s.h).cell(s.ellipticity);
    sum.end_row();
    // one trace of |X_{t+L} - Y_t|^2 per coupling
    const auto& sq = res.traces.front().sq;
    for (std::size_t k = 0; k < sq.size(); ++k) {
      tr.cell(name).cell(static_cast<long>(k) * o.thin).cell(sq[k]);
      tr.end_row();
    }
    ctx.log() << "  " << name << ": capped " << res.n_capped() << "/" << o.R << ", mean tau " << mean_tau(res.records) << "\n";
    if (res.n_capped() == o.R) continue;
    const auto grid = bound_grid(res.records, o.thin, points);
    curves.push_back(tv_bound_curve(res.records, grid));
    curves.push_back(w2_bound_curve(res.records, res.traces, grid, o.L));
  }
  meet.close();
  sum.close();
  tr.close();
  write_bound_curves_csv(ctx.file("bounds.csv"), curves);
  return kExitOk;
}

int run_svm_bias(Context& ctx) {
  const auto& c = ctx.cfg();
  const SvmSetup s = setup_from(ctx);
  const int R = static_cast<int>(positive_int(c, "R"));
  const long n = positive_int(c, "n_iter"), burn = c.integer("burn_in"), thin = positive_int(c, "thin");
  const long warm = c.integer("x_warmup");
  if (burn < 0 || burn >= n) throw ConfigError("field 'burn_in': must lie in [0, n_iter)");
  if (warm < 0) throw ConfigError("field 'x_warmup': must be >= 0");
  std::vector<CouplingKind> kinds;
  for (const auto& k : c.strs("couplings")) {
    const auto spec = spec_of(k, 1.0);
    if (spec.kind != CouplingKind::crn && spec.kind != CouplingKind::reflection && spec.kind != CouplingKind::gcrn)
      throw ConfigError("field 'couplings': bias mode supports crn, reflection, gcrn");
    kinds.push_back(spec.kind);
  }
  CsvWriter b(ctx.file("bias.csv"), {"coupling", "estimate", "ci_low", "ci_high", "n_replicates", "burn_in"});
  CsvWriter avg(ctx.file("bias_traces.csv"), {"coupling", "t", "mean_sq_dist"});
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    std::vector<std::vector<double>> traces(R);
    parallel_for(R, ctx.threads(), [&](int r) {
      // the same stationary starts for every coupling
      RngStream init(ctx.seed(), static_cast<std::uint64_t>(r));
      Eigen::VectorXd y0(s.T);
      s.laplace.sample_stationary(init, y0);
      Eigen::VectorXd x_start(s.T);
      s.laplace.sample_stationary(init, x_start);
      ChainPoint x = make_point(s.posterior, x_start);
      rwm_chain(x, s.posterior, s.h, warm, init);
      RngStream rng(ctx.seed() + 1 + ki, static_cast<std::uint64_t>(r));
      traces[r] = cross_target_trace(s.posterior, s.laplace, x.x, y0, kinds[ki], s.h, n, thin, rng);
    });
    const Estimate e = stationary_bias_bound(traces, burn, thin);
    const std::string name = to_string(kinds[ki]);
    b.cell(name).cell(e.estimate).cell(e.ci_low).cell(e.ci_high).cell(R).cell(burn);
    b.end_row();
    for (std::size_t k = 0; k < traces.front().size(); ++k) {
      double m = 0.0;
      for (const auto& t : traces) m += t[k];
      avg.cell(name).cell(static_cast<long>(k) * thin).cell(m / R);
      avg.end_row();
    }
    ctx.log() << "  " << name << ": bias bound " << e.estimate << " [" << e.ci_low << ", " << e.ci_high << "]\n";
  }
  b.close();
  avg.close();
  return kExitOk;
}

int run_svm_threshold_sweep(Context& ctx) {
  const auto& c = ctx.cfg();
  const SvmSetup s = setup_from(ctx);
  ReplicateOptions o;
  o.L = 1;
  o.R = static_cast<int>(positive_int(c, "R"));
  o.max_iter = positive_int(c, "max_iter");
  o.thin = o.max_iter;
  o.seed = ctx.seed();
  o.threads = ctx.threads();
  CsvWriter meet(ctx.file("meetings.csv"), {"delta", "replicate", "tau", "L", "capped"});
  CsvWriter sum(ctx.file("summary.csv"), {"delta", "n_met", "n_capped", "mean_tau", "median_tau"});
  for (double delta : c.nums("deltas")) {
    if (!(delta > 0)) throw ConfigError("field 'deltas': thresholds must be positive");
    const auto res = run_replicates(svm_rwm_runner(s, {CouplingKind::two_scale, delta}), o);
    write_records(meet, format_double(delta), res.records);
    std::vector<double> taus;
    for (const auto& r : res.records)
      if (!r.capped) taus.push_back(static_cast<double>(r.tau));
    std::sort(taus.begin(), taus.end());
    const double med = taus.empty() ? std::nan("")
                       : taus.size() % 2 ? taus[taus.size() / 2]
                                         : 0.5 * (taus[taus.size() / 2 - 1] + taus[taus.size() / 2]);
    sum.cell(delta).cell(static_cast<long>(taus.size())).cell(res.n_capped()).cell(mean_tau(res.records)).cell(med);
    sum.end_row();
    ctx.log() << "  delta " << delta << ": mean tau " << mean_tau(res.records) << ", capped " << res.n_capped() << "\n";
  }
  meet.close();
  sum.close();
  return kExitOk;
}

}  // namespace

std::vector<Experiment> svm_experiments() {
  const auto conv = with(svm_params("50"), {
                                               {"couplings", "two-scale,crn,reflection", "two-scale,crn,reflection", "couplings to compare"},
                                               {"delta", "0.1", "0.1", "two-scale squared-distance threshold"},
                                               {"L", "50000", "2000000", "lag"},
                                               {"R", "20", "100", "replicates"},
                                               {"max_iter", "1000000", "20000000", "iteration cap per replicate (X-chain time)"},
                                               {"thin", "100", "1000", "storage spacing of distance traces"},
                                               {"grid_points", "60", "200", "points on the bound-curve t grid"},
                                           });
  const auto bias = with(svm_params("50"), {
                                               {"couplings", "crn,reflection,gcrn", "crn,reflection,gcrn", "couplings to compare"},
                                               {"R", "20", "100", "replicates"},
                                               {"n_iter", "100000", "1000000", "iterations per replicate"},
                                               {"burn_in", "35000", "350000", "discarded iterations"},
                                               {"thin", "10", "100", "storage spacing"},
                                               {"x_warmup", "20000", "200000", "RWM steps bringing the SVM chain to stationarity"},
                                           });
  const auto sweep = with(svm_params("50"), {
                                                {"deltas", "0.001,0.01,0.1,1,10", "0.0001,0.001,0.01,0.1,1,10,100", "thresholds"},
                                                {"R", "20", "100", "replicates"},
                                                {"max_iter", "1000000", "20000000", "iteration cap"},
                                            });
  return {
      {"svm-convergence", "lagged meeting times and TV / W2 bounds for RWM on the SVM posterior", conv, run_svm_convergence},
      {"svm-bias", "coupling bounds on the W2 bias of the Laplace approximation", bias, run_svm_bias},
      {"svm-threshold-sweep", "two-scale meeting times across thresholds", sweep, run_svm_threshold_sweep},
  };
}

}  // namespace mcmccoup::exp
