#include <cmath>

#include "experiments.hpp"
#include "mcmccoup/io.hpp"
#include "sim.hpp"

namespace mcmccoup::exp {

namespace {

long positive_int(const Config& c, const std::string& key) {
  const long v = c.integer(key);
  if (v < 1) throw ConfigError("field '" + key + "': must be >= 1");
  return v;
}

struct Common {
  SvmSetup s;
  HugParams hug;
  HopParams hop;
};

Common common(Context& ctx) {
  const auto& c = ctx.cfg();
  SvmParams p{c.num("beta"), c.num("phi"), c.num("sigma")};
  if (!(p.beta > 0 && std::fabs(p.phi) < 1 && p.sigma > 0))
    throw ConfigError("field 'phi': need beta > 0, |phi| < 1, sigma > 0");
  HugParams hug{c.num("hug_T"), static_cast<int>(positive_int(c, "hug_B"))};
  HopParams hop{c.num("lambda"), c.num("mu")};
  try {
    validate(hug);
    validate(hop);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'hug_T': ") + e.what());
  }
  SvmSetup s = svm_setup(static_cast<int>(positive_int(c, "T")), p, c.u64("data_seed"), c.str("data"));
  write_svm_data_csv(ctx.file("svm_data.csv"), s.y);
  return {std::move(s), hug, hop};
}

double mean_offset(const std::vector<MeetingRecord>& rs) {
  double m = 0.0;
  int n = 0;
  for (const auto& r : rs)
    if (!r.capped) m += static_cast<double>(r.tau - r.L), ++n;
  return n ? m / n : std::nan("");
}

void write_records(CsvWriter& w, const std::string& label, const std::vector<MeetingRecord>& rs) {
  for (const auto& r : rs) {
    w.cell(label).cell(r.replicate).cell(r.tau).cell(r.L).cell(r.capped ? 1 : 0);
    w.end_row();
  }
}

int run_hug_hop_convergence(Context& ctx) {
  const auto& c = ctx.cfg();
  const Common k = common(ctx);
  const double delta_hop = c.num("delta_hop"), delta_rwm = c.num("delta_rwm");
  if (!(delta_hop > 0 && delta_rwm > 0)) throw ConfigError("field 'delta_hop': thresholds must be positive");
  ReplicateOptions o;
  o.L = positive_int(c, "L");
  o.R = static_cast<int>(positive_int(c, "R"));
  o.max_iter = positive_int(c, "max_iter");
  o.seed = ctx.seed();
  o.threads = ctx.threads();
  if (o.max_iter <= o.L) throw ConfigError("field 'max_iter': must exceed L");

  const auto hh = run_replicates(svm_hug_hop_runner(k.s, k.hug, k.hop, delta_hop), o);
  ReplicateOptions orwm = o;
  orwm.max_iter = positive_int(c, "rwm_max_iter");
  orwm.thin = orwm.max_iter;
  const auto rwm = run_replicates(svm_rwm_runner(k.s, {CouplingKind::two_scale, delta_rwm}), orwm);

  CsvWriter meet(ctx.file("meetings.csv"), {"method", "replicate", "tau", "L", "capped"});
  write_records(meet, "hug-hop", hh.records);
  write_records(meet, "rwm-two-scale", rwm.records);
  meet.close();
  CsvWriter sum(ctx.file("summary.csv"), {"method", "n_replicates", "n_capped", "mean_meeting_offset"});
  sum.cell("hug-hop").cell(o.R).cell(hh.n_capped()).cell(mean_offset(hh.records));
  sum.end_row();
  sum.cell("rwm-two-scale").cell(o.R).cell(rwm.n_capped()).cell(mean_offset(rwm.records));
  sum.end_row();
  sum.close();
  std::vector<BoundCurve> curves;
  if (hh.n_capped() < o.R) {
    long last = 0;
    for (const auto& r : hh.records)
      if (!r.capped) last = std::max(last, r.tau - r.L);
    const auto grid = linear_grid(0, last + 1, static_cast<int>(positive_int(c, "grid_points")));
    curves.push_back(tv_bound_curve(hh.records, grid));
    curves.push_back(w2_bound_curve(hh.records, hh.traces, grid, o.L));
  }
  write_bound_curves_csv(ctx.file("bounds.csv"), curves);
  ctx.log() << "hug-hop: mean offset " << mean_offset(hh.records) << " (capped " << hh.n_capped()
            << "), rwm two-scale: " << mean_offset(rwm.records) << " (capped " << rwm.n_capped() << ")\n";
  return kExitOk;
}

int run_hop_threshold_sweep(Context& ctx) {
  const auto& c = ctx.cfg();
  const Common k = common(ctx);
  ReplicateOptions o;
  o.L = 1;
  o.R = static_cast<int>(positive_int(c, "R"));
  o.max_iter = positive_int(c, "max_iter");
  o.thin = o.max_iter;
  o.seed = ctx.seed();
  o.threads = ctx.threads();
  CsvWriter meet(ctx.file("meetings.csv"), {"delta_hop", "replicate", "tau", "L", "capped"});
  CsvWriter sum(ctx.file("summary.csv"), {"delta_hop", "n_capped", "mean_tau"});
  for (double delta : c.nums("deltas")) {
    if (!(delta > 0)) throw ConfigError("field 'deltas': thresholds must be positive");
    const auto res = run_replicates(svm_hug_hop_runner(k.s, k.hug, k.hop, delta), o);
    write_records(meet, format_double(delta), res.records);
    sum.cell(delta).cell(res.n_capped()).cell(mean_offset(res.records) + 1.0);
    sum.end_row();
    ctx.log() << "  delta_hop " << delta << ": mean tau " << mean_offset(res.records) + 1.0 << ", capped "
              << res.n_capped() << "\n";
  }
  meet.close();
  sum.close();
  return kExitOk;
}

std::vector<Param> hh_params() {
  return {
      {"T", "50", "360", "number of observations when data are simulated"},
      {"data", "", "", "CSV with columns t,Y_t; empty means simulate"},
      {"data_seed", "1", "1", "seed of the simulated data set"},
      {"beta", "0.65", "0.65", "model beta"},
      {"phi", "0.98", "0.98", "model phi"},
      {"sigma", "0.15", "0.15", "model sigma"},
      {"hug_T", "0.5", "0.5", "Hug integration time"},
      {"hug_B", "10", "10", "Hug bounces"},
      {"lambda", "20", "20", "Hop scale along the gradient"},
      {"mu", "1", "1", "Hop scale orthogonal to the gradient"},
  };
}

}  // namespace

std::vector<Experiment> hug_hop_experiments() {
  auto conv = hh_params();
  for (Param p : std::vector<Param>{
           {"delta_hop", "0.0001", "0.0001", "Hop two-scale threshold"},
           {"delta_rwm", "0.1", "0.1", "threshold of the RWM comparison"},
           {"L", "1000", "6000", "lag"},
           {"R", "20", "100", "replicates"},
           {"max_iter", "100000", "1000000", "iteration cap for Hug and Hop"},
           {"rwm_max_iter", "1000000", "20000000", "iteration cap for the RWM comparison"},
           {"grid_points", "60", "200", "points on the bound-curve t grid"},
       })
    conv.push_back(p);
  auto sweep = hh_params();
  for (Param p : std::vector<Param>{
           {"deltas", "0.000001,0.00001,0.0001,0.001,0.01", "0.0000001,0.000001,0.00001,0.0001,0.001,0.01,0.1", "Hop thresholds"},
           {"R", "20", "100", "replicates"},
           {"max_iter", "100000", "1000000", "iteration cap"},
       })
    sweep.push_back(p);
  return {
      {"hug-hop-convergence", "coupled Hug and Hop on the SVM posterior against two-scale RWM", conv, run_hug_hop_convergence},
      {"hop-threshold-sweep", "Hug and Hop meeting times across Hop thresholds", sweep, run_hop_threshold_sweep},
  };
}

}  // namespace mcmccoup::exp
