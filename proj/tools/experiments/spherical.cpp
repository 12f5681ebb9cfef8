#include <cmath>

#include "experiments.hpp"
#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/io.hpp"
#include "sim.hpp"

namespace mcmccoup::exp {

namespace {

const char* kStarts = "1,1,0;1,1,0.9;1.5,0.5,0;0.4,0.01,-0.5";
const char* kLs = "2.38,1.4142135623730951";

std::vector<Start> starts_of(const Config& c) {
  try {
    return parse_starts(c.str("starts"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'starts': ") + e.what());
  }
}

std::vector<LimitKind> limit_kinds(const Config& c, const std::string& key) {
  std::vector<LimitKind> out;
  for (const auto& s : c.strs(key)) {
    try {
      out.push_back(limit_kind_from_string(s));
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': unknown kind '" + s + "'");
    }
  }
  return out;
}

double positive(const Config& c, const std::string& key) {
  const double v = c.num(key);
  if (!(v > 0.0)) throw ConfigError("field '" + key + "': must be positive");
  return v;
}

std::string tag(const Start& s, double l, const std::string& kind) {
  return s.label + "_l" + format_double(l) + "_" + kind;
}

IntegrateOptions ode_options(const Config& c) {
  IntegrateOptions o;
  o.dt = positive(c, "dt");
  o.record_every = positive(c, "record_every");
  return o;
}

int run_ode_spherical(Context& ctx) {
  const auto& c = ctx.cfg();
  const auto starts = starts_of(c);
  const auto ls = c.nums("l");
  const auto kinds = limit_kinds(c, "kinds");
  const double t_end = positive(c, "t_end");
  const IntegrateOptions o = ode_options(c);
  for (const auto& s : starts)
    for (double l : ls)
      for (auto k : kinds) {
        const OdeState w0{s.x0, s.y0, s.rho0 * std::sqrt(s.x0 * s.y0)};
        write_trajectory_csv(ctx.file("ode_" + tag(s, l, to_string(k)) + ".csv"), integrate_w(w0, l, k, t_end, o));
      }
  ctx.log() << "ode-spherical: " << starts.size() * ls.size() * kinds.size() << " trajectories\n";
  return kExitOk;
}

int run_mcmc_vs_ode(Context& ctx) {
  const auto& c = ctx.cfg();
  const long d = c.integer("d");
  if (d < 2) throw ConfigError("field 'd': must be >= 2");
  const auto starts = starts_of(c);
  const auto ls = c.nums("l");
  const auto kinds = limit_kinds(c, "kinds");
  for (auto k : kinds)
    if (k == LimitKind::optimal) throw ConfigError("field 'kinds': optimal has no MCMC implementation");
  const double t_end = positive(c, "t_end");
  const IntegrateOptions o = ode_options(c);
  const long every = std::max(1L, std::lround(o.record_every * d));
  const long n_iter = std::lround(t_end * d);
  const std::string mode = c.str("start_mode");
  if (mode != "exact" && mode != "gaussian") throw ConfigError("field 'start_mode': exact or gaussian");
  const bool exact = mode == "exact";

  struct Job {
    Start s;
    double l;
    LimitKind k;
    std::vector<OdeSample> mcmc, ode;
  };
  std::vector<Job> jobs;
  for (const auto& s : starts)
    for (double l : ls)
      for (auto k : kinds) jobs.push_back({s, l, k, {}, {}});
  const auto target = TargetModel::spherical(static_cast<int>(d));
  parallel_for(static_cast<int>(jobs.size()), ctx.threads(), [&](int i) {
    Job& j = jobs[i];
    RngStream rng(ctx.seed(), static_cast<std::uint64_t>(i));
    Eigen::VectorXd X(d), Y(d);
    spherical_start(j.s, rng, X, Y, exact);
    const CouplingSpec spec{j.k == LimitKind::crn ? CouplingKind::crn
                            : j.k == LimitKind::reflection ? CouplingKind::reflection
                                                           : CouplingKind::gcrn, 0.0};
    j.mcmc = coupled_rwm_trace(target, X, Y, spec, j.l / std::sqrt(double(d)), n_iter, every, double(d), rng);
    const OdeState w0{j.s.x0, j.s.y0, j.s.rho0 * std::sqrt(j.s.x0 * j.s.y0)};
    j.ode = integrate_w(w0, j.l, j.k, t_end, o);
  });
  CsvWriter gaps(ctx.file("gaps.csv"), {"start", "x0", "y0", "rho0", "l", "kind", "sup_gap"});
  double worst = 0.0;
  for (const auto& j : jobs) {
    const std::string t = tag(j.s, j.l, to_string(j.k));
    write_trajectory_csv(ctx.file("mcmc_" + t + ".csv"), j.mcmc);
    write_trajectory_csv(ctx.file("ode_" + t + ".csv"), j.ode);
    const double g = sup_gap(j.mcmc, j.ode);
    worst = std::max(worst, g);
    gaps.cell(j.s.label).cell(j.s.x0).cell(j.s.y0).cell(j.s.rho0).cell(j.l).cell(to_string(j.k)).cell(g);
    gaps.end_row();
  }
  gaps.close();
  ctx.log() << "mcmc-vs-ode: d=" << d << ", " << jobs.size() << " runs, worst sup gap " << worst << "\n";
  return kExitOk;
}

int run_asymptote_spherical(Context& ctx) {
  const auto& c = ctx.cfg();
  const double lo = positive(c, "l_min"), hi = positive(c, "l_max");
  const long n = c.integer("n_l");
  if (n < 2 || hi <= lo) throw ConfigError("field 'n_l': need n_l >= 2 and l_max > l_min");
  std::vector<double> grid;
  for (long i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  std::vector<FixedPointResult> rows;
  for (auto k : limit_kinds(c, "kinds")) {
    if (k == LimitKind::optimal) throw ConfigError("field 'kinds': optimal has no fixed-point equation");
    for (const auto& r : sweep_asymptotes(k, grid, {1.0})) rows.push_back(r);
  }
  write_fixed_points_csv(ctx.file("fixed_points.csv"), rows);
  CsvWriter e(ctx.file("esjd.csv"), {"l", "esjd"});
  for (double l : grid) {
    e.cell(l).cell(esjd_limit(l));
    e.end_row();
  }
  e.close();
  ctx.log() << "asymptote-spherical: " << rows.size() << " fixed points\n";
  return kExitOk;
}

}  // namespace

std::vector<Experiment> spherical_experiments() {
  const std::vector<Param> ode{
      {"starts", kStarts, kStarts, "semicolon separated x0,y0,rho0 triplets"},
      {"l", kLs, kLs, "step parameters, h = l / sqrt(d)"},
      {"kinds", "crn,reflection,gcrn,optimal", "crn,reflection,gcrn,optimal", "limit kinds"},
      {"t_end", "10", "10", "ODE horizon in units of d iterations"},
      {"dt", "0.001", "0.001", "RK4 step"},
      {"record_every", "0.01", "0.01", "output spacing"},
  };
  const std::vector<Param> mcmc{
      {"d", "200", "1000", "dimension"},
      {"starts", kStarts, kStarts, "semicolon separated x0,y0,rho0 triplets"},
      {"l", kLs, kLs, "step parameters, h = l / sqrt(d)"},
      {"kinds", "crn,reflection,gcrn", "crn,reflection,gcrn", "couplings"},
      {"t_end", "5", "5", "horizon in units of d iterations"},
      {"dt", "0.001", "0.001", "RK4 step"},
      {"record_every", "0.01", "0.01", "output spacing in units of d iterations"},
      {"start_mode", "exact", "exact", "exact: initial (x, y, v) hit exactly; gaussian: plain Gaussian draws"},
  };
  const std::vector<Param> asym{
      {"l_min", "0.05", "0.01", "smallest l"},
      {"l_max", "6", "10", "largest l"},
      {"n_l", "120", "500", "grid size"},
      {"kinds", "crn,reflection,gcrn", "crn,reflection,gcrn", "couplings"},
  };
  return {
      {"ode-spherical", "ODE trajectories of (x, y, v) for the spherical target", ode, run_ode_spherical},
      {"mcmc-vs-ode", "coupled RWM traces on N(0, I_d) against their ODE limits", mcmc, run_mcmc_vs_ode},
      {"asymptote-spherical", "fixed points of the scaled squared distance against l", asym, run_asymptote_spherical},
  };
}

}  // namespace mcmccoup::exp
