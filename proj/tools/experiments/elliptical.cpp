#include <cmath>

#include "experiments.hpp"
#include "mcmccoup/fixed_points.hpp"
#include "mcmccoup/io.hpp"
#include "sim.hpp"

namespace mcmccoup::exp {

namespace {

CouplingKind rwm_kind(const std::string& s, const std::string& key) {
  CouplingKind k;
  try {
    k = coupling_kind_from_string(s);
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': unknown coupling '" + s + "'");
  }
  if (k != CouplingKind::crn && k != CouplingKind::reflection && k != CouplingKind::gcrn)
    throw ConfigError("field '" + key + "': only crn, reflection and gcrn have asymptotes");
  return k;
}

LimitKind as_limit(CouplingKind k) {
  return k == CouplingKind::crn ? LimitKind::crn : k == CouplingKind::reflection ? LimitKind::reflection : LimitKind::gcrn;
}

int run_asymptote_elliptical(Context& ctx) {
  const auto& c = ctx.cfg();
  const double lo = c.num("l1_min"), hi = c.num("l1_max");
  const long n = c.integer("n_l1");
  if (!(lo > 0) || n < 2 || hi <= lo) throw ConfigError("field 'n_l1': need 0 < l1_min < l1_max and n_l1 >= 2");
  const auto eps = c.nums("eps");
  for (double e : eps)
    if (!(e >= 1.0)) throw ConfigError("field 'eps': ellipticities must be >= 1");
  std::vector<double> grid;
  for (long i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  std::vector<FixedPointResult> rows;
  for (const auto& k : c.strs("kinds"))
    for (const auto& r : sweep_asymptotes(as_limit(rwm_kind(k, "kinds")), grid, eps)) rows.push_back(r);
  write_fixed_points_csv(ctx.file("fixed_points.csv"), rows);
  // ESJD in the natural parameter, for context
  CsvWriter e(ctx.file("esjd.csv"), {"l1", "esjd"});
  for (double l : grid) {
    e.cell(l).cell(esjd_limit(l));
    e.end_row();
  }
  e.close();
  ctx.log() << "asymptote-elliptical: " << rows.size() << " fixed points\n";
  return kExitOk;
}

struct Plateau {
  double mean;
  double se;
};

// mean of s over the trailing fraction, SE from 20 batch means
Plateau plateau_of(const std::vector<OdeSample>& tr, double frac) {
  const std::size_t first = static_cast<std::size_t>(std::floor((1.0 - frac) * static_cast<double>(tr.size() - 1)));
  const std::size_t n = tr.size() - first;
  const std::size_t nb = std::min<std::size_t>(20, n);
  std::vector<double> b(nb, 0.0);
  std::vector<std::size_t> cnt(nb, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i * nb / n;
    b[k] += tr[first + i].w.s();
    ++cnt[k];
  }
  double m = 0.0;
  for (std::size_t k = 0; k < nb; ++k) m += (b[k] /= static_cast<double>(cnt[k]));
  m /= static_cast<double>(nb);
  double ss = 0.0;
  for (double x : b) ss += (x - m) * (x - m);
  return {m, nb > 1 ? std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb)) : 0.0};
}

int run_mcmc_elliptical(Context& ctx) {
  const auto& c = ctx.cfg();
  const long d = c.integer("d");
  if (d < 4 || d % 2) throw ConfigError("field 'd': must be even and >= 4");
  const auto names = c.strs("targets");
  const auto l1s = c.nums("l1");
  std::vector<CouplingKind> kinds;
  for (const auto& k : c.strs("kinds")) kinds.push_back(rwm_kind(k, "kinds"));
  const double t_end = c.num("t_end"), rec = c.num("record_every"), frac = c.num("plateau_fraction");
  if (!(t_end > 0 && rec > 0 && frac > 0 && frac <= 1))
    throw ConfigError("field 't_end': need t_end, record_every > 0 and 0 < plateau_fraction <= 1");

  std::vector<EllipticalCase> cases;
  for (std::size_t i = 0; i < names.size(); ++i) {
    RngStream rng(ctx.seed(), 1000000 + i);
    try {
      cases.push_back(make_elliptical(names[i], static_cast<int>(d), rng));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field 'targets': ") + e.what());
    }
  }
  struct Job {
    std::size_t target;
    double l1;
    CouplingKind k;
    std::vector<OdeSample> trace;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < cases.size(); ++t)
    for (double l1 : l1s)
      for (auto k : kinds) jobs.push_back({t, l1, k, {}});
  const long n_iter = std::lround(t_end * d), every = std::max(1L, std::lround(rec * d));
  parallel_for(static_cast<int>(jobs.size()), ctx.threads(), [&](int i) {
    Job& j = jobs[i];
    const EllipticalCase& ec = cases[j.target];
    RngStream rng(ctx.seed(), static_cast<std::uint64_t>(i));
    Eigen::VectorXd X(d), Y(d);
    ec.target.sample_stationary(rng, X);
    ec.target.sample_stationary(rng, Y);
    const double norm = ec.spectrum.z(-1) * static_cast<double>(d);
    j.trace = coupled_rwm_trace(ec.target, X, Y, {j.k, 0.0}, elliptical_h(ec, j.l1), n_iter, every, norm, rng);
  });
  CsvWriter a(ctx.file("asymptotes.csv"),
              {"target", "eps", "l1", "kind", "predicted", "plateau", "plateau_se"});
  for (const auto& j : jobs) {
    const EllipticalCase& ec = cases[j.target];
    const std::string t = ec.name + "_l" + format_double(j.l1) + "_" + to_string(j.k);
    write_trajectory_csv(ctx.file("mcmc_" + t + ".csv"), j.trace);
    const double eps = ec.spectrum.ellipticity;
    const double pred = solve_fixed_point(as_limit(j.k), j.l1, eps).s_inf;
    const Plateau p = plateau_of(j.trace, frac);
    a.cell(ec.name).cell(eps).cell(j.l1).cell(to_string(j.k)).cell(pred).cell(p.mean).cell(p.se);
    a.end_row();
    ctx.log() << "  " << t << ": plateau " << p.mean << " predicted " << pred << "\n";
  }
  a.close();
  return kExitOk;
}

}  // namespace

std::vector<Experiment> elliptical_experiments() {
  const std::vector<Param> asym{
      {"l1_min", "0.5", "0.05", "smallest l1"},
      {"l1_max", "5", "10", "largest l1"},
      {"n_l1", "46", "400", "grid size"},
      {"eps", "1,1.6666666666666667,3,6.510416666666667,9.6,20,50", "1,1.1,1.25,1.6666666666666667,2,3,5,6.510416666666667,9.6,20,50,100",
       "ellipticities"},
      {"kinds", "crn,reflection,gcrn", "crn,reflection,gcrn", "couplings"},
  };
  const std::vector<Param> mcmc{
      {"d", "500", "2000", "dimension"},
      {"targets", "ar1,chi2,two-eigen", "ar1,chi2,two-eigen", "covariances: ar1 (r = 0.5), chi2 (3 dof variances), two-eigen (1, 24)"},
      {"l1", "2.38,1.4142135623730951", "2.38,1.4142135623730951", "natural step parameters"},
      {"kinds", "crn,reflection,gcrn", "crn,reflection,gcrn", "couplings"},
      {"t_end", "200", "200", "horizon in units of d iterations"},
      {"record_every", "0.1", "0.05", "output spacing in units of d iterations"},
      {"plateau_fraction", "0.5", "0.5", "trailing fraction of the trace averaged for the plateau"},
  };
  return {
      {"asymptote-elliptical", "fixed points over a (l1, eps) grid", asym, run_asymptote_elliptical},
      {"mcmc-elliptical", "coupled RWM on elliptical Gaussians against predicted plateaus", mcmc, run_mcmc_elliptical},
  };
}

}  // namespace mcmccoup::exp
