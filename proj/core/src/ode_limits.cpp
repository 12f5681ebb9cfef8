#include "mcmccoup/ode_limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcmccoup/special.hpp"

namespace mcmccoup {

std::string to_string(LimitKind k) {
  switch (k) {
    case LimitKind::crn: return "crn";
    case LimitKind::reflection: return "reflection";
    case LimitKind::gcrn: return "gcrn";
    case LimitKind::optimal: return "optimal";
  }
  return "?";
}

LimitKind limit_kind_from_string(const std::string& s) {
  for (LimitKind k : {LimitKind::crn, LimitKind::reflection, LimitKind::gcrn, LimitKind::optimal})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown limit kind '" + s + "'");
}

double accept_exp_term(double x, double l) {
  const double sx = std::sqrt(x);
  return exp_times_cdf(0.5 * l * l * (x - 1.0), l / (2.0 * sx) - l * sx);
}

double drift_a(double x, double l) {
  if (!(x > 0.0)) throw DomainError("drift_a: x must be positive");
  if (!(l > 0.0)) throw DomainError("drift_a: l must be positive");
  return (1.0 - 2.0 * x) * accept_exp_term(x, l) + std_normal_cdf(-l / (2.0 * std::sqrt(x)));
}

double rho_limit(LimitKind kind, const OdeState& w) {
  if (kind == LimitKind::gcrn || kind == LimitKind::optimal) return 1.0;
  if (w.x <= 0.0 || w.y <= 0.0) return 1.0;
  const double sxy = std::sqrt(w.x * w.y);
  if (kind == LimitKind::crn) return std::clamp(w.v / sxy, -1.0, 1.0);
  const double s = w.x + w.y - 2.0 * w.v;
  if (w.x == w.y || s <= 0.0) return 1.0;
  return std::clamp((2.0 * w.x * w.y - (w.x + w.y) * w.v) / (sxy * s), -1.0, 1.0);
}

namespace {
constexpr double kRhoEdge = 1e-12;

double h_term(double x, double y, double rho, double l) {
  const double b = -(std::sqrt(x / y) - rho) / std::sqrt((1.0 - rho) * (1.0 + rho));
  const double a = b * l * std::sqrt(x);
  const double nb = std::sqrt(1.0 + b * b);
  const double U = l / (2.0 * std::sqrt(x)) - l * std::sqrt(x);
  const double p = bvn_low(a / nb, U, -b / nb);
  const double c = 0.5 * l * l * (x - 1.0);
  if (p == 0.0) return 0.0;
  return c < 700.0 ? std::exp(c) * p : std::exp(c + std::log(p));
}
}  // namespace

double g_value(double x, double y, double rho, double l) {
  if (!(x > 0.0 && y > 0.0 && l > 0.0)) throw DomainError("g_value: x, y, l must be positive");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("g_value: rho outside [-1, 1]");
  if (rho > 1.0 - kRhoEdge) return gaussian_integrals(std::sqrt(x), std::sqrt(y), l).second;
  if (rho < -1.0 + kRhoEdge) {
    const double l2 = l * l;
    return exp_times_cdf(0.5 * l2 * (x - 1.0), -l * std::sqrt(x)) +
           exp_times_cdf(0.5 * l2 * (y - 1.0), -l * std::sqrt(y));
  }
  const double up = bvn_up(l / (2.0 * std::sqrt(x)), l / (2.0 * std::sqrt(y)), rho);
  return up + h_term(x, y, rho, l) + h_term(y, x, rho, l);
}

double g_opt(double x, double y, double l) {
  auto p = [l](double u) { return std_normal_cdf(-l / (2.0 * std::sqrt(u))) + accept_exp_term(u, l); };
  return std::min(p(x), p(y));
}

OdeState drift_c(const OdeState& w, double l, LimitKind kind) {
  if (!(w.x > 0.0 && w.y > 0.0)) throw DomainError("drift_c: x and y must be positive");
  const double l2 = l * l;
  const double ex = accept_exp_term(w.x, l), ey = accept_exp_term(w.y, l);
  const double g = kind == LimitKind::optimal ? g_opt(w.x, w.y, l)
                                              : g_value(w.x, w.y, rho_limit(kind, w), l);
  return {l2 * drift_a(w.x, l), l2 * drift_a(w.y, l), l2 * (g - w.v * (ex + ey))};
}

namespace {

template <class State, class Drift, class Clip, class Emit>
void rk4(State w, double t_end, double dt, double record_every, Drift f, Clip clip, Emit emit) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("integrate: t_end must be non-negative");
  const long n = static_cast<long>(std::llround(t_end / dt));
  const long every = std::max(1L, static_cast<long>(std::llround(record_every / dt)));
  emit(0.0, w);
  for (long i = 1; i <= n; ++i) {
    const State k1 = f(w);
    const State k2 = f(w + (0.5 * dt) * k1);
    const State k3 = f(w + (0.5 * dt) * k2);
    const State k4 = f(w + dt * k3);
    w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    clip(w);
    if (i % every == 0 || i == n) emit(i * dt, w);
  }
}

struct V3 {
  double a, b, c;
};
V3 operator+(V3 p, V3 q) { return {p.a + q.a, p.b + q.b, p.c + q.c}; }
V3 operator*(double s, V3 p) { return {s * p.a, s * p.b, s * p.c}; }

struct W6 {
  double p[6];
  BlockState block() const { return {{p[0], p[1], p[2]}, {p[3], p[4], p[5]}}; }
};
W6 operator+(const W6& a, const W6& b) {
  W6 r;
  for (int i = 0; i < 6; ++i) r.p[i] = a.p[i] + b.p[i];
  return r;
}
W6 operator*(double s, const W6& a) {
  W6 r;
  for (int i = 0; i < 6; ++i) r.p[i] = s * a.p[i];
  return r;
}

void clip_triplet(OdeState& w, double tol) {
  const double bound = std::sqrt(std::max(0.0, w.x) * std::max(0.0, w.y));
  const double excess = std::fabs(w.v) - bound;
  if (excess > tol)
    throw std::runtime_error("ODE trajectory left the state space (|v| exceeds sqrt(xy) by " +
                             std::to_string(excess) + ")");
  if (excess > 0.0) w.v = std::copysign(bound, w.v);
}

void check_start(const OdeState& w0) {
  if (!(w0.x > 0.0 && w0.y > 0.0)) throw DomainError("ODE start: x and y must be positive");
  if (std::fabs(w0.v) > std::sqrt(w0.x * w0.y) + 1e-12)
    throw DomainError("ODE start: |v| must not exceed sqrt(xy)");
}

}  // namespace

std::vector<OdeSample> integrate_w(const OdeState& w0, double l, LimitKind kind, double t_end,
                                   const IntegrateOptions& opts) {
  check_start(w0);
  std::vector<OdeSample> out;
  auto f = [&](V3 s) {
    const OdeState d = drift_c({s.a, s.b, s.c}, l, kind);
    return V3{d.x, d.y, d.v};
  };
  auto clip = [&](V3& s) {
    OdeState w{s.a, s.b, s.c};
    clip_triplet(w, opts.violation_tol);
    s.c = w.v;
  };
  auto emit = [&](double t, const V3& s) { out.push_back({t, {s.a, s.b, s.c}}); };
  rk4(V3{w0.x, w0.y, w0.v}, t_end, opts.dt, opts.record_every, f, clip, emit);
  return out;
}

std::vector<OdeSample> integrate_sd(const OdeState& w0, double l, LimitKind kind, double t_end,
                                    const IntegrateOptions& opts) {
  check_start(w0);
  std::vector<OdeSample> out;
  auto f = [&](V3 s) {
    const OdeState d = drift_c({s.a, s.b, 0.5 * (s.a + s.b - s.c)}, l, kind);
    return V3{d.x, d.y, d.x + d.y - 2.0 * d.v};
  };
  auto clip = [&](V3& s) {
    OdeState w{s.a, s.b, 0.5 * (s.a + s.b - s.c)};
    clip_triplet(w, opts.violation_tol);
    s.c = s.a + s.b - 2.0 * w.v;
  };
  auto emit = [&](double t, const V3& s) {
    out.push_back({t, {s.a, s.b, 0.5 * (s.a + s.b - s.c)}});
  };
  rk4(V3{w0.x, w0.y, w0.s()}, t_end, opts.dt, opts.record_every, f, clip, emit);
  return out;
}

EllipticalDrift elliptical_infinitesimal(double x_k, double y_k, double v_k, double x1, double y1,
                                         double rho, double l1) {
  if (!(x1 > 0.0 && y1 > 0.0)) throw DomainError("elliptical_infinitesimal: x1, y1 must be positive");
  const double ex = accept_exp_term(x1, l1), ey = accept_exp_term(y1, l1);
  const double px = std_normal_cdf(-l1 / (2.0 * std::sqrt(x1)));
  const double py = std_normal_cdf(-l1 / (2.0 * std::sqrt(y1)));
  return {(1.0 - 2.0 * x_k) * ex + px, (1.0 - 2.0 * y_k) * ey + py,
          g_value(x1, y1, rho, l1) - v_k * (ex + ey)};
}

namespace {

struct Norms {
  double x0, y0, v0;  // Omega-weighted, normalised by z_0^2 = 1
  double x1, y1, v1;  // Omega^2-weighted, normalised by z_1^2
};

Norms block_norms(const BlockState& w, double s2) {
  const double z1sq = 0.5 * (1.0 + 1.0 / s2);
  Norms n;
  n.x0 = 0.5 * (w.odd.x + w.even.x);
  n.y0 = 0.5 * (w.odd.y + w.even.y);
  n.v0 = 0.5 * (w.odd.v + w.even.v);
  n.x1 = 0.5 * (w.odd.x + w.even.x / s2) / z1sq;
  n.y1 = 0.5 * (w.odd.y + w.even.y / s2) / z1sq;
  n.v1 = 0.5 * (w.odd.v + w.even.v / s2) / z1sq;
  return n;
}

}  // namespace

double block_scaled_sq_dist(const BlockState& w, double s2) {
  return (w.odd.s() + s2 * w.even.s()) / (1.0 + s2);
}

double block_rho(LimitKind kind, const BlockState& w, double s2) {
  if (kind == LimitKind::gcrn || kind == LimitKind::optimal) return 1.0;
  const Norms n = block_norms(w, s2);
  if (n.x1 <= 0.0 || n.y1 <= 0.0) return 1.0;
  const double rc = n.v1 / std::sqrt(n.x1 * n.y1);
  if (kind == LimitKind::crn) return std::clamp(rc, -1.0, 1.0);
  const double dist = w.odd.s() + s2 * w.even.s();
  if (dist <= 0.0) return 1.0;
  const double px = w.odd.x + w.even.x - w.odd.v - w.even.v;
  const double py = w.odd.y + w.even.y - w.odd.v - w.even.v;
  const double nx = std::sqrt((w.odd.x + w.even.x / s2) * (w.odd.y + w.even.y / s2));
  return std::clamp(rc + 2.0 * px * py / (nx * dist), -1.0, 1.0);
}

// Drifts of the Omega^0 and Omega^1 weighted triplets from the elliptical
// infinitesimals at two levels, mapped back to the odd/even blocks.
BlockState block_drift(const BlockState& w, double s2, double l, LimitKind kind) {
  if (s2 == 1.0) throw DomainError("block_drift: block map is singular at sigma2 = 1");
  const double z1sq = 0.5 * (1.0 + 1.0 / s2);
  const double l1 = l * std::sqrt(z1sq);
  const Norms n = block_norms(w, s2);
  const double rho = block_rho(kind, w, s2);
  // level k = 0 tracks |X|^2/d (weight l_0^2 = l^2), level k = 1 tracks |X|_Omega^2/d (weight l_1^2)
  EllipticalDrift e0 = elliptical_infinitesimal(n.x0, n.y0, n.v0, n.x1, n.y1, rho, l1);
  EllipticalDrift e1 = elliptical_infinitesimal(n.x1, n.y1, n.v1, n.x1, n.y1, rho, l1);
  if (kind == LimitKind::optimal) {
    const double gap = g_opt(n.x1, n.y1, l1) - g_value(n.x1, n.y1, 1.0, l1);
    e0.bv += gap;
    e1.bv += gap;
  }
  const double l2 = l * l;
  const double l1sq = l1 * l1;
  // A = (P + s2 Q)/2 = |X|^2/d and B = (P + Q)/2 = |X|^2_Omega/d
  auto unmix = [&](double dA, double dB) {
    const double dq = 2.0 * (dA - dB) / (s2 - 1.0);
    return std::pair<double, double>{2.0 * dB - dq, dq};
  };
  const auto [dPx, dQx] = unmix(l2 * e0.ax, l1sq * e1.ax);
  const auto [dPy, dQy] = unmix(l2 * e0.ay, l1sq * e1.ay);
  const auto [dVo, dVe] = unmix(l2 * e0.bv, l1sq * e1.bv);
  return {{dPx, dPy, dVo}, {dQx, dQy, dVe}};
}

std::vector<BlockSample> two_eigenvalue_ode(double s2, const BlockState& w0, double l,
                                            LimitKind kind, double t_end,
                                            const IntegrateOptions& opts) {
  if (!(s2 > 0.0)) throw DomainError("two_eigenvalue_ode: sigma2 must be positive");
  std::vector<BlockSample> out;
  if (s2 == 1.0) {
    // spherical: both blocks follow the same three-dimensional ODE
    const OdeState merged{0.5 * (w0.odd.x + w0.even.x), 0.5 * (w0.odd.y + w0.even.y),
                          0.5 * (w0.odd.v + w0.even.v)};
    for (const auto& s : integrate_w(merged, l, kind, t_end, opts))
      out.push_back({s.t, {s.w, s.w}, s.w.s()});
    return out;
  }
  check_start(w0.odd);
  check_start(w0.even);
  auto f = [&](const W6& s) {
    const BlockState d = block_drift(s.block(), s2, l, kind);
    return W6{{d.odd.x, d.odd.y, d.odd.v, d.even.x, d.even.y, d.even.v}};
  };
  auto clip = [&](W6& s) {
    for (int b = 0; b < 2; ++b) {
      OdeState w{s.p[3 * b], s.p[3 * b + 1], s.p[3 * b + 2]};
      clip_triplet(w, opts.violation_tol);
      s.p[3 * b + 2] = w.v;
    }
  };
  auto emit = [&](double t, const W6& s) {
    const BlockState b = s.block();
    out.push_back({t, b, block_scaled_sq_dist(b, s2)});
  };
  rk4(W6{{w0.odd.x, w0.odd.y, w0.odd.v, w0.even.x, w0.even.y, w0.even.v}}, t_end, opts.dt,
      opts.record_every, f, clip, emit);
  return out;
}

}  // namespace mcmccoup
