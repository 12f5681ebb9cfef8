#include "mcmccoup/couplings.hpp"

#include <cmath>
#include <stdexcept>

namespace mcmccoup {

std::string to_string(CouplingKind k) {
  switch (k) {
    case CouplingKind::crn: return "crn";
    case CouplingKind::reflection: return "reflection";
    case CouplingKind::gcrn: return "gcrn";
    case CouplingKind::gcrn_rotation: return "gcrn-rotation";
    case CouplingKind::gcrn_reflect: return "gcrn-reflect";
    case CouplingKind::reflection_maximal: return "reflection-maximal";
    case CouplingKind::two_scale: return "two-scale";
    case CouplingKind::maximal_independent: return "maximal-independent";
  }
  return "?";
}

CouplingKind coupling_kind_from_string(const std::string& s) {
  for (CouplingKind k : {CouplingKind::crn, CouplingKind::reflection, CouplingKind::gcrn,
                         CouplingKind::gcrn_rotation, CouplingKind::gcrn_reflect,
                         CouplingKind::reflection_maximal, CouplingKind::two_scale,
                         CouplingKind::maximal_independent})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown coupling kind '" + s + "'");
}

void validate(const CouplingSpec& spec) {
  if (spec.kind == CouplingKind::two_scale && !(spec.delta >= 0.0))
    throw std::invalid_argument("two-scale coupling: delta must be non-negative");
}

namespace {

bool is_gcrn_kind(CouplingKind k) {
  return k == CouplingKind::gcrn || k == CouplingKind::gcrn_rotation ||
         k == CouplingKind::gcrn_reflect;
}

// z - 2 (u'z) u for unit u
Eigen::VectorXd reflect(const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
  return z - 2.0 * u.dot(z) * u;
}

Eigen::VectorXd rotate_onto(const Eigen::VectorXd& z, const Eigen::VectorXd& n_x,
                            const Eigen::VectorXd& n_y) {
  const double c = std::clamp(n_x.dot(n_y), -1.0, 1.0);
  Eigen::VectorXd w = n_y - c * n_x;
  const double wn = w.norm();
  if (wn < 1e-14) {
    if (c > 0.0) return z;
    // antipodal: the rotation plane is undefined, the reflection still maps n_x to n_y
    return reflect(z, n_x);
  }
  w /= wn;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double a = n_x.dot(z);
  const double b = w.dot(z);
  return z + (c * a - s * b - a) * n_x + (s * a + c * b - b) * w;
}

}  // namespace

IncrementPair couple_increments(CouplingKind kind, const Eigen::VectorXd& z, double z1,
                                const Eigen::VectorXd& n_x, const Eigen::VectorXd& n_y,
                                const Eigen::VectorXd& e) {
  switch (kind) {
    case CouplingKind::crn: return {z, z};
    case CouplingKind::reflection: return {z, reflect(z, e)};
    case CouplingKind::gcrn:
      return {z + (z1 - n_x.dot(z)) * n_x, z + (z1 - n_y.dot(z)) * n_y};
    case CouplingKind::gcrn_rotation: return {z, rotate_onto(z, n_x, n_y)};
    case CouplingKind::gcrn_reflect: {
      Eigen::VectorXd et = n_x - n_y;
      const double en = et.norm();
      if (en < 1e-14) return {z, z};
      et /= en;
      return {z, reflect(z, et)};
    }
    default: break;
  }
  throw std::invalid_argument("couple_increments: kind " + to_string(kind) +
                              " is not an increment map");
}

CoupledChainState make_coupled_state(const TargetModel& target_x, const TargetModel& target_y,
                                     Eigen::VectorXd x0, Eigen::VectorXd y0) {
  CoupledChainState s;
  s.x = make_point(target_x, std::move(x0));
  s.y = make_point(target_y, std::move(y0));
  s.met = false;
  s.t = 0;
  return s;
}

CoupledChainState make_coupled_state(const TargetModel& target, Eigen::VectorXd x0,
                                     Eigen::VectorXd y0) {
  CoupledChainState s = make_coupled_state(target, target, std::move(x0), std::move(y0));
  s.met = s.x.x == s.y.x;
  return s;
}

double grad_projection_correlation(CouplingKind kind, const CoupledChainState& state) {
  if (is_gcrn_kind(kind)) return 1.0;
  const double gx = state.x.grad.norm(), gy = state.y.grad.norm();
  if (!(gx > 0.0 && gy > 0.0)) throw std::domain_error("grad_projection_correlation: zero gradient");
  const Eigen::VectorXd n_x = state.x.grad / gx, n_y = state.y.grad / gy;
  const double c = n_x.dot(n_y);
  if (kind == CouplingKind::crn) return std::clamp(c, -1.0, 1.0);
  if (kind == CouplingKind::reflection) {
    const Eigen::VectorXd diff = state.X() - state.Y();
    const double dn = diff.norm();
    if (dn == 0.0) return 1.0;
    return std::clamp(c - 2.0 * n_x.dot(diff) * n_y.dot(diff) / (dn * dn), -1.0, 1.0);
  }
  throw std::invalid_argument("grad_projection_correlation: undefined for " + to_string(kind));
}

ProposalPair reflection_maximal_pair(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double h,
                                     RngStream& rng) {
  ProposalPair out;
  Eigen::VectorXd z(X.size());
  rng.fill_normal(z);
  const double logu = std::log(rng.uniform());
  out.xp = X + h * z;
  const Eigen::VectorXd delta = (X - Y) / h;
  const double dn2 = delta.squaredNorm();
  if (dn2 == 0.0 || logu <= -z.dot(delta) - 0.5 * dn2) {
    out.yp = out.xp;
    out.equal = true;
    return out;
  }
  out.yp = Y + h * (z - (2.0 * delta.dot(z) / dn2) * delta);
  return out;
}

ProposalPair maximal_independent_pair(const HopLaw& qx, const HopLaw& qy, RngStream& rng,
                                      long max_tries) {
  const Eigen::Index d = qx.center.size();
  Eigen::VectorXd z(d);
  rng.fill_normal(z);
  double z1 = rng.normal();
  ProposalPair out;
  out.xp = qx.draw(z, z1);
  if (std::log(rng.uniform()) + qx.log_density(out.xp) <= qy.log_density(out.xp)) {
    out.yp = out.xp;
    out.equal = true;
    return out;
  }
  for (long i = 0; i < max_tries; ++i) {
    rng.fill_normal(z);
    z1 = rng.normal();
    Eigen::VectorXd cand = qy.draw(z, z1);
    if (std::log(rng.uniform()) + qy.log_density(cand) > qx.log_density(cand)) {
      out.yp = std::move(cand);
      return out;
    }
  }
  throw RejectionCapError("maximal_independent_pair: rejection cap reached; proposal laws are numerically disjoint");
}

namespace {

void sync_met(CoupledChainState& s) {
  if (!s.met && s.x.x == s.y.x) s.met = true;
}

// both chains accept or reject a shared proposal point with the shared uniform
void accept_common(CoupledChainState& s, const ChainPoint& prop, double logu,
                   CoupledStepInfo& info) {
  info.accepted_x = logu <= prop.logpi - s.x.logpi;
  info.accepted_y = logu <= prop.logpi - s.y.logpi;
  if (info.accepted_x) s.x = prop;
  if (info.accepted_y) s.y = prop;
}

CoupledStepInfo single_rwm(CoupledChainState& s, double h, const TargetModel& target,
                           RngStream& rng) {
  CoupledStepInfo info;
  Eigen::VectorXd z(s.x.x.size());
  rng.fill_normal(z);
  const double u = rng.uniform();
  ChainPoint scratch;
  info.accepted_x = info.accepted_y = rwm_update(s.x, z, u, h, target, scratch);
  info.proposals_equal = true;
  if (info.accepted_x) s.y = s.x;
  ++s.t;
  return info;
}

CoupledStepInfo increment_step(CoupledChainState& s, CouplingKind kind, double h,
                               const TargetModel& tx, const TargetModel& ty, RngStream& rng) {
  CoupledStepInfo info;
  const Eigen::Index d = s.x.x.size();
  Eigen::VectorXd z(d);
  rng.fill_normal(z);
  double z1 = 0.0;
  if (kind == CouplingKind::gcrn) z1 = rng.normal();
  const double u = rng.uniform();

  Eigen::VectorXd n_x, n_y, e;
  if (is_gcrn_kind(kind)) {
    const double gx = s.x.grad.norm(), gy = s.y.grad.norm();
    if (gx > 0.0 && gy > 0.0) {
      n_x = s.x.grad / gx;
      n_y = s.y.grad / gy;
    } else {
      kind = CouplingKind::crn;
    }
  } else if (kind == CouplingKind::reflection) {
    e = s.x.x - s.y.x;
    const double en = e.norm();
    if (en > 0.0) e /= en; else kind = CouplingKind::crn;
  }
  info.used_gcrn_branch = is_gcrn_kind(kind);
  const IncrementPair inc = couple_increments(kind, z, z1, n_x, n_y, e);
  ChainPoint scratch;
  info.accepted_x = rwm_update(s.x, inc.zx, u, h, tx, scratch);
  info.accepted_y = rwm_update(s.y, inc.zy, u, h, ty, scratch);
  ++s.t;
  return info;
}

}  // namespace

CoupledStepInfo coupled_rwm_step(CoupledChainState& s, const CouplingSpec& spec, double h,
                                 const TargetModel& target, RngStream& rng) {
  if (s.met) return single_rwm(s, h, target, rng);
  CouplingKind kind = spec.kind;
  if (kind == CouplingKind::two_scale)
    kind = s.sq_dist() >= spec.delta ? CouplingKind::gcrn : CouplingKind::reflection_maximal;

  CoupledStepInfo info;
  if (kind == CouplingKind::reflection_maximal || kind == CouplingKind::maximal_independent) {
    ProposalPair pp;
    if (kind == CouplingKind::reflection_maximal) {
      pp = reflection_maximal_pair(s.x.x, s.y.x, h, rng);
    } else {
      const Eigen::Index d = s.x.x.size();
      const Eigen::VectorXd axis = Eigen::VectorXd::Unit(d, 0);
      const HopLaw qx{s.x.x, axis, 1.0, h, h}, qy{s.y.x, axis, 1.0, h, h};
      pp = maximal_independent_pair(qx, qy, rng);
    }
    const double logu = std::log(rng.uniform());
    info.proposals_equal = pp.equal;
    if (pp.equal) {
      accept_common(s, make_point(target, std::move(pp.xp)), logu, info);
    } else {
      ChainPoint px = make_point(target, std::move(pp.xp));
      ChainPoint py = make_point(target, std::move(pp.yp));
      info.accepted_x = logu <= px.logpi - s.x.logpi;
      info.accepted_y = logu <= py.logpi - s.y.logpi;
      if (info.accepted_x) s.x = std::move(px);
      if (info.accepted_y) s.y = std::move(py);
    }
    ++s.t;
  } else {
    info = increment_step(s, kind, h, target, target, rng);
  }
  sync_met(s);
  return info;
}

CoupledStepInfo two_scale_rwm_step(CoupledChainState& s, double delta, double h,
                                   const TargetModel& target, RngStream& rng) {
  return coupled_rwm_step(s, CouplingSpec{CouplingKind::two_scale, delta}, h, target, rng);
}

CoupledStepInfo cross_target_step(CoupledChainState& s, CouplingKind kind, double h,
                                  const TargetModel& target_x, const TargetModel& target_y,
                                  RngStream& rng) {
  if (target_x.dim() != target_y.dim())
    throw std::invalid_argument("cross_target_step: targets differ in dimension");
  if (kind != CouplingKind::crn && kind != CouplingKind::reflection && !is_gcrn_kind(kind))
    throw std::invalid_argument("cross_target_step: unsupported kind " + to_string(kind));
  return increment_step(s, kind, h, target_x, target_y, rng);
}

CoupledStepInfo cross_target_gcrn_step(CoupledChainState& s, double h,
                                       const TargetModel& target_x, const TargetModel& target_y,
                                       RngStream& rng) {
  return cross_target_step(s, CouplingKind::gcrn, h, target_x, target_y, rng);
}

namespace {

bool hop_move(ChainPoint& p, const ChainPoint& prop, double logu, const HopParams& hop) {
  if (logu <= hop_log_ratio(p, prop, hop)) {
    p = prop;
    return true;
  }
  return false;
}

bool hug_move(ChainPoint& p, const Eigen::VectorXd& v, double logu, const HugParams& hug,
              const TargetModel& target) {
  Eigen::VectorXd x = p.x, vv = v;
  if (!hug_trajectory(x, vv, hug, target)) return false;
  ChainPoint prop = make_point(target, std::move(x));
  if (logu <= prop.logpi - p.logpi) {
    p = std::move(prop);
    return true;
  }
  return false;
}

}  // namespace

void hug_hop_step(ChainPoint& p, const HugParams& hug, const HopParams& hop,
                  const TargetModel& target, RngStream& rng) {
  const Eigen::Index d = p.x.size();
  Eigen::VectorXd v(d), z(d);
  rng.fill_normal(v);
  hug_move(p, v, std::log(rng.uniform()), hug, target);
  rng.fill_normal(z);
  const double z1 = rng.normal();
  const double logu = std::log(rng.uniform());
  if (!(p.grad.norm() > 0.0)) return;
  const HopLaw law = hop_law(p.x, p.grad, hop);
  hop_move(p, make_point(target, law.draw(z, z1)), logu, hop);
}

CoupledStepInfo coupled_hug_hop_step(CoupledChainState& s, const HugParams& hug,
                                     const HopParams& hop, double delta_hop,
                                     const TargetModel& target, RngStream& rng) {
  validate(hug);
  validate(hop);
  if (!(delta_hop > 0.0)) throw std::invalid_argument("coupled_hug_hop_step: delta_hop must be > 0");
  CoupledStepInfo info;
  if (s.met) {
    hug_hop_step(s.x, hug, hop, target, rng);
    s.y = s.x;
    info.proposals_equal = true;
    ++s.t;
    return info;
  }
  const Eigen::Index d = s.x.x.size();

  // Hug with common momentum and uniform
  Eigen::VectorXd v(d);
  rng.fill_normal(v);
  const double logu_hug = std::log(rng.uniform());
  hug_move(s.x, v, logu_hug, hug, target);
  hug_move(s.y, v, logu_hug, hug, target);

  // Hop: GCRN far apart, maximal with independent residuals close together
  const double gx = s.x.grad.norm(), gy = s.y.grad.norm();
  if (s.sq_dist() >= delta_hop) {
    Eigen::VectorXd z(d);
    rng.fill_normal(z);
    const double z1 = rng.normal();
    const double logu = std::log(rng.uniform());
    info.used_gcrn_branch = true;
    if (gx > 0.0 && gy > 0.0) {
      const HopLaw lx = hop_law(s.x.x, s.x.grad, hop), ly = hop_law(s.y.x, s.y.grad, hop);
      const ChainPoint px = make_point(target, lx.draw(z, z1));
      const ChainPoint py = make_point(target, ly.draw(z, z1));
      info.accepted_x = hop_move(s.x, px, logu, hop);
      info.accepted_y = hop_move(s.y, py, logu, hop);
    }
  } else if (gx > 0.0 && gy > 0.0) {
    const HopLaw lx = hop_law(s.x.x, s.x.grad, hop), ly = hop_law(s.y.x, s.y.grad, hop);
    ProposalPair pp = maximal_independent_pair(lx, ly, rng);
    const double logu = std::log(rng.uniform());
    info.proposals_equal = pp.equal;
    const ChainPoint px = make_point(target, std::move(pp.xp));
    const ChainPoint py = pp.equal ? px : make_point(target, std::move(pp.yp));
    info.accepted_x = hop_move(s.x, px, logu, hop);
    info.accepted_y = hop_move(s.y, py, logu, hop);
  }
  ++s.t;
  sync_met(s);
  return info;
}

}  // namespace mcmccoup
