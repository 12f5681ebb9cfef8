#pragma once

#include <string>
#include <vector>

namespace mcmccoup {

enum class LimitKind { crn, reflection, gcrn, optimal };

std::string to_string(LimitKind k);
LimitKind limit_kind_from_string(const std::string& s);

// Scaled squared norms and inner product (x, y, v), time measured in units of d iterations.
struct OdeState {
  double x;
  double y;
  double v;
  double s() const { return x + y - 2.0 * v; }
};

struct OdeSample {
  double t;
  OdeState w;
};

double drift_a(double x, double l);

// e^{l^2 (x-1)/2} Phi(l/(2 sqrt x) - l sqrt x); the acceptance term shared by a and b
double accept_exp_term(double x, double l);

double rho_limit(LimitKind kind, const OdeState& w);

double g_value(double x, double y, double rho, double l);
double g_opt(double x, double y, double l);

OdeState drift_c(const OdeState& w, double l, LimitKind kind);

struct IntegrateOptions {
  double dt = 1e-3;
  double record_every = 0.01;  // spacing of stored samples in ODE time
  double violation_tol = 1e-8;
};

std::vector<OdeSample> integrate_w(const OdeState& w0, double l, LimitKind kind, double t_end,
                                   const IntegrateOptions& opts = {});

// Integrates the squared-distance form (x, y, s) directly; v recovered as (x+y-s)/2.
std::vector<OdeSample> integrate_sd(const OdeState& w0, double l, LimitKind kind, double t_end,
                                    const IntegrateOptions& opts = {});

// (a_k(x_k; x1), a_k(y_k; y1), b_k(v_k; x1, y1, rho)) with parameter l1.
struct EllipticalDrift {
  double ax;
  double ay;
  double bv;
};

EllipticalDrift elliptical_infinitesimal(double x_k, double y_k, double v_k, double x1, double y1,
                                         double rho, double l1);

// Covariance diag(1, s2, 1, s2, ...): odd block (P, Py, Vo) = (|X_o|^2, |Y_o|^2, X_o'Y_o)/m and
// even block (Q, Qy, Ve) = (|X_e|^2, |Y_e|^2, X_e'Y_e)/(m s2), m = d/2.
struct BlockState {
  OdeState odd;
  OdeState even;
};

struct BlockSample {
  double t;
  BlockState w;
  double scaled_sq_dist;  // |X - Y|^2 / tr(Sigma)
};

double block_scaled_sq_dist(const BlockState& w, double sigma2);
double block_rho(LimitKind kind, const BlockState& w, double sigma2);
BlockState block_drift(const BlockState& w, double sigma2, double l, LimitKind kind);

// l is the raw step parameter (h = l / sqrt(d)); l1 = l z_1.
std::vector<BlockSample> two_eigenvalue_ode(double sigma2, const BlockState& w0, double l,
                                            LimitKind kind, double t_end,
                                            const IntegrateOptions& opts = {});

}  // namespace mcmccoup
