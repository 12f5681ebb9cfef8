#pragma once

#include <stdexcept>

namespace mcmccoup {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

double std_normal_pdf(double x);
double std_normal_cdf(double x);
// log Phi(x), accurate far into the lower tail
double log_std_normal_cdf(double x);
double std_normal_quantile(double p);

// exp(c) * Phi(u) without intermediate overflow or underflow
double exp_times_cdf(double c, double u);

struct BvnQuery {
  double a;
  double b;
  double rho;
};

// P(Z1 <= a, Z2 <= b) with corr(Z1, Z2) = rho
double bvn_low(const BvnQuery& q);
double bvn_low(double a, double b, double rho);
// P(Z1 > a, Z2 > b)
double bvn_up(double a, double b, double rho);

struct GaussianIntegrals {
  double first;   // E[Z (1 ^ exp(-l alpha Z - l^2/2))]
  double second;  // E[1 ^ exp(-l alpha Z - l^2/2) ^ exp(-l beta Z - l^2/2)]
};

GaussianIntegrals gaussian_integrals(double alpha, double beta, double l);

}  // namespace mcmccoup
