#pragma once

#include "homog/rng.hpp"

namespace homog {

// square-root diffusion dX = alpha (beta - X) dt + sigma sqrt(X) dW. Its
// transition law is an affinely scaled noncentral chi-square, which gives
// exact samples and an exact CDF with no discretization error.
struct cir_params {
  double sigma2 = 0.0;  // sigma^2
  double alpha = 0.0;   // mean-reversion rate
  double beta = 0.0;    // long-run mean
  double xi = 0.0;      // initial condition X(0)

  void validate() const;

  // X(t) = c(t) H with H noncentral chi-square(dof, noncentrality(t))
  double scale_c(double t) const;
  double dof() const { return 4.0 * alpha * beta / sigma2; }
  double noncentrality(double t) const;

  double mean(double t) const;      // xi e^{-alpha t} + beta (1 - e^{-alpha t})
  double variance(double t) const;  // c(t)^2 (2 dof + 4 noncentrality)
};

// one noncentral chi-square draw: Poisson-mixed gamma
double noncentral_chisq_sample(double k, double lambda, rng_stream& rng);

// exact draw of X(t) given X(0) = params.xi
double cir_exact_sample(const cir_params& params, double t, rng_stream& rng);

// P(X(t) <= x) given X(0) = params.xi
double cir_cdf(const cir_params& params, double t, double x);

}  // namespace homog
