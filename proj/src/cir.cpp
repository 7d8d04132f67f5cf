#include "homog/cir.hpp"

#include <cmath>
#include <stdexcept>

#include "homog/special.hpp"

namespace homog {

void cir_params::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("cir_params: sigma2 must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("cir_params: alpha must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("cir_params: beta must be > 0");
  if (!(xi >= 0.0)) throw std::invalid_argument("cir_params: xi must be >= 0");
}

double cir_params::scale_c(double t) const {
  return sigma2 / (4.0 * alpha) * (1.0 - std::exp(-alpha * t));
}

double cir_params::noncentrality(double t) const {
  return xi * std::exp(-alpha * t) / scale_c(t);
}

double cir_params::mean(double t) const {
  double e = std::exp(-alpha * t);
  return xi * e + beta * (1.0 - e);
}

double cir_params::variance(double t) const {
  double c = scale_c(t);
  return c * c * (2.0 * dof() + 4.0 * noncentrality(t));
}

double noncentral_chisq_sample(double k, double lambda, rng_stream& rng) {
  if (!(k > 0.0)) throw std::invalid_argument("noncentral_chisq_sample: k must be > 0");
  if (!(lambda >= 0.0))
    throw std::invalid_argument("noncentral_chisq_sample: lambda must be >= 0");
  // mixture representation valid for any k > 0, integer or not
  long j = lambda > 0.0 ? rng.poisson(0.5 * lambda) : 0;
  return rng.gamma(0.5 * k + double(j), 2.0);
}

double cir_exact_sample(const cir_params& params, double t, rng_stream& rng) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("cir_exact_sample: t must be > 0");
  return params.scale_c(t) * noncentral_chisq_sample(params.dof(), params.noncentrality(t), rng);
}

double cir_cdf(const cir_params& params, double t, double x) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("cir_cdf: t must be > 0");
  if (x <= 0.0) return 0.0;
  return noncentral_chisq_cdf(x / params.scale_c(t), params.dof(), params.noncentrality(t));
}

}  // namespace homog
