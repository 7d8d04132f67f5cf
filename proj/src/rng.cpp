#include "homog/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace homog {

double rng_stream::uniform() {
  if (has_u_) {
    has_u_ = false;
    return u_cache_;
  }
  double buf[2];
  kernels::uniform_fill(&st_, buf, 2);
  u_cache_ = buf[1];
  has_u_ = true;
  return buf[0];
}

double rng_stream::normal() {
  if (has_z_) {
    has_z_ = false;
    return z_cache_;
  }
  double buf[2];
  kernels::normals_fill(&st_, buf, 2);
  z_cache_ = buf[1];
  has_z_ = true;
  return buf[0];
}

double rng_stream::exponential() { return -std::log(uniform()); }

double rng_stream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // boost: if G ~ Gamma(shape+1) and U uniform, G U^{1/shape} ~ Gamma(shape)
    double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

long rng_stream::poisson(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda must be >= 0");
  if (lambda == 0.0) return 0;
  if (lambda > 60.0) {
    // Poisson additivity; halving keeps exp(-lambda) well above underflow
    double half = 0.5 * lambda;
    return poisson(half) + poisson(lambda - half);
  }
  double limit = std::exp(-lambda);
  double p = 1.0;
  long k = 0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

double rng_stream::stable(double exponent, double skew) {
  if (!(exponent > 1.0) || !(exponent <= 2.0))
    throw std::invalid_argument("stable: exponent must lie in (1,2]");
  if (!(skew >= -1.0) || !(skew <= 1.0))
    throw std::invalid_argument("stable: skew must lie in [-1,1]");
  double u = uniform();
  double w = exponential();
  double v = M_PI * (u - 0.5);
  double ta = std::tan(0.5 * M_PI * exponent);
  double b = std::atan(skew * ta) / exponent;
  double s = std::pow(1.0 + skew * skew * ta * ta, 0.5 / exponent);
  double a1 = exponent * (v + b);
  return s * std::sin(a1) / std::pow(std::cos(v), 1.0 / exponent) *
         std::pow(std::cos(v - a1) / w, (1.0 - exponent) / exponent);
}

}  // namespace homog
