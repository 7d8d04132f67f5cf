#include "homog/special.hpp"

#include <cmath>
#include <stdexcept>

namespace homog {

namespace {

constexpr int kMaxIter = 2000;
constexpr double kTiny = 1e-300;

double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be > 0");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double noncentral_chisq_cdf(double x, double k, double lambda) {
  if (!(k > 0.0)) throw std::invalid_argument("noncentral_chisq_cdf: k must be > 0");
  if (!(lambda >= 0.0))
    throw std::invalid_argument("noncentral_chisq_cdf: lambda must be >= 0");
  if (x <= 0.0) return 0.0;
  if (lambda == 0.0) return regularized_gamma_p(0.5 * k, 0.5 * x);

  // weights w_j = e^{-l/2} (l/2)^j / j!; start at the mode and walk both
  // directions, so no leading weight underflows even for large lambda
  const double hl = 0.5 * lambda;
  const long j0 = static_cast<long>(hl);
  const double lw0 = -hl + double(j0) * std::log(hl) - std::lgamma(double(j0) + 1.0);
  const double w0 = std::exp(lw0);

  double sum = w0 * regularized_gamma_p(0.5 * k + double(j0), 0.5 * x);
  double w = w0;
  for (long j = j0 + 1; j < j0 + 100000; ++j) {
    w *= hl / double(j);  // monotone decreasing for j > hl
    sum += w * regularized_gamma_p(0.5 * k + double(j), 0.5 * x);
    if (w < 1e-18 * (1.0 + sum)) break;
  }
  w = w0;
  for (long j = j0; j > 0; --j) {
    w *= double(j) / hl;  // monotone decreasing for j <= hl
    sum += w * regularized_gamma_p(0.5 * k + double(j) - 1.0, 0.5 * x);
    if (w < 1e-18 * (1.0 + sum)) break;
  }
  return sum < 1.0 ? sum : 1.0;
}

}  // namespace homog
