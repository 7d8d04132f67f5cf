#include "homog/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homog {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: sample must be nonempty");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::max(f - double(i) / n, double(i + 1) / n - f));
  }
  return d;
}

namespace {

histogram_result bin_values(const std::vector<double>& values, int bins, double lo,
                            double hi) {
  histogram_result h;
  h.lo = lo;
  h.hi = hi;
  std::vector<long> count(static_cast<size_t>(bins), 0);
  const double width = (hi - lo) / double(bins);
  for (double v : values) {
    long idx = static_cast<long>((v - lo) / width);
    idx = std::clamp<long>(idx, 0, bins - 1);
    count[static_cast<size_t>(idx)] += 1;
  }
  h.bin_left.resize(static_cast<size_t>(bins));
  h.bin_right.resize(static_cast<size_t>(bins));
  h.mass.resize(static_cast<size_t>(bins));
  const double n = double(values.size());
  for (int b = 0; b < bins; ++b) {
    h.bin_left[static_cast<size_t>(b)] = lo + width * double(b);
    h.bin_right[static_cast<size_t>(b)] = lo + width * double(b + 1);
    h.mass[static_cast<size_t>(b)] = double(count[static_cast<size_t>(b)]) / n;
  }
  return h;
}

void check_finite(const std::vector<double>& values, int bins) {
  if (values.empty()) throw std::invalid_argument("histogram: values must be nonempty");
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("histogram: values must be finite");
}

}  // namespace

histogram_result histogram(const std::vector<double>& values, int bins) {
  check_finite(values, bins);
  double vmin = values[0], vmax = values[0];
  for (double v : values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  double lo = std::min(0.0, vmin);
  double hi = vmax > 0.0 ? 1.05 * vmax : lo + 1.0;
  if (hi <= lo) hi = lo + 1.0;
  return bin_values(values, bins, lo, hi);
}

histogram_result histogram(const std::vector<double>& values, int bins, double lo,
                           double hi) {
  check_finite(values, bins);
  if (!(lo < hi)) throw std::invalid_argument("histogram: need lo < hi");
  return bin_values(values, bins, lo, hi);
}

namespace {

double window_fit(const std::vector<double>& sorted_abs, double x_lo, double x_hi) {
  const size_t n = sorted_abs.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long m = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = sorted_abs[i];
    if (x < x_lo || x > x_hi || x <= 0.0) continue;
    // continuity-corrected tail probability keeps the last point usable
    double p = (double(n) - double(i) - 0.5) / double(n);
    double lx = std::log(x), lp = std::log(p);
    sx += lx;
    sy += lp;
    sxx += lx * lx;
    sxy += lx * lp;
    ++m;
  }
  if (m < 10)
    throw std::invalid_argument("tail_exponent: fewer than 10 sample points in the window");
  double denom = double(m) * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("tail_exponent: degenerate window");
  double slope = (double(m) * sxy - sx * sy) / denom;
  return -slope;
}

}  // namespace

double tail_exponent_window(const std::vector<double>& samples, double x_lo, double x_hi) {
  if (!(x_lo > 0.0) || !(x_hi > x_lo))
    throw std::invalid_argument("tail_exponent_window: need 0 < x_lo < x_hi");
  std::vector<double> a(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) a[i] = std::abs(samples[i]);
  std::sort(a.begin(), a.end());
  return window_fit(a, x_lo, x_hi);
}

double tail_exponent_quantile(const std::vector<double>& samples, double q_lo, double q_hi) {
  if (!(q_lo > 0.0) || !(q_hi > q_lo) || !(q_hi <= 1.0))
    throw std::invalid_argument("tail_exponent_quantile: need 0 < q_lo < q_hi <= 1");
  std::vector<double> a(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) a[i] = std::abs(samples[i]);
  std::sort(a.begin(), a.end());
  const size_t n = a.size();
  if (n < 100) throw std::invalid_argument("tail_exponent_quantile: need at least 100 samples");
  double x_lo = a[std::min(n - 1, static_cast<size_t>(q_lo * double(n)))];
  double x_hi = a[std::min(n - 1, static_cast<size_t>(q_hi * double(n)))];
  return window_fit(a, x_lo, x_hi);
}

mean_se sample_mean_se(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("sample_mean_se: empty sample");
  double m = 0.0;
  for (double x : v) m += x;
  m /= double(v.size());
  if (v.size() == 1) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / double(v.size() - 1) / double(v.size()))};
}

}  // namespace homog
