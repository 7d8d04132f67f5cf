#pragma once

#include <functional>
#include <vector>

namespace homog {

// Kolmogorov-Smirnov distance between two empirical distributions
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// KS distance between an empirical distribution and a reference CDF
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

// uniform-bin probability mass histogram. The range is [0, 1.05 * max] and
// auto-expands left when values are negative; masses sum to 1 within 1e-12.
struct histogram_result {
  double lo = 0.0, hi = 0.0;
  std::vector<double> bin_left, bin_right, mass;
};
histogram_result histogram(const std::vector<double>& values, int bins = 200);

// fixed-range variant so several samples can share bin edges; values outside
// [lo, hi] land in the edge bins, keeping the total mass at 1
histogram_result histogram(const std::vector<double>& values, int bins, double lo,
                           double hi);

// least-squares slope of log tail probability against log |x| over sample
// points with |x| in [x_lo, x_hi], returned as the positive exponent
// alpha = -slope. Requires at least 10 points in the window.
double tail_exponent_window(const std::vector<double>& samples, double x_lo, double x_hi);

// same fit with the window set by |x| quantiles (0 < q_lo < q_hi <= 1)
double tail_exponent_quantile(const std::vector<double>& samples, double q_lo, double q_hi);

struct mean_se {
  double mean = 0.0;
  double se = 0.0;
};
mean_se sample_mean_se(const std::vector<double>& v);

}  // namespace homog
