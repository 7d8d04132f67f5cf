#include "homog/covariance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace homog {

namespace {

double combine4(const double* p) { return (p[0] + p[1]) + (p[2] + p[3]); }

// fixed-tree sum of an arbitrary buffer through the kernel partials
double fixed_sum(const double* x, long n) {
  double p[4] = {0, 0, 0, 0};
  kernels::sum_partials(x, n, p);
  return combine4(p);
}

void apply_observable(const observable_spec& obs, double* w, long n) {
  if (obs.kind == observable_spec::kind_t::identity && obs.shift == 0.0) return;
  for (long i = 0; i < n; ++i) w[i] = obs(w[i]);
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";  // JSON has no inf or nan
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string covariance_estimate::to_json() const {
  std::string s = "{";
  s += "\"sigma2\": " + json_number(sigma2);
  s += ", \"f0_second_moment\": " + json_number(f0_second_moment);
  s += ", \"lag_cutoff\": " + std::to_string(lag_cutoff);
  s += ", \"orbit_length\": " + std::to_string(orbit_length);
  s += ", \"standard_error\": " + json_number(standard_error);
  s += ", \"quality_flag\": ";
  s += quality_flag ? "true" : "false";
  s += ", \"seed\": " + std::to_string(seed);
  s += "}";
  return s;
}

covariance_estimate green_kubo(const orbit_data& orbit, const observable_spec& obs,
                               long lag_cutoff) {
  const long n = static_cast<long>(orbit.points.size());
  if (lag_cutoff < 1) throw std::invalid_argument("green_kubo: lag_cutoff must be >= 1");
  if (lag_cutoff > n / 100)
    throw std::invalid_argument("green_kubo: lag_cutoff must be <= orbit length / 100");

  std::vector<double> w(orbit.points);
  apply_observable(obs, w.data(), n);

  double mean = fixed_sum(w.data(), n) / double(n);
  for (long i = 0; i < n; ++i) w[i] -= mean;

  const long L = lag_cutoff;
  const long nblocks = std::max<long>(1, std::min<long>(32, n / (100 * L)));
  const long base = n / nblocks;
  const long extra = n % nblocks;

  // within-block lag sums, then scalar corrections for pairs straddling a
  // block boundary; together they reproduce the full-orbit sums exactly up
  // to the fixed reduction tree
  std::vector<double> lag_sum(static_cast<size_t>(L + 1), 0.0);
  std::vector<double> block_gk(static_cast<size_t>(nblocks), 0.0);
  std::vector<double> acc(static_cast<size_t>(4 * (L + 1)));
  long start = 0;
  for (long b = 0; b < nblocks; ++b) {
    const long len = base + (b < extra ? 1 : 0);
    std::fill(acc.begin(), acc.end(), 0.0);
    kernels::autocov_partials(w.data() + start, len, L, acc.data());
    double gk_b = 0.0;
    for (long l = 0; l <= L; ++l) {
      double s = combine4(acc.data() + 4 * l);
      lag_sum[static_cast<size_t>(l)] += s;
      gk_b += (l == 0 ? 1.0 : 2.0) * s / double(len);
    }
    block_gk[static_cast<size_t>(b)] = gk_b;
    const long bend = start + len;
    if (b + 1 < nblocks) {
      for (long l = 1; l <= L; ++l) {
        double c = 0.0;
        for (long i = bend - l; i < bend; ++i) c += w[i] * w[i + l];
        lag_sum[static_cast<size_t>(l)] += c;
      }
    }
    start = bend;
  }

  covariance_estimate est;
  est.lag_cutoff = L;
  est.orbit_length = n;
  double c0 = lag_sum[0] / double(n);
  double total = c0;
  for (long l = 1; l <= L; ++l) total += 2.0 * lag_sum[static_cast<size_t>(l)] / double(n);
  est.sigma2 = total;
  est.f0_second_moment = c0 + mean * mean;
  if (nblocks >= 2) {
    double bm = 0.0;
    for (double v : block_gk) bm += v;
    bm /= double(nblocks);
    double ss = 0.0;
    for (double v : block_gk) ss += (v - bm) * (v - bm);
    est.standard_error = std::sqrt(ss / double(nblocks - 1) / double(nblocks));
  } else {
    est.standard_error = std::numeric_limits<double>::infinity();
  }
  est.quality_flag = !(est.sigma2 >= 0.0) || nblocks < 4;
  return est;
}

covariance_estimate moment_estimator(const fast_map_spec& map, const observable_spec& obs,
                                     long block_length, long blocks,
                                     std::uint64_t master_seed, int workers, long burn_in) {
  map.validate();
  if (block_length < 1000)
    throw std::invalid_argument("moment_estimator: block_length must be >= 1000");
  if (blocks < 100) throw std::invalid_argument("moment_estimator: blocks must be >= 100");
  if (burn_in < 0) throw std::invalid_argument("moment_estimator: burn_in must be >= 0");
  if (workers < 1) workers = 1;

  const long n = block_length;
  const kernels::map_params mp = lower(map);
  std::vector<double> block_sum(static_cast<size_t>(blocks));
  std::vector<double> block_sq(static_cast<size_t>(blocks));

  std::atomic<long> next{0};
  auto run = [&]() {
    std::vector<double> scratch(static_cast<size_t>(burn_in + n));
    for (;;) {
      long b = next.fetch_add(1);
      if (b >= blocks) return;
      rng_stream rng(master_seed, static_cast<std::uint64_t>(b));
      double eta = sample_initial(map, rng);
      kernels::orbit_fill(mp, eta, burn_in + n, scratch.data());
      double* w = scratch.data() + burn_in;
      apply_observable(obs, w, n);
      block_sum[static_cast<size_t>(b)] = fixed_sum(w, n);
      double acc[4] = {0, 0, 0, 0};
      kernels::autocov_partials(w, n, 0, acc);
      block_sq[static_cast<size_t>(b)] = combine4(acc);
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }

  // reductions in block order, independent of which worker filled a slot
  double total = 0.0, total_sq = 0.0;
  for (long b = 0; b < blocks; ++b) {
    total += block_sum[static_cast<size_t>(b)];
    total_sq += block_sq[static_cast<size_t>(b)];
  }
  const double mean = total / (double(blocks) * double(n));
  double est_mean = 0.0;
  std::vector<double> est_b(static_cast<size_t>(blocks));
  for (long b = 0; b < blocks; ++b) {
    double s = block_sum[static_cast<size_t>(b)] - double(n) * mean;
    est_b[static_cast<size_t>(b)] = s * s / double(n);
    est_mean += est_b[static_cast<size_t>(b)];
  }
  est_mean /= double(blocks);
  double ss = 0.0;
  for (long b = 0; b < blocks; ++b) {
    double d = est_b[static_cast<size_t>(b)] - est_mean;
    ss += d * d;
  }

  covariance_estimate est;
  est.sigma2 = est_mean;
  est.f0_second_moment = total_sq / (double(blocks) * double(n));
  est.lag_cutoff = 0;
  est.orbit_length = blocks * n;
  est.standard_error = std::sqrt(ss / double(blocks - 1) / double(blocks));
  est.quality_flag = !(est.sigma2 >= 0.0);
  est.seed = master_seed;
  return est;
}

}  // namespace homog
