#pragma once

#include <cstdint>
#include <string>

#include "homog/fast_map.hpp"
#include "homog/observable.hpp"

namespace homog {

struct covariance_estimate {
  double sigma2 = 0.0;            // limiting variance estimate
  double f0_second_moment = 0.0;  // raw (uncentered) second moment of f0
  long lag_cutoff = 0;            // 0 for the moment estimator
  long orbit_length = 0;          // total points consumed
  double standard_error = 0.0;
  bool quality_flag = false;  // negative variance estimate or too few blocks
  std::uint64_t seed = 0;

  std::string to_json() const;
};

// Green-Kubo sum over one long orbit: autocovariance at lag 0 plus twice the
// lags 1..cutoff, each normalized by the full orbit length. The series is
// always centered at the empirical mean first. The standard error comes from
// recomputing the sum on up to 32 contiguous sub-blocks. A negative total
// sets quality_flag instead of clamping.
// pre: 1 <= lag_cutoff <= points/100
covariance_estimate green_kubo(const orbit_data& orbit, const observable_spec& obs,
                               long lag_cutoff = 1000);

// direct estimate of lim n^-1 E[S_n^2] over many independent blocks, each a
// fresh orbit from a uniform start with its own derived stream
// (master_seed, block index). Block sums are centered at the global
// empirical mean. The reduction order is fixed by block index, so the result
// is identical for any worker count.
// pre: block_length >= 1000, blocks >= 100
covariance_estimate moment_estimator(const fast_map_spec& map, const observable_spec& obs,
                                     long block_length, long blocks,
                                     std::uint64_t master_seed, int workers = 1,
                                     long burn_in = kDefaultBurnIn);

}  // namespace homog
