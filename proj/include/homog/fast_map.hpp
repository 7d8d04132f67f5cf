#pragma once

#include <vector>

#include "homog/kernels/kernels.hpp"
#include "homog/rng.hpp"

namespace homog {

enum class map_family {
  pomeau_manneville,           // y(1 + 2^g y^g) on [0,1/2), 2y - 1 on [1/2,1]
  modified_pomeau_manneville,  // odd extension to [-1,1] with 1 - 2y on [1/2,1]
  doubling,                    // 2y mod 1 on [0,1]
};

struct fast_map_spec {
  map_family kind = map_family::pomeau_manneville;
  double gamma = 0.0;  // intermittency exponent, ignored by the doubling map

  double attractor_lo() const {
    return kind == map_family::modified_pomeau_manneville ? -1.0 : 0.0;
  }
  double attractor_hi() const { return 1.0; }

  // throws std::invalid_argument on parameters outside the supported ranges
  void validate() const;
};

struct orbit_data {
  std::vector<double> points;
  long burn_in = 0;
};

// default number of discarded iterates used to approximate an invariant-
// measure draw from a uniform start
inline constexpr long kDefaultBurnIn = 10000;

// one map application. Values within 1e-12 of the attractor are clamped onto
// it first; anything farther out raises std::domain_error naming the value.
// Branch points map through the right branch.
double step(const fast_map_spec& map, double y);

// the same entry clamp used by step/orbit, for drivers that validate a seed
// before handing it to the batch kernels
double clamp_initial(const fast_map_spec& map, double y);

// iterate step() from eta, discard burn_in points, keep the next length
// points; points[0] == eta when burn_in == 0. The doubling orbit runs on a
// 53-bit shift register topped up with a fresh pseudo-random bit each step,
// so unlike plain float doubling it does not collapse to 0 after 53 steps;
// step() on a stored point may therefore differ from the next stored point
// by one unit in the last place.
orbit_data orbit(const fast_map_spec& map, double eta, long length, long burn_in = 0);

// uniform draw on the attractor; combine with burn_in to approximate the
// invariant measure
double sample_initial(const fast_map_spec& map, rng_stream& rng);

// kernel-parameter lowering
kernels::map_params lower(const fast_map_spec& map);

}  // namespace homog
