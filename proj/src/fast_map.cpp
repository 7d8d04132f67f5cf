#include "homog/fast_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace homog {

namespace {

constexpr double kEdgeTol = 1e-12;

double clamp_to_attractor(const fast_map_spec& map, double y, const char* where) {
  double lo = map.attractor_lo();
  double hi = map.attractor_hi();
  if (y >= lo && y <= hi) return y;
  if (y > lo - kEdgeTol && y < lo) return lo;
  if (y < hi + kEdgeTol && y > hi) return hi;
  throw std::domain_error(std::string(where) + ": value " + std::to_string(y) +
                          " outside the attractor [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "]");
}

}  // namespace

double clamp_initial(const fast_map_spec& map, double y) {
  return clamp_to_attractor(map, y, "initial condition");
}

void fast_map_spec::validate() const {
  if (kind == map_family::doubling) return;
  if (!(gamma >= 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("fast_map_spec: gamma must lie in [0,1)");
}

double step(const fast_map_spec& map, double y) {
  map.validate();
  y = clamp_to_attractor(map, y, "step");
  if (map.kind == map_family::doubling) {
    // 2y and, on [1/2,1], 2y-1 are both exact in binary floating point
    return y < 0.5 ? 2.0 * y : 2.0 * y - 1.0;
  }
  return kernels::map_step_one(lower(map), y);
}

orbit_data orbit(const fast_map_spec& map, double eta, long length, long burn_in) {
  map.validate();
  if (length < 1) throw std::invalid_argument("orbit: length must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("orbit: burn_in must be >= 0");
  eta = clamp_to_attractor(map, eta, "orbit");
  orbit_data out;
  out.burn_in = burn_in;
  if (burn_in == 0) {
    out.points.resize(static_cast<size_t>(length));
    kernels::orbit_fill(lower(map), eta, length, out.points.data());
    return out;
  }
  std::vector<double> full(static_cast<size_t>(burn_in + length));
  kernels::orbit_fill(lower(map), eta, burn_in + length, full.data());
  out.points.assign(full.begin() + burn_in, full.end());
  return out;
}

double sample_initial(const fast_map_spec& map, rng_stream& rng) {
  double lo = map.attractor_lo();
  double hi = map.attractor_hi();
  return lo + (hi - lo) * rng.uniform();
}

kernels::map_params lower(const fast_map_spec& map) {
  kernels::map_params mp;
  switch (map.kind) {
    case map_family::pomeau_manneville: mp.kind = 0; break;
    case map_family::modified_pomeau_manneville: mp.kind = 1; break;
    case map_family::doubling: mp.kind = 2; break;
  }
  mp.gamma = map.kind == map_family::doubling ? 0.0 : map.gamma;
  mp.pow2gamma = std::exp2(mp.gamma);
  return mp;
}

}  // namespace homog
