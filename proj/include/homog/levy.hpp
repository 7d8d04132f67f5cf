#pragma once

#include "homog/sde.hpp"
#include "homog/slow_system.hpp"

namespace homog {

// one-sided stable noise in the superdiffusive regime; the stable index is
// tied to the map exponent by exponent * gamma = 1 exactly
struct stable_noise_spec {
  double gamma = 0.75;  // in (1/2, 1)
  double skew = 1.0;
  double scale = 1.0;

  double exponent() const { return 1.0 / gamma; }
  void validate() const;
};

// one standardized stable draw scaled by spec.scale
double stable_sample(const stable_noise_spec& spec, rng_stream& rng);

// increments dG_k of the driving process on {0, dt, ...}: dt^gamma times a
// standardized stable draw each
struct levy_increments {
  std::vector<double> t;   // left endpoints
  std::vector<double> dG;  // one per interval
};
levy_increments sample_levy_increments(const stable_noise_spec& spec, double T, double dt,
                                       rng_stream& rng);

// rescaled superdiffusive recursion, value at t is x(floor(t/eps + 1e-9)).
// pre: spec.scaling == superdiffusive, the map is an intermittent family
// member with the same gamma, and f0(0) != 0 (the stable limit needs a
// nonvanishing observable at the neutral fixed point).
rescaled_path evolve_superdiffusive(const slow_system_spec& spec, const fast_map_spec& map,
                                    double eta, double T, double grid_dt = 0.01,
                                    evolve_stats* stats = nullptr);

// jump SDE integrated in the additive coordinates Z = r(X) and mapped back;
// z is the internal additive path (exposed so the Marcus/additive identity
// is testable at the bit level), x its image under r^-1. A state leaving the
// image interval stops integration and truncates both paths at the exit.
struct marcus_result {
  rescaled_path x;
  rescaled_path z;
  bool domain_exit = false;
  long exit_step = -1;
};

// pre: stable noise with the marcus_via_transform interpretation, dt in
// (0, 0.01], T a positive multiple of dt
marcus_result marcus_path(const sde_spec& spec, double T, double dt, rng_stream& rng);

}  // namespace homog
