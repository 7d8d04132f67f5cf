#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homog/cir.hpp"
#include "homog/fast_map.hpp"
#include "homog/sde.hpp"
#include "homog/slow_system.hpp"

namespace homog {

// one ensemble = many independent realizations of exactly one model kind.
// Realization i always draws from the stream derived as (master_seed, i), and
// every output slot is indexed by i, so results are bit-identical for any
// worker count.
struct ensemble_config {
  long realizations = 0;
  std::uint64_t master_seed = 0;
  int workers = 1;
  double T = 10.0;
  double grid_dt = 0.01;  // map-path record resolution
  double dt = 1e-3;       // SDE integrator step
  std::vector<double> sample_times;  // additional record times in [0, T]
  bool record_k2 = false;            // fast-slow only
  double k2_m2 = 0.0;                // second moment passed to the diagnostic
  long burn_in = kDefaultBurnIn;     // fast-slow initial-condition burn-in

  // exactly one of the three
  struct fast_slow_model {
    slow_system_spec slow;
    fast_map_spec map;
  };
  std::optional<fast_slow_model> fast_slow;
  std::optional<sde_spec> sde;
  std::optional<cir_params> cir;  // exact transition sampling, no stepping
};

struct realization_error {
  long index = 0;
  std::string what;
};

struct ensemble_result {
  long realizations = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> terminal;              // x(T); NaN for errored realizations
  std::vector<std::vector<double>> samples;  // [sample_time][realization]
  std::vector<std::uint64_t> clamp_steps;    // per realization
  std::vector<double> k2_sup;                // per realization when record_k2
  std::vector<realization_error> errors;     // sorted by index, capped
  long error_count = 0;
  double clamp_fraction = 0.0;  // realizations with at least one clamped step

  // error realizations removed
  std::vector<double> valid_terminal() const;
  std::vector<double> valid_samples(std::size_t time_index) const;

  // more than 1% of realizations errored
  bool failed() const { return error_count * 100 > realizations; }
};

ensemble_result run_ensemble(const ensemble_config& config);

}  // namespace homog
