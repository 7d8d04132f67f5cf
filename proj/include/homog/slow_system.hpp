#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "homog/fast_map.hpp"
#include "homog/observable.hpp"
#include "homog/path.hpp"
#include "homog/transform.hpp"

namespace homog {

// second-order coupling f(x, y, eps) in the slow recursion
struct coupling_spec {
  enum class form_t {
    zero,
    separable_quadratic,  // fa (fb - x) y^2
    constant,             // fa
    custom,
  };
  form_t form = form_t::zero;
  double fa = 0.0, fb = 0.0;
  std::function<double(double, double, double)> fn;  // (x, y, eps)

  double operator()(double x, double y, double eps) const;
};

enum class scaling_kind {
  diffusive,       // x' = x + eps h(x) f0(y) + eps^2 f(x,y,eps), time eps^-2
  superdiffusive,  // x' = x + eps^gamma h(x) f0(y) + eps f(x,y,eps), time eps^-1
};

struct slow_system_spec {
  double epsilon = 0.1;
  double xi = 0.0;       // slow initial condition
  observable_spec f0;    // fast observable
  h_function h;          // multiplicative factor on the noise term
  coupling_spec f;       // second-order term
  scaling_kind scaling = scaling_kind::diffusive;
  double superdiffusive_gamma = 0.75;  // in (1/2,1); superdiffusive only

  void validate() const;
};

// one application of the slow recursion
double step_slow(const slow_system_spec& spec, double x, double y);

struct evolve_stats {
  std::uint64_t clamped_steps = 0;  // sqrt diffusion evaluated at negative x
  double k2_sup = 0.0;              // only set by ldp_diagnostic_k2
  long steps = 0;                   // map iterations consumed
};

// the rescaled process on the grid {0, grid_dt, ..., T}: value at grid time
// t is x(floor(t / eps^2 + 1e-9)) (eps^-1 time under superdiffusive
// scaling). T must be a positive multiple of grid_dt. Refining grid_dt
// leaves values at common times unchanged: both grids index the same
// underlying recursion by floor.
rescaled_path evolve(const slow_system_spec& spec, const fast_map_spec& map, double eta,
                     double T, double grid_dt = 0.01, evolve_stats* stats = nullptr);

// empirical drift average for the pathwise diagnostic: m2 is the orbit
// second moment of the raw fast variable (the builtin couplings contain
// y^2); for custom couplings F(x) = E_mu f(x, y, 0) is tabulated on a
// lattice and interpolated linearly
struct fhat_estimate {
  double m2 = 0.0;
  bool separable = true;  // builtin forms need only m2
  std::vector<double> grid, values;
};

fhat_estimate build_fhat(const slow_system_spec& spec, const fast_map_spec& map,
                         double x_lo, double x_hi, long orbit_length = 1000000,
                         std::uint64_t seed = 0);

// running maximum of the second-order remainder: the coupling prefactor
// (eps^2 diffusive, eps superdiffusive) times the largest
// |sum_{j<n} (f(x_j, y_j, 0) - fhat(x_j))| over the path, one realization;
// the ensemble layer averages it over many seeds
double ldp_diagnostic_k2(const slow_system_spec& spec, const fast_map_spec& map,
                         double eta, double T, const fhat_estimate& fhat);

// kernel lowering shared by evolve and the ensemble driver
struct lowered_slow {
  bool kernel_ok = false;
  kernels::slow_params sp{};
};
lowered_slow lower_slow(const slow_system_spec& spec, bool k2_on, double k2_m2);

}  // namespace homog
