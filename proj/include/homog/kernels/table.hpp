#pragma once

// Internal dispatch table: one function pointer per kernel entry point, one
// table per backend. avx2_table() has null entries when the build target or
// host cannot do AVX2; dispatch falls back to scalar.

#include "homog/kernels/kernels.hpp"

namespace homog::kernels::detail {

struct kernel_table {
  void (*map_advance)(const map_params&, double*, uint64_t*, uint64_t*, long);
  void (*fastslow_advance)(const map_params&, const slow_params&, double*,
                           double*, uint64_t*, uint64_t*, uint64_t*, double*,
                           double*, long);
  void (*em_advance)(const em_params&, double*, stream_state*, uint64_t*,
                     double*, double*, long);
  void (*heun_advance)(const em_params&, double*, stream_state*, uint64_t*,
                       long);
  void (*em_jump_advance)(const em_jump_params&, double*, stream_state*,
                          double*, double*, long);
  void (*normals_fill)(stream_state*, double*, long);
  void (*uniform_fill)(stream_state*, double*, long);
  void (*stable_fill)(const stable_params&, stream_state*, double*, long);
  void (*philox_fill)(const stream_state&, uint64_t*, uint64_t*, long);
  void (*autocov_partials)(const double*, long, long, double*);
  void (*sum_partials)(const double*, long, double*);
  void (*vm_log2)(const double*, double*, long);
  void (*vm_exp2)(const double*, double*, long);
  void (*vm_pow_pos)(const double*, const double*, double*, long);
  void (*vm_sincos2pi)(const double*, double*, double*, long);
};

const kernel_table& scalar_table();
const kernel_table& avx2_table();  // entries null when unavailable at build

// sequential single-orbit fill lives outside the table: one recurrence has no
// lane parallelism, so it always runs the scalar instantiation
void orbit_fill_scalar(const map_params&, double, long, double*);
double map_step_one_scalar(const map_params&, double);

}  // namespace homog::kernels::detail
