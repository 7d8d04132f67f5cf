#pragma once

// Public kernel API: runtime-dispatched batch loops behind plain-array
// signatures. A scalar and an AVX2 instantiation of the same templates sit
// behind each entry point; active_backend() picks AVX2 when the CPU has it,
// overridable with set_backend() or HOMOG_BACKEND=scalar|avx2. Backends are
// bit-identical by construction and the tests assert exact equality.
//
// Batches are a fixed kBatch=4 realizations regardless of backend so the
// ensemble layer's accumulation order never depends on lane width.
//
// Kernels clamp map outputs to the attractor interval unconditionally: inputs
// are in the attractor, so one step's rounding error is far below the 1e-12
// clamp-vs-error threshold the scalar step() enforces.

#include <cstdint>

#include "homog/kernels/philox.hpp"

namespace homog::kernels {

inline constexpr int kBatch = 4;

enum class backend_kind { scalar = 0, avx2 = 1 };

backend_kind active_backend();
void set_backend(backend_kind b);   // test hook; also resets env resolution
bool backend_available(backend_kind b);
const char* backend_name(backend_kind b);

// ------------------------------------------------------------ fast maps

// kind: 0 = PomeauManneville on [0,1], 1 = ModifiedPomeauManneville on
// [-1,1], 2 = Doubling on [0,1] (exact 53-bit shift register; dk/ds lanes
// hold the register and the bitstream PRG state).
struct map_params {
  int kind;
  double gamma;
  double pow2gamma;  // 2^gamma, folded once
};

// seed the doubling shift register and bitstream from a starting point
void doubling_init(double y0, uint64_t* k, uint64_t* s);

// advance kBatch fast-map states `steps` steps in place
void map_advance(const map_params& mp, double* y, uint64_t* dk, uint64_t* ds,
                 long steps);

// fill a single sequential orbit: out[0] = y0 (post-clamp), out[i+1] = g(out[i]);
// lane-parallelism does not apply to one recurrence, always runs scalar lanes
void orbit_fill(const map_params& mp, double y0, long n, double* out);

// one scalar map application, same arithmetic as the batch loops; kinds 0/1
// only (the doubling step is exact plain floating point at module level)
double map_step_one(const map_params& mp, double y);

// ------------------------------------------------------- fast-slow loop

// slow recursion x += cn*h(x)*(y - f0_center) + cd*f(x,y) fused with the map.
// h_kind: 0 = 1, 1 = sqrt(max(x,0)) counting clamps.
// f_kind: 0 = 0, 1 = fa*(fb - x)*y^2, 2 = constant fa.
// k2_on: also accumulate k2sum += f(x,y) - fhat(x) per step with
// fhat(x) = fa*(fb-x)*k2_m2 (only meaningful for f_kind 1; f_kind 0/2 give 0)
// and track k2max = max(k2max, |k2sum|).
struct slow_params {
  double cn, cd;
  double f0_center;
  int h_kind;
  int f_kind;
  double fa, fb;
  int k2_on;
  double k2_m2;
};

void fastslow_advance(const map_params& mp, const slow_params& sp, double* x,
                      double* y, uint64_t* dk, uint64_t* ds, uint64_t* clamp,
                      double* k2sum, double* k2max, long steps);

// ----------------------------------------------------------- SDE loops

// drift_kind: 0 = c0 + c1*x; 1 = c0/u + c1*u with u = 0.5*x + e0 (the
// transformed sqrt-diffusion drift); 2 = 0; 3 = c0*exp(-x) + c1 (the
// transformed linear-diffusion drift, r = log).
// diff_kind: 0 = 1, 1 = sqrt(max(x,0)) counting clamps; full truncation, so
// the drift also sees max(x,0) under diff_kind 1.
// One normal per step (cosine half of a Box-Muller pair, one counter block).
// xmin/xmax accumulate the post-step state range per lane so callers can
// detect transform-domain exits that a grid-time check would miss.
struct em_params {
  int drift_kind;
  double c0, c1, e0;
  int diff_kind;
  double dt;
  double noise_scale;  // sigma * sqrt(dt), premultiplied
};

void em_advance(const em_params& p, double* x, stream_state* st,
                uint64_t* clamp, double* xmin, double* xmax, long steps);

// Heun predictor-corrector on both drift and diffusion (Stratonovich form)
void heun_advance(const em_params& p, double* x, stream_state* st,
                  uint64_t* clamp, long steps);

// Euler with exact stable increments: x += drift(x)*dt + dg_scale*Y where Y
// is alpha-stable (Chambers-Mallows-Stuck; cms_b/cms_s folded by the caller).
// One stable draw per step (one counter block).
struct em_jump_params {
  int drift_kind;
  double c0, c1, e0;
  double dt;
  double dg_scale;  // scale * dt^gamma
  double alpha;
  double cms_b, cms_s;
  double inv_alpha, one_minus_alpha_over_alpha;
};

void em_jump_advance(const em_jump_params& p, double* x, stream_state* st,
                     double* xmin, double* xmax, long steps);

// -------------------------------------------------------- fill kernels

// Lanes run consecutive counter blocks of one stream, so output order is
// backend-independent. normals_fill uses both Box-Muller halves (2 per
// block); stable_fill one draw per block; uniform_fill 2 per block.
void normals_fill(stream_state* st, double* out, long n);
void uniform_fill(stream_state* st, double* out, long n);

struct stable_params {
  double alpha;
  double cms_b, cms_s;
  double inv_alpha, one_minus_alpha_over_alpha;
  double scale;
};
void stable_fill(const stable_params& p, stream_state* st, double* out, long n);

// raw blocks for known-answer tests: out_lo[i], out_hi[i] per counter block
void philox_fill(const stream_state& st, uint64_t* out_lo, uint64_t* out_hi,
                 long nblocks);

// ----------------------------------------------------- reduction kernels

// acc[4*l + j] += sum over i ≡ j (mod 4) of x[i]*x[i+l], i + l < n, for each
// lag l in [0, nlags]; fixed 4-way partials make the reduction tree identical
// across backends. Caller combines partials as (p0+p1)+(p2+p3).
void autocov_partials(const double* x, long n, long nlags, double* acc);

// acc[j] += sum over i ≡ j (mod 4) of x[i]
void sum_partials(const double* x, long n, double* acc);

// ------------------------------------------------ vecmath test exports

void vm_log2(const double* in, double* out, long n);
void vm_exp2(const double* in, double* out, long n);
void vm_pow_pos(const double* xin, const double* yin, double* out, long n);
void vm_sincos2pi(const double* in, double* sin_out, double* cos_out, long n);

}  // namespace homog::kernels
