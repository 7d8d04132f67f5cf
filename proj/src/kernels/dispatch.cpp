// Backend resolution and the public forwarding entry points.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "homog/kernels/kernels.hpp"
#include "homog/kernels/table.hpp"

namespace homog::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

backend_kind resolve_backend() {
  bool avx2_ok = detail::avx2_table().map_advance != nullptr && cpu_has_avx2();
  const char* env = std::getenv("HOMOG_BACKEND");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return backend_kind::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_ok) return backend_kind::avx2;
  }
  return avx2_ok ? backend_kind::avx2 : backend_kind::scalar;
}

// -1 = unresolved, otherwise a backend_kind value
std::atomic<int> g_backend{-1};

const detail::kernel_table& table() {
  int b = g_backend.load(std::memory_order_relaxed);
  if (b < 0) {
    b = int(resolve_backend());
    g_backend.store(b, std::memory_order_relaxed);
  }
  return b == int(backend_kind::avx2) ? detail::avx2_table()
                                      : detail::scalar_table();
}

}  // namespace

backend_kind active_backend() {
  table();
  return backend_kind(g_backend.load(std::memory_order_relaxed));
}

void set_backend(backend_kind b) {
  if (!backend_available(b)) b = backend_kind::scalar;
  g_backend.store(int(b), std::memory_order_relaxed);
}

bool backend_available(backend_kind b) {
  if (b == backend_kind::scalar) return true;
  return detail::avx2_table().map_advance != nullptr && cpu_has_avx2();
}

const char* backend_name(backend_kind b) {
  return b == backend_kind::avx2 ? "avx2" : "scalar";
}

void doubling_init(double y0, uint64_t* k, uint64_t* s) {
  double t = y0 * 9007199254740992.0;  // 2^53
  if (!(t >= 0.0)) t = 0.0;
  if (t > 9007199254740991.0) t = 9007199254740991.0;
  *k = uint64_t(t);
  uint64_t bits;
  std::memcpy(&bits, &y0, sizeof bits);
  *s = splitmix_mix(bits ^ 0x6A09E667F3BCC909ull);
}

void map_advance(const map_params& mp, double* y, uint64_t* dk, uint64_t* ds,
                 long steps) {
  table().map_advance(mp, y, dk, ds, steps);
}

void orbit_fill(const map_params& mp, double y0, long n, double* out) {
  detail::orbit_fill_scalar(mp, y0, n, out);
}

double map_step_one(const map_params& mp, double y) {
  return detail::map_step_one_scalar(mp, y);
}

void fastslow_advance(const map_params& mp, const slow_params& sp, double* x,
                      double* y, uint64_t* dk, uint64_t* ds, uint64_t* clamp,
                      double* k2sum, double* k2max, long steps) {
  table().fastslow_advance(mp, sp, x, y, dk, ds, clamp, k2sum, k2max, steps);
}

void em_advance(const em_params& p, double* x, stream_state* st,
                uint64_t* clamp, double* xmin, double* xmax, long steps) {
  table().em_advance(p, x, st, clamp, xmin, xmax, steps);
}

void heun_advance(const em_params& p, double* x, stream_state* st,
                  uint64_t* clamp, long steps) {
  table().heun_advance(p, x, st, clamp, steps);
}

void em_jump_advance(const em_jump_params& p, double* x, stream_state* st,
                     double* xmin, double* xmax, long steps) {
  table().em_jump_advance(p, x, st, xmin, xmax, steps);
}

void normals_fill(stream_state* st, double* out, long n) {
  table().normals_fill(st, out, n);
}

void uniform_fill(stream_state* st, double* out, long n) {
  table().uniform_fill(st, out, n);
}

void stable_fill(const stable_params& p, stream_state* st, double* out,
                 long n) {
  table().stable_fill(p, st, out, n);
}

void philox_fill(const stream_state& st, uint64_t* out_lo, uint64_t* out_hi,
                 long nblocks) {
  table().philox_fill(st, out_lo, out_hi, nblocks);
}

void autocov_partials(const double* x, long n, long nlags, double* acc) {
  table().autocov_partials(x, n, nlags, acc);
}

void sum_partials(const double* x, long n, double* acc) {
  table().sum_partials(x, n, acc);
}

void vm_log2(const double* in, double* out, long n) {
  table().vm_log2(in, out, n);
}

void vm_exp2(const double* in, double* out, long n) {
  table().vm_exp2(in, out, n);
}

void vm_pow_pos(const double* xin, const double* yin, double* out, long n) {
  table().vm_pow_pos(xin, yin, out, n);
}

void vm_sincos2pi(const double* in, double* sin_out, double* cos_out, long n) {
  table().vm_sincos2pi(in, sin_out, cos_out, n);
}

}  // namespace homog::kernels
