#pragma once

// Lane abstraction for the compute kernels. Every kernel is a template over a
// backend tag exposing fixed-width f64/u64 lane types plus the operations
// below. Both backends restrict themselves to operations that IEEE 754
// defines as correctly rounded (+, -, *, /, sqrt) or that are exact bit
// manipulation, and contraction is disabled project-wide, so a kernel
// instantiated for the scalar and AVX2 backends produces bit-identical lanes.
//
// Masks are u64 lanes holding all-ones or all-zeros; they are only ever
// produced by the compare helpers and combined with bitwise ops, so the
// sign-bit-driven AVX2 blend and the scalar ternary agree.

#include <cstdint>
#include <cstring>
#include <cmath>

#ifdef __AVX2__
#include <immintrin.h>
#endif

namespace homog::kernels {

// ----------------------------------------------------------------- scalar

struct u64x1 {
  uint64_t v;
  u64x1() = default;
  explicit u64x1(uint64_t x) : v(x) {}
  static u64x1 load(const uint64_t* p) { return u64x1(*p); }
  void store(uint64_t* p) const { *p = v; }
};

struct f64x1 {
  double v;
  f64x1() = default;
  explicit f64x1(double x) : v(x) {}
  static f64x1 load(const double* p) { return f64x1(*p); }
  void store(double* p) const { *p = v; }
};

inline f64x1 operator+(f64x1 a, f64x1 b) { return f64x1(a.v + b.v); }
inline f64x1 operator-(f64x1 a, f64x1 b) { return f64x1(a.v - b.v); }
inline f64x1 operator*(f64x1 a, f64x1 b) { return f64x1(a.v * b.v); }
inline f64x1 operator/(f64x1 a, f64x1 b) { return f64x1(a.v / b.v); }
inline f64x1 vsqrt(f64x1 a) { return f64x1(std::sqrt(a.v)); }
// min/max mirror _mm256_{min,max}_pd: return b when a compares false (NaN-safe twin).
inline f64x1 vmin(f64x1 a, f64x1 b) { return f64x1(a.v < b.v ? a.v : b.v); }
inline f64x1 vmax(f64x1 a, f64x1 b) { return f64x1(a.v > b.v ? a.v : b.v); }

inline u64x1 operator+(u64x1 a, u64x1 b) { return u64x1(a.v + b.v); }
inline u64x1 operator&(u64x1 a, u64x1 b) { return u64x1(a.v & b.v); }
inline u64x1 operator|(u64x1 a, u64x1 b) { return u64x1(a.v | b.v); }
inline u64x1 operator^(u64x1 a, u64x1 b) { return u64x1(a.v ^ b.v); }
template <int K> u64x1 shr(u64x1 a) { return u64x1(a.v >> K); }
template <int K> u64x1 shl(u64x1 a) { return u64x1(a.v << K); }
// low 32 bits of each operand multiplied into a full 64-bit product (_mm256_mul_epu32 twin)
inline u64x1 mul_lo32(u64x1 a, u64x1 b) {
  return u64x1(uint64_t(uint32_t(a.v)) * uint64_t(uint32_t(b.v)));
}

inline u64x1 bits(f64x1 a) {
  uint64_t u;
  std::memcpy(&u, &a.v, 8);
  return u64x1(u);
}
inline f64x1 from_bits(u64x1 a) {
  double d;
  std::memcpy(&d, &a.v, 8);
  return f64x1(d);
}

inline f64x1 vabs(f64x1 a) {
  u64x1 b = bits(a);
  return from_bits(u64x1(b.v & 0x7FFFFFFFFFFFFFFFull));
}
inline u64x1 vlt(f64x1 a, f64x1 b) { return u64x1(a.v < b.v ? ~0ull : 0ull); }
inline u64x1 vle(f64x1 a, f64x1 b) { return u64x1(a.v <= b.v ? ~0ull : 0ull); }
inline f64x1 vselect(u64x1 m, f64x1 a, f64x1 b) { return (m.v >> 63) ? a : b; }
inline u64x1 uselect(u64x1 m, u64x1 a, u64x1 b) { return (m.v >> 63) ? a : b; }

struct scalar_backend {
  using f64 = f64x1;
  using u64 = u64x1;
  static constexpr int width = 1;
};

// ------------------------------------------------------------------- avx2

#ifdef __AVX2__

struct u64x4 {
  __m256i v;
  u64x4() = default;
  explicit u64x4(__m256i x) : v(x) {}
  explicit u64x4(uint64_t x) : v(_mm256_set1_epi64x(int64_t(x))) {}
  static u64x4 load(const uint64_t* p) {
    return u64x4(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)));
  }
  void store(uint64_t* p) const {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
  }
};

struct f64x4 {
  __m256d v;
  f64x4() = default;
  explicit f64x4(__m256d x) : v(x) {}
  explicit f64x4(double x) : v(_mm256_set1_pd(x)) {}
  static f64x4 load(const double* p) { return f64x4(_mm256_loadu_pd(p)); }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
};

inline f64x4 operator+(f64x4 a, f64x4 b) { return f64x4(_mm256_add_pd(a.v, b.v)); }
inline f64x4 operator-(f64x4 a, f64x4 b) { return f64x4(_mm256_sub_pd(a.v, b.v)); }
inline f64x4 operator*(f64x4 a, f64x4 b) { return f64x4(_mm256_mul_pd(a.v, b.v)); }
inline f64x4 operator/(f64x4 a, f64x4 b) { return f64x4(_mm256_div_pd(a.v, b.v)); }
inline f64x4 vsqrt(f64x4 a) { return f64x4(_mm256_sqrt_pd(a.v)); }
inline f64x4 vmin(f64x4 a, f64x4 b) { return f64x4(_mm256_min_pd(a.v, b.v)); }
inline f64x4 vmax(f64x4 a, f64x4 b) { return f64x4(_mm256_max_pd(a.v, b.v)); }

inline u64x4 operator+(u64x4 a, u64x4 b) { return u64x4(_mm256_add_epi64(a.v, b.v)); }
inline u64x4 operator&(u64x4 a, u64x4 b) { return u64x4(_mm256_and_si256(a.v, b.v)); }
inline u64x4 operator|(u64x4 a, u64x4 b) { return u64x4(_mm256_or_si256(a.v, b.v)); }
inline u64x4 operator^(u64x4 a, u64x4 b) { return u64x4(_mm256_xor_si256(a.v, b.v)); }
template <int K> u64x4 shr(u64x4 a) { return u64x4(_mm256_srli_epi64(a.v, K)); }
template <int K> u64x4 shl(u64x4 a) { return u64x4(_mm256_slli_epi64(a.v, K)); }
inline u64x4 mul_lo32(u64x4 a, u64x4 b) { return u64x4(_mm256_mul_epu32(a.v, b.v)); }

inline u64x4 bits(f64x4 a) { return u64x4(_mm256_castpd_si256(a.v)); }
inline f64x4 from_bits(u64x4 a) { return f64x4(_mm256_castsi256_pd(a.v)); }

inline f64x4 vabs(f64x4 a) {
  return f64x4(_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v));
}
inline u64x4 vlt(f64x4 a, f64x4 b) {
  return u64x4(_mm256_castpd_si256(_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)));
}
inline u64x4 vle(f64x4 a, f64x4 b) {
  return u64x4(_mm256_castpd_si256(_mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ)));
}
inline f64x4 vselect(u64x4 m, f64x4 a, f64x4 b) {
  return f64x4(_mm256_blendv_pd(b.v, a.v, _mm256_castsi256_pd(m.v)));
}
inline u64x4 uselect(u64x4 m, u64x4 a, u64x4 b) {
  return u64x4(_mm256_castpd_si256(_mm256_blendv_pd(
      _mm256_castsi256_pd(b.v), _mm256_castsi256_pd(a.v), _mm256_castsi256_pd(m.v))));
}

struct avx2_backend {
  using f64 = f64x4;
  using u64 = u64x4;
  static constexpr int width = 4;
};

#endif  // __AVX2__

}  // namespace homog::kernels
