#pragma once

// Polynomial math over lanes: log2/exp2/pow, natural log/exp, sin/cos of
// 2*pi*u, and bit-exact integer<->double helpers. libm is deliberately not
// used here: vectorized libm paths are not bit-stable against their scalar
// counterparts, and these routines must produce identical lanes on every
// backend. Coefficients are near-minimax (Chebyshev fits at 60-digit
// precision); observed max abs error of each double-rounded poly on its
// reduced range is recorded next to the table.
//
// Accuracy is ~1e-15 relative, which is orders below every statistical
// tolerance in the test suite; these feed samplers and map iteration, not
// linear algebra.

#include "homog/kernels/lane.hpp"

namespace homog::kernels {

template <class B>
struct vm {
  using F = typename B::f64;
  using U = typename B::u64;

  // 1.5 * 2^52; (x + magic) - magic rounds half-even for |x| < 2^51, and the
  // low mantissa bits of (x + magic) hold round(x) + 2^51 in offset binary.
  static constexpr double kRoundMagic = 6755399441055744.0;

  template <int N>
  static F poly(F w, const double (&c)[N]) {
    F acc = F(c[N - 1]);
    for (int i = N - 2; i >= 0; --i) acc = acc * w + F(c[i]);
    return acc;
  }

  // exact for k < 2^52
  static F u52_to_f64(U k) {
    return from_bits(k | U(0x4330000000000000ull)) - F(4503599627370496.0);
  }

  // exact for k < 2^53 (split so each part fits one exponent insertion)
  static F u53_to_f64(U k) {
    F hi = u52_to_f64(shr<32>(k));
    F lo = u52_to_f64(k & U(0xFFFFFFFFull));
    return hi * F(0x1p32) + lo;
  }

  // 64 random bits -> (0,1), resolution 2^-52, never 0 or 1
  static F uniform_oo(U x) {
    return (u52_to_f64(shr<12>(x)) + F(0.5)) * F(0x1p-52);
  }

  // 2^n for integer-valued n in [-1022, 1024] (as exponent field insertion)
  static F pow2i(F n) {
    U ib = bits(n + F(kRoundMagic)) & U(0xFFFFFFFFFFFFFull);
    // low bits hold n + 2^51; rebias to n + 1023
    ib = ib + U(uint64_t(1023) - (uint64_t(1) << 51));
    return from_bits(shl<52>(ib));
  }

  // max abs err 1.4e-17 on [-0.5, 0.5]
  static F exp2_core(F f) {
    static constexpr double c[] = {
        0x1.0000000000000p+0,  0x1.62e42fefa39efp-1,  0x1.ebfbdff82c58fp-3,
        0x1.c6b08d704a0c0p-5,  0x1.3b2ab6fba4e7ep-7,  0x1.5d87fe78a6734p-10,
        0x1.430912f869ba1p-13, 0x1.ffcbfc5889053p-17, 0x1.62c0224a09b7fp-20,
        0x1.b5253d44f5213p-24, 0x1.e4cef56477b15p-28, 0x1.e8ca833b580a5p-32,
        0x1.c4c8ce0e4f581p-36, 0x1.822742e95e26bp-40};
    return poly(f, c);
  }

  // 2^v; v < -1075 underflows to 0, v >= 1024 overflows to inf; |v| < 2^51
  static F exp2(F v) {
    F n = (v + F(kRoundMagic)) - F(kRoundMagic);
    F f = v - n;
    F q = exp2_core(f);
    F n1 = vmin(vmax(n, F(-960.0)), F(1024.0));
    F n2 = vmax(n - n1, F(-1022.0));
    return q * pow2i(n1) * pow2i(n2);
  }

  // log2(m) = z*P(z^2), z=(m-1)/(m+1); max abs err 4.1e-17 on the range
  static F log2_core(F z2) {
    static constexpr double c[] = {
        0x1.71547652b82fep+1, 0x1.ec709dc3a047dp-1, 0x1.2776c50ee39dcp-1,
        0x1.a61762d69394dp-2, 0x1.484afb7a66bd8p-2, 0x1.0ca16062a15d9p-2,
        0x1.c46e1438cca17p-3, 0x1.b592d4127a6a0p-3};
    return poly(z2, c);
  }

  // log2 for x > 0 finite (subnormals handled); x == 0 yields a large finite
  // negative value (~-1087), which downstream exp2 maps to 0 as wanted
  static F log2(F x) {
    U tiny = vlt(x, F(0x1p-1022));
    x = vselect(tiny, x * F(0x1p64), x);
    F ebias = vselect(tiny, F(-64.0 - 1023.0), F(-1023.0));
    U bx = bits(x);
    F e = u52_to_f64(shr<52>(bx)) + ebias;
    F m = from_bits((bx & U(0xFFFFFFFFFFFFFull)) | U(0x3FF0000000000000ull));
    U big = vlt(F(0x1.6a09e667f3bcdp+0), m);  // m > sqrt(2)
    m = vselect(big, m * F(0.5), m);
    e = vselect(big, e + F(1.0), e);
    F z = (m - F(1.0)) / (m + F(1.0));
    return e + z * log2_core(z * z);
  }

  static F log(F x) { return log2(x) * F(0x1.62e42fefa39efp-1); }   // *ln 2
  static F exp(F v) { return exp2(v * F(0x1.71547652b82fep+0)); }   // *log2 e

  // x^y for x >= 0 (x == 0 correct for y > 0)
  static F pow_pos(F x, F y) { return exp2(y * log2(x)); }

  // sin(2*pi*r) = r*S(r^2) on |r| <= 1/8; max abs err 2.8e-16
  static F sin2pi_core(F w) {
    static constexpr double c[] = {
        0x1.921fb54442d18p+2,  -0x1.4abbce625be53p+5, 0x1.466bc6775aad9p+6,
        -0x1.32d2cce62ac22p+6, 0x1.50783485cbd82p+5,  -0x1.e3074b4ff2eeap+3,
        0x1.e8eed12ece021p+1,  -0x1.6c5b8757c228fp-1};
    return poly(w, c);
  }

  // cos(2*pi*r) = C(r^2) on |r| <= 1/8; max abs err 2.1e-17
  static F cos2pi_core(F w) {
    static constexpr double c[] = {
        0x1.0000000000000p+0,  -0x1.3bd3cc9be45dep+4, 0x1.03c1f081b5ac4p+6,
        -0x1.55d3c7e3cbffap+6, 0x1.e1f506891bab3p+5,  -0x1.a6d1f2a203b82p+4,
        0x1.f9d38a3540cb4p+2,  -0x1.b6e24c4300817p+0, 0x1.20c39d8a63c67p-2,
        -0x1.27a36e718d04ep-5};
    return poly(w, c);
  }

  // sin and cos of 2*pi*u via octant reduction; |u| < 2^49
  static void sincos2pi(F u, F* sin_out, F* cos_out) {
    F t = u * F(4.0);
    F q = (t + F(kRoundMagic)) - F(kRoundMagic);
    U k = bits(t + F(kRoundMagic)) & U(3);  // round(4u) mod 4
    F r = u - q * F(0.25);
    F w = r * r;
    F s = r * sin2pi_core(w);
    F c = cos2pi_core(w);
    U swap = shl<63>(k & U(1));                 // odd quadrant: swap roles
    U nsin = shl<62>(k & U(2));                 // k in {2,3}: negate sin
    U ncos = shl<62>((k + U(1)) & U(2));        // k in {1,2}: negate cos
    F s_pre = vselect(swap, c, s);
    F c_pre = vselect(swap, s, c);
    *sin_out = from_bits(bits(s_pre) ^ nsin);
    *cos_out = from_bits(bits(c_pre) ^ ncos);
  }
};

}  // namespace homog::kernels
