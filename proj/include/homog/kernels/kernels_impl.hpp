#pragma once

// Template bodies for every kernel, included by the scalar and AVX2 backend
// TUs. Evaluation order inside each step is fixed explicitly (no reassociation
// freedom is left to the backend), which together with the lane layer's
// correctly-rounded ops makes the two instantiations bit-identical.

#include <cstring>

#include "homog/kernels/kernels.hpp"
#include "homog/kernels/table.hpp"
#include "homog/kernels/vecmath.hpp"

namespace homog::kernels::detail {

// 64x64 -> low 64 multiply from 32-bit pieces (AVX2 has no 64-bit mullo)
template <class B>
typename B::u64 mul64(typename B::u64 a, typename B::u64 b) {
  using U = typename B::u64;
  U lo = mul_lo32(a, b);
  U cross = mul_lo32(shr<32>(a), b) + mul_lo32(a, shr<32>(b));
  return lo + shl<32>(cross);
}

template <class B>
struct kern {
  using F = typename B::f64;
  using U = typename B::u64;
  using V = vm<B>;
  static constexpr int W = B::width;
  static constexpr uint64_t kMask53 = (uint64_t(1) << 53) - 1;

  // ------------------------------------------------------------ map step

  // kind 0: Pomeau-Manneville g(y) = y(1 + 2^g y^g) on [0,1/2), 2y-1 on [1/2,1]
  static F step_pm(const map_params& mp, F y) {
    F p = V::pow_pos(y, F(mp.gamma));
    F left = y + F(mp.pow2gamma) * (y * p);
    F right = (y + y) - F(1.0);
    F g = vselect(vlt(y, F(0.5)), left, right);
    return vmin(vmax(g, F(0.0)), F(1.0));
  }

  // kind 1: odd extension, 1-2y right branch, attractor [-1,1]
  static F step_mpm(const map_params& mp, F y) {
    U sign = bits(y) & U(0x8000000000000000ull);
    F a = vabs(y);
    F p = V::pow_pos(a, F(mp.gamma));
    F left = a + F(mp.pow2gamma) * (a * p);
    F right = F(1.0) - (a + a);
    F g = vselect(vlt(a, F(0.5)), left, right);
    g = from_bits(bits(g) ^ sign);
    return vmin(vmax(g, F(-1.0)), F(1.0));
  }

  // kind 2: doubling via exact 53-bit shift register; dk is the register
  // (y = dk * 2^-53), ds the bitstream PRG state
  static F step_doubling(U* dk, U* ds) {
    U s = *ds + U(0x9E3779B97F4A7C15ull);
    U z = s;
    z = z ^ shr<30>(z);
    z = mul64<B>(z, U(0xBF58476D1CE4E5B9ull));
    z = z ^ shr<27>(z);
    z = mul64<B>(z, U(0x94D049BB133111EBull));
    z = z ^ shr<31>(z);
    U k = (shl<1>(*dk) | shr<63>(z)) & U(kMask53);
    *dk = k;
    *ds = s;
    // u53_to_f64 is the exact integer value; scaling by 2^-53 is also exact
    return V::u53_to_f64(k) * F(0x1p-53);
  }

  template <int KIND>
  static F map_step(const map_params& mp, F y, U* dk, U* ds) {
    if constexpr (KIND == 0) return step_pm(mp, y);
    if constexpr (KIND == 1) return step_mpm(mp, y);
    (void)mp, (void)y;
    return step_doubling(dk, ds);
  }

  // ----------------------------------------------------------- map batch

  template <int KIND>
  static void map_advance_k(const map_params& mp, double* ys, uint64_t* dks,
                            uint64_t* dss, long steps) {
    for (int base = 0; base < kBatch; base += W) {
      F y = F::load(ys + base);
      U dk = U::load(dks + base), ds = U::load(dss + base);
      for (long i = 0; i < steps; ++i) y = map_step<KIND>(mp, y, &dk, &ds);
      y.store(ys + base);
      dk.store(dks + base);
      ds.store(dss + base);
    }
  }

  static void map_advance(const map_params& mp, double* ys, uint64_t* dks,
                          uint64_t* dss, long steps) {
    switch (mp.kind) {
      case 0: map_advance_k<0>(mp, ys, dks, dss, steps); break;
      case 1: map_advance_k<1>(mp, ys, dks, dss, steps); break;
      default: map_advance_k<2>(mp, ys, dks, dss, steps); break;
    }
  }

  template <int KIND>
  static void orbit_fill_k(const map_params& mp, double y0, long n,
                           double* out) {
    U dk(uint64_t(0)), ds(uint64_t(0));
    if constexpr (KIND == 2) {
      uint64_t k, s;
      doubling_init(y0, &k, &s);
      dk = U(k);
      ds = U(s);
    }
    // point 0 is the seed itself; for the doubling register this can sit one
    // ulp off the register value, which carries only 53 fractional bits
    F y(y0);
    for (long i = 0; i < n; ++i) {
      double t[W];
      y.store(t);
      out[i] = t[0];
      y = map_step<KIND>(mp, y, &dk, &ds);
    }
  }

  static void orbit_fill(const map_params& mp, double y0, long n, double* out) {
    switch (mp.kind) {
      case 0: orbit_fill_k<0>(mp, y0, n, out); break;
      case 1: orbit_fill_k<1>(mp, y0, n, out); break;
      default: orbit_fill_k<2>(mp, y0, n, out); break;
    }
  }

  // ------------------------------------------------------ fast-slow batch

  template <int KIND>
  static void fastslow_k(const map_params& mp, const slow_params& sp,
                         double* xs, double* ys, uint64_t* dks, uint64_t* dss,
                         uint64_t* clamps, double* k2sums, double* k2maxs,
                         long steps) {
    for (int base = 0; base < kBatch; base += W) {
      F x = F::load(xs + base), y = F::load(ys + base);
      U dk = U::load(dks + base), ds = U::load(dss + base);
      U clamp = U::load(clamps + base);
      F k2s = F::load(k2sums + base), k2m = F::load(k2maxs + base);
      for (long i = 0; i < steps; ++i) {
        F f0 = y - F(sp.f0_center);
        F h = F(1.0);
        if (sp.h_kind == 1) {
          clamp = clamp + (vlt(x, F(0.0)) & U(1));
          h = vsqrt(vmax(x, F(0.0)));
        }
        F fv = F(0.0);
        if (sp.f_kind == 1) fv = F(sp.fa) * ((F(sp.fb) - x) * (y * y));
        if (sp.f_kind == 2) fv = F(sp.fa);
        if (sp.k2_on) {
          F dev = F(0.0);
          if (sp.f_kind == 1)
            dev = F(sp.fa) * ((F(sp.fb) - x) * (y * y - F(sp.k2_m2)));
          k2s = k2s + dev;
          k2m = vmax(k2m, vabs(k2s));
        }
        x = (x + F(sp.cn) * (h * f0)) + F(sp.cd) * fv;
        y = map_step<KIND>(mp, y, &dk, &ds);
      }
      x.store(xs + base);
      y.store(ys + base);
      dk.store(dks + base);
      ds.store(dss + base);
      clamp.store(clamps + base);
      k2s.store(k2sums + base);
      k2m.store(k2maxs + base);
    }
  }

  static void fastslow_advance(const map_params& mp, const slow_params& sp,
                               double* xs, double* ys, uint64_t* dks,
                               uint64_t* dss, uint64_t* clamps, double* k2sums,
                               double* k2maxs, long steps) {
    switch (mp.kind) {
      case 0: fastslow_k<0>(mp, sp, xs, ys, dks, dss, clamps, k2sums, k2maxs, steps); break;
      case 1: fastslow_k<1>(mp, sp, xs, ys, dks, dss, clamps, k2sums, k2maxs, steps); break;
      default: fastslow_k<2>(mp, sp, xs, ys, dks, dss, clamps, k2sums, k2maxs, steps); break;
    }
  }

  // ------------------------------------------------------------ rng draws

  struct stream_lanes {
    U k0, k1, s0, s1, n;
  };

  static stream_lanes load_streams(const stream_state* st, int base) {
    uint64_t t0[W], t1[W], t2[W], t3[W], t4[W];
    for (int j = 0; j < W; ++j) {
      t0[j] = st[base + j].key0;
      t1[j] = st[base + j].key1;
      t2[j] = st[base + j].salt0;
      t3[j] = st[base + j].salt1;
      t4[j] = st[base + j].n;
    }
    return {U::load(t0), U::load(t1), U::load(t2), U::load(t3), U::load(t4)};
  }

  static void store_positions(stream_state* st, int base, U n) {
    uint64_t t[W];
    n.store(t);
    for (int j = 0; j < W; ++j) st[base + j].n = t[j];
  }

  static void draw_block(stream_lanes& sl, U* lo, U* hi) {
    U c0 = sl.n & U(0xFFFFFFFFull);
    U c1 = shr<32>(sl.n);
    philox<B>::block(c0, c1, sl.s0, sl.s1, sl.k0, sl.k1, lo, hi);
    sl.n = sl.n + U(1);
  }

  // cosine half of a Box-Muller pair; one counter block per call
  static F draw_normal(stream_lanes& sl) {
    U lo, hi;
    draw_block(sl, &lo, &hi);
    F u1 = V::uniform_oo(lo);
    F u2 = V::uniform_oo(hi);
    F r = vsqrt(F(-2.0) * V::log(u1));
    F s, c;
    V::sincos2pi(u2, &s, &c);
    return r * c;
  }

  // Chambers-Mallows-Stuck, alpha in (1,2]; params folded by the caller:
  // cms_b = atan(beta*tan(pi*alpha/2))/alpha, cms_s = (1+beta^2 tan^2)^{1/(2a)}
  static F draw_stable(stream_lanes& sl, double alpha, double cms_b,
                       double cms_s, double inv_alpha, double omaoa) {
    constexpr double kInv2Pi = 0x1.45f306dc9c883p-3;  // 1/(2 pi)
    U lo, hi;
    draw_block(sl, &lo, &hi);
    F u1 = V::uniform_oo(lo);
    F u2 = V::uniform_oo(hi);
    F v = F(0x1.921fb54442d18p+1) * (u1 - F(0.5));  // pi*(u1-1/2)
    F w = F(0.0) - V::log(u2);
    F arg = F(alpha) * (v + F(cms_b));
    F sv, cv, s1, c1, s2, c2;
    V::sincos2pi(v * F(kInv2Pi), &sv, &cv);
    V::sincos2pi(arg * F(kInv2Pi), &s1, &c1);
    V::sincos2pi((v - arg) * F(kInv2Pi), &s2, &c2);
    // cosines are positive in exact math; clamp away rounding at the edges
    F t1 = V::pow_pos(vmax(cv, F(1e-300)), F(0.0) - F(inv_alpha));
    F t2 = V::pow_pos(vmax(c2, F(1e-300)) / w, F(omaoa));
    return F(cms_s) * ((s1 * t1) * t2);
  }

  // ------------------------------------------------------------ SDE loops

  static F drift_eval(int kind, double c0, double c1, double e0, F x) {
    switch (kind) {
      case 0: return F(c0) + F(c1) * x;
      case 1: {
        F u = F(0.5) * x + F(e0);
        return F(c0) / u + F(c1) * u;
      }
      case 3: return F(c0) * V::exp(F(0.0) - x) + F(c1);
      default: return F(0.0);
    }
  }

  static void em_advance(const em_params& p, double* xs, stream_state* st,
                         uint64_t* clamps, double* xmins, double* xmaxs,
                         long steps) {
    for (int base = 0; base < kBatch; base += W) {
      F x = F::load(xs + base);
      U clamp = U::load(clamps + base);
      F xmin = F::load(xmins + base), xmax = F::load(xmaxs + base);
      stream_lanes sl = load_streams(st, base);
      for (long i = 0; i < steps; ++i) {
        F z = draw_normal(sl);
        F xe = x;
        F g = F(1.0);
        if (p.diff_kind == 1) {
          clamp = clamp + (vlt(x, F(0.0)) & U(1));
          xe = vmax(x, F(0.0));  // full truncation: drift sees it too
          g = vsqrt(xe);
        }
        F a = drift_eval(p.drift_kind, p.c0, p.c1, p.e0, xe);
        x = (x + a * F(p.dt)) + F(p.noise_scale) * (g * z);
        xmin = vmin(xmin, x);
        xmax = vmax(xmax, x);
      }
      x.store(xs + base);
      clamp.store(clamps + base);
      xmin.store(xmins + base);
      xmax.store(xmaxs + base);
      store_positions(st, base, sl.n);
    }
  }

  static void heun_advance(const em_params& p, double* xs, stream_state* st,
                           uint64_t* clamps, long steps) {
    for (int base = 0; base < kBatch; base += W) {
      F x = F::load(xs + base);
      U clamp = U::load(clamps + base);
      stream_lanes sl = load_streams(st, base);
      for (long i = 0; i < steps; ++i) {
        F z = draw_normal(sl);
        F dw = F(p.noise_scale) * z;
        F xe = x;
        F g0 = F(1.0);
        if (p.diff_kind == 1) {
          clamp = clamp + (vlt(x, F(0.0)) & U(1));
          xe = vmax(x, F(0.0));
          g0 = vsqrt(xe);
        }
        F a0 = drift_eval(p.drift_kind, p.c0, p.c1, p.e0, xe);
        F xp = (x + a0 * F(p.dt)) + g0 * dw;
        F xpe = xp;
        F g1 = F(1.0);
        if (p.diff_kind == 1) {
          clamp = clamp + (vlt(xp, F(0.0)) & U(1));
          xpe = vmax(xp, F(0.0));
          g1 = vsqrt(xpe);
        }
        F a1 = drift_eval(p.drift_kind, p.c0, p.c1, p.e0, xpe);
        x = (x + F(0.5) * (a0 + a1) * F(p.dt)) + F(0.5) * ((g0 + g1) * dw);
      }
      x.store(xs + base);
      clamp.store(clamps + base);
      store_positions(st, base, sl.n);
    }
  }

  static void em_jump_advance(const em_jump_params& p, double* xs,
                              stream_state* st, double* xmins, double* xmaxs,
                              long steps) {
    for (int base = 0; base < kBatch; base += W) {
      F x = F::load(xs + base);
      F xmin = F::load(xmins + base), xmax = F::load(xmaxs + base);
      stream_lanes sl = load_streams(st, base);
      for (long i = 0; i < steps; ++i) {
        F y = draw_stable(sl, p.alpha, p.cms_b, p.cms_s, p.inv_alpha,
                          p.one_minus_alpha_over_alpha);
        F a = drift_eval(p.drift_kind, p.c0, p.c1, p.e0, x);
        x = (x + a * F(p.dt)) + F(p.dg_scale) * y;
        xmin = vmin(xmin, x);
        xmax = vmax(xmax, x);
      }
      x.store(xs + base);
      xmin.store(xmins + base);
      xmax.store(xmaxs + base);
      store_positions(st, base, sl.n);
    }
  }

  // --------------------------------------------------------- fill kernels

  // lanes hold consecutive counter blocks n+j of one stream
  static stream_lanes fill_lanes(const stream_state* st, long block0) {
    uint64_t t[W];
    for (int j = 0; j < W; ++j) t[j] = st->n + uint64_t(block0) + j;
    return {U(uint64_t(st->key0)), U(uint64_t(st->key1)),
            U(uint64_t(st->salt0)), U(uint64_t(st->salt1)), U::load(t)};
  }

  static void normals_fill(stream_state* st, double* out, long n) {
    long nblocks = (n + 1) / 2;
    for (long j = 0; j < nblocks; j += W) {
      stream_lanes sl = fill_lanes(st, j);
      U lo, hi;
      draw_block(sl, &lo, &hi);
      F u1 = V::uniform_oo(lo);
      F u2 = V::uniform_oo(hi);
      F r = vsqrt(F(-2.0) * V::log(u1));
      F s, c;
      V::sincos2pi(u2, &s, &c);
      F z0 = r * c, z1 = r * s;
      double za[W], zb[W];
      z0.store(za);
      z1.store(zb);
      for (int l = 0; l < W && j + l < nblocks; ++l) {
        long idx = 2 * (j + l);
        out[idx] = za[l];
        if (idx + 1 < n) out[idx + 1] = zb[l];
      }
    }
    st->n += uint64_t(nblocks);
  }

  static void uniform_fill(stream_state* st, double* out, long n) {
    long nblocks = (n + 1) / 2;
    for (long j = 0; j < nblocks; j += W) {
      stream_lanes sl = fill_lanes(st, j);
      U lo, hi;
      draw_block(sl, &lo, &hi);
      F u1 = V::uniform_oo(lo);
      F u2 = V::uniform_oo(hi);
      double ua[W], ub[W];
      u1.store(ua);
      u2.store(ub);
      for (int l = 0; l < W && j + l < nblocks; ++l) {
        long idx = 2 * (j + l);
        out[idx] = ua[l];
        if (idx + 1 < n) out[idx + 1] = ub[l];
      }
    }
    st->n += uint64_t(nblocks);
  }

  static void stable_fill(const stable_params& p, stream_state* st,
                          double* out, long n) {
    for (long j = 0; j < n; j += W) {
      stream_lanes sl = fill_lanes(st, j);
      F y = draw_stable(sl, p.alpha, p.cms_b, p.cms_s, p.inv_alpha,
                        p.one_minus_alpha_over_alpha);
      y = F(p.scale) * y;
      double t[W];
      y.store(t);
      for (int l = 0; l < W && j + l < n; ++l) out[j + l] = t[l];
    }
    st->n += uint64_t(n);
  }

  static void philox_fill(const stream_state& st, uint64_t* out_lo,
                          uint64_t* out_hi, long nblocks) {
    for (long j = 0; j < nblocks; j += W) {
      stream_lanes sl = fill_lanes(&st, j);
      U lo, hi;
      draw_block(sl, &lo, &hi);
      uint64_t tl[W], th[W];
      lo.store(tl);
      hi.store(th);
      for (int l = 0; l < W && j + l < nblocks; ++l) {
        out_lo[j + l] = tl[l];
        out_hi[j + l] = th[l];
      }
    }
  }

  // ---------------------------------------------------- reduction kernels

  // i-blocked so both orbit segments stay in L2 across the lag sweep
  static constexpr long kAutocovBlock = 1 << 17;

  static void autocov_partials(const double* x, long n, long nlags,
                               double* acc) {
    for (long b = 0; b < n; b += kAutocovBlock) {
      long bend = b + kAutocovBlock < n ? b + kAutocovBlock : n;
      for (long l = 0; l <= nlags; ++l) {
        long limit = n - l < bend ? n - l : bend;
        double part[4] = {0, 0, 0, 0};
        long i = b;
        if constexpr (W == 4) {
          F a = F(0.0);
          for (; i + 4 <= limit; i += 4)
            a = a + F::load(x + i) * F::load(x + i + l);
          a.store(part);
        }
        for (; i < limit; ++i) part[i & 3] += x[i] * x[i + l];
        for (int j = 0; j < 4; ++j) acc[4 * l + j] += part[j];
      }
    }
  }

  static void sum_partials(const double* x, long n, double* acc) {
    double part[4] = {0, 0, 0, 0};
    long i = 0;
    if constexpr (W == 4) {
      F a = F(0.0);
      for (; i + 4 <= n; i += 4) a = a + F::load(x + i);
      a.store(part);
    }
    for (; i < n; ++i) part[i & 3] += x[i];
    for (int j = 0; j < 4; ++j) acc[j] += part[j];
  }

  // ------------------------------------------------- vecmath test exports

  static void vm_unary(F (*fn)(F), const double* in, double* out, long n) {
    long i = 0;
    for (; i + W <= n; i += W) fn(F::load(in + i)).store(out + i);
    for (; i < n; ++i) {
      double t[W];
      fn(F(in[i])).store(t);  // splat; lane 0 carries the value
      out[i] = t[0];
    }
  }

  static void vm_log2(const double* in, double* out, long n) {
    vm_unary(&V::log2, in, out, n);
  }
  static void vm_exp2(const double* in, double* out, long n) {
    vm_unary(&V::exp2, in, out, n);
  }
  static void vm_pow_pos(const double* xin, const double* yin, double* out,
                         long n) {
    long i = 0;
    for (; i + W <= n; i += W)
      V::pow_pos(F::load(xin + i), F::load(yin + i)).store(out + i);
    for (; i < n; ++i) {
      double t[W];
      V::pow_pos(F(xin[i]), F(yin[i])).store(t);
      out[i] = t[0];
    }
  }
  static void vm_sincos2pi(const double* in, double* sin_out, double* cos_out,
                           long n) {
    long i = 0;
    for (; i + W <= n; i += W) {
      F s, c;
      V::sincos2pi(F::load(in + i), &s, &c);
      s.store(sin_out + i);
      c.store(cos_out + i);
    }
    for (; i < n; ++i) {
      F s, c;
      double ts[W], tc[W];
      V::sincos2pi(F(in[i]), &s, &c);
      s.store(ts);
      c.store(tc);
      sin_out[i] = ts[0];
      cos_out[i] = tc[0];
    }
  }
};

template <class B>
kernel_table make_table() {
  using K = kern<B>;
  kernel_table t;
  t.map_advance = &K::map_advance;
  t.fastslow_advance = &K::fastslow_advance;
  t.em_advance = &K::em_advance;
  t.heun_advance = &K::heun_advance;
  t.em_jump_advance = &K::em_jump_advance;
  t.normals_fill = &K::normals_fill;
  t.uniform_fill = &K::uniform_fill;
  t.stable_fill = &K::stable_fill;
  t.philox_fill = &K::philox_fill;
  t.autocov_partials = &K::autocov_partials;
  t.sum_partials = &K::sum_partials;
  t.vm_log2 = &K::vm_log2;
  t.vm_exp2 = &K::vm_exp2;
  t.vm_pow_pos = &K::vm_pow_pos;
  t.vm_sincos2pi = &K::vm_sincos2pi;
  return t;
}

}  // namespace homog::kernels::detail
