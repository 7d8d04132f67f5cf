#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "homog/kernels/kernels.hpp"
#include "homog/kernels/lane.hpp"
#include "homog/kernels/philox.hpp"
#include "homog/kernels/vecmath.hpp"

using namespace homog::kernels;

namespace {

uint64_t pack(uint32_t lo, uint32_t hi) {
  return uint64_t(lo) | (uint64_t(hi) << 32);
}

uint64_t bits_of(double x) {
  uint64_t u;
  std::memcpy(&u, &x, 8);
  return u;
}

// tiny deterministic generator for test inputs (not the library's rng)
struct mixer {
  uint64_t s = 0x243F6A8885A308D3ull;
  uint64_t next() { return s = splitmix_mix(s + 0x9E3779B97F4A7C15ull); }
  double unit() { return double(next() >> 11) * 0x1p-53; }
};

bool avx2_on() { return backend_available(backend_kind::avx2); }

struct backend_guard {
  backend_kind saved;
  explicit backend_guard(backend_kind b) : saved(active_backend()) {
    set_backend(b);
  }
  ~backend_guard() { set_backend(saved); }
};

}  // namespace

// ------------------------------------------------------------ philox core

TEST_CASE("philox4x32-10 known-answer vectors") {
  using P = philox<scalar_backend>;
  u64x1 lo, hi;

  P::block(u64x1(0), u64x1(0), u64x1(0), u64x1(0), u64x1(0), u64x1(0), &lo,
           &hi);
  CHECK(lo.v == pack(0x6627e8d5u, 0xe169c58du));
  CHECK(hi.v == pack(0xbc57ac4cu, 0x9b00dbd8u));

  u64x1 f(0xFFFFFFFFull);
  P::block(f, f, f, f, f, f, &lo, &hi);
  CHECK(lo.v == pack(0x408f276du, 0x41c83b0eu));
  CHECK(hi.v == pack(0xa20bc7c6u, 0x6d5451fdu));

  P::block(u64x1(0x243f6a88ull), u64x1(0x85a308d3ull), u64x1(0x13198a2eull),
           u64x1(0x03707344ull), u64x1(0xa4093822ull), u64x1(0x299f31d0ull),
           &lo, &hi);
  CHECK(lo.v == pack(0xd16cfe09u, 0x94fdccebu));
  CHECK(hi.v == pack(0x5001e420u, 0x24126ea1u));
}

TEST_CASE("stream derivation is the frozen splitmix hash") {
  stream_state a = derive_stream(0, 0);
  CHECK(a.key0 == 0x7b1dcdafu);
  CHECK(a.key1 == 0xe220a839u);
  CHECK(a.salt0 == 0xa1b965f4u);
  CHECK(a.salt1 == 0x6e789e6au);
  CHECK(a.n == 0);

  stream_state b = derive_stream(42, 7);
  CHECK(b.key0 == 0x02e78edcu);
  CHECK(b.key1 == 0xaa47e31cu);
  CHECK(b.salt0 == 0x4d7c33f2u);
  CHECK(b.salt1 == 0x341452c5u);
}

TEST_CASE("philox_fill emits the frozen keyed blocks") {
  uint64_t lo[3], hi[3];

  philox_fill(derive_stream(0, 0), lo, hi, 3);
  CHECK(lo[0] == 0xb5e00b04479f819aull);
  CHECK(hi[0] == 0xdb7280f8639d1c99ull);
  CHECK(lo[1] == 0xd61c98403117005aull);
  CHECK(hi[1] == 0x44397cbfa6ea7e4aull);
  CHECK(lo[2] == 0xd94adfe274007346ull);
  CHECK(hi[2] == 0xb1879ae45448423full);

  philox_fill(derive_stream(42, 7), lo, hi, 3);
  CHECK(lo[0] == 0x37eb252f0a97dffeull);
  CHECK(hi[0] == 0xf003d78e9717e26dull);
  CHECK(lo[1] == 0xedc41971f1fa4362ull);
  CHECK(hi[1] == 0xf6dcf89b1be578daull);
  CHECK(lo[2] == 0xb4a64a1d4c3ab887ull);
  CHECK(hi[2] == 0x9772829e126a277dull);
}

TEST_CASE("streams with distinct indices never collide in key+salt") {
  std::vector<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) {
    stream_state s = derive_stream(123, i);
    seen.push_back(pack(s.key0, s.key1) ^ (pack(s.salt0, s.salt1) * 3));
  }
  for (size_t i = 0; i < seen.size(); ++i)
    for (size_t j = i + 1; j < seen.size(); ++j) REQUIRE(seen[i] != seen[j]);
}

// --------------------------------------------------------------- vecmath

TEST_CASE("log2/exp2 match libm to a few ulp") {
  mixer mx;
  std::vector<double> xs, vs;
  for (int i = 0; i < 20000; ++i) {
    xs.push_back(std::exp((mx.unit() - 0.5) * 1400.0));  // wide lognormal-ish
    vs.push_back((mx.unit() - 0.5) * 2000.0);
  }
  for (double e : {1e-300, 1e-12, 0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 1e12, 1e300})
    xs.push_back(e);
  for (double e : {-1074.0, -1022.5, -3.25, -0.5, 0.0, 0.5, 3.25, 1023.5})
    vs.push_back(e);

  std::vector<double> l2(xs.size()), e2(vs.size());
  vm_log2(xs.data(), l2.data(), long(xs.size()));
  vm_exp2(vs.data(), e2.data(), long(vs.size()));

  for (size_t i = 0; i < xs.size(); ++i) {
    double ref = std::log2(xs[i]);
    double tol = std::max(4.0 * std::abs(ref) * 0x1p-52, 0x1p-1070);
    CHECK(std::abs(l2[i] - ref) <= tol);
  }
  for (size_t i = 0; i < vs.size(); ++i) {
    double ref = std::exp2(vs[i]);
    // subnormal results round at the subnormal spacing, not 2^-52 relative
    double tol = std::max(4.0 * ref * 0x1p-52, 4.5e-308 * 0x1p-50);
    CHECK(std::abs(e2[i] - ref) <= tol);
  }
}

TEST_CASE("exp2 saturates cleanly at the range edges") {
  double v[4] = {1090.0, -1140.0, 0.0, 1.0};
  double out[4];
  vm_exp2(v, out, 4);
  CHECK(std::isinf(out[0]));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 1.0);
  CHECK(out[3] == 2.0);
}

TEST_CASE("pow_pos matches libm pow on positive bases") {
  mixer mx;
  std::vector<double> xs, ys, out;
  for (int i = 0; i < 20000; ++i) {
    xs.push_back(std::exp((mx.unit() - 0.5) * 20.0));
    ys.push_back((mx.unit() - 0.5) * 8.0);
  }
  xs.push_back(0.25);  ys.push_back(0.5);
  xs.push_back(1.0);   ys.push_back(123.0);
  xs.push_back(731.7); ys.push_back(0.0);
  out.resize(xs.size());
  vm_pow_pos(xs.data(), ys.data(), out.data(), long(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    double ref = std::pow(xs[i], ys[i]);
    // one rounding in y*log2(x) amplified by |y log2 x| <= ~60 here
    CHECK(std::abs(out[i] - ref) <= 200.0 * std::abs(ref) * 0x1p-52);
  }
}

TEST_CASE("sincos2pi matches extended-precision sin/cos(2 pi u)") {
  mixer mx;
  std::vector<double> us;
  for (int i = 0; i < 20000; ++i) us.push_back((mx.unit() - 0.5) * 8.0);
  for (double e : {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0})
    us.push_back(e);
  std::vector<double> s(us.size()), c(us.size());
  vm_sincos2pi(us.data(), s.data(), c.data(), long(us.size()));
  const long double two_pi = 6.283185307179586476925286766559L;
  for (size_t i = 0; i < us.size(); ++i) {
    double rs = double(sinl(two_pi * (long double)us[i]));
    double rc = double(cosl(two_pi * (long double)us[i]));
    CHECK(std::abs(s[i] - rs) <= 4e-16);
    CHECK(std::abs(c[i] - rc) <= 4e-16);
  }
}

TEST_CASE("sincos2pi is exact at the quarter points") {
  double u[4] = {0.0, 0.25, 0.5, 0.75};
  double s[4], c[4];
  vm_sincos2pi(u, s, c, 4);
  CHECK(s[0] == 0.0); CHECK(c[0] == 1.0);
  CHECK(s[1] == 1.0); CHECK(std::abs(c[1]) == 0.0);
  CHECK(std::abs(s[2]) == 0.0); CHECK(c[2] == -1.0);
  CHECK(s[3] == -1.0); CHECK(std::abs(c[3]) == 0.0);
}

// ----------------------------------------------------------- fill kernels

TEST_CASE("uniform_fill lands strictly inside (0,1) with mean 1/2") {
  stream_state st = derive_stream(7, 0);
  const long n = 1000001;  // odd length exercises the tail block
  std::vector<double> u(n);
  uniform_fill(&st, u.data(), n);
  CHECK(st.n == uint64_t((n + 1) / 2));
  double sum = 0.0, mn = 1.0, mx = 0.0;
  for (double v : u) {
    sum += v;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  CHECK(mn > 0.0);
  CHECK(mx < 1.0);
  // se of the mean is 1/sqrt(12 n) ~ 2.9e-4
  CHECK(std::abs(sum / double(n) - 0.5) < 4.0 * 2.9e-4);
}

TEST_CASE("normals_fill moments match a standard normal") {
  stream_state st = derive_stream(11, 3);
  const long n = 2000000;
  std::vector<double> z(n);
  normals_fill(&st, z.data(), n);
  double m1 = 0, m2 = 0, m4 = 0;
  for (double v : z) {
    m1 += v;
    m2 += v * v;
    m4 += v * v * v * v;
  }
  m1 /= double(n); m2 /= double(n); m4 /= double(n);
  CHECK(std::abs(m1) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / double(n)));
  CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / double(n)));
}

TEST_CASE("stable_fill at alpha=2 is N(0,2)") {
  stable_params p{};
  p.alpha = 2.0;
  p.cms_b = 0.0;  // beta irrelevant at alpha=2: tan(pi) folds to ~0
  p.cms_s = 1.0;
  p.inv_alpha = 0.5;
  p.one_minus_alpha_over_alpha = -0.5;
  p.scale = 1.0;
  stream_state st = derive_stream(5, 9);
  const long n = 1000000;
  std::vector<double> x(n);
  stable_fill(p, &st, x.data(), n);
  double m1 = 0, m2 = 0;
  for (double v : x) {
    m1 += v;
    m2 += v * v;
  }
  m1 /= double(n); m2 /= double(n);
  CHECK(std::abs(m1) < 4.0 * std::sqrt(2.0 / double(n)));
  CHECK(std::abs(m2 - 2.0) < 5.0 * std::sqrt(8.0 / double(n)));
}

// ------------------------------------------------------------- fast maps

TEST_CASE("doubling lane reproduces a plain-integer reference") {
  double y[kBatch];
  uint64_t dk[kBatch], ds[kBatch];
  for (int l = 0; l < kBatch; ++l) {
    y[l] = 0.1 + 0.2 * l;
    doubling_init(y[l], &dk[l], &ds[l]);
  }
  uint64_t rk[kBatch], rs[kBatch];
  std::memcpy(rk, dk, sizeof rk);
  std::memcpy(rs, ds, sizeof rs);

  map_params mp{2, 0.0, 1.0};
  map_advance(mp, y, dk, ds, 257);

  for (int l = 0; l < kBatch; ++l) {
    uint64_t k = rk[l], s = rs[l];
    for (int i = 0; i < 257; ++i) {
      s += 0x9E3779B97F4A7C15ull;
      uint64_t z = splitmix_mix(s);  // same mix, scalar reference
      k = ((k << 1) | (z >> 63)) & ((uint64_t(1) << 53) - 1);
    }
    CHECK(dk[l] == k);
    CHECK(ds[l] == s);
    CHECK(y[l] == double(k) * 0x1p-53);
  }
}

TEST_CASE("doubling orbit from 0.3 walks 0.3, 0.6, 0.2") {
  map_params mp{2, 0.0, 1.0};
  double out[3];
  orbit_fill(mp, 0.3, 3, out);
  CHECK(out[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("doubling register keeps 53 fresh bits forever") {
  // float-arithmetic doubling collapses to 0 after ~53 steps; the register
  // variant must keep producing nondegenerate points
  map_params mp{2, 0.0, 1.0};
  std::vector<double> out(2000);
  orbit_fill(mp, 0.37, 2000, out.data());
  int nonzero_tail = 0;
  for (size_t i = 1000; i < 2000; ++i)
    if (out[i] != 0.0 && out[i] != 0.5) ++nonzero_tail;
  CHECK(nonzero_tail > 990);
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= double(out.size());
  CHECK(std::abs(mean - 0.5) < 0.05);
}

TEST_CASE("pm orbit matches the closed-form first step") {
  // g(0.25) at gamma=0.5: 0.25 * (1 + 2^0.5 * 0.25^0.5) = 0.25 + 0.125*2^1.5
  map_params mp{0, 0.5, std::exp2(0.5)};
  double out[2];
  orbit_fill(mp, 0.25, 2, out);
  CHECK(out[0] == 0.25);
  CHECK(out[1] == doctest::Approx(0.42677669529663687).epsilon(1e-14));

  // right branch: g(0.75) = 0.5; branch point itself goes right: g(0.5) = 0
  orbit_fill(mp, 0.75, 2, out);
  CHECK(out[1] == 0.5);
  orbit_fill(mp, 0.5, 2, out);
  CHECK(out[1] == 0.0);
}

TEST_CASE("modified pm is the odd extension with folded right branch") {
  map_params mp{1, 0.1, std::exp2(0.1)};
  double out[2];
  orbit_fill(mp, 0.75, 2, out);
  CHECK(out[1] == doctest::Approx(-0.5).epsilon(1e-14));

  // oddness is exact at the bit level: g(-y) = -g(y)
  map_params mpo{1, 0.33, std::exp2(0.33)};
  mixer mx;
  for (int i = 0; i < 1000; ++i) {
    double yp = mx.unit();
    double a[2], b[2];
    orbit_fill(mpo, yp, 2, a);
    orbit_fill(mpo, -yp, 2, b);
    REQUIRE(bits_of(b[1]) == bits_of(-a[1]));
  }
}

TEST_CASE("pm at gamma=0 is the doubling formula on [0,1/2)") {
  map_params mp{0, 0.0, 1.0};
  mixer mx;
  for (int i = 0; i < 1000; ++i) {
    double y = mx.unit() * 0.4999;
    double out[2];
    orbit_fill(mp, y, 2, out);
    REQUIRE(out[1] == doctest::Approx(2.0 * y).epsilon(1e-15));
  }
}

TEST_CASE("map steps never leave the attractor") {
  mixer mx;
  map_params pm{0, 0.9, std::exp2(0.9)};
  map_params mpm{1, 0.9, std::exp2(0.9)};
  for (int i = 0; i < 100000; ++i) {
    double y = mx.unit();
    double out[2];
    orbit_fill(pm, y, 2, out);
    REQUIRE(out[1] >= 0.0);
    REQUIRE(out[1] <= 1.0);
    orbit_fill(mpm, 2.0 * y - 1.0, 2, out);
    REQUIRE(out[1] >= -1.0);
    REQUIRE(out[1] <= 1.0);
  }
}

// ------------------------------------------------------- backend equality

TEST_CASE("scalar and avx2 backends agree bit for bit") {
  if (!avx2_on()) {
    MESSAGE("avx2 unavailable on this host; equality suite skipped");
    return;
  }

  auto both = [](auto&& fn) {
    backend_guard g1(backend_kind::scalar);
    auto a = fn();
    backend_guard g2(backend_kind::avx2);
    auto b = fn();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(bits_of(a[i]) == bits_of(b[i]));
  };

  SUBCASE("vecmath exports") {
    mixer mx;
    const long n = 4099;  // not a multiple of 4: exercises tails
    std::vector<double> x(n), y(n);
    for (long i = 0; i < n; ++i) {
      x[i] = std::exp((mx.unit() - 0.5) * 60.0);
      y[i] = (mx.unit() - 0.5) * 8.0;
    }
    both([&] {
      std::vector<double> o(n);
      vm_log2(x.data(), o.data(), n);
      return o;
    });
    both([&] {
      std::vector<double> o(n);
      vm_exp2(y.data(), o.data(), n);
      return o;
    });
    both([&] {
      std::vector<double> o(n);
      vm_pow_pos(x.data(), y.data(), o.data(), n);
      return o;
    });
    both([&] {
      std::vector<double> o(2 * n);
      vm_sincos2pi(y.data(), o.data(), o.data() + n, n);
      return o;
    });
  }

  SUBCASE("philox blocks") {
    backend_guard g1(backend_kind::scalar);
    std::vector<uint64_t> lo1(1001), hi1(1001);
    philox_fill(derive_stream(3, 17), lo1.data(), hi1.data(), 1001);
    backend_guard g2(backend_kind::avx2);
    std::vector<uint64_t> lo2(1001), hi2(1001);
    philox_fill(derive_stream(3, 17), lo2.data(), hi2.data(), 1001);
    REQUIRE(lo1 == lo2);
    REQUIRE(hi1 == hi2);
  }

  SUBCASE("fill kernels") {
    both([&] {
      stream_state st = derive_stream(19, 2);
      std::vector<double> o(10001);
      normals_fill(&st, o.data(), 10001);
      o.push_back(double(st.n));
      return o;
    });
    both([&] {
      stream_state st = derive_stream(19, 2);
      std::vector<double> o(10001);
      uniform_fill(&st, o.data(), 10001);
      return o;
    });
    both([&] {
      stable_params p{1.25, 0.3, 1.1, 0.8, -0.2, 1.0};
      stream_state st = derive_stream(23, 5);
      std::vector<double> o(10001);
      stable_fill(p, &st, o.data(), 10001);
      return o;
    });
  }

  SUBCASE("map and fast-slow loops") {
    for (int kind : {0, 1, 2}) {
      map_params mp{kind, 0.4, std::exp2(0.4)};
      both([&] {
        double y[kBatch];
        uint64_t dk[kBatch], ds[kBatch];
        for (int l = 0; l < kBatch; ++l) {
          y[l] = 0.11 + 0.2 * l;
          if (kind == 1) y[l] = y[l] * 2.0 - 1.0;
          doubling_init(std::abs(y[l]), &dk[l], &ds[l]);
          if (kind == 2) y[l] = double(dk[l]) * 0x1p-53;
        }
        map_advance(mp, y, dk, ds, 1000);
        return std::vector<double>(y, y + kBatch);
      });
    }

    map_params mp{1, 0.1, std::exp2(0.1)};
    slow_params sp{};
    sp.cn = 0.05;
    sp.cd = 0.0025;
    sp.f0_center = 0.0;
    sp.h_kind = 1;
    sp.f_kind = 1;
    sp.fa = 0.1595;
    sp.fb = 0.75;
    sp.k2_on = 1;
    sp.k2_m2 = 0.319;
    both([&] {
      double x[kBatch] = {1.0, 0.5, 0.25, 2.0};
      double y[kBatch] = {0.3, -0.7, 0.11, 0.93};
      uint64_t dk[kBatch] = {0, 0, 0, 0}, ds[kBatch] = {0, 0, 0, 0};
      uint64_t cl[kBatch] = {0, 0, 0, 0};
      double k2s[kBatch] = {0, 0, 0, 0}, k2m[kBatch] = {0, 0, 0, 0};
      fastslow_advance(mp, sp, x, y, dk, ds, cl, k2s, k2m, 5000);
      std::vector<double> o(x, x + kBatch);
      o.insert(o.end(), y, y + kBatch);
      o.insert(o.end(), k2s, k2s + kBatch);
      o.insert(o.end(), k2m, k2m + kBatch);
      for (int l = 0; l < kBatch; ++l) o.push_back(double(cl[l]));
      return o;
    });
  }

  SUBCASE("sde loops") {
    em_params p{};
    p.drift_kind = 0;
    p.c0 = 0.1595 * 0.75;
    p.c1 = -0.1595;
    p.diff_kind = 1;
    p.dt = 0.001;
    p.noise_scale = std::sqrt(0.085) * std::sqrt(0.001);
    both([&] {
      double x[kBatch] = {1.0, 0.25, 0.8, 1.7};
      double mn[kBatch], mx[kBatch];
      std::memcpy(mn, x, sizeof mn);
      std::memcpy(mx, x, sizeof mx);
      uint64_t cl[kBatch] = {0, 0, 0, 0};
      stream_state st[kBatch];
      for (int l = 0; l < kBatch; ++l) st[l] = derive_stream(31, uint64_t(l));
      em_advance(p, x, st, cl, mn, mx, 20000);
      std::vector<double> o(x, x + kBatch);
      o.insert(o.end(), mn, mn + kBatch);
      o.insert(o.end(), mx, mx + kBatch);
      for (int l = 0; l < kBatch; ++l) o.push_back(double(st[l].n));
      for (int l = 0; l < kBatch; ++l) o.push_back(double(cl[l]));
      return o;
    });
    both([&] {
      double x[kBatch] = {1.0, 0.25, 0.8, 1.7};
      uint64_t cl[kBatch] = {0, 0, 0, 0};
      stream_state st[kBatch];
      for (int l = 0; l < kBatch; ++l) st[l] = derive_stream(31, uint64_t(l));
      heun_advance(p, x, st, cl, 20000);
      std::vector<double> o(x, x + kBatch);
      for (int l = 0; l < kBatch; ++l) o.push_back(double(st[l].n));
      for (int l = 0; l < kBatch; ++l) o.push_back(double(cl[l]));
      return o;
    });

    em_jump_params jp{};
    jp.drift_kind = 0;
    jp.c0 = 0.0;
    jp.c1 = -1.0;
    jp.dt = 0.001;
    jp.alpha = 1.25;
    jp.cms_b = std::atan(std::tan(M_PI * 1.25 / 2.0)) / 1.25;
    jp.cms_s = std::pow(1.0 + std::pow(std::tan(M_PI * 1.25 / 2.0), 2.0),
                        1.0 / (2.0 * 1.25));
    jp.inv_alpha = 1.0 / 1.25;
    jp.one_minus_alpha_over_alpha = (1.0 - 1.25) / 1.25;
    jp.dg_scale = std::pow(0.001, 0.8);
    both([&] {
      double x[kBatch] = {1.0, 0.25, 0.8, 1.7};
      double mn[kBatch], mx[kBatch];
      std::memcpy(mn, x, sizeof mn);
      std::memcpy(mx, x, sizeof mx);
      stream_state st[kBatch];
      for (int l = 0; l < kBatch; ++l) st[l] = derive_stream(37, uint64_t(l));
      em_jump_advance(jp, x, st, mn, mx, 20000);
      std::vector<double> o(x, x + kBatch);
      o.insert(o.end(), mn, mn + kBatch);
      o.insert(o.end(), mx, mx + kBatch);
      return o;
    });
  }

  SUBCASE("reductions") {
    mixer mx;
    const long n = 300007;  // awkward length: blocked + unaligned tails
    std::vector<double> x(n);
    for (long i = 0; i < n; ++i) x[i] = mx.unit() - 0.5;
    both([&] {
      std::vector<double> acc(4 * 33, 0.0);
      autocov_partials(x.data(), n, 32, acc.data());
      return acc;
    });
    both([&] {
      std::vector<double> acc(4, 0.0);
      sum_partials(x.data(), n, acc.data());
      return acc;
    });
  }
}

TEST_CASE("reduction partials add up to the naive sums") {
  mixer mx;
  const long n = 5001;
  std::vector<double> x(n);
  for (long i = 0; i < n; ++i) x[i] = mx.unit() - 0.5;

  std::vector<double> acc(4 * 4, 0.0);
  autocov_partials(x.data(), n, 3, acc.data());
  for (long l = 0; l <= 3; ++l) {
    double naive = 0.0;
    for (long i = 0; i + l < n; ++i) naive += x[i] * x[i + l];
    double got = (acc[4 * l] + acc[4 * l + 1]) + (acc[4 * l + 2] + acc[4 * l + 3]);
    CHECK(got == doctest::Approx(naive).epsilon(1e-12));
  }

  std::vector<double> sacc(4, 0.0);
  sum_partials(x.data(), n, sacc.data());
  double naive = 0.0;
  for (long i = 0; i < n; ++i) naive += x[i];
  CHECK((sacc[0] + sacc[1]) + (sacc[2] + sacc[3]) ==
        doctest::Approx(naive).epsilon(1e-10));
}

TEST_CASE("backend dispatch honors overrides and availability") {
  CHECK(backend_available(backend_kind::scalar));
  backend_kind initial = active_backend();
  set_backend(backend_kind::scalar);
  CHECK(active_backend() == backend_kind::scalar);
  if (avx2_on()) {
    set_backend(backend_kind::avx2);
    CHECK(active_backend() == backend_kind::avx2);
  }
  set_backend(initial);
  CHECK(std::strcmp(backend_name(backend_kind::scalar), "scalar") == 0);
  CHECK(std::strcmp(backend_name(backend_kind::avx2), "avx2") == 0);
}
