#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "homog/sde.hpp"

using namespace homog;

namespace {

h_function sqrt_h() {
  h_function h;
  h.form = h_function::form_t::power;
  h.p = 0.5;
  return h;
}

h_function identity_h() {
  h_function h;
  h.form = h_function::form_t::identity;
  return h;
}

// the affine drift and sqrt diffusion used across the suite
sde_spec base_spec() {
  sde_spec s;
  s.drift.form = drift_spec::form_t::affine;
  s.drift.c0 = 0.1595 * 0.75;
  s.drift.c1 = -0.1595;
  s.diffusion = sqrt_h();
  s.sigma = std::sqrt(0.085);
  s.xi = 1.0;
  s.sigma2 = 0.085;
  s.f0_second_moment = 0.319;
  return s;
}

bool em_equal(const kernels::em_params& a, const kernels::em_params& b) {
  return a.drift_kind == b.drift_kind && a.c0 == b.c0 && a.c1 == b.c1 &&
         a.e0 == b.e0 && a.diff_kind == b.diff_kind && a.dt == b.dt &&
         a.noise_scale == b.noise_scale;
}

}  // namespace

TEST_CASE("builtin forms lower onto the batch integrator") {
  auto s = base_spec();
  s.interp = interpretation::ito;
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::em);
  CHECK(L.em.drift_kind == 0);
  CHECK(L.em.c0 == s.drift.c0);
  CHECK(L.em.c1 == s.drift.c1);
  CHECK(L.em.diff_kind == 1);
  CHECK(L.em.noise_scale == s.sigma * std::sqrt(0.01));
  CHECK(!L.transformed);

  s.interp = interpretation::stratonovich;
  CHECK(lower_sde(s, 0.01).scheme == lowered_sde::scheme_t::heun);
}

TEST_CASE("custom drift routes to the scalar fallback") {
  auto s = base_spec();
  s.drift.form = drift_spec::form_t::custom;
  s.drift.fn = [](double x) { return -x * x * x; };
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::scalar_em);
  CHECK(L.drift(2.0) == -8.0);
}

TEST_CASE("drift-corrected lowering folds a constant into the affine term") {
  auto s = base_spec();
  s.interp = interpretation::drift_corrected;
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::em);
  // (1/4)(sigma2 - m2) with sqrt diffusion
  CHECK(L.em.c0 == doctest::Approx(s.drift.c0 + 0.25 * (0.085 - 0.319)).epsilon(1e-15));
  CHECK(L.em.c1 == s.drift.c1);
}

TEST_CASE("matched variances make drift-corrected identical to ito, bit for bit") {
  auto s = base_spec();
  s.sigma2 = 0.319;
  s.f0_second_moment = 0.319;
  s.interp = interpretation::ito;
  auto Li = lower_sde(s, 0.01);
  s.interp = interpretation::drift_corrected;
  auto Lc = lower_sde(s, 0.01);
  CHECK(em_equal(Li.em, Lc.em));

  rng_stream ra(55, 0), rb(55, 0);
  s.interp = interpretation::ito;
  auto pa = integrate_path(s, 2.0, 0.01, ra);
  s.interp = interpretation::drift_corrected;
  auto pb = integrate_path(s, 2.0, 0.01, rb);
  REQUIRE(pa.values.size() == pb.values.size());
  for (std::size_t i = 0; i < pa.values.size(); ++i)
    CHECK(pa.values[i] == pb.values[i]);
}

TEST_CASE("jump noise demands the Marcus interpretation") {
  auto s = base_spec();
  s.noise.kind = noise_spec::kind_t::stable;
  s.noise.exponent = 4.0 / 3.0;
  for (auto i : {interpretation::ito, interpretation::stratonovich,
                 interpretation::drift_corrected}) {
    s.interp = i;
    try {
      (void)lower_sde(s, 0.01);
      FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()) == "Marcus integral required for jump noise");
    }
  }
  s.interp = interpretation::marcus_via_transform;
  CHECK_NOTHROW((void)lower_sde(s, 0.01));
  s.noise.exponent = 2.0;  // boundary excluded for jumps
  CHECK_THROWS_AS((void)lower_sde(s, 0.01), std::invalid_argument);
  s.noise.exponent = 4.0 / 3.0;
  s.noise.skew = 1.5;
  CHECK_THROWS_AS((void)lower_sde(s, 0.01), std::invalid_argument);
}

TEST_CASE("marcus brownian lowering produces the reciprocal-affine z drift") {
  auto s = base_spec();
  s.interp = interpretation::marcus_via_transform;
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::em);
  CHECK(L.transformed);
  CHECK(L.em.drift_kind == 1);
  CHECK(L.em.diff_kind == 0);
  // c0 = alpha beta - m2/4, c1 = -alpha, u anchored at sqrt(xi)
  CHECK(L.em.c0 == doctest::Approx(0.1595 * 0.75 - 0.25 * 0.319).epsilon(1e-15));
  CHECK(L.em.c1 == s.drift.c1);
  CHECK(L.em.e0 == 1.0);
  CHECK(L.z_lo == doctest::Approx(-2.0).epsilon(1e-15));
  // back map is (z/2 + 1)^2
  CHECK(L.back_map(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(L.back_map(2.0) == doctest::Approx(4.0).epsilon(1e-14));

  // the closed-form z drift agrees with the generic composition
  std::function<double(double)> F = [&](double x) { return s.drift(x); };
  auto t = build_transform(s.diffusion, s.xi);
  auto generic = transformed_drift(strat_correction_drift(F, s.diffusion, 0.319),
                                   s.diffusion, t);
  drift_spec zd;
  zd.form = drift_spec::form_t::reciprocal_affine;
  zd.c0 = L.em.c0;
  zd.c1 = L.em.c1;
  zd.e0 = L.em.e0;
  for (double z : {-1.5, -0.5, 0.0, 0.7, 2.5})
    CHECK(zd(z) == doctest::Approx(generic(z)).epsilon(1e-12));
}

TEST_CASE("marcus lowering of the identity diffusion is exponential-affine") {
  sde_spec s;
  s.drift.form = drift_spec::form_t::affine;
  s.drift.c0 = 0.3;
  s.drift.c1 = -0.2;
  s.diffusion = identity_h();
  s.sigma = 0.5;
  s.xi = 1.5;
  s.f0_second_moment = 0.25;
  s.interp = interpretation::marcus_via_transform;
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::em);
  CHECK(L.em.drift_kind == 3);
  CHECK(L.em.c0 == doctest::Approx(0.3 / 1.5).epsilon(1e-15));
  CHECK(L.em.c1 == doctest::Approx(-0.2 - 0.125).epsilon(1e-15));
  // x = xi exp(z)
  CHECK(L.back_map(1.0) == doctest::Approx(1.5 * std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("marcus stable lowering folds the increment scale") {
  auto s = base_spec();
  s.interp = interpretation::marcus_via_transform;
  s.noise.kind = noise_spec::kind_t::stable;
  s.noise.exponent = 4.0 / 3.0;
  s.noise.skew = 1.0;
  s.noise.scale = 0.9;
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::em_jump);
  CHECK(L.jp.drift_kind == 1);
  // jumps skip the Stratonovich correction: c0 keeps the raw drift constant
  CHECK(L.jp.c0 == 0.1595 * 0.75);
  CHECK(L.jp.dg_scale == doctest::Approx(0.9 * std::pow(0.01, 0.75)).epsilon(1e-15));
  CHECK(L.jp.alpha == 4.0 / 3.0);
}

TEST_CASE("path grid and determinism") {
  auto s = base_spec();
  s.interp = interpretation::ito;
  rng_stream ra(7, 0), rb(7, 0), rc(8, 0);
  auto pa = integrate_path(s, 1.0, 0.01, ra);
  auto pb = integrate_path(s, 1.0, 0.01, rb);
  auto pc = integrate_path(s, 1.0, 0.01, rc);
  REQUIRE(pa.values.size() == 101);
  CHECK(pa.grid[0] == 0.0);
  CHECK(pa.grid[100] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pa.values[0] == 1.0);
  for (std::size_t i = 0; i < pa.values.size(); ++i) CHECK(pa.values[i] == pb.values[i]);
  bool differs = false;
  for (std::size_t i = 1; i < pa.values.size(); ++i)
    differs = differs || pa.values[i] != pc.values[i];
  CHECK(differs);
}

TEST_CASE("unit-diffusion driftless path reproduces the raw normal stream") {
  sde_spec s;  // dX = dW from 0
  s.drift.form = drift_spec::form_t::zero;
  s.diffusion.form = h_function::form_t::one;
  s.sigma = 1.0;
  s.xi = 0.0;
  s.interp = interpretation::ito;
  rng_stream r(77, 0);
  auto n0 = r.state().n;
  auto p = integrate_path(s, 1.0, 0.01, r);
  CHECK(r.state().n == n0 + 100);  // one counter block per step

  auto st = rng_stream(77, 0).state();
  std::vector<double> buf(200);
  kernels::normals_fill(&st, buf.data(), 200);
  double x = 0.0;
  const double sc = 1.0 * std::sqrt(0.01);
  for (int k = 0; k < 100; ++k) {
    x = (x + 0.0) + sc * buf[2 * k];  // batch draws use the cosine half
    REQUIRE(p.values[static_cast<size_t>(k) + 1] == x);
  }
}

TEST_CASE("euler mean matches the ornstein-uhlenbeck decay") {
  sde_spec s;  // dX = -X dt + dW
  s.drift.form = drift_spec::form_t::affine;
  s.drift.c0 = 0.0;
  s.drift.c1 = -1.0;
  s.diffusion.form = h_function::form_t::one;
  s.sigma = 1.0;
  s.xi = 1.5;
  s.interp = interpretation::ito;
  const long n = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < n; ++i) {
    rng_stream r(301, static_cast<std::uint64_t>(i));
    auto p = integrate_path(s, 1.0, 0.01, r);
    double v = p.values.back();
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / n, var = sum2 / n - mean * mean;
  // exact mean 1.5 e^-1 = 0.5518, sd 0.658, se 0.0104; discretization bias
  // at dt = 0.01 shifts the mean by under 0.01
  CHECK(mean == doctest::Approx(1.5 * std::exp(-1.0)).epsilon(0.10));
  CHECK(var == doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(0.12));
}

TEST_CASE("stratonovich linear noise grows at the expected rate") {
  // dX = sigma X o dW has solution xi exp(sigma W_t): the mean grows like
  // exp(sigma^2 t / 2) rather than staying flat as the Ito reading would
  sde_spec s;
  s.drift.form = drift_spec::form_t::zero;
  s.diffusion = identity_h();
  s.sigma = 0.4;
  s.xi = 1.0;
  s.interp = interpretation::stratonovich;
  auto L = lower_sde(s, 0.01);
  CHECK(L.scheme == lowered_sde::scheme_t::scalar_heun);
  const long n = 4000;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    rng_stream r(302, static_cast<std::uint64_t>(i));
    auto p = integrate_path(s, 1.0, 0.01, r);
    sum += p.values.back();
  }
  // exact mean e^{0.08} = 1.0833, se ~ 0.0071
  CHECK(sum / n == doctest::Approx(std::exp(0.08)).epsilon(0.03));
}

TEST_CASE("square-root diffusion is fully truncated below zero") {
  sde_spec s;
  s.drift.form = drift_spec::form_t::affine;
  s.drift.c0 = -5.0;  // constant downward push
  s.drift.c1 = 0.0;
  s.diffusion = sqrt_h();
  s.sigma = 0.3;
  s.xi = 0.01;
  s.interp = interpretation::ito;
  rng_stream r(303, 0);
  auto p = integrate_path(s, 0.5, 0.01, r);
  double lo = 1e300;
  for (double v : p.values) {
    REQUIRE(std::isfinite(v));
    lo = std::min(lo, v);
  }
  CHECK(lo < 0.0);  // the state may go negative; the diffusion must not NaN
}

TEST_CASE("transformed paths stay inside the image or throw") {
  auto s = base_spec();
  s.interp = interpretation::marcus_via_transform;
  rng_stream r(304, 0);
  auto p = integrate_path(s, 5.0, 0.01, r);
  for (double v : p.values) CHECK(v > 0.0);  // back map squares onto (0,inf)

  // a hard constant downward drift in z crosses z_lo = -2 and must throw
  sde_spec bad = base_spec();
  bad.interp = interpretation::marcus_via_transform;
  bad.drift.form = drift_spec::form_t::custom;
  bad.drift.fn = [](double) { return -10.0; };
  bad.sigma = 1e-8;
  rng_stream rb(304, 1);
  CHECK_THROWS_AS((void)integrate_path(bad, 1.0, 0.01, rb), std::runtime_error);
}

TEST_CASE("grid preconditions") {
  auto s = base_spec();
  rng_stream r(305, 0);
  CHECK_THROWS_AS((void)integrate_path(s, 1.0, 0.02, r), std::invalid_argument);
  CHECK_THROWS_AS((void)integrate_path(s, 1.0, 0.0, r), std::invalid_argument);
  CHECK_THROWS_AS((void)integrate_path(s, 0.333, 0.01, r), std::invalid_argument);
  CHECK_THROWS_AS((void)integrate_path(s, 0.0, 0.01, r), std::invalid_argument);
  CHECK_NOTHROW((void)integrate_path(s, 0.35, 0.01, r));
}
