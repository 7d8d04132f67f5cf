#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "homog/levy.hpp"

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

sde_spec jump_spec(h_function h, double xi) {
  sde_spec s;
  s.drift.form = drift_spec::form_t::zero;
  s.diffusion = h;
  s.xi = xi;
  s.interp = interpretation::marcus_via_transform;
  s.noise.kind = noise_spec::kind_t::stable;
  s.noise.exponent = 4.0 / 3.0;
  s.noise.skew = 1.0;
  s.noise.scale = 1.0;
  return s;
}

}  // namespace

TEST_CASE("stable index is tied to the map exponent by construction") {
  stable_noise_spec s;
  s.gamma = 0.75;
  CHECK(s.exponent() == 1.0 / 0.75);
  s.gamma = 0.6;
  CHECK(s.exponent() == 1.0 / 0.6);
  CHECK_NOTHROW(s.validate());
  s.gamma = 0.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.gamma = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.gamma = 0.75;
  s.skew = -1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.skew = 1.0;
  s.scale = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("stable samples have the expected heavy right tail") {
  stable_noise_spec s;  // exponent 4/3
  rng_stream r(41, 0);
  const long n = 200000;
  long far_pos = 0, far_neg = 0;
  for (long i = 0; i < n; ++i) {
    double v = stable_sample(s, r);
    far_pos += v > 10.0;
    far_neg += v < -10.0;
  }
  // P(X > 10) ~ 0.021 at this exponent with total positive skew
  CHECK(double(far_pos) / double(n) == doctest::Approx(0.021).epsilon(0.15));
  CHECK(far_neg < 20);
}

TEST_CASE("increment sampling applies the dt^gamma scaling draw by draw") {
  stable_noise_spec s;
  s.gamma = 0.75;
  s.scale = 0.9;
  rng_stream ra(42, 0), rb(42, 0);
  auto inc = sample_levy_increments(s, 0.1, 0.01, ra);
  REQUIRE(inc.t.size() == 10);
  REQUIRE(inc.dG.size() == 10);
  const double step_scale = std::pow(0.01, 0.75);
  for (int k = 0; k < 10; ++k) {
    CHECK(inc.t[static_cast<size_t>(k)] == double(k) * 0.01);
    CHECK(inc.dG[static_cast<size_t>(k)] ==
          step_scale * (0.9 * rb.stable(1.0 / 0.75, 1.0)));
  }
  CHECK_THROWS_AS((void)sample_levy_increments(s, 0.105, 0.01, ra),
                  std::invalid_argument);
}

TEST_CASE("superdiffusive evolution enforces its regime preconditions") {
  slow_system_spec spec;
  spec.epsilon = 0.1;
  spec.xi = 0.0;
  spec.scaling = scaling_kind::superdiffusive;
  spec.superdiffusive_gamma = 0.75;
  spec.f0.shift = 0.5;  // f0(0) = -0.5 != 0
  fast_map_spec pm{map_family::pomeau_manneville, 0.75};

  CHECK_NOTHROW((void)evolve_superdiffusive(spec, pm, 0.37, 0.1, 0.1));

  auto bad_scaling = spec;
  bad_scaling.scaling = scaling_kind::diffusive;
  CHECK_THROWS_AS((void)evolve_superdiffusive(bad_scaling, pm, 0.37, 0.1, 0.1),
                  std::invalid_argument);

  CHECK_THROWS_AS(
      (void)evolve_superdiffusive(spec, fast_map_spec{map_family::doubling, 0.0}, 0.37,
                                  0.1, 0.1),
      std::invalid_argument);

  auto wrong_gamma = pm;
  wrong_gamma.gamma = 0.6;
  CHECK_THROWS_AS((void)evolve_superdiffusive(spec, wrong_gamma, 0.37, 0.1, 0.1),
                  std::invalid_argument);

  auto vanishing = spec;
  vanishing.f0.shift = 0.0;
  CHECK_THROWS_AS((void)evolve_superdiffusive(vanishing, pm, 0.37, 0.1, 0.1),
                  std::invalid_argument);
}

TEST_CASE("superdiffusive paths accumulate plain rescaled sums") {
  // h = one, f = zero: x(t) = eps^gamma * (birkhoff sum of f0 over the orbit)
  slow_system_spec spec;
  spec.epsilon = 0.25;
  spec.xi = 0.0;
  spec.scaling = scaling_kind::superdiffusive;
  spec.superdiffusive_gamma = 0.75;
  spec.f0.shift = 0.5;
  fast_map_spec pm{map_family::pomeau_manneville, 0.75};
  auto p = evolve_superdiffusive(spec, pm, 0.37, 1.0, 0.25);
  // rate eps^-1 = 4: value at t = 1 indexes step 4
  auto od = orbit(pm, 0.37, 4);
  double cn = std::pow(0.25, 0.75);
  double x = 0.0;
  for (double y : od.points) x = (x + cn * (1.0 * (y - 0.5))) + 0.25 * 0.0;
  CHECK(p.values.back() == x);
}

TEST_CASE("a single marcus jump follows the diffusion flow, square-root case") {
  // one Euler step with zero drift: z moves by the jump increment and the
  // state follows x = (sqrt(xi) + dz/2)^2, the exact flow of dx = sqrt(x) dg
  auto s = jump_spec(sqrt_h(), 1.0);
  for (int i = 0; i < 200; ++i) {
    rng_stream r(43, static_cast<std::uint64_t>(i));
    auto res = marcus_path(s, 0.01, 0.01, r);
    if (res.domain_exit) continue;  // a jump below the image boundary
    REQUIRE(res.z.values.size() == 2);
    double dz = res.z.values[1] - res.z.values[0];
    double oracle = (std::sqrt(1.0) + 0.5 * dz) * (std::sqrt(1.0) + 0.5 * dz);
    CHECK(res.x.values[1] == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("a single marcus jump follows the diffusion flow, linear case") {
  // dx = x dg: the flow through a jump of size dz is xi e^{dz}
  auto s = jump_spec(identity_h(), 1.5);
  for (int i = 0; i < 200; ++i) {
    rng_stream r(44, static_cast<std::uint64_t>(i));
    auto res = marcus_path(s, 0.01, 0.01, r);
    REQUIRE(!res.domain_exit);  // the exponential image is the whole line
    REQUIRE(res.z.values.size() == 2);
    double dz = res.z.values[1] - res.z.values[0];
    CHECK(res.x.values[1] == doctest::Approx(1.5 * std::exp(dz)).epsilon(1e-12));
  }
}

TEST_CASE("the jump path is exactly the image of its additive path") {
  sde_spec s = jump_spec(sqrt_h(), 1.0);
  s.drift.form = drift_spec::form_t::affine;
  s.drift.c0 = 0.1595 * 0.75;
  s.drift.c1 = -0.1595;
  auto t = build_transform(s.diffusion, s.xi);
  rng_stream r(45, 0);
  auto res = marcus_path(s, 1.0, 0.01, r);
  REQUIRE(res.x.values.size() == res.z.values.size());
  for (std::size_t i = 0; i < res.z.values.size(); ++i)
    REQUIRE(res.x.values[i] == t.r_inverse(res.z.values[i]));
  CHECK(res.z.values[0] == 0.0);
  CHECK(res.x.values[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("marcus integration is deterministic in the stream") {
  auto s = jump_spec(sqrt_h(), 1.0);
  rng_stream ra(46, 0), rb(46, 0);
  auto pa = marcus_path(s, 0.5, 0.01, ra);
  auto pb = marcus_path(s, 0.5, 0.01, rb);
  REQUIRE(pa.z.values.size() == pb.z.values.size());
  for (std::size_t i = 0; i < pa.z.values.size(); ++i)
    CHECK(pa.z.values[i] == pb.z.values[i]);
}

TEST_CASE("leaving the image interval truncates the path and flags the exit") {
  auto s = jump_spec(sqrt_h(), 1.0);
  s.drift.form = drift_spec::form_t::affine;
  s.drift.c0 = -100.0;  // hard downward push in x, z exits past -2 fast
  s.drift.c1 = 0.0;
  s.noise.scale = 1e-8;
  rng_stream r(47, 0);
  auto res = marcus_path(s, 1.0, 0.01, r);
  CHECK(res.domain_exit);
  CHECK(res.exit_step > 0);
  CHECK(res.exit_step <= 100);
  REQUIRE(res.z.values.size() == static_cast<size_t>(res.exit_step));
  REQUIRE(res.x.values.size() == res.z.values.size());
  for (double z : res.z.values) CHECK(z > -2.0);
}

TEST_CASE("marcus path preconditions") {
  auto s = jump_spec(sqrt_h(), 1.0);
  rng_stream r(48, 0);
  auto brownian = s;
  brownian.noise.kind = noise_spec::kind_t::brownian;
  CHECK_THROWS_AS((void)marcus_path(brownian, 1.0, 0.01, r), std::invalid_argument);
  auto ito = s;
  ito.interp = interpretation::ito;
  CHECK_THROWS_AS((void)marcus_path(ito, 1.0, 0.01, r), std::invalid_argument);
  CHECK_THROWS_AS((void)marcus_path(s, 1.0, 0.02, r), std::invalid_argument);
  CHECK_THROWS_AS((void)marcus_path(s, 0.333, 0.01, r), std::invalid_argument);
}
