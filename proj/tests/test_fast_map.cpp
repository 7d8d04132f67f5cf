#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "homog/fast_map.hpp"
#include "homog/rng.hpp"

using namespace homog;

namespace {

fast_map_spec pm(double g) { return {map_family::pomeau_manneville, g}; }
fast_map_spec mpm(double g) { return {map_family::modified_pomeau_manneville, g}; }
fast_map_spec doubling() { return {map_family::doubling, 0.0}; }

}  // namespace

TEST_CASE("pomeau-manneville left branch at gamma one half") {
  // y (1 + 2^g y^g) at y = 1/4, g = 1/2: 0.25 (1 + sqrt(2) * 0.5)
  CHECK(step(pm(0.5), 0.25) == doctest::Approx(0.42677669529663687).epsilon(1e-15));
}

TEST_CASE("pomeau-manneville right branch and branch point are exact") {
  CHECK(step(pm(0.5), 0.75) == 0.5);
  // the branch point maps through the right branch
  CHECK(step(pm(0.5), 0.5) == 0.0);
  CHECK(step(pm(0.5), 1.0) == 1.0);
}

TEST_CASE("modified map uses the folded right branch and the odd extension") {
  CHECK(step(mpm(0.1), 0.75) == -0.5);
  CHECK(step(mpm(0.1), -0.75) == 0.5);
  // odd extension: g(-y) == -g(y), bit for bit
  for (double y : {0.07, 0.3, 0.49, 0.51, 0.9, 1.0}) {
    CHECK(step(mpm(0.1), -y) == -step(mpm(0.1), y));
  }
  // left branch stays in [0, 1): fixed point at 0
  CHECK(step(mpm(0.1), 0.0) == 0.0);
}

TEST_CASE("doubling step is exact float doubling mod one") {
  CHECK(step(doubling(), 0.3) == 2.0 * 0.3);
  CHECK(step(doubling(), 0.6) == 2.0 * 0.6 - 1.0);
  CHECK(step(doubling(), 0.5) == 0.0);
}

TEST_CASE("orbit starts at the seed point when burn_in is zero") {
  for (auto m : {pm(0.5), mpm(0.1), doubling()}) {
    auto od = orbit(m, 0.3, 4);
    REQUIRE(od.points.size() == 4);
    CHECK(od.points[0] == 0.3);
  }
}

TEST_CASE("doubling orbit follows exact doubling to within register truncation") {
  auto od = orbit(doubling(), 0.3, 3);
  CHECK(od.points[0] == 0.3);
  CHECK(od.points[1] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(od.points[2] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("orbit equals iterated step for the smooth maps") {
  for (auto m : {pm(0.75), mpm(0.1)}) {
    auto od = orbit(m, 0.37, 1000);
    double y = 0.37;
    for (std::size_t i = 0; i < od.points.size(); ++i) {
      CHECK(od.points[i] == y);
      y = step(m, y);
    }
  }
}

TEST_CASE("burn-in drops a prefix without disturbing later points") {
  for (auto m : {pm(0.75), mpm(0.1), doubling()}) {
    auto full = orbit(m, 0.37, 7);
    auto cut = orbit(m, 0.37, 5, 2);
    REQUIRE(cut.points.size() == 5);
    CHECK(cut.burn_in == 2);
    for (int i = 0; i < 5; ++i) CHECK(cut.points[i] == full.points[i + 2]);
  }
}

TEST_CASE("values within the edge tolerance are clamped onto the attractor") {
  CHECK(step(pm(0.5), 1.0 + 0.5e-12) == 1.0);
  CHECK(step(pm(0.5), -0.5e-12) == 0.0);
  // -1 clamps onto the attractor and then maps through the odd extension:
  // g(-1) = -g(1) = -(1 - 2) = +1
  CHECK(step(mpm(0.1), -1.0 - 0.5e-12) == 1.0);
  CHECK(clamp_initial(pm(0.5), 1.0 + 0.5e-12) == 1.0);
  CHECK(clamp_initial(pm(0.5), 0.25) == 0.25);
}

TEST_CASE("values beyond the tolerance raise a domain error naming the value") {
  CHECK_THROWS_AS((void)step(pm(0.5), 1.1), std::domain_error);
  CHECK_THROWS_AS((void)step(mpm(0.1), -1.1), std::domain_error);
  CHECK_THROWS_AS((void)orbit(pm(0.5), 2.0, 10), std::domain_error);
  try {
    (void)step(pm(0.5), 1.1);
    FAIL("expected domain_error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("1.1") != std::string::npos);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(pm(1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(pm(-0.1).validate(), std::invalid_argument);
  CHECK_NOTHROW(pm(0.0).validate());
  CHECK_NOTHROW(pm(0.999).validate());
  CHECK_NOTHROW(doubling().validate());
  CHECK_THROWS_AS(orbit(pm(0.5), 0.3, 0), std::invalid_argument);
  CHECK_THROWS_AS(orbit(pm(0.5), 0.3, 10, -1), std::invalid_argument);
}

TEST_CASE("sample_initial covers the attractor of each family") {
  rng_stream r(5, 0);
  long neg = 0;
  for (int i = 0; i < 2000; ++i) {
    double y = sample_initial(mpm(0.1), r);
    REQUIRE(y >= -1.0);
    REQUIRE(y <= 1.0);
    neg += y < 0.0;
  }
  CHECK(neg > 600);
  CHECK(neg < 1400);
  for (int i = 0; i < 200; ++i) {
    double y = sample_initial(pm(0.5), r);
    REQUIRE(y >= 0.0);
    REQUIRE(y <= 1.0);
  }
}

TEST_CASE("long doubling orbits do not collapse to the fixed point") {
  auto od = orbit(doubling(), 0.3, 100000);
  long tiny = 0;
  double s = 0.0, s2 = 0.0;
  for (double y : od.points) {
    tiny += std::abs(y) < 1e-9;
    s += y;
    s2 += y * y;
  }
  CHECK(tiny < 5);
  // invariant measure is uniform on [0,1]: mean 1/2, second moment 1/3
  CHECK(s / double(od.points.size()) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(s2 / double(od.points.size()) == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("intermittent orbits spend long stretches near the neutral fixed point") {
  // the hallmark of the intermittent family: laminar episodes near 0
  auto od = orbit(pm(0.75), 0.37, 200000);
  long near = 0;
  for (double y : od.points) near += y < 0.05;
  // a uniform orbit would put ~5% of its points below 0.05; the intermittent
  // orbit concentrates several times that there
  CHECK(near > 40000);
}
