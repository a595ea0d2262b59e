#include <doctest.h>

#include <cmath>
#include <limits>

#include "walklab/model.hpp"

using namespace walklab;

TEST_CASE("make_params keeps q and h consistent") {
  for (double p : {0.51, 0.6, 0.75, 0.9, 0.999}) {
    const WalkParams w = make_params(p);
    CHECK(w.p == p);
    CHECK(w.q == doctest::Approx(1.0 - p).epsilon(1e-15));
    CHECK(w.h == doctest::Approx((1.0 - p) / p).epsilon(1e-15));
    CHECK(w.log_h() == doctest::Approx(std::log(w.h)).epsilon(1e-15));
  }
}

TEST_CASE("make_params rejects p outside (1/2, 1)") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (double p : {0.5, 0.2, 0.0, -1.0, 1.0, 1.2, nan, inf}) {
    CHECK_THROWS_AS(make_params(p), ValidationError);
  }
  try {
    make_params(0.5);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("p > 1/2") != std::string::npos);
  }
}

TEST_CASE("constants at p = 0.75") {
  const Constants c = derived_constants(make_params(0.75));
  CHECK(c.gamma0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.lambda0 == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
  CHECK(std::abs(c.lambda0 - 1.442695) < 5e-7);
  CHECK(c.beta == 5.0);
  CHECK(std::abs(c.kappa0 - 2.127643) < 5e-7);
  CHECK(std::abs(c.two_solution_threshold - 1.0195454478) < 1e-10);
  CHECK(std::abs(c.wlimit - 3.476059) < 5e-7);
}

TEST_CASE("constant invariants over a grid of p") {
  for (double p : {0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95}) {
    const WalkParams w = make_params(p);
    const Constants c = derived_constants(w);
    CHECK(c.gamma0 == doctest::Approx(p - w.q).epsilon(1e-14));
    CHECK(c.gamma0 == doctest::Approx(1.0 - 2.0 * w.q).epsilon(1e-14));
    CHECK(c.gamma0 > 0.0);
    CHECK(c.gamma0 < 1.0);
    CHECK(c.lambda0 > 0.0);
    CHECK(c.beta > 3.0);
    CHECK(c.beta == doctest::Approx(std::sqrt(1.0 + 8.0 * p / w.q)));
    // The sphere and ball rates dominate the single-site rate.
    CHECK(c.kappa0 > c.lambda0);
    CHECK(c.wlimit > c.kappa0);
    CHECK(c.two_solution_threshold < c.lambda0);
  }
}

TEST_CASE("approaching the symmetric walk") {
  double prev_lambda = 0.0;
  double prev_gamma = 1.0;
  for (double p : {0.9, 0.75, 0.6, 0.55, 0.51, 0.501}) {
    const Constants c = derived_constants(make_params(p));
    CHECK(c.lambda0 > prev_lambda);
    CHECK(c.gamma0 < prev_gamma);
    prev_lambda = c.lambda0;
    prev_gamma = c.gamma0;
  }
  CHECK(prev_gamma == doctest::Approx(0.002).epsilon(1e-9));
}

TEST_CASE("theta at p = 0.75") {
  const WalkParams w = make_params(0.75);
  CHECK(std::abs(theta(w, 1) - 0.381242) < 5e-7);
  CHECK(1.3 / theta(w, 1) == doctest::Approx(3.4099).epsilon(1e-4));
  CHECK_THROWS_AS(theta(w, 0), ValidationError);
  CHECK_THROWS_AS(theta(w, -2), ValidationError);
}

TEST_CASE("theta increases to 1 / lambda0") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    const double limit = 1.0 / derived_constants(w).lambda0;
    double prev = 0.0;
    for (int z = 1; z <= 40; ++z) {
      const double t = theta(w, z);
      // Strict while h^(z/2) is visible next to 2q in double precision.
      if (half_power_h(w, z) > 1e-12) {
        CHECK(t > prev);
        CHECK(t < limit);
      } else {
        CHECK(t >= prev);
        CHECK(t <= limit);
      }
      prev = t;
    }
    CHECK(theta(w, 200) == doctest::Approx(limit).epsilon(1e-12));
  }
}

TEST_CASE("half powers of h") {
  const WalkParams w = make_params(0.75);
  for (int z = -7; z <= 7; ++z) {
    CHECK(half_power_h(w, z) ==
          doctest::Approx(std::pow(std::sqrt(w.h), z)).epsilon(1e-14));
  }
}

TEST_CASE("excursion mean profile") {
  const WalkParams w = make_params(0.75);
  CHECK(excursion_mean_profile(w, 0) == 1.0);
  CHECK(excursion_mean_profile(w, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(excursion_mean_profile(w, -1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(excursion_mean_profile(w, 3) == doctest::Approx(2.0 / 27.0).epsilon(1e-14));
  CHECK(excursion_mean_profile(w, -3) == excursion_mean_profile(w, 3));
}
