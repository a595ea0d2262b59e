#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "walklab/genfunc.hpp"

using namespace walklab;

namespace {
const WalkParams kP = make_params(0.75);
}

TEST_CASE("geometric series") {
  const RationalGF gf{{1.0}, {1.0, -0.5}};
  const auto c = series_coeffs(gf, 10);
  REQUIRE(c.size() == 11);
  for (int n = 0; n <= 10; ++n) CHECK(c[n] == std::ldexp(1.0, -n));
  CHECK(gf.evaluate(1.0) == doctest::Approx(2.0));
}

TEST_CASE("series_coeffs preconditions") {
  CHECK_THROWS_AS(series_coeffs(RationalGF{{1.0}, {0.0, 1.0}}, 5), ValidationError);
  CHECK_THROWS_AS(series_coeffs(RationalGF{{1.0}, {1.0}}, -1), ValidationError);
  CHECK_THROWS_AS(series_coeffs(RationalGF{{1.0}, {1.0}}, kMaxSeriesOrder + 1),
                  ValidationError);
  CHECK(series_coeffs(RationalGF{{1.0}, {1.0}}, kMaxSeriesOrder).size() ==
        kMaxSeriesOrder + 1);
  CHECK_THROWS_AS(series_coeffs(RationalGF{{1.0}, {1.0, -2.0}}, 3000),
                  std::overflow_error);
}

TEST_CASE("ball generating function") {
  const RationalGF gf = ball_gf(kP);
  REQUIRE(gf.num.size() == 2);
  REQUIRE(gf.den.size() == 3);
  CHECK(gf.num[0] == 0.0);
  CHECK(gf.num[1] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(gf.den[0] == 1.0);
  CHECK(gf.den[1] == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(gf.den[2] == doctest::Approx(-0.375).epsilon(1e-15));
  CHECK(gf.evaluate(1.0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto c = series_coeffs(gf, 3);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(c[2] == doctest::Approx(0.09375).epsilon(1e-15));
  CHECK(c[3] == doctest::Approx(0.1640625).epsilon(1e-15));
}

TEST_CASE("two-point generating functions") {
  const auto pos = series_coeffs(two_point_gf(kP, 1, Side::Positive), 5);
  CHECK(pos[0] == 0.0);
  CHECK(pos[1] == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(two_point_gf(kP, 1, Side::Negative).evaluate(1.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  for (double p : {0.55, 0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    for (int z : {1, 2, 3, 5, 10}) {
      for (Side s : {Side::Positive, Side::Negative}) {
        const RationalGF gf = two_point_gf(w, z, s);
        CHECK(gf.evaluate(1.0) == doctest::Approx(1.0).epsilon(1e-13));
        REQUIRE(gf.den.size() == 3);
        const double disc = gf.den[1] * gf.den[1] - 4.0 * gf.den[0] * gf.den[2];
        CHECK(disc > 0.0);
      }
    }
  }
}

TEST_CASE("coefficients are probabilities") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    std::vector<RationalGF> gfs{ball_gf(w)};
    for (int z : {1, 2, 3, 5}) {
      gfs.push_back(two_point_gf(w, z, Side::Positive));
      gfs.push_back(two_point_gf(w, z, Side::Negative));
    }
    for (const RationalGF& gf : gfs) {
      const auto c = series_coeffs(gf, 500);
      double s = 0.0;
      for (double x : c) {
        CHECK(x >= 0.0);
        s += x;
      }
      CHECK(s <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("expansion matches the closed two-geometric form") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    for (int z : {1, 2, 3, 5}) {
      for (Side s : {Side::Positive, Side::Negative}) {
        const auto c = series_coeffs(two_point_gf(w, z, s), 200);
        const PmfTable t = two_point_occupation_pmf(w, z, s, 200);
        double worst = 0.0;
        for (int k = 0; k <= 200; ++k) worst = std::max(worst, std::abs(c[k] - t.at(k)));
        CHECK(worst < 1e-12);
      }
    }
  }
}

TEST_CASE("coefficient ratio tends to exp(-theta)") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    for (int z : {1, 2, 3, 5}) {
      for (Side s : {Side::Positive, Side::Negative}) {
        CHECK(asymptotic_ratio(two_point_gf(w, z, s)) ==
              doctest::Approx(std::exp(-theta(w, z))).epsilon(1e-9));
      }
    }
  }
  CHECK(std::abs(std::exp(-theta(kP, 1)) -
                 asymptotic_ratio(two_point_gf(kP, 1, Side::Positive))) < 1e-9);
}

TEST_CASE("ball series growth rate") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    CHECK(std::abs(ball_series_weight_rate(w) - derived_constants(w).wlimit) < 1e-6);
  }
  CHECK(std::abs(ball_series_weight_rate(kP) - 3.476059) < 1e-6);
}
