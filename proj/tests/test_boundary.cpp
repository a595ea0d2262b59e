#include <doctest.h>

#include <cmath>
#include <random>

#include "walklab/boundary.hpp"

using namespace walklab;

namespace {
const WalkParams kP = make_params(0.75);
const double kLambda0 = 1.0 / std::log(2.0);
}  // namespace

TEST_CASE("g at the landmarks") {
  CHECK(std::abs(g(kP, 0.0, -1.0 / std::log(kP.q)) - 1.0) < 1e-12);
  CHECK(std::abs(-1.0 / std::log(kP.q) - 0.721348) < 5e-7);
  CHECK(std::abs(g(kP, kLambda0, kLambda0 / kP.p) - 1.0) < 1e-12);
  CHECK(g(kP, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(g(kP, 1.0, 0.5), ValidationError);
  CHECK_THROWS_AS(g(kP, -0.1, 0.5), ValidationError);
}

TEST_CASE("g is positively homogeneous") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double y = x + u(rng);
    for (double c : {2.0, 0.5, 7.0}) {
      CHECK(g(kP, c * x, c * y) == doctest::Approx(c * g(kP, x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("g along the lines y = x / p and y = x") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    const Constants c = derived_constants(w);
    for (double x : {0.01, 0.3, 1.0, 2.5}) {
      CHECK(g(w, x, x / p) == doctest::Approx(x / c.lambda0).epsilon(1e-12));
      CHECK(g(w, x, x) == doctest::Approx(-x * std::log(2.0 * p * w.q)).epsilon(1e-12));
    }
    const double t = c.two_solution_threshold;
    CHECK(g(w, 0.9 * t, 0.9 * t) < 1.0);
    CHECK(std::abs(g(w, t, t) - 1.0) < 1e-12);
    CHECK(g(w, 1.1 * t, 1.1 * t) > 1.0);
  }
}

TEST_CASE("boundary_solve examples") {
  auto r0 = boundary_solve(kP, 0.0);
  REQUIRE(r0.size() == 1);
  CHECK(std::abs(r0[0].y - 0.721348) < 5e-7);

  auto rmax = boundary_solve(kP, kLambda0);
  REQUIRE(rmax.size() == 1);
  CHECK(rmax[0].y == doctest::Approx(kLambda0 / 0.75).epsilon(1e-8));
  CHECK(std::abs(rmax[0].y - 1.923594) < 2e-6);

  auto r = boundary_solve(kP, 1.1);
  REQUIRE(r.size() == 2);
  CHECK(r[0].branch == Branch::Lower);
  CHECK(r[1].branch == Branch::Upper);
  CHECK(r[0].y < 1.1 / 0.75);
  CHECK(r[1].y > 1.1 / 0.75);
  for (const auto& b : r) CHECK(std::abs(g(kP, b.x, b.y) - 1.0) < kBoundaryTolerance);

  CHECK_THROWS_AS(boundary_solve(kP, -0.01), ValidationError);
  CHECK_THROWS_AS(boundary_solve(kP, kLambda0 + 1e-6), ValidationError);
  CHECK_NOTHROW(boundary_solve(kP, kLambda0 + 5e-10));
}

TEST_CASE("root pattern on a grid") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    const RegionD d = make_region(w);
    CHECK(d.two_solution_threshold > 0.0);
    CHECK(d.two_solution_threshold < d.xmax);
    const int N = 200;
    for (int i = 0; i < N; ++i) {
      const double x = d.xmax * i / (N - 1);
      const auto roots = boundary_solve(w, x);
      const std::size_t expect =
          (i == N - 1 || x < d.two_solution_threshold) ? 1 : 2;
      CHECK(roots.size() == expect);
      for (const auto& b : roots) {
        CHECK(b.y >= b.x);
        CHECK(std::abs(g(w, b.x, b.y) - 1.0) < kBoundaryTolerance);
      }
    }
  }
}

TEST_CASE("extremal points") {
  const ExtremalPoints e = extremal_points(kP);
  CHECK(std::abs(e.x_max.x - 1.442695) < 5e-7);
  CHECK(std::abs(e.x_max.y - 1.923594) < 2e-6);
  CHECK(std::abs(e.y_max.x - 1.276586) < 5e-7);
  CHECK(std::abs(e.y_max.y - 2.127643) < 5e-7);
  CHECK(e.y_max.x == doctest::Approx(1.5 * e.y_max.y / 2.5).epsilon(1e-14));
  CHECK(e.x_zero.x == 0.0);
  for (const BoundaryPoint& b : {e.x_max, e.y_max, e.x_zero}) {
    CHECK(b.y >= b.x);
    CHECK(std::abs(g(kP, b.x, b.y) - 1.0) < 1e-10);
  }
}

TEST_CASE("upper branch reaches kappa0") {
  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams w = make_params(p);
    const double k0 = derived_constants(w).kappa0;
    const auto roots = boundary_solve(w, 2.0 * p * k0 / (2.0 * p + 1.0));
    CHECK(std::abs(roots.back().y - k0) < 1e-8);
    // No boundary point lies above kappa0.
    for (int i = 0; i <= 100; ++i) {
      for (const auto& b : boundary_solve(w, make_region(w).xmax * i / 100.0)) {
        CHECK(b.y <= k0 + 1e-9);
      }
    }
  }
}

TEST_CASE("membership") {
  CHECK(in_D(kP, 0.0, 0.0));
  CHECK(classify(kP, 0.0, 0.0) == Membership::Inside);
  for (double y : {kLambda0 + 0.1, 1.0, 1.9, 2.5, 5.0}) {
    CHECK_FALSE(in_D(kP, kLambda0 + 0.1, y));
  }
  CHECK_FALSE(in_D(kP, 1.0, 0.5));
  CHECK_FALSE(in_D(kP, -0.5, 0.5));
  CHECK_FALSE(in_D(kP, 0.5, 3.0));
  CHECK(classify(kP, kLambda0, kLambda0 / 0.75) == Membership::Boundary);

  for (double x : {0.2, 0.9, 1.1, 1.3}) {
    const auto a = boundary_solve(kP, x);
    const auto b = boundary_solve(kP, x + 0.05);
    const BoundaryPoint& ua = a.back();
    const BoundaryPoint& ub = b.back();
    CHECK(in_D(kP, 0.5 * (ua.x + ub.x), 0.5 * (ua.y + ub.y)));
    if (a.size() == 2) {
      CHECK(in_D(kP, x, 0.5 * (a[0].y + a[1].y)));
    }
  }
}

TEST_CASE("weight limit") {
  const WeightLimit w = weight_limit(kP);
  CHECK(std::abs(w.wlimit - 3.47606) < 5e-6);
  CHECK(w.wlimit == doctest::Approx(-1.0 / std::log(0.75)).epsilon(1e-14));
  // Printed six-decimal values carry a rounding slip of up to 1.7e-6.
  CHECK(std::abs(w.x_at_opt - 1.390423) < 2e-6);
  CHECK(std::abs(w.y_at_opt - 2.085634) < 2e-6);
  CHECK(w.x_at_opt == doctest::Approx(0.4 * w.wlimit).epsilon(1e-14));
  CHECK(w.y_at_opt == doctest::Approx(0.6 * w.wlimit).epsilon(1e-14));
  CHECK(w.x_at_opt / w.y_at_opt == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(g(kP, w.x_at_opt, w.y_at_opt) - 1.0) < 1e-10);
  // Lagrange condition for maximising x + y on g = 1.
  CHECK(kP.q * w.x_at_opt * w.y_at_opt ==
        doctest::Approx(2.0 * kP.p * std::pow(w.y_at_opt - w.x_at_opt, 2)).epsilon(1e-10));

  for (double p : {0.6, 0.75, 0.9}) {
    const WalkParams wp = make_params(p);
    const WeightLimit a = weight_limit(wp);
    const WeightLimit b = maximize_weight(wp);
    CHECK(std::abs(a.wlimit - b.wlimit) < 1e-6);
    CHECK(std::abs(a.x_at_opt - b.x_at_opt) < 1e-4);
    CHECK(std::abs(b.x_at_opt + b.y_at_opt - b.wlimit) < 1e-12);
  }
}

TEST_CASE("polyline") {
  const auto pts = boundary_polyline(kP, 200);
  CHECK(pts.size() > 200);
  for (const auto& b : pts) CHECK(std::abs(g(kP, b.x, b.y) - 1.0) < kBoundaryTolerance);
  CHECK_THROWS_AS(boundary_polyline(kP, 1), ValidationError);
}
