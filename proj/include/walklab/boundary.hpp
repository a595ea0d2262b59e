#pragma once

#include <vector>

#include "walklab/model.hpp"

namespace walklab {

/// Rate function of the joint (local time, sphere occupation) growth:
///   g(x, y) = x log x - y log y + (y - x) log(y - x) - x log(2p) - y log q
/// on y >= x >= 0, with 0 log 0 = 0. g is positively homogeneous of degree 1.
double g(const WalkParams& params, double x, double y);

/// The region D = {(x, y) : y >= x >= 0, g(x, y) <= 1} and its landmarks.
struct RegionD {
  WalkParams params;
  double two_solution_threshold = 0;  // -1/log(2pq)
  double xmax = 0;                    // lambda0
  double ymax = 0;                    // kappa0
};

RegionD make_region(const WalkParams& params);

enum class Branch { Lower, Upper };

struct BoundaryPoint {
  double x = 0;
  double y = 0;
  Branch branch = Branch::Upper;
};

inline constexpr double kBoundaryTolerance = 1e-10;

/// Roots y of g(x, y) = 1 for 0 <= x <= lambda0, found by bisection on either
/// side of the minimiser y = x / p. Returns one root for x below the
/// two-solution threshold or at x = lambda0, two roots in between (lower
/// branch first).
std::vector<BoundaryPoint> boundary_solve(const WalkParams& params, double x);

struct ExtremalPoints {
  BoundaryPoint x_max;  // (lambda0, lambda0 / p)
  BoundaryPoint y_max;  // (2p kappa0 / (2p + 1), kappa0)
  BoundaryPoint x_zero; // (0, -1 / log q)
};

ExtremalPoints extremal_points(const WalkParams& params);

enum class Membership { Inside, Boundary, Outside };

/// Membership with a 1e-12 band around g = 1 reported as Boundary.
Membership classify(const WalkParams& params, double x, double y);

/// True for Inside or Boundary.
bool in_D(const WalkParams& params, double x, double y);

struct WeightLimit {
  double wlimit = 0;     // lim w(n) / log n
  double x_at_opt = 0;   // local-time rate at the optimum
  double y_at_opt = 0;   // sphere-occupation rate at the optimum
};

/// Closed form: wlimit = -1/log(q(1+beta)/2), split in ratio
/// (beta-1) : (beta+1) between the two coordinates.
WeightLimit weight_limit(const WalkParams& params);

/// Independent route: maximise x + y along the upper boundary branch by
/// golden-section search.
WeightLimit maximize_weight(const WalkParams& params);

/// Boundary samples on a uniform x grid over [0, lambda0]; both branches.
std::vector<BoundaryPoint> boundary_polyline(const WalkParams& params,
                                             int gridsize);

}  // namespace walklab
