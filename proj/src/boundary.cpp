#include "walklab/boundary.hpp"

#include <cmath>
#include <sstream>

namespace walklab {

namespace {

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

double g_unchecked(const WalkParams& params, double x, double y) {
  return xlogx(x) - xlogx(y) + xlogx(y - x) - x * std::log(2.0 * params.p) -
         y * std::log(params.q);
}

// Bisection for g(x, .) = 1 on [lo, hi] where g - 1 changes sign.
double bisect(const WalkParams& params, double x, double lo, double hi) {
  double glo = g_unchecked(params, x, lo) - 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g_unchecked(params, x, mid) - 1.0;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  const double rlo = std::abs(g_unchecked(params, x, lo) - 1.0);
  const double rhi = std::abs(g_unchecked(params, x, hi) - 1.0);
  return rlo <= rhi ? lo : hi;
}

}  // namespace

double g(const WalkParams& params, double x, double y) {
  if (!(x >= 0.0) || !(y >= x)) {
    std::ostringstream os;
    os << "g: requires y >= x >= 0 (got x = " << x << ", y = " << y << ")";
    throw ValidationError(os.str());
  }
  return g_unchecked(params, x, y);
}

RegionD make_region(const WalkParams& params) {
  RegionD r;
  r.params = params;
  r.two_solution_threshold = -1.0 / std::log(2.0 * params.p * params.q);
  r.xmax = -1.0 / std::log(2.0 * params.q);
  r.ymax = -1.0 / std::log(params.q * (1.0 + 2.0 * params.p));
  return r;
}

std::vector<BoundaryPoint> boundary_solve(const WalkParams& params, double x) {
  const RegionD region = make_region(params);
  if (!(x >= 0.0) || !(x <= region.xmax + 1e-9)) {
    std::ostringstream os;
    os << "boundary_solve: x = " << x << " outside [0, " << region.xmax << "]";
    throw ValidationError(os.str());
  }
  if (x > region.xmax) x = region.xmax;

  const double ystar = x / params.p;
  std::vector<BoundaryPoint> roots;
  // At x = lambda0 the minimum of g(x, .) touches 1: a double root at x / p.
  if (g_unchecked(params, x, ystar) >= 1.0 - 1e-14) {
    roots.push_back({x, ystar, Branch::Upper});
    return roots;
  }
  if (x >= region.two_solution_threshold) {
    roots.push_back({x, bisect(params, x, x, ystar), Branch::Lower});
  }
  double hi = ystar + 1.0;
  while (g_unchecked(params, x, hi) < 1.0) hi = ystar + 2.0 * (hi - ystar);
  roots.push_back({x, bisect(params, x, ystar, hi), Branch::Upper});
  return roots;
}

ExtremalPoints extremal_points(const WalkParams& params) {
  const RegionD r = make_region(params);
  const double p = params.p;
  ExtremalPoints e;
  e.x_max = {r.xmax, r.xmax / p, Branch::Upper};
  e.y_max = {2.0 * p * r.ymax / (2.0 * p + 1.0), r.ymax, Branch::Upper};
  e.x_zero = {0.0, -1.0 / std::log(params.q), Branch::Upper};
  return e;
}

Membership classify(const WalkParams& params, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y) || !(x >= 0.0) || !(y >= x)) {
    return Membership::Outside;
  }
  const double gv = g_unchecked(params, x, y);
  if (std::abs(gv - 1.0) <= 1e-12) return Membership::Boundary;
  return gv < 1.0 ? Membership::Inside : Membership::Outside;
}

bool in_D(const WalkParams& params, double x, double y) {
  return classify(params, x, y) != Membership::Outside;
}

WeightLimit weight_limit(const WalkParams& params) {
  const double q = params.q;
  const double beta = std::sqrt(1.0 + 8.0 * params.p / q);
  WeightLimit w;
  w.wlimit = -1.0 / std::log(0.5 * q * (1.0 + beta));
  w.x_at_opt = (beta - 1.0) / (2.0 * beta) * w.wlimit;
  w.y_at_opt = (beta + 1.0) / (2.0 * beta) * w.wlimit;
  return w;
}

WeightLimit maximize_weight(const WalkParams& params) {
  const RegionD region = make_region(params);
  const auto upper = [&](double x) { return boundary_solve(params, x).back().y; };
  const auto objective = [&](double x) { return x + upper(x); };
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0;
  double b = region.xmax;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
    }
  }
  WeightLimit w;
  w.x_at_opt = 0.5 * (a + b);
  w.y_at_opt = upper(w.x_at_opt);
  w.wlimit = w.x_at_opt + w.y_at_opt;
  return w;
}

std::vector<BoundaryPoint> boundary_polyline(const WalkParams& params,
                                             int gridsize) {
  if (gridsize < 2) throw ValidationError("boundary_polyline: gridsize must be >= 2");
  const RegionD region = make_region(params);
  std::vector<BoundaryPoint> pts;
  for (int i = 0; i < gridsize; ++i) {
    const double x = region.xmax * static_cast<double>(i) /
                     static_cast<double>(gridsize - 1);
    for (const BoundaryPoint& bp : boundary_solve(params, x)) pts.push_back(bp);
  }
  return pts;
}

}  // namespace walklab
