#include "walklab/model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "walklab/boundary.hpp"

namespace walklab {

double WalkParams::log_h() const { return std::log(q) - std::log(p); }

WalkParams make_params(double p) {
  if (!std::isfinite(p)) {
    throw ValidationError("p must be a finite real number");
  }
  if (p <= 0.5) {
    std::ostringstream os;
    os << "p must satisfy p > 1/2 (got " << p << ")";
    throw ValidationError(os.str());
  }
  if (p >= 1.0) {
    std::ostringstream os;
    os << "p must satisfy p < 1 (got " << p << ")";
    throw ValidationError(os.str());
  }
  WalkParams w;
  w.p = p;
  w.q = 1.0 - p;
  w.h = w.q / w.p;
  return w;
}

Constants derived_constants(const WalkParams& params) {
  const double p = params.p;
  const double q = params.q;
  Constants c;
  c.gamma0 = p - q;
  c.lambda0 = -1.0 / std::log(2.0 * q);
  c.kappa0 = -1.0 / std::log(q * (1.0 + 2.0 * p));
  c.beta = std::sqrt(1.0 + 8.0 * p / q);
  c.two_solution_threshold = -1.0 / std::log(2.0 * p * q);
  c.wlimit = weight_limit(params).wlimit;
  return c;
}

double half_power_h(const WalkParams& params, int z) {
  return std::exp(0.5 * static_cast<double>(z) * params.log_h());
}

double theta(const WalkParams& params, int z) {
  if (z < 1) throw ValidationError("theta: z must be a positive integer");
  const double t = half_power_h(params, z);
  return -std::log((2.0 * params.q + t) / (1.0 + t));
}

double excursion_mean_profile(const WalkParams& params, int z) {
  if (z == 0) return 1.0;
  return std::pow(params.h, std::abs(z)) / (2.0 * params.q);
}

}  // namespace walklab
