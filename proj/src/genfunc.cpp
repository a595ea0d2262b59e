#include "walklab/genfunc.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace walklab {

double RationalGF::evaluate(double w) const {
  const auto horner = [w](const std::vector<double>& c) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * w + *it;
    return acc;
  };
  return horner(num) / horner(den);
}

std::vector<double> series_coeffs(const RationalGF& gf, std::int64_t K) {
  if (gf.den.empty() || gf.den[0] == 0.0) {
    throw ValidationError("series_coeffs: denominator constant term is zero");
  }
  if (K < 0 || K > kMaxSeriesOrder) {
    std::ostringstream os;
    os << "series_coeffs: order " << K << " outside [0, " << kMaxSeriesOrder
       << "]";
    throw ValidationError(os.str());
  }
  const auto n = static_cast<std::size_t>(K) + 1;
  std::vector<double> c(n, 0.0);
  const double d0 = gf.den[0];
  for (std::size_t i = 0; i < n; ++i) {
    double acc = i < gf.num.size() ? gf.num[i] : 0.0;
    const std::size_t reach = std::min(i, gf.den.size() - 1);
    for (std::size_t j = 1; j <= reach; ++j) acc -= gf.den[j] * c[i - j];
    c[i] = acc / d0;
    if (!std::isfinite(c[i])) {
      std::ostringstream os;
      os << "series_coeffs: coefficient " << i << " overflowed";
      throw std::overflow_error(os.str());
    }
  }
  return c;
}

RationalGF two_point_gf(const WalkParams& params, std::int64_t z, Side side) {
  const ExcursionLaw e = excursion_law(params, z);
  const double esc = 1.0 - 2.0 * params.q;
  const double hz = std::pow(params.h, static_cast<double>(z));
  RationalGF gf;
  gf.den = {1.0, -2.0 * e.Qz, e.Qz * e.Qz - hz * e.Pz * e.Pz};
  if (side == Side::Positive) {
    gf.num = {0.0, esc * e.Pz};
  } else {
    gf.num = {esc, -esc * e.Qz};
  }
  return gf;
}

RationalGF ball_gf(const WalkParams& params) {
  const double p = params.p;
  const double q = params.q;
  RationalGF gf;
  gf.num = {0.0, p * (1.0 - 2.0 * q)};
  gf.den = {1.0, -q, -2.0 * p * q};
  return gf;
}

double asymptotic_ratio(const RationalGF& gf, std::int64_t K) {
  if (gf.den.empty() || gf.den[0] == 0.0) {
    throw ValidationError("asymptotic_ratio: denominator constant term is zero");
  }
  if (K < 1 || K > kMaxSeriesOrder) {
    throw ValidationError("asymptotic_ratio: order outside [1, 100000]");
  }
  // Past the numerator degree the recurrence is homogeneous, so the window
  // of recent coefficients can be rescaled freely. That keeps slowly
  // separating roots from underflowing before the ratio settles.
  const std::size_t d = gf.den.size() - 1;
  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(K) + 1);
  double ratio = NAN;
  for (std::int64_t i = 0; i <= K; ++i) {
    const auto u = static_cast<std::size_t>(i);
    double acc = u < gf.num.size() ? gf.num[u] : 0.0;
    for (std::size_t j = 1; j <= std::min(u, d); ++j) acc -= gf.den[j] * c[u - j];
    c.push_back(acc / gf.den[0]);
    if (u >= gf.num.size() + d && std::abs(c[u]) < 1e-200 && c[u] != 0.0) {
      const double scale = c[u];
      for (std::size_t j = u - d; j <= u; ++j) c[j] /= scale;
    }
    if (u == 0 || c[u - 1] == 0.0) continue;
    const double r = c[u] / c[u - 1];
    if (!std::isnan(ratio) && r == ratio) break;
    ratio = r;
  }
  return ratio;
}

double ball_series_weight_rate(const WalkParams& params) {
  return -1.0 / std::log(asymptotic_ratio(ball_gf(params)));
}

}  // namespace walklab
