#pragma once

#include <cstdint>
#include <vector>

#include "walklab/closedform.hpp"
#include "walklab/model.hpp"

namespace walklab {

/// Rational generating function num(w) / den(w), coefficients in increasing
/// powers of w.
struct RationalGF {
  std::vector<double> num;
  std::vector<double> den;

  double evaluate(double w) const;
};

inline constexpr std::int64_t kMaxSeriesOrder = 100'000;

/// First K + 1 power-series coefficients of gf, by the linear recurrence
///   c_n = (num_n - sum_{i >= 1} den_i c_{n-i}) / den_0.
/// Throws ValidationError for den_0 == 0 or K outside [0, kMaxSeriesOrder],
/// and std::overflow_error if a coefficient stops being finite.
std::vector<double> series_coeffs(const RationalGF& gf, std::int64_t K);

/// E(w^{Xi({0, +-z}, inf)}).
RationalGF two_point_gf(const WalkParams& params, std::int64_t z, Side side);

/// E(w^{Xi({-1, 0, 1}, inf)}) = p(1-2q) w / (1 - q w - 2pq w^2).
RationalGF ball_gf(const WalkParams& params);

/// Limit of c_{k+1} / c_k, estimated from the last two of the first K + 1
/// coefficients. Stops early once the ratio is stationary or before the
/// coefficients leave the normal double range.
double asymptotic_ratio(const RationalGF& gf, std::int64_t K = 4000);

/// Growth rate of the maximal ball weight read off the ball series:
/// -1 / log(lim c_{l+1} / c_l).
double ball_series_weight_rate(const WalkParams& params);

}  // namespace walklab
