#pragma once

#include <cstdint>

#include "walklab/model.hpp"
#include "walklab/pmf.hpp"

namespace walklab {

/// Which side of the origin a positive offset z refers to.
enum class Side { Positive, Negative };

/// Starting site for the centre/sphere joint law.
enum class Start { Origin, Plus, Minus };

double log_binomial(double n, double k);

/// P(T = 2n), T the first return time to 0.
double first_return_pmf(const WalkParams& params, std::int64_t n);

struct ReturnTail {
  double tail = 0;      // P(n <= T < infinity)
  double gamma0_n = 0;  // 1 - P(T < n): no return during the first n-1 steps
  double q_n = 0;       // P(T < n, S_1 = 1) = q - tail / 2
};

ReturnTail return_tail(const WalkParams& params, std::int64_t n);

/// P(T_z < infinity).
double hitting_prob(const WalkParams& params, std::int64_t z);

/// Expected number of visits to z, time 0 included.
double green(const WalkParams& params, std::int64_t z);

/// Law of the total local time at z, truncated at kmax.
PmfTable local_time_pmf(const WalkParams& params, std::int64_t z,
                        std::int64_t kmax);

/// P_b(T_a < T_c) for 0 <= a < b < c.
double gambler_ruin(const WalkParams& params, std::int64_t a, std::int64_t b,
                    std::int64_t c);

/// Hit-before-return probabilities of a first excursion from 0, for z >= 1.
struct ExcursionLaw {
  double Pz = 0;      // P(T_z < T)
  double Qz = 0;      // 1 - Pz = P(T < T_z)
  double s_pos = 0;   // P(T_z < T) = Pz
  double s_neg = 0;   // P(T_{-z} < T) = h^z Pz
  double q_pos = 0;   // P(T < T_z)
  double q_neg = 0;   // P(T < T_{-z}) = q_pos
};

ExcursionLaw excursion_law(const WalkParams& params, std::int64_t z);

/// Visits to +z or -z during the first excursion from 0, split by whether
/// the excursion ends (T finite) or escapes (T infinite).
struct ExcursionVisits {
  PmfTable finite_return;  // P(Z({z}) = j, T < inf), identical for +z and -z
  PmfTable escape_pos;     // P(Z({z}) = j, T = inf)
  PmfTable escape_neg;     // P(Z({-z}) = j, T = inf), a single atom at 0
};

ExcursionVisits excursion_visits_pmf(const WalkParams& params, std::int64_t z,
                                     std::int64_t jmax);

/// Region of convergence of joint_transform in v: v < -log(Q_z).
double joint_transform_radius(const WalkParams& params, std::int64_t z);

/// E(exp(v xi(+-z, inf)), xi(0, inf) = k) through the rational forms phi, psi.
double joint_transform(const WalkParams& params, std::int64_t z,
                       std::int64_t k, double v, Side side);

/// The same expectation for the time-reversed walk (up-probability q),
/// assembled from excursion moment generating functions.
double reversed_joint_transform(const WalkParams& params, std::int64_t z,
                                std::int64_t k, double v, Side side);

/// Law of the occupation time of {0, z} (Positive) or {0, -z} (Negative).
PmfTable two_point_occupation_pmf(const WalkParams& params, std::int64_t z,
                                  Side side, std::int64_t kmax);

/// P(Xi(0, inf) = L, xi(0, inf) = K) for a walk started at 0, +1 or -1.
/// For the shifted starts the initial visit is not counted.
double center_sphere_joint_pmf(const WalkParams& params, Start start,
                               std::int64_t K, std::int64_t L);

/// Law of the occupation time of the unit sphere {-1, 1}.
PmfTable sphere_occupation_pmf(const WalkParams& params, std::int64_t Lmax);

/// Law of the occupation time of the ball {-1, 0, 1}.
PmfTable ball_occupation_pmf(const WalkParams& params, std::int64_t lmax);

}  // namespace walklab
