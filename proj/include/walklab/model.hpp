#pragma once

#include <stdexcept>
#include <string>

namespace walklab {

/// Raised when an argument violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a transform is evaluated outside its region of convergence.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a computation would exceed its step, state or horizon budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nearest-neighbour walk on the integers with up-probability p in (1/2, 1).
///
/// Construct through make_params(); the fields are kept consistent
/// (q = 1 - p, h = q / p) and never mutated afterwards.
struct WalkParams {
  double p = 0.75;
  double q = 0.25;
  double h = 1.0 / 3.0;

  double log_h() const;
};

WalkParams make_params(double p);

/// Scalar constants of the walk. All fields are closed forms of p.
struct Constants {
  double gamma0 = 0;   // no-return probability p - q
  double lambda0 = 0;  // growth rate of the maximal local time, -1/log(2q)
  double kappa0 = 0;   // growth rate of the maximal sphere occupation
  double beta = 0;     // sqrt(1 + 8p/q)
  double two_solution_threshold = 0;  // -1/log(2pq)
  double wlimit = 0;   // growth rate of the maximal ball weight
};

Constants derived_constants(const WalkParams& params);

/// Exponential decay rate of the two-point occupation law of {0, z}, z >= 1.
/// The almost-sure growth rate of the maximal two-point occupation is its
/// reciprocal.
double theta(const WalkParams& params, int z);

/// h^(z/2) for any integer z, evaluated as exp((z/2) log h).
double half_power_h(const WalkParams& params, int z);

/// Expected visits to z during one excursion from 0, conditioned on return.
double excursion_mean_profile(const WalkParams& params, int z);

}  // namespace walklab
