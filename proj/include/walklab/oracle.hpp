#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "walklab/model.hpp"

namespace walklab {

enum class FunctionalKind { LocalTime, SetOccupation };

/// A visit-counting functional of the path over steps 1..n. Counts above
/// `cap` are pooled in an overflow bucket stored at index cap + 1.
struct Functional {
  FunctionalKind kind = FunctionalKind::LocalTime;
  std::vector<int> sites;
  int cap = 1;

  static Functional local_time(int site, int cap);
  static Functional set_occupation(std::vector<int> sites, int cap);

  bool contains(int x) const;
  std::string label() const;
};

/// Joint law of up to two functionals at a finite horizon.
struct JointLaw {
  std::vector<Functional> axes;
  /// Row-major over extent(0) x extent(1) x ...; last index of every axis is
  /// the overflow bucket.
  std::vector<double> table;
  std::int64_t horizon = 0;
  /// Upper bound on |entry - infinite-horizon entry| for every listed entry.
  /// Zero for plain finite-horizon laws.
  double certificate = 0.0;

  std::size_t extent(std::size_t axis) const {
    return static_cast<std::size_t>(axes[axis].cap) + 2;
  }
  std::size_t flat_index(std::span<const int> counts) const;
  double at(std::span<const int> counts) const;
  double at(int c0) const;
  double at(int c0, int c1) const;
  double total() const;
  /// Mass of tuples with at least one overflowing counter.
  double overflow_mass() const;
  /// Marginal law of one axis (size extent(axis), last entry = overflow).
  std::vector<double> marginal(std::size_t axis) const;
};

inline constexpr std::int64_t kMaxEnumerationSteps = 24;
inline constexpr std::int64_t kMaxDpSteps = 5000;
inline constexpr std::int64_t kMaxDpCounterStates = 10'000;
inline constexpr std::size_t kMaxDpCells = 40'000'000;

/// Exact law by summing p^#up q^#down over all 2^n paths (n <= 24, at most
/// two functionals).
JointLaw enumerate_paths(const WalkParams& params, std::int64_t n,
                         const std::vector<Functional>& functionals);

/// Exact law by forward dynamic programming over (position, counters).
/// Throws BudgetError when n > 5000, the product of caps exceeds 10^4, or the
/// (position x counter tuple) table would exceed kMaxDpCells entries.
JointLaw dp_law(const WalkParams& params, std::int64_t n,
                const std::vector<Functional>& functionals);

/// Bound on the probability that any of `sites` is visited after time n,
/// from P(S_l = j) <= (4pq)^(l/2) (p/q)^(j/2).
double late_visit_bound(const WalkParams& params, std::span<const int> sites,
                        std::int64_t n);

/// Finite-horizon law whose entries are within `eps` of the infinite-horizon
/// law. The certificate also charges n * DBL_EPSILON for accumulated
/// rounding, so precisions below double resolution are rejected with
/// BudgetError.
JointLaw infinite_law(const WalkParams& params,
                      const std::vector<Functional>& functionals, double eps);

/// Certificate value infinite_law would attach at horizon n.
double horizon_certificate(const WalkParams& params,
                           const std::vector<Functional>& functionals,
                           std::int64_t n);

}  // namespace walklab
