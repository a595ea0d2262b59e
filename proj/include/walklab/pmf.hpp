#pragma once

#include <cstdint>
#include <vector>

namespace walklab {

/// Truncated probability mass function.
///
/// `tail_bound` is the mass the law places beyond the last listed outcome.
/// Every closed-form table in this library fills it with the exact geometric
/// tail, so sum() + tail_bound reproduces `law_mass` up to rounding.
/// `law_mass` is 1 for complete laws and smaller for sub-probability laws
/// (for instance the restriction of a law to the event of a finite return).
struct PmfTable {
  std::vector<std::int64_t> support;
  std::vector<double> mass;
  double tail_bound = 0.0;
  double law_mass = 1.0;

  void push(std::int64_t k, double m) {
    support.push_back(k);
    mass.push_back(m);
  }
  std::size_t size() const { return support.size(); }
  double sum() const;
  /// Mass at outcome k, 0 when k is not listed.
  double at(std::int64_t k) const;
  /// Sum of k * mass over the listed support.
  double partial_mean() const;
  /// |sum() + tail_bound - law_mass|
  double normalization_residual() const;
};

}  // namespace walklab
