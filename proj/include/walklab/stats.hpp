#pragma once

#include <cstdint>
#include <vector>

#include "walklab/montecarlo.hpp"
#include "walklab/pmf.hpp"

namespace walklab {

/// One outcome (or pooled outcome range) of a goodness-of-fit test.
struct FitBin {
  std::int64_t first = 0;
  std::int64_t last = 0;  // INT64_MAX for the open upper bin
  std::uint64_t observed = 0;
  double expected = 0;
};

struct FitResult {
  std::uint64_t samples = 0;
  /// Per listed outcome with N p >= 5 (where the normal band is meaningful):
  /// |observed - N p| / sqrt(N p (1 - p)).
  double max_abs_z = 0;
  std::int64_t worst_outcome = 0;
  bool bands_ok = false;  // max_abs_z <= sigmas
  /// Pearson statistic over bins pooled to expected count >= 5.
  std::vector<FitBin> bins;
  double chi2 = 0;
  int dof = 0;
  double p_value = 0;
  bool chi2_ok = false;  // p_value >= alpha
  bool passed() const { return bands_ok && chi2_ok; }
};

/// Compares the histogram of `sample` with a complete law. Outcomes beyond
/// the listed support are pooled with the law's tail mass.
FitResult fit_pmf(const Accumulator& sample, const PmfTable& law,
                  double sigmas = kBandSigmas, double alpha = 0.01);

/// Upper tail probability of the chi-squared distribution.
double chi2_survival(double statistic, int dof);

/// Standardized distance of an empirical proportion from p0.
double proportion_z(std::uint64_t successes, std::uint64_t trials, double p0);

double median(std::vector<double> values);

}  // namespace walklab
