#include "walklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

namespace walklab {

double chi2_survival(double statistic, int dof) {
  if (dof < 1) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

double proportion_z(std::uint64_t successes, std::uint64_t trials, double p0) {
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(n * p0 * (1.0 - p0));
  const double diff = static_cast<double>(successes) - n * p0;
  if (sd == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / sd;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

FitResult fit_pmf(const Accumulator& sample, const PmfTable& law, double sigmas,
                  double alpha) {
  FitResult r;
  r.samples = sample.count;
  const double n = static_cast<double>(sample.count);
  const auto observed = [&](std::int64_t k) -> std::uint64_t {
    const auto it = sample.histogram.find(k);
    return it == sample.histogram.end() ? 0 : it->second;
  };

  std::uint64_t listed = 0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    const std::int64_t k = law.support[i];
    const double pk = law.mass[i];
    const std::uint64_t o = observed(k);
    listed += o;
    if (n * pk < 5.0) continue;
    const double z = proportion_z(o, sample.count, pk);
    if (std::abs(z) > r.max_abs_z) {
      r.max_abs_z = std::abs(z);
      r.worst_outcome = k;
    }
  }
  r.bands_ok = r.max_abs_z <= sigmas;

  // Pool consecutive outcomes until each bin expects at least 5 samples.
  FitBin open;
  bool have_open = false;
  for (std::size_t i = 0; i < law.size(); ++i) {
    if (!have_open) {
      open = FitBin{law.support[i], law.support[i], 0, 0.0};
      have_open = true;
    }
    open.last = law.support[i];
    open.observed += observed(law.support[i]);
    open.expected += n * law.mass[i];
    if (open.expected >= 5.0) {
      r.bins.push_back(open);
      have_open = false;
    }
  }
  const std::uint64_t rest = sample.count - listed;
  const double rest_expected = n * std::max(0.0, law.law_mass - law.sum());
  if (!have_open) {
    open = FitBin{law.size() ? law.support.back() + 1 : 0, 0, 0, 0.0};
  }
  open.last = std::numeric_limits<std::int64_t>::max();
  open.observed += rest;
  open.expected += rest_expected;
  if (open.expected >= 5.0 || r.bins.empty()) {
    r.bins.push_back(open);
  } else {
    FitBin& back = r.bins.back();
    back.last = open.last;
    back.observed += open.observed;
    back.expected += open.expected;
  }

  for (const FitBin& b : r.bins) {
    const double d = static_cast<double>(b.observed) - b.expected;
    if (b.expected > 0.0) {
      r.chi2 += d * d / b.expected;
    } else if (b.observed > 0) {
      r.chi2 = std::numeric_limits<double>::infinity();
    }
  }
  r.dof = static_cast<int>(r.bins.size()) - 1;
  r.p_value = chi2_survival(r.chi2, r.dof);
  r.chi2_ok = r.p_value >= alpha;
  return r;
}

}  // namespace walklab
