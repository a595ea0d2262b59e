#include "walklab/pmf.hpp"

#include <algorithm>
#include <cmath>

namespace walklab {

double PmfTable::sum() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

double PmfTable::at(std::int64_t k) const {
  auto it = std::lower_bound(support.begin(), support.end(), k);
  if (it == support.end() || *it != k) return 0.0;
  return mass[static_cast<std::size_t>(it - support.begin())];
}

double PmfTable::partial_mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    s += static_cast<double>(support[i]) * mass[i];
  }
  return s;
}

double PmfTable::normalization_residual() const {
  return std::abs(sum() + tail_bound - law_mass);
}

}  // namespace walklab
