#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "walklab/model.hpp"
#include "walklab/rng.hpp"

namespace walklab {

/// Window around heavy points. The window radius is floor(c log log n) and
/// the admission threshold is (1 - delta_n) lambda0 log n.
struct HeavyPointConfig {
  double delta_n = 0.2;
  double c = 0.5;
};

struct SimConfig {
  WalkParams params;
  std::int64_t n = 1000;
  std::int64_t replicas = 1;
  std::uint64_t seed = 0;
  double escape_eps = 1e-12;
  std::optional<HeavyPointConfig> heavy;
  /// Offsets z for which the maximal two-point occupation Xi*({0, z}, n) is
  /// reported.
  std::vector<int> xi_star_offsets{1};
  /// Worker threads. Results never depend on this value.
  unsigned threads = 1;
};

/// Throws ValidationError when a field violates its documented range.
void validate(const SimConfig& config);

/// Smallest m with h^m <= eps: once the walk stands m levels above every
/// tracked site, the chance of coming back is at most eps.
std::int64_t escape_margin(const WalkParams& params, double eps);

inline constexpr std::uint64_t kStepBudget = 1'000'000'000;

/// Visit counts of one path over steps 1..n.
struct LocalTimeField {
  std::int64_t n = 0;
  std::int64_t min_site = 0;  // min over S_1..S_n
  std::int64_t max_site = 0;  // max over S_1..S_n
  std::int64_t final_position = 0;
  /// counts[i] is the local time of site min_site + i.
  std::vector<std::uint32_t> counts;

  std::uint64_t at(std::int64_t site) const {
    if (site < min_site || site > max_site) return 0;
    return counts[static_cast<std::size_t>(site - min_site)];
  }
};

LocalTimeField simulate_path(const WalkParams& params, std::int64_t n,
                             std::uint64_t seed, std::uint64_t stream = 0);

/// Total local times xi(site, inf), truncated once the walk is
/// escape_margin(eps) above max(sites). Each count is exact except with
/// probability at most |sites| * eps.
std::map<std::int64_t, std::uint64_t> total_local_times(
    const WalkParams& params, std::span<const std::int64_t> sites,
    std::uint64_t seed, double escape_eps, std::uint64_t stream = 0);

struct HeavyProfile {
  int radius = 0;
  double threshold = 0;  // (1 - delta_n) lambda0 log n
  /// Sites u with xi(u, n) >= threshold, and the maximal relative deviation
  /// |xi(u + z, n) / (m_z lambda0 log n) - 1| over them and |z| <= radius.
  std::size_t window_points = 0;
  std::optional<double> window_deviation;
  /// Same with total local times, over sites visited up to time n.
  std::size_t total_points = 0;
  std::optional<double> total_deviation;
};

/// A (local time, sphere occupation) value pair and the number of sites
/// attaining it.
struct CloudPoint {
  std::uint64_t xi = 0;
  std::uint64_t sphere = 0;
  std::uint64_t sites = 0;
};

struct PathReport {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::int64_t n = 0;
  std::int64_t final_position = 0;
  /// qtilde[k] = number of sites with local time exactly k (k >= 1; entry 0
  /// is unused and zero).
  std::vector<std::uint64_t> qtilde;
  std::uint64_t nu_n = 0;     // strict new maxima among S_1..S_n
  std::uint64_t xi_max = 0;   // max_z xi(z, n)
  std::uint64_t eta_max = 0;  // max over visited sites of xi(z, inf)
  std::uint64_t w_max = 0;    // max_z xi(z, n) + Xi(z, n)
  std::vector<std::pair<int, std::uint64_t>> xi_star;  // (z, Xi*({0,z}, n))
  std::vector<CloudPoint> cloud;
  std::optional<HeavyProfile> heavy;
  std::uint64_t continuation_steps = 0;
};

/// Single long path statistics for replica `replica` of the configuration.
PathReport path_report(const SimConfig& config, std::uint64_t replica = 0);

/// path_report for every replica 0..replicas-1, in replica order.
std::vector<PathReport> path_reports(const SimConfig& config);

/// Heavy-point profile of one replica; requires config.heavy.
HeavyProfile heavy_point_profile(const SimConfig& config,
                                 std::uint64_t replica = 0);

/// Number of cloud sites outside (factor log n) D.
std::uint64_t cloud_points_outside(const WalkParams& params,
                                   const PathReport& report, double factor);

/// Exact integer accumulator: merging is associative and commutative, so
/// ensemble results do not depend on the parallel schedule.
struct Accumulator {
  std::uint64_t count = 0;
  __int128 sum = 0;
  __int128 sum_squares = 0;
  std::map<std::int64_t, std::uint64_t> histogram;

  void add(std::int64_t v);
  void merge(const Accumulator& other);
  double mean() const;
  double variance() const;  // unbiased; 0 for fewer than two samples
  double frequency(std::int64_t k) const;
};

struct ReplicaContext {
  const SimConfig& config;
  std::uint64_t replica;
  StepStream stream;
};

/// An integer-valued statistic of one replica with a fixed number of
/// components.
struct Statistic {
  std::string name;
  std::vector<std::string> components;
  std::function<void(ReplicaContext&, std::span<std::int64_t>)> evaluate;
};

struct ComponentSummary {
  std::string name;
  double mean = 0;
  double variance = 0;
  double std_error = 0;
  double band_low = 0;   // mean - 4 std_error
  double band_high = 0;  // mean + 4 std_error
};

struct EnsembleResult {
  std::string statistic;
  std::uint64_t replicas = 0;
  std::vector<Accumulator> accumulators;
  std::vector<ComponentSummary> summary;
};

inline constexpr double kBandSigmas = 4.0;

/// Runs config.replicas replicas; replica r draws from stream r.
EnsembleResult ensemble(const SimConfig& config, const Statistic& statistic);

/// 1 if the walk does not revisit 0 during steps 1..horizon.
Statistic no_return_statistic(std::int64_t horizon);

/// Occupation time of each site set over the infinite path, escape-truncated
/// at config.escape_eps.
Statistic escape_occupation_statistic(
    std::vector<std::pair<std::string, std::vector<std::int64_t>>> sets);

/// S_n.
Statistic final_position_statistic();

struct PmfComparison {
  std::int64_t k = 0;
  double first = 0;   // empirical frequency, first sample
  double second = 0;  // empirical frequency (or law), second sample
  double z = 0;       // standardized difference
};

struct ReversedWalkReport {
  std::int64_t n = 0;
  bool increments_ok = false;
  std::uint64_t reversed_up_steps = 0;
  double reversed_up_fraction = 0;
  double up_zscore = 0;  // against the swapped walk's up-probability q
  std::int64_t offset = 1;
  std::uint64_t replicas = 0;
  std::int64_t ensemble_horizon = 0;
  std::vector<PmfComparison> comparison;
  double max_abs_z = 0;
  bool passed = false;
};

/// Checks the reversed path of one sampled path against the (q, p)-swapped
/// walk, then compares the law of the reversed walk's local time at -offset
/// (from `replicas` paths of length max(n, 256)) with the forward law at
/// +offset (from independent escape-truncated replicas).
ReversedWalkReport reversed_walk_check(const WalkParams& params, std::int64_t n,
                                       std::uint64_t seed,
                                       std::uint64_t replicas = 100'000,
                                       std::int64_t offset = 1,
                                       unsigned threads = 1);

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t, unsigned)>& fn);

}  // namespace walklab
