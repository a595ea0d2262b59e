#include "walklab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "walklab/boundary.hpp"

namespace walklab {

void validate(const SimConfig& config) {
  if (config.n < 1) throw ValidationError("n must be >= 1");
  if (config.replicas < 1) throw ValidationError("replicas must be >= 1");
  if (!(config.escape_eps > 0.0 && config.escape_eps <= 1e-3)) {
    throw ValidationError("escape_eps must lie in (0, 1e-3]");
  }
  for (int z : config.xi_star_offsets) {
    if (z < 1) throw ValidationError("xi_star offsets must be >= 1");
  }
  if (config.heavy) {
    const HeavyPointConfig& h = *config.heavy;
    if (!(h.delta_n >= 0.0 && h.delta_n < 1.0)) {
      throw ValidationError("heavy delta_n must lie in [0, 1)");
    }
    if (!(h.c > 0.0)) throw ValidationError("heavy window coefficient c must be > 0");
    const double alpha = -config.params.log_h();
    if (!(alpha * h.c < 1.0)) {
      std::ostringstream os;
      os << "heavy window coefficient c = " << h.c << " violates log(1/h) c < 1 (log(1/h) = "
         << alpha << ")";
      throw ValidationError(os.str());
    }
    if (config.n < 3) throw ValidationError("heavy-point profile needs n >= 3");
  }
}

std::int64_t escape_margin(const WalkParams& params, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("escape eps must lie in (0, 1)");
  return static_cast<std::int64_t>(std::ceil(std::log(eps) / params.log_h()));
}

namespace {

void throw_step_budget(std::uint64_t steps) {
  std::ostringstream os;
  os << "step budget of " << kStepBudget << " exceeded after " << steps
     << " steps while waiting for escape";
  throw BudgetError(os.str());
}

// Visit counters over a site interval that grows to cover the path.
class DenseCounts {
 public:
  DenseCounts() : base_(-1024), c_(2049, 0) {}

  void hit(std::int64_t site) {
    const std::uint64_t i = static_cast<std::uint64_t>(site - base_);
    if (i >= c_.size()) {
      grow(site);
      ++c_[static_cast<std::size_t>(site - base_)];
      return;
    }
    ++c_[i];
  }

  std::uint32_t at(std::int64_t site) const {
    const std::uint64_t i = static_cast<std::uint64_t>(site - base_);
    return i < c_.size() ? c_[i] : 0;
  }

 private:
  void grow(std::int64_t site) {
    const std::int64_t extra = static_cast<std::int64_t>(c_.size());
    std::int64_t lo = base_;
    std::int64_t hi = base_ + extra - 1;
    if (site < lo) lo = site - extra;
    if (site > hi) hi = site + extra;
    std::vector<std::uint32_t> next(static_cast<std::size_t>(hi - lo + 1), 0);
    std::copy(c_.begin(), c_.end(), next.begin() + (base_ - lo));
    c_ = std::move(next);
    base_ = lo;
  }

  std::int64_t base_;
  std::vector<std::uint32_t> c_;
};

struct PathSummary {
  std::int64_t min_site = 0;
  std::int64_t max_site = 0;
  std::int64_t final_position = 0;
  std::uint64_t new_maxima = 0;
};

PathSummary run_path(StepStream& stream, std::int64_t n, DenseCounts& counts) {
  PathSummary s;
  std::int64_t pos = 0;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  std::int64_t running_max = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    pos += stream.next();
    counts.hit(pos);
    if (pos > running_max) {
      running_max = pos;
      ++s.new_maxima;
    }
    lo = std::min(lo, pos);
    hi = std::max(hi, pos);
  }
  s.min_site = lo;
  s.max_site = hi;
  s.final_position = pos;
  return s;
}

LocalTimeField to_field(const DenseCounts& counts, const PathSummary& s,
                        std::int64_t n) {
  LocalTimeField f;
  f.n = n;
  f.min_site = s.min_site;
  f.max_site = s.max_site;
  f.final_position = s.final_position;
  f.counts.resize(static_cast<std::size_t>(s.max_site - s.min_site + 1));
  for (std::int64_t x = s.min_site; x <= s.max_site; ++x) {
    f.counts[static_cast<std::size_t>(x - s.min_site)] = counts.at(x);
  }
  return f;
}

double log_n(std::int64_t n) { return std::log(static_cast<double>(n)); }

// Largest relative deviation of counts around heavy sites from the profile
// m_z lambda0 log n. `value(site)` gives the count used for both admission
// and the profile.
template <class Value>
std::pair<std::size_t, std::optional<double>> heavy_deviation(
    const WalkParams& params, std::int64_t lo, std::int64_t hi, int radius,
    double threshold, double scale, Value value) {
  std::size_t points = 0;
  double worst = 0.0;
  for (std::int64_t u = lo; u <= hi; ++u) {
    if (static_cast<double>(value(u)) < threshold) continue;
    ++points;
    for (int z = -radius; z <= radius; ++z) {
      const double expected = excursion_mean_profile(params, z) * scale;
      const double dev = std::abs(static_cast<double>(value(u + z)) / expected - 1.0);
      worst = std::max(worst, dev);
    }
  }
  if (points == 0) return {0, std::nullopt};
  return {points, worst};
}

}  // namespace

LocalTimeField simulate_path(const WalkParams& params, std::int64_t n,
                             std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw ValidationError("n must be >= 1");
  StepStream steps(params, seed, stream);
  DenseCounts counts;
  const PathSummary s = run_path(steps, n, counts);
  return to_field(counts, s, n);
}

std::map<std::int64_t, std::uint64_t> total_local_times(
    const WalkParams& params, std::span<const std::int64_t> sites,
    std::uint64_t seed, double escape_eps, std::uint64_t stream) {
  if (sites.empty()) throw ValidationError("total_local_times needs at least one site");
  std::vector<std::int64_t> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint64_t> count(sorted.size(), 0);
  const std::int64_t lo = sorted.front();
  const std::int64_t hi = sorted.back();
  const std::int64_t stop = hi + escape_margin(params, escape_eps);

  StepStream steps(params, seed, stream);
  std::int64_t pos = 0;
  std::uint64_t taken = 0;
  while (pos < stop) {
    if (taken == kStepBudget) throw_step_budget(taken);
    pos += steps.next();
    ++taken;
    if (pos < lo || pos > hi) continue;
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), pos);
    if (it != sorted.end() && *it == pos) ++count[static_cast<std::size_t>(it - sorted.begin())];
  }
  std::map<std::int64_t, std::uint64_t> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) out[sorted[i]] = count[i];
  return out;
}

PathReport path_report(const SimConfig& config, std::uint64_t replica) {
  validate(config);
  const WalkParams& params = config.params;
  const std::int64_t n = config.n;
  StepStream steps(params, config.seed, replica);
  DenseCounts counts;
  const PathSummary s = run_path(steps, n, counts);

  PathReport r;
  r.seed = config.seed;
  r.replica = replica;
  r.n = n;
  r.final_position = s.final_position;
  r.nu_n = s.new_maxima;

  std::uint32_t top = 0;
  for (std::int64_t x = s.min_site; x <= s.max_site; ++x) top = std::max(top, counts.at(x));
  r.xi_max = top;
  r.qtilde.assign(top + 1, 0);
  for (std::int64_t x = s.min_site; x <= s.max_site; ++x) {
    const std::uint32_t k = counts.at(x);
    if (k > 0) ++r.qtilde[k];
  }

  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> cloud;
  for (std::int64_t x = s.min_site - 1; x <= s.max_site + 1; ++x) {
    const std::uint64_t xi = counts.at(x);
    const std::uint64_t sphere =
        static_cast<std::uint64_t>(counts.at(x - 1)) + counts.at(x + 1);
    r.w_max = std::max(r.w_max, xi + sphere);
    if (xi == 0 && sphere == 0) continue;
    ++cloud[{xi, sphere}];
  }
  for (const auto& [key, sites] : cloud) r.cloud.push_back({key.first, key.second, sites});

  for (int z : config.xi_star_offsets) {
    std::uint64_t best = 0;
    for (std::int64_t u = s.min_site - z; u <= s.max_site; ++u) {
      best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(counts.at(u)) +
                                               counts.at(u + z));
    }
    r.xi_star.emplace_back(z, best);
  }

  // Total local times of the visited sites (plus the heavy-point window
  // around them), from continuing the same path until it has escaped.
  const std::int64_t lo = std::min<std::int64_t>(0, s.min_site);
  const std::int64_t hi = std::max<std::int64_t>(0, s.max_site);
  int radius = 0;
  if (config.heavy) {
    radius = static_cast<int>(std::max(0.0, std::floor(config.heavy->c * std::log(log_n(n)))));
  }
  const std::int64_t tlo = lo - radius;
  const std::int64_t thi = hi + radius;
  std::vector<std::uint64_t> totals(static_cast<std::size_t>(thi - tlo + 1));
  for (std::int64_t x = tlo; x <= thi; ++x) totals[static_cast<std::size_t>(x - tlo)] = counts.at(x);
  const std::int64_t stop = thi + escape_margin(params, config.escape_eps);
  std::int64_t pos = s.final_position;
  std::uint64_t extra = 0;
  while (pos < stop) {
    if (extra == kStepBudget) throw_step_budget(extra);
    pos += steps.next();
    ++extra;
    if (pos >= tlo && pos <= thi) ++totals[static_cast<std::size_t>(pos - tlo)];
  }
  r.continuation_steps = extra;
  const auto total_at = [&](std::int64_t x) -> std::uint64_t {
    if (x < tlo || x > thi) return 0;
    return totals[static_cast<std::size_t>(x - tlo)];
  };
  for (std::int64_t x = lo; x <= hi; ++x) r.eta_max = std::max(r.eta_max, total_at(x));

  if (config.heavy) {
    const double lambda0 = derived_constants(params).lambda0;
    const double scale = lambda0 * log_n(n);
    HeavyProfile hp;
    hp.radius = radius;
    hp.threshold = (1.0 - config.heavy->delta_n) * scale;
    const auto window = heavy_deviation(params, s.min_site, s.max_site, radius, hp.threshold,
                                        scale, [&](std::int64_t x) { return counts.at(x); });
    hp.window_points = window.first;
    hp.window_deviation = window.second;
    const auto total = heavy_deviation(params, lo, hi, radius, hp.threshold, scale, total_at);
    hp.total_points = total.first;
    hp.total_deviation = total.second;
    r.heavy = hp;
  }
  return r;
}

std::vector<PathReport> path_reports(const SimConfig& config) {
  validate(config);
  std::vector<PathReport> out(static_cast<std::size_t>(config.replicas));
  parallel_for(out.size(), config.threads,
               [&](std::uint64_t i, unsigned) { out[i] = path_report(config, i); });
  return out;
}

HeavyProfile heavy_point_profile(const SimConfig& config, std::uint64_t replica) {
  if (!config.heavy) throw ValidationError("heavy_point_profile needs a heavy-point config");
  return *path_report(config, replica).heavy;
}

std::uint64_t cloud_points_outside(const WalkParams& params, const PathReport& report,
                                   double factor) {
  const double scale = factor * log_n(report.n);
  std::uint64_t outside = 0;
  for (const CloudPoint& c : report.cloud) {
    if (!in_D(params, static_cast<double>(c.xi) / scale, static_cast<double>(c.sphere) / scale)) {
      outside += c.sites;
    }
  }
  return outside;
}

void Accumulator::add(std::int64_t v) {
  ++count;
  sum += v;
  sum_squares += static_cast<__int128>(v) * v;
  ++histogram[v];
}

void Accumulator::merge(const Accumulator& other) {
  count += other.count;
  sum += other.sum;
  sum_squares += other.sum_squares;
  for (const auto& [k, c] : other.histogram) histogram[k] += c;
}

double Accumulator::mean() const {
  return count ? static_cast<double>(sum) / static_cast<double>(count) : 0.0;
}

double Accumulator::variance() const {
  if (count < 2) return 0.0;
  const __int128 n = count;
  const __int128 num = n * sum_squares - sum * sum;
  return static_cast<double>(num) / (static_cast<double>(count) * static_cast<double>(count - 1));
}

double Accumulator::frequency(std::int64_t k) const {
  if (count == 0) return 0.0;
  const auto it = histogram.find(k);
  return it == histogram.end() ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(count);
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t, unsigned)>& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i, w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EnsembleResult ensemble(const SimConfig& config, const Statistic& statistic) {
  validate(config);
  if (statistic.components.empty()) throw ValidationError("statistic has no components");
  const std::size_t width = statistic.components.size();
  const unsigned workers = std::max(1u, config.threads);
  std::vector<std::vector<Accumulator>> partial(workers, std::vector<Accumulator>(width));
  parallel_for(static_cast<std::uint64_t>(config.replicas), workers,
               [&](std::uint64_t r, unsigned w) {
                 ReplicaContext ctx{config, r, StepStream(config.params, config.seed, r)};
                 std::vector<std::int64_t> values(width, 0);
                 statistic.evaluate(ctx, values);
                 for (std::size_t c = 0; c < width; ++c) partial[w][c].add(values[c]);
               });

  EnsembleResult out;
  out.statistic = statistic.name;
  out.replicas = static_cast<std::uint64_t>(config.replicas);
  out.accumulators.assign(width, Accumulator{});
  for (const auto& part : partial) {
    for (std::size_t c = 0; c < width; ++c) out.accumulators[c].merge(part[c]);
  }
  for (std::size_t c = 0; c < width; ++c) {
    const Accumulator& a = out.accumulators[c];
    ComponentSummary s;
    s.name = statistic.components[c];
    s.mean = a.mean();
    s.variance = a.variance();
    s.std_error = std::sqrt(s.variance / static_cast<double>(a.count));
    s.band_low = s.mean - kBandSigmas * s.std_error;
    s.band_high = s.mean + kBandSigmas * s.std_error;
    out.summary.push_back(s);
  }
  return out;
}

Statistic no_return_statistic(std::int64_t horizon) {
  if (horizon < 1) throw ValidationError("no-return horizon must be >= 1");
  Statistic s;
  s.name = "no_return";
  s.components = {"no_return_by_" + std::to_string(horizon)};
  s.evaluate = [horizon](ReplicaContext& ctx, std::span<std::int64_t> out) {
    std::int64_t pos = 0;
    for (std::int64_t i = 0; i < horizon; ++i) {
      pos += ctx.stream.next();
      if (pos == 0) {
        out[0] = 0;
        return;
      }
    }
    out[0] = 1;
  };
  return s;
}

Statistic escape_occupation_statistic(
    std::vector<std::pair<std::string, std::vector<std::int64_t>>> sets) {
  if (sets.empty()) throw ValidationError("escape occupation needs at least one set");
  if (sets.size() > 32) throw ValidationError("escape occupation supports at most 32 sets");
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const auto& [name, sites] : sets) {
    if (sites.empty()) throw ValidationError("site set '" + name + "' is empty");
    for (std::int64_t x : sites) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (hi - lo > 1'000'000) throw ValidationError("site sets span more than 10^6 sites");
  std::vector<std::uint32_t> masks(static_cast<std::size_t>(hi - lo + 1), 0);
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::int64_t x : sets[a].second) masks[static_cast<std::size_t>(x - lo)] |= 1u << a;
  }
  Statistic s;
  s.name = "escape_occupation";
  for (const auto& set : sets) s.components.push_back(set.first);
  s.evaluate = [lo, hi, masks = std::move(masks)](ReplicaContext& ctx,
                                                  std::span<std::int64_t> out) {
    const std::int64_t stop = hi + escape_margin(ctx.config.params, ctx.config.escape_eps);
    std::fill(out.begin(), out.end(), 0);
    std::int64_t pos = 0;
    std::uint64_t taken = 0;
    while (pos < stop) {
      if (taken == kStepBudget) throw_step_budget(taken);
      pos += ctx.stream.next();
      ++taken;
      if (pos < lo || pos > hi) continue;
      std::uint32_t m = masks[static_cast<std::size_t>(pos - lo)];
      while (m) {
        const int a = __builtin_ctz(m);
        ++out[static_cast<std::size_t>(a)];
        m &= m - 1;
      }
    }
  };
  return s;
}

Statistic final_position_statistic() {
  Statistic s;
  s.name = "final_position";
  s.components = {"final_position"};
  s.evaluate = [](ReplicaContext& ctx, std::span<std::int64_t> out) {
    std::int64_t pos = 0;
    for (std::int64_t i = 0; i < ctx.config.n; ++i) pos += ctx.stream.next();
    out[0] = pos;
  };
  return s;
}

ReversedWalkReport reversed_walk_check(const WalkParams& params, std::int64_t n,
                                       std::uint64_t seed, std::uint64_t replicas,
                                       std::int64_t offset, unsigned threads) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (replicas < 2) throw ValidationError("reversed walk check needs >= 2 replicas");
  if (offset < 1) throw ValidationError("reversed walk offset must be >= 1");
  ReversedWalkReport rep;
  rep.n = n;
  rep.offset = offset;
  rep.replicas = replicas;

  // One path and its reversal S'_i = S_{n-i} - S_n.
  {
    StepStream steps(params, seed, 0);
    std::vector<std::int64_t> path(static_cast<std::size_t>(n + 1), 0);
    std::vector<int> inc(static_cast<std::size_t>(n));
    for (std::int64_t i = 1; i <= n; ++i) {
      inc[static_cast<std::size_t>(i - 1)] = steps.next();
      path[static_cast<std::size_t>(i)] = path[static_cast<std::size_t>(i - 1)] + inc[static_cast<std::size_t>(i - 1)];
    }
    const std::int64_t sn = path.back();
    bool ok = true;
    std::int64_t prev = 0;
    for (std::int64_t i = 1; i <= n; ++i) {
      const std::int64_t cur = path[static_cast<std::size_t>(n - i)] - sn;
      const std::int64_t step = cur - prev;
      if (step != -inc[static_cast<std::size_t>(n - i)]) ok = false;
      if (step == 1) ++rep.reversed_up_steps;
      prev = cur;
    }
    rep.increments_ok = ok && prev == -sn;
    const double dn = static_cast<double>(n);
    rep.reversed_up_fraction = static_cast<double>(rep.reversed_up_steps) / dn;
    rep.up_zscore = (static_cast<double>(rep.reversed_up_steps) - dn * params.q) /
                    std::sqrt(dn * params.p * params.q);
  }

  // Reversed-walk visits to -offset versus forward total visits to +offset.
  const std::int64_t horizon = std::max<std::int64_t>(n, 256);
  rep.ensemble_horizon = horizon;
  const unsigned workers = std::max(1u, threads);
  std::vector<Accumulator> reversed(workers);
  std::vector<Accumulator> forward(workers);
  constexpr std::uint64_t kForwardStreams = std::uint64_t{1} << 40;
  const std::int64_t target = offset;
  const std::int64_t site[1] = {offset};
  parallel_for(replicas, workers, [&](std::uint64_t r, unsigned w) {
    StepStream steps(params, seed, 1 + r);
    std::vector<std::int64_t> path(static_cast<std::size_t>(horizon + 1), 0);
    for (std::int64_t i = 1; i <= horizon; ++i) {
      path[static_cast<std::size_t>(i)] = path[static_cast<std::size_t>(i - 1)] + steps.next();
    }
    const std::int64_t want = path.back() - target;
    std::int64_t visits = 0;
    for (std::int64_t j = 0; j < horizon; ++j) visits += path[static_cast<std::size_t>(j)] == want;
    reversed[w].add(visits);
    const auto totals = total_local_times(params, site, seed, 1e-12, kForwardStreams + r);
    forward[w].add(static_cast<std::int64_t>(totals.begin()->second));
  });
  Accumulator rev_all;
  Accumulator fwd_all;
  for (unsigned w = 0; w < workers; ++w) {
    rev_all.merge(reversed[w]);
    fwd_all.merge(forward[w]);
  }
  std::map<std::int64_t, bool> keys;
  for (const auto& kv : rev_all.histogram) keys[kv.first] = true;
  for (const auto& kv : fwd_all.histogram) keys[kv.first] = true;
  const double N = static_cast<double>(replicas);
  for (const auto& kv : keys) {
    PmfComparison c;
    c.k = kv.first;
    c.first = rev_all.frequency(c.k);
    c.second = fwd_all.frequency(c.k);
    const double pooled = 0.5 * (c.first + c.second);
    const double se = std::sqrt(pooled * (1.0 - pooled) * 2.0 / N);
    c.z = se > 0.0 ? (c.first - c.second) / se : 0.0;
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(c.z));
    rep.comparison.push_back(c);
  }
  rep.passed = rep.increments_ok && std::abs(rep.up_zscore) <= kBandSigmas &&
               rep.max_abs_z <= kBandSigmas;
  return rep;
}

}  // namespace walklab
