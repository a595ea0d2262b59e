#include "walklab/oracle.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "walklab/kernels.hpp"

namespace walklab {

Functional Functional::local_time(int site, int cap) {
  if (cap < 1) throw ValidationError("functional cap must be >= 1");
  return Functional{FunctionalKind::LocalTime, {site}, cap};
}

Functional Functional::set_occupation(std::vector<int> sites, int cap) {
  if (cap < 1) throw ValidationError("functional cap must be >= 1");
  if (sites.empty()) throw ValidationError("set_occupation needs at least one site");
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return Functional{FunctionalKind::SetOccupation, std::move(sites), cap};
}

bool Functional::contains(int x) const {
  return std::find(sites.begin(), sites.end(), x) != sites.end();
}

std::string Functional::label() const {
  std::ostringstream os;
  if (kind == FunctionalKind::LocalTime) {
    os << "local_time(" << sites.front() << ")";
  } else {
    os << "set_occupation({";
    for (std::size_t i = 0; i < sites.size(); ++i) os << (i ? "," : "") << sites[i];
    os << "})";
  }
  return os.str();
}

std::size_t JointLaw::flat_index(std::span<const int> counts) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    idx = idx * extent(a) + static_cast<std::size_t>(counts[a]);
  }
  return idx;
}

double JointLaw::at(std::span<const int> counts) const {
  if (counts.size() != axes.size()) {
    throw ValidationError("JointLaw::at: wrong number of counters");
  }
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (counts[a] < 0 || static_cast<std::size_t>(counts[a]) >= extent(a)) return 0.0;
  }
  return table[flat_index(counts)];
}

double JointLaw::at(int c0) const {
  const int c[1] = {c0};
  return at(std::span<const int>(c, 1));
}

double JointLaw::at(int c0, int c1) const {
  const int c[2] = {c0, c1};
  return at(std::span<const int>(c, 2));
}

double JointLaw::total() const {
  double s = 0.0;
  for (double m : table) s += m;
  return s;
}

double JointLaw::overflow_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::size_t rest = i;
    bool over = false;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const std::size_t c = rest % extent(a);
      rest /= extent(a);
      if (c == extent(a) - 1) over = true;
    }
    if (over) s += table[i];
  }
  return s;
}

std::vector<double> JointLaw::marginal(std::size_t axis) const {
  std::vector<double> m(extent(axis), 0.0);
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < axes.size(); ++a) inner *= extent(a);
  for (std::size_t i = 0; i < table.size(); ++i) {
    m[(i / inner) % extent(axis)] += table[i];
  }
  return m;
}

namespace {

void validate_functionals(const std::vector<Functional>& fs) {
  if (fs.empty()) throw ValidationError("at least one functional is required");
  for (const Functional& f : fs) {
    if (f.cap < 1) throw ValidationError("functional cap must be >= 1");
    if (f.sites.empty()) throw ValidationError("functional needs a site");
    for (int s : f.sites) {
      if (std::abs(s) > kMaxDpSteps) {
        throw ValidationError("functional site outside [-5000, 5000]");
      }
    }
  }
}

JointLaw empty_law(const std::vector<Functional>& fs, std::int64_t n) {
  JointLaw law;
  law.axes = fs;
  law.horizon = n;
  std::size_t size = 1;
  for (std::size_t a = 0; a < fs.size(); ++a) size *= law.extent(a);
  law.table.assign(size, 0.0);
  return law;
}

// Tuple increment maps: for a given set of axes touched by a site, where each
// counter tuple moves to.
std::vector<std::size_t> increment_map(const JointLaw& law, unsigned mask) {
  const std::size_t size = law.table.size();
  std::vector<std::size_t> to(size);
  std::vector<std::size_t> c(law.axes.size());
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t rest = i;
    for (std::size_t a = law.axes.size(); a-- > 0;) {
      c[a] = rest % law.extent(a);
      rest /= law.extent(a);
    }
    std::size_t j = 0;
    for (std::size_t a = 0; a < law.axes.size(); ++a) {
      std::size_t v = c[a];
      if (mask & (1u << a)) v = std::min(v + 1, law.extent(a) - 1);
      j = j * law.extent(a) + v;
    }
    to[i] = j;
  }
  return to;
}

unsigned site_mask(const std::vector<Functional>& fs, int x) {
  unsigned m = 0;
  for (std::size_t a = 0; a < fs.size(); ++a) {
    if (fs[a].contains(x)) m |= 1u << a;
  }
  return m;
}

}  // namespace

JointLaw enumerate_paths(const WalkParams& params, std::int64_t n,
                         const std::vector<Functional>& functionals) {
  validate_functionals(functionals);
  if (n < 0 || n > kMaxEnumerationSteps) {
    std::ostringstream os;
    os << "enumerate_paths: n = " << n << " exceeds the enumeration limit "
       << kMaxEnumerationSteps;
    throw BudgetError(os.str());
  }
  if (functionals.size() > 2) {
    throw ValidationError("enumerate_paths: at most two functionals");
  }
  JointLaw law = empty_law(functionals, n);

  // Depth-first over step sequences. Path weights come from power tables and
  // are summed with Neumaier compensation, so 2^24 terms stay exact to a few
  // ulps.
  std::vector<double> ppow(static_cast<std::size_t>(n + 1), 1.0);
  std::vector<double> qpow(static_cast<std::size_t>(n + 1), 1.0);
  for (std::int64_t i = 1; i <= n; ++i) {
    ppow[static_cast<std::size_t>(i)] = std::pow(params.p, static_cast<double>(i));
    qpow[static_cast<std::size_t>(i)] = std::pow(params.q, static_cast<double>(i));
  }
  std::vector<double> comp(law.table.size(), 0.0);
  struct Walker {
    const std::vector<Functional>& fs;
    JointLaw& law;
    std::vector<double>& comp;
    const std::vector<double>& ppow;
    const std::vector<double>& qpow;
    std::int64_t n;
    void go(std::int64_t depth, int x, int ups, std::array<int, 2> counts) {
      if (depth == n) {
        const double w = ppow[static_cast<std::size_t>(ups)] *
                         qpow[static_cast<std::size_t>(n - ups)];
        const std::size_t i =
            law.flat_index(std::span<const int>(counts.data(), fs.size()));
        double& s = law.table[i];
        const double t = s + w;
        comp[i] += std::abs(s) >= std::abs(w) ? (s - t) + w : (w - t) + s;
        s = t;
        return;
      }
      for (int step : {1, -1}) {
        const int y = x + step;
        std::array<int, 2> next = counts;
        for (std::size_t a = 0; a < fs.size(); ++a) {
          if (fs[a].contains(y)) next[a] = std::min(next[a] + 1, fs[a].cap + 1);
        }
        go(depth + 1, y, ups + (step > 0), next);
      }
    }
  };
  Walker{functionals, law, comp, ppow, qpow, n}.go(0, 0, 0, {0, 0});
  for (std::size_t i = 0; i < comp.size(); ++i) law.table[i] += comp[i];
  return law;
}

JointLaw dp_law(const WalkParams& params, std::int64_t n,
                const std::vector<Functional>& functionals) {
  validate_functionals(functionals);
  if (n < 0 || n > kMaxDpSteps) {
    std::ostringstream os;
    os << "dp_law: horizon " << n << " exceeds the budget of " << kMaxDpSteps
       << " steps";
    throw BudgetError(os.str());
  }
  std::int64_t cap_product = 1;
  for (const Functional& f : functionals) cap_product *= f.cap;
  if (cap_product > kMaxDpCounterStates) {
    std::ostringstream os;
    os << "dp_law: counter state space " << cap_product << " exceeds the budget of "
       << kMaxDpCounterStates;
    throw BudgetError(os.str());
  }

  JointLaw law = empty_law(functionals, n);
  const std::size_t T = law.table.size();
  const std::size_t rows = static_cast<std::size_t>(2 * n + 3);
  if (rows * T > kMaxDpCells) {
    std::ostringstream os;
    os << "dp_law: " << rows << " positions x " << T
       << " counter tuples exceeds the state budget of " << kMaxDpCells;
    throw BudgetError(os.str());
  }
  const auto row = [&](std::int64_t x) {
    return static_cast<std::size_t>(x + n + 1) * T;
  };
  std::vector<double> cur(rows * T, 0.0);
  std::vector<double> nxt(rows * T, 0.0);
  std::vector<double> tmp(T);
  cur[row(0)] = 1.0;

  std::vector<std::vector<std::size_t>> inc(1u << functionals.size());
  for (std::int64_t t = 1; t <= n; ++t) {
    for (std::int64_t x = -t; x <= t; x += 2) {
      const std::span<const double> up(cur.data() + row(x - 1), T);
      const std::span<const double> down(cur.data() + row(x + 1), T);
      const std::span<double> out(nxt.data() + row(x), T);
      const unsigned mask = site_mask(functionals, static_cast<int>(x));
      if (mask == 0) {
        kernels::axpby(params.p, up, params.q, down, out);
        continue;
      }
      kernels::axpby(params.p, up, params.q, down, tmp);
      if (inc[mask].empty()) inc[mask] = increment_map(law, mask);
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < T; ++i) out[inc[mask][i]] += tmp[i];
    }
    std::swap(cur, nxt);
  }
  for (std::int64_t x = -n; x <= n; ++x) {
    for (std::size_t i = 0; i < T; ++i) law.table[i] += cur[row(x) + i];
  }
  return law;
}

double late_visit_bound(const WalkParams& params, std::span<const int> sites,
                        std::int64_t n) {
  // P(S_l = j) <= exp(-C2 l + C3 j).
  const double c2 = -0.5 * std::log(4.0 * params.p * params.q);
  const double c3 = 0.5 * std::log(params.p / params.q);
  const double r = std::exp(-c2);
  const double geometric = std::exp(-c2 * static_cast<double>(n + 1)) / (1.0 - r);
  double total = 0.0;
  for (int j : sites) total += std::exp(c3 * j) * geometric;
  return total;
}

namespace {

std::vector<int> tracked_sites(const std::vector<Functional>& fs) {
  std::vector<int> s;
  for (const Functional& f : fs) s.insert(s.end(), f.sites.begin(), f.sites.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

double horizon_certificate(const WalkParams& params,
                           const std::vector<Functional>& functionals,
                           std::int64_t n) {
  const std::vector<int> sites = tracked_sites(functionals);
  return late_visit_bound(params, sites, n) + static_cast<double>(n) * DBL_EPSILON;
}

JointLaw infinite_law(const WalkParams& params,
                      const std::vector<Functional>& functionals, double eps) {
  validate_functionals(functionals);
  if (!(eps > 0.0)) throw ValidationError("infinite_law: eps must be > 0");
  const auto ok = [&](std::int64_t n) {
    return horizon_certificate(params, functionals, n) < eps;
  };
  std::int64_t hi = 16;
  while (!ok(hi)) {
    if (hi >= kMaxDpSteps) {
      std::ostringstream os;
      os << "infinite_law: precision " << eps
         << " needs a horizon beyond the budget of " << kMaxDpSteps << " steps";
      throw BudgetError(os.str());
    }
    hi = std::min<std::int64_t>(2 * hi, kMaxDpSteps);
  }
  std::int64_t lo = hi / 2;  // !ok(lo) unless hi == 16
  if (ok(lo)) lo = 0;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  JointLaw law = dp_law(params, hi, functionals);
  law.certificate = horizon_certificate(params, functionals, hi);
  return law;
}

}  // namespace walklab
