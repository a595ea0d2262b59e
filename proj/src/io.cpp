#include "walklab/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>

namespace walklab {

double round_sig(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kOutputDigits, x);
  return std::strtod(buf, nullptr);
}

std::string format_sig(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", kOutputDigits, x);
  return buf;
}

namespace {

Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig(x);
}

Json opt(const std::optional<double>& x) { return x ? num(*x) : Json(nullptr); }

const char* branch_name(Branch b) { return b == Branch::Lower ? "lower" : "upper"; }

}  // namespace

Json to_json(const WalkParams& params) {
  return Json{{"p", num(params.p)}, {"q", num(params.q)}, {"h", num(params.h)}};
}

Json to_json(const Constants& c) {
  return Json{{"gamma0", num(c.gamma0)},
              {"lambda0", num(c.lambda0)},
              {"kappa0", num(c.kappa0)},
              {"beta", num(c.beta)},
              {"two_solution_threshold", num(c.two_solution_threshold)},
              {"wlimit", num(c.wlimit)}};
}

Json to_json(const BoundaryPoint& b) {
  return Json{{"x", num(b.x)}, {"y", num(b.y)}, {"branch", branch_name(b.branch)}};
}

Json to_json(const ExtremalPoints& e) {
  return Json{{"x_max", to_json(e.x_max)}, {"y_max", to_json(e.y_max)},
              {"x_zero", to_json(e.x_zero)}};
}

Json to_json(const WeightLimit& w) {
  return Json{{"wlimit", num(w.wlimit)}, {"x_at_opt", num(w.x_at_opt)},
              {"y_at_opt", num(w.y_at_opt)}};
}

Json to_json(const PmfTable& t) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    rows.push_back(Json{{"k", t.support[i]}, {"mass", num(t.mass[i])}});
  }
  return Json{{"rows", rows},
              {"tail_bound", num(t.tail_bound)},
              {"law_mass", num(t.law_mass)},
              {"listed_mass", num(t.sum())}};
}

Json to_json(const JointLaw& law) {
  Json axes = Json::array();
  for (const Functional& f : law.axes) {
    axes.push_back(Json{
        {"kind", f.kind == FunctionalKind::LocalTime ? "local_time" : "set_occupation"},
        {"sites", f.sites},
        {"cap", f.cap},
        {"label", f.label()}});
  }
  Json entries = Json::array();
  std::vector<int> c(law.axes.size(), 0);
  for (std::size_t i = 0; i < law.table.size(); ++i) {
    std::size_t rest = i;
    for (std::size_t a = law.axes.size(); a-- > 0;) {
      c[a] = static_cast<int>(rest % law.extent(a));
      rest /= law.extent(a);
    }
    if (law.table[i] == 0.0) continue;
    entries.push_back(Json{{"counts", c}, {"mass", num(law.table[i])}});
  }
  return Json{{"horizon", law.horizon},
              {"axes", axes},
              {"overflow_index", "cap + 1"},
              {"entries", entries},
              {"overflow_mass", num(law.overflow_mass())},
              {"total_mass", num(law.total())},
              {"certificate", num(law.certificate)}};
}

Json to_json(const HeavyProfile& h) {
  return Json{{"radius", h.radius},
              {"threshold", num(h.threshold)},
              {"window_points", h.window_points},
              {"window_deviation", opt(h.window_deviation)},
              {"total_points", h.total_points},
              {"total_deviation", opt(h.total_deviation)}};
}

Json to_json(const PathReport& r) {
  Json qt = Json::array();
  for (std::size_t k = 1; k < r.qtilde.size(); ++k) {
    if (r.qtilde[k]) qt.push_back(Json{{"k", k}, {"sites", r.qtilde[k]}});
  }
  Json xs = Json::array();
  for (const auto& [z, v] : r.xi_star) xs.push_back(Json{{"z", z}, {"value", v}});
  Json cloud = Json::array();
  for (const CloudPoint& c : r.cloud) {
    cloud.push_back(Json{{"xi", c.xi}, {"sphere", c.sphere}, {"sites", c.sites}});
  }
  Json j{{"replica", r.replica},
         {"n", r.n},
         {"final_position", r.final_position},
         {"nu_n", r.nu_n},
         {"xi_max", r.xi_max},
         {"eta_max", r.eta_max},
         {"w_max", r.w_max},
         {"qtilde", qt},
         {"xi_star", xs},
         {"cloud", cloud},
         {"continuation_steps", r.continuation_steps}};
  j["heavy"] = r.heavy ? to_json(*r.heavy) : Json(nullptr);
  return j;
}

Json to_json(const EnsembleResult& e) {
  Json comps = Json::array();
  for (std::size_t c = 0; c < e.summary.size(); ++c) {
    const ComponentSummary& s = e.summary[c];
    Json hist = Json::array();
    for (const auto& [k, n] : e.accumulators[c].histogram) {
      hist.push_back(Json{{"value", k}, {"count", n}});
    }
    comps.push_back(Json{{"name", s.name},
                         {"mean", num(s.mean)},
                         {"variance", num(s.variance)},
                         {"std_error", num(s.std_error)},
                         {"band", {num(s.band_low), num(s.band_high)}},
                         {"histogram", hist}});
  }
  return Json{{"statistic", e.statistic}, {"replicas", e.replicas}, {"components", comps}};
}

Json to_json(const ReversedWalkReport& r) {
  Json cmp = Json::array();
  for (const PmfComparison& c : r.comparison) {
    cmp.push_back(Json{{"k", c.k},
                       {"reversed", num(c.first)},
                       {"forward", num(c.second)},
                       {"z", num(c.z)}});
  }
  return Json{{"n", r.n},
              {"increments_ok", r.increments_ok},
              {"reversed_up_fraction", num(r.reversed_up_fraction)},
              {"up_zscore", num(r.up_zscore)},
              {"offset", r.offset},
              {"replicas", r.replicas},
              {"ensemble_horizon", r.ensemble_horizon},
              {"comparison", cmp},
              {"max_abs_z", num(r.max_abs_z)},
              {"passed", r.passed}};
}

Json to_json(const FitResult& f) {
  return Json{{"samples", f.samples},
              {"max_abs_z", num(f.max_abs_z)},
              {"worst_outcome", f.worst_outcome},
              {"chi2", num(f.chi2)},
              {"dof", f.dof},
              {"p_value", num(f.p_value)},
              {"passed", f.passed()}};
}

void write_pmf_csv(std::ostream& os, const PmfTable& t) {
  os << "k,mass\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t.support[i] << ',' << format_sig(t.mass[i]) << '\n';
  }
  os << "# tail_bound=" << format_sig(t.tail_bound) << " law_mass=" << format_sig(t.law_mass)
     << '\n';
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& pts,
                        const ExtremalPoints& extremal) {
  os << "x,y,branch,marker\n";
  for (const BoundaryPoint& b : pts) {
    os << format_sig(b.x) << ',' << format_sig(b.y) << ',' << branch_name(b.branch) << ",\n";
  }
  const auto mark = [&](const BoundaryPoint& b, const char* name) {
    os << format_sig(b.x) << ',' << format_sig(b.y) << ',' << branch_name(b.branch) << ','
       << name << '\n';
  };
  mark(extremal.x_max, "x_max");
  mark(extremal.y_max, "y_max");
  mark(extremal.x_zero, "x_zero");
}

void write_field_csv(std::ostream& os, const LocalTimeField& f) {
  os << "site,count\n";
  for (std::int64_t x = f.min_site; x <= f.max_site; ++x) {
    const std::uint64_t c = f.at(x);
    if (c) os << x << ',' << c << '\n';
  }
}

Json to_json(const RunManifest& m) {
  return Json{{"tool", m.tool},
              {"version", m.version},
              {"command", m.command},
              {"params", m.params},
              {"seed", m.seed},
              {"wall_clock_seconds", num(m.wall_clock_seconds)},
              {"started_at", m.started_at},
              {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.tool = j.value("tool", std::string("walklab"));
  m.version = j.value("version", std::string());
  m.command = j.at("command").get<std::string>();
  m.params = j.value("params", Json::object());
  m.seed = j.value("seed", std::uint64_t{0});
  m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
  m.started_at = j.value("started_at", std::string());
  m.outputs = j.value("outputs", std::vector<std::string>{});
  return m;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace walklab
