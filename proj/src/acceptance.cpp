#include "walklab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "walklab/boundary.hpp"
#include "walklab/closedform.hpp"
#include "walklab/genfunc.hpp"
#include "walklab/montecarlo.hpp"
#include "walklab/oracle.hpp"
#include "walklab/stats.hpp"

namespace walklab {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string fixed(double x, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

const std::vector<double> kParamGrid{0.6, 0.75, 0.9};

// 1. Closed-form two-point and ball laws against series expansions.
CriterionResult closed_form_vs_series(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "closed-form laws vs generating-function series";
  const WalkParams params = make_params(o.p);
  constexpr std::int64_t K = 200;
  constexpr double tol = 1e-12;
  double worst = 0.0;
  for (std::int64_t z : {1, 2, 3, 5}) {
    for (Side side : {Side::Positive, Side::Negative}) {
      const PmfTable t = two_point_occupation_pmf(params, z, side, K);
      const std::vector<double> c = series_coeffs(two_point_gf(params, z, side), K);
      for (std::int64_t k = 0; k <= K; ++k) {
        worst = std::max(worst, std::abs(t.at(k) - c[static_cast<std::size_t>(k)]));
      }
    }
  }
  const PmfTable ball = ball_occupation_pmf(params, K);
  const std::vector<double> bc = series_coeffs(ball_gf(params), K);
  double ball_worst = 0.0;
  for (std::int64_t k = 0; k <= K; ++k) {
    ball_worst = std::max(ball_worst, std::abs(ball.at(k) - bc[static_cast<std::size_t>(k)]));
  }
  r.passed = worst <= tol && ball_worst <= tol;
  r.measured = "two-point max|diff|=" + sci(worst) + ", ball max|diff|=" + sci(ball_worst);
  r.expected = "<= 1e-12 for z in {1,2,3,5}, both sides, k <= 200";
  r.details = Json{{"two_point_max_abs_diff", worst}, {"ball_max_abs_diff", ball_worst}};
  return r;
}

// 2. Closed-form infinite laws against the finite-horizon DP at n = 200.
CriterionResult closed_form_vs_dp(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "closed-form laws vs dynamic programming at n=200";
  const WalkParams params = make_params(o.p);
  constexpr std::int64_t n = 200;

  const std::vector<Functional> single{Functional::local_time(0, 40)};
  const JointLaw lt = dp_law(params, n, single);
  const PmfTable zid = local_time_pmf(params, 0, 40);
  double lt_worst = 0.0;
  for (int k = 0; k <= 40; ++k) lt_worst = std::max(lt_worst, std::abs(lt.at(k) - zid.at(k)));
  const double lt_cert = horizon_certificate(params, single, n);

  const std::vector<Functional> joint{Functional::set_occupation({-1, 1}, 40),
                                      Functional::local_time(0, 20)};
  const JointLaw jl = dp_law(params, n, joint);
  double joint_worst = 0.0;
  for (int K = 0; K <= 10; ++K) {
    for (int L = 0; L <= 20; ++L) {
      const double exact = L >= K + 1 ? center_sphere_joint_pmf(params, Start::Origin, K, L) : 0.0;
      joint_worst = std::max(joint_worst, std::abs(jl.at(L, K) - exact));
    }
  }
  const double joint_cert = horizon_certificate(params, joint, n);
  r.passed = lt_worst <= lt_cert && joint_worst <= joint_cert && lt_cert < 1e-9 &&
             joint_cert < 1e-9;
  r.measured = "local time max|diff|=" + sci(lt_worst) + " (cert " + sci(lt_cert) +
               "), joint max|diff|=" + sci(joint_worst) + " (cert " + sci(joint_cert) + ")";
  r.expected = "each within its certificate, certificates < 1e-9";
  r.details = Json{{"local_time_max_abs_diff", lt_worst},
                   {"local_time_certificate", lt_cert},
                   {"joint_max_abs_diff", joint_worst},
                   {"joint_certificate", joint_cert}};
  return r;
}

// 3. DP against brute-force enumeration.
CriterionResult dp_vs_enumeration(const AcceptanceOptions&) {
  CriterionResult r;
  r.title = "dynamic programming vs path enumeration, n <= 20";
  constexpr double tol = 1e-14;
  const std::vector<std::vector<Functional>> sets{
      {Functional::local_time(0, 20)},
      {Functional::set_occupation({-1, 1}, 20)},
      {Functional::local_time(1, 10), Functional::set_occupation({-1, 0, 1}, 20)},
  };
  double worst = 0.0;
  std::size_t laws = 0;
  for (double p : kParamGrid) {
    const WalkParams params = make_params(p);
    for (const auto& fs : sets) {
      for (std::int64_t n = 1; n <= 20; ++n) {
        const JointLaw a = dp_law(params, n, fs);
        const JointLaw b = enumerate_paths(params, n, fs);
        for (std::size_t i = 0; i < a.table.size(); ++i) {
          worst = std::max(worst, std::abs(a.table[i] - b.table[i]));
        }
        ++laws;
      }
    }
  }
  r.passed = worst <= tol;
  r.measured = "max|diff|=" + sci(worst) + " over " + std::to_string(laws) + " laws";
  r.expected = "<= 1e-14 for p in {0.6,0.75,0.9}, n in 1..20";
  r.details = Json{{"max_abs_diff", worst}, {"laws", laws}};
  return r;
}

// 4. Marginal consistency of the joint and excursion laws.
CriterionResult marginal_identities(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "marginal-consistency identities";
  const WalkParams params = make_params(o.p);
  const double q = params.q;
  const double esc = 1.0 - 2.0 * q;

  double sum_worst = 0.0;
  for (std::int64_t K = 0; K <= 30; ++K) {
    double s = 0.0;
    for (std::int64_t L = K + 1; L <= K + 4000; ++L) {
      s += center_sphere_joint_pmf(params, Start::Origin, K, L);
    }
    sum_worst = std::max(sum_worst, std::abs(s - std::pow(2.0 * q, static_cast<double>(K)) * esc));
  }

  double transform_worst = 0.0;
  for (std::int64_t z = 1; z <= 5; ++z) {
    for (Side side : {Side::Positive, Side::Negative}) {
      for (std::int64_t k = 0; k <= 50; ++k) {
        const double v = joint_transform(params, z, k, 0.0, side);
        transform_worst = std::max(
            transform_worst, std::abs(v - std::pow(2.0 * q, static_cast<double>(k)) * esc));
      }
    }
  }

  double mean_worst = 0.0;
  for (std::int64_t z = 1; z <= 10; ++z) {
    const ExcursionVisits ev = excursion_visits_pmf(params, z, 4000);
    const double hz = std::pow(params.h, static_cast<double>(z));
    mean_worst = std::max(mean_worst, std::abs(ev.finite_return.partial_mean() - hz) / hz);
  }
  r.passed = sum_worst <= 1e-12 && transform_worst <= 1e-12 && mean_worst <= 1e-12;
  r.measured = "sum_L p(L,K) max|diff|=" + sci(sum_worst) + ", transform(v=0) max|diff|=" +
               sci(transform_worst) + ", excursion mean max rel diff=" + sci(mean_worst);
  r.expected = "all <= 1e-12 (K <= 30; z <= 5, k <= 50; z <= 10)";
  r.details = Json{{"joint_marginal_max_abs_diff", sum_worst},
                   {"transform_max_abs_diff", transform_worst},
                   {"excursion_mean_max_rel_diff", mean_worst}};
  return r;
}

// 5. Boundary geometry of D.
CriterionResult boundary_geometry(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "boundary geometry of D";
  const WalkParams params = make_params(o.p);
  const RegionD region = make_region(params);
  const ExtremalPoints e = extremal_points(params);
  double extremal_worst = 0.0;
  bool ordered = true;
  for (const BoundaryPoint& b : {e.x_max, e.y_max, e.x_zero}) {
    extremal_worst = std::max(extremal_worst, std::abs(g(params, b.x, b.y) - 1.0));
    ordered = ordered && b.y >= b.x;
  }

  constexpr int grid = 200;
  int pattern_errors = 0;
  double root_worst = 0.0;
  double diag_worst = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = region.xmax * static_cast<double>(i) / (grid - 1);
    const std::vector<BoundaryPoint> roots = boundary_solve(params, x);
    const std::size_t want = (x < region.two_solution_threshold || i == grid - 1) ? 1 : 2;
    if (roots.size() != want) ++pattern_errors;
    for (const BoundaryPoint& b : roots) {
      root_worst = std::max(root_worst, std::abs(g(params, b.x, b.y) - 1.0));
      if (b.y < b.x) ++pattern_errors;
    }
    if (x > 0.0) {
      diag_worst =
          std::max(diag_worst, std::abs(g(params, x, x / params.p) - x / region.xmax));
    }
  }
  r.passed = extremal_worst < 1e-10 && ordered && pattern_errors == 0 && root_worst < 1e-10 &&
             diag_worst < 1e-10;
  r.measured = "extremal max|g-1|=" + sci(extremal_worst) + ", root-count mismatches=" +
               std::to_string(pattern_errors) + ", roots max|g-1|=" + sci(root_worst) +
               ", max|g(x,x/p)-x/lambda0|=" + sci(diag_worst);
  r.expected = "< 1e-10, 0 mismatches (threshold " + fixed(region.two_solution_threshold, 6) +
               ")";
  r.details = Json{{"extremal_max_residual", extremal_worst},
                   {"pattern_errors", pattern_errors},
                   {"root_max_residual", root_worst},
                   {"diagonal_max_abs_diff", diag_worst},
                   {"two_solution_threshold", region.two_solution_threshold}};
  return r;
}

// 6. Weight limit by three routes.
CriterionResult weight_limit_agreement(const AcceptanceOptions&) {
  CriterionResult r;
  r.title = "weight limit: closed form vs boundary max vs series ratio";
  double worst = 0.0;
  Json rows = Json::array();
  for (double p : kParamGrid) {
    const WalkParams params = make_params(p);
    const double a = weight_limit(params).wlimit;
    const double b = maximize_weight(params).wlimit;
    const double c = ball_series_weight_rate(params);
    worst = std::max({worst, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
    rows.push_back(Json{{"p", p}, {"closed_form", a}, {"boundary_max", b}, {"series_ratio", c}});
  }
  const WalkParams ref = make_params(0.75);
  const WeightLimit w = weight_limit(ref);
  const WeightLimit m = maximize_weight(ref);
  const double ratio = w.x_at_opt / w.y_at_opt;
  const double numeric_ratio = m.x_at_opt / m.y_at_opt;
  const bool ref_ok = std::abs(w.wlimit - 3.47606) < 5e-6 && std::abs(ratio - 2.0 / 3.0) < 1e-12 &&
                      std::abs(numeric_ratio - 2.0 / 3.0) < 1e-6;
  r.passed = worst < 1e-6 && ref_ok;
  r.measured = "max route spread=" + sci(worst) + "; p=0.75: wlimit=" + fixed(w.wlimit, 6) +
               ", x:y=" + fixed(ratio, 9) + " (numeric " + fixed(numeric_ratio, 9) + ")";
  r.expected = "spread < 1e-6; wlimit ~ 3.47606; x:y = 2:3";
  r.details = Json{{"routes", rows}, {"max_spread", worst}, {"ratio", ratio},
                   {"numeric_ratio", numeric_ratio}};
  return r;
}

// 7. Escape-truncated Monte Carlo laws against the closed forms.
CriterionResult monte_carlo_laws(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "Monte Carlo laws vs closed forms (4 sigma bands, chi-square 1%)";
  SimConfig config;
  config.params = make_params(o.p);
  config.replicas = o.level == Level::Desk ? 1'000'000 : 100'000;
  config.seed = o.seed;
  config.threads = o.threads;
  const Statistic stat = escape_occupation_statistic({
      {"xi(0)", {0}},
      {"xi(-1)", {-1}},
      {"Xi({-1,1})", {-1, 1}},
      {"Xi({-1,0,1})", {-1, 0, 1}},
      {"Xi({0,1})", {0, 1}},
  });
  const EnsembleResult e = ensemble(config, stat);
  const WalkParams& params = config.params;
  constexpr std::int64_t kmax = 400;
  const std::vector<PmfTable> laws{
      local_time_pmf(params, 0, kmax),
      local_time_pmf(params, -1, kmax),
      sphere_occupation_pmf(params, kmax),
      ball_occupation_pmf(params, kmax),
      two_point_occupation_pmf(params, 1, Side::Positive, kmax),
  };
  bool ok = true;
  std::ostringstream measured;
  Json fits = Json::array();
  for (std::size_t c = 0; c < laws.size(); ++c) {
    const FitResult f = fit_pmf(e.accumulators[c], laws[c]);
    ok = ok && f.passed();
    measured << (c ? "; " : "") << stat.components[c] << " z=" << fixed(f.max_abs_z, 2)
             << " p=" << fixed(f.p_value, 3);
    Json j = to_json(f);
    j["component"] = stat.components[c];
    fits.push_back(j);
  }
  r.passed = ok;
  r.measured = measured.str() + " (" + std::to_string(config.replicas) + " replicas)";
  r.expected = "max|z| <= 4 and chi-square p >= 0.01 for each law";
  r.details = Json{{"replicas", config.replicas}, {"seed", config.seed}, {"fits", fits}};
  return r;
}

// 8. Single-path laws of large numbers.
CriterionResult single_path_lln(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "single-path LLN for Q~(k,n) and new points";
  SimConfig config;
  config.params = make_params(o.p);
  config.n = o.level == Level::Desk ? 10'000'000 : 1'000'000;
  config.replicas = 20;
  config.seed = o.seed;
  config.threads = o.threads;
  const double g0 = config.params.p - config.params.q;
  const double r2 = 2.0 * config.params.q;
  const std::vector<PathReport> reps = path_reports(config);
  int good = 0;
  double worst_q = 0.0;
  double worst_nu = 0.0;
  const double n = static_cast<double>(config.n);
  for (const PathReport& rep : reps) {
    bool ok = true;
    for (std::size_t k = 1; k <= 3; ++k) {
      const double expected = g0 * g0 * std::pow(r2, static_cast<double>(k - 1));
      const double got = k < rep.qtilde.size() ? static_cast<double>(rep.qtilde[k]) / n : 0.0;
      const double rel = std::abs(got / expected - 1.0);
      worst_q = std::max(worst_q, rel);
      ok = ok && rel <= 0.05;
    }
    const double nu_rel = std::abs(static_cast<double>(rep.nu_n) / n / g0 - 1.0);
    worst_nu = std::max(worst_nu, nu_rel);
    ok = ok && nu_rel <= 0.02;
    good += ok;
  }
  r.passed = good >= 18;
  r.measured = std::to_string(good) + "/20 seeds pass; worst Q~ rel dev=" + sci(worst_q) +
               ", worst nu rel dev=" + sci(worst_nu) + " (n=" + std::to_string(config.n) + ")";
  r.expected = ">= 18/20 seeds with Q~(k,n)/n within 5% (k=1,2,3) and nu_n/n within 2%";
  r.details = Json{{"n", config.n}, {"seeds_passing", good}, {"worst_qtilde_rel", worst_q},
                   {"worst_nu_rel", worst_nu}};
  return r;
}

// 9. Trend and containment checks for the almost-sure limit theorems.
CriterionResult limit_trends(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "limit-theorem trends over 50 seeds";
  const WalkParams params = make_params(o.p);
  const double lambda0 = derived_constants(params).lambda0;
  const double xs_bound = 1.3 / theta(params, 1);
  const std::vector<std::int64_t> grid{10'000, 100'000, 1'000'000};

  std::vector<double> xi_med;
  std::vector<double> xs_med;
  std::vector<double> heavy_win;
  std::vector<double> heavy_tot;
  double xs_max = 0.0;
  std::vector<double> outside_counts;
  int clouds_contained = 0;
  Json rows = Json::array();
  for (std::int64_t n : grid) {
    const double L = std::log(static_cast<double>(n));
    SimConfig config;
    config.params = params;
    config.n = n;
    config.replicas = 50;
    config.seed = o.seed;
    config.threads = o.threads;
    config.heavy = HeavyPointConfig{2.0 / L, 0.5};
    const std::vector<PathReport> reps = path_reports(config);
    std::vector<double> xi;
    std::vector<double> xs;
    std::vector<double> win;
    std::vector<double> tot;
    for (const PathReport& rep : reps) {
      xi.push_back(static_cast<double>(rep.xi_max) / L);
      const double s = static_cast<double>(rep.xi_star.front().second) / L;
      xs.push_back(s);
      xs_max = std::max(xs_max, s);
      if (rep.heavy->window_deviation) win.push_back(*rep.heavy->window_deviation);
      if (rep.heavy->total_deviation) tot.push_back(*rep.heavy->total_deviation);
      if (n == grid.back()) {
        const std::uint64_t out = cloud_points_outside(params, rep, 1.25);
        outside_counts.push_back(static_cast<double>(out));
        clouds_contained += out == 0;
      }
    }
    xi_med.push_back(median(xi));
    xs_med.push_back(median(xs));
    heavy_win.push_back(median(win));
    heavy_tot.push_back(median(tot));
    rows.push_back(Json{{"n", n},
                        {"xi_over_log_median", xi_med.back()},
                        {"xi_star_over_log_median", xs_med.back()},
                        {"heavy_window_median", heavy_win.back()},
                        {"heavy_window_nonempty", win.size()},
                        {"heavy_total_median", heavy_tot.back()},
                        {"heavy_total_nonempty", tot.size()}});
  }

  bool xi_trend = true;
  bool heavy_trend = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    xi_trend = xi_trend && std::abs(xi_med[i] - lambda0) <= std::abs(xi_med[i - 1] - lambda0);
    heavy_trend = heavy_trend && heavy_win[i] < heavy_win[i - 1] && heavy_tot[i] < heavy_tot[i - 1];
  }
  const bool xi_band = xi_med.back() >= 0.7 * lambda0 && xi_med.back() <= 1.3 * lambda0;
  const bool xs_ok =
      std::all_of(xs_med.begin(), xs_med.end(), [&](double m) { return m < xs_bound; });
  const bool cloud_ok = median(outside_counts) == 0.0;

  std::ostringstream m;
  m << "xi/log n medians " << fixed(xi_med[0]) << "," << fixed(xi_med[1]) << ","
    << fixed(xi_med[2]) << " (trend " << (xi_trend ? "ok" : "FAIL") << ", band "
    << (xi_band ? "ok" : "FAIL") << "); Xi*/log n medians " << fixed(xs_med[0]) << ","
    << fixed(xs_med[1]) << "," << fixed(xs_med[2]) << " max " << fixed(xs_max) << " ("
    << (xs_ok ? "ok" : "FAIL") << "); clouds inside 1.25D " << clouds_contained << "/50 ("
    << (cloud_ok ? "ok" : "FAIL") << "); heavy medians " << fixed(heavy_win[0]) << ","
    << fixed(heavy_win[1]) << "," << fixed(heavy_win[2]) << " ("
    << (heavy_trend ? "ok" : "FAIL") << ")";
  r.measured = m.str();
  r.expected = "|median xi/log n - " + fixed(lambda0) +
               "| non-increasing, in [0.7,1.3] lambda0 at n=1e6; Xi* median < " +
               fixed(xs_bound) + "; median cloud exceedance 0; heavy medians decreasing";
  r.passed = xi_trend && xi_band && xs_ok && cloud_ok && heavy_trend;
  r.details = Json{{"rows", rows},
                   {"xi_star_max_over_log", xs_max},
                   {"xi_star_bound", xs_bound},
                   {"clouds_contained", clouds_contained},
                   {"xi_trend", xi_trend},
                   {"xi_band", xi_band},
                   {"xi_star_ok", xs_ok},
                   {"cloud_ok", cloud_ok},
                   {"heavy_trend", heavy_trend}};
  return r;
}

// 10. Bit-identical reruns across thread counts.
CriterionResult determinism(const AcceptanceOptions& o) {
  CriterionResult r;
  r.title = "determinism across reruns and thread counts";
  SimConfig config;
  config.params = make_params(o.p);
  config.seed = o.seed;
  config.replicas = o.level == Level::Desk ? 100'000 : 20'000;
  const Statistic stat = escape_occupation_statistic({{"xi(0)", {0}}, {"Xi({-1,1})", {-1, 1}}});
  std::vector<std::string> ens;
  for (unsigned t : {1u, 4u, 1u}) {
    config.threads = t;
    ens.push_back(to_json(ensemble(config, stat)).dump());
  }
  SimConfig path = config;
  path.n = 100'000;
  path.replicas = 8;
  path.heavy = HeavyPointConfig{0.2, 0.5};
  std::vector<std::string> reports;
  for (unsigned t : {1u, 3u, 1u}) {
    path.threads = t;
    Json all = Json::array();
    for (const PathReport& rep : path_reports(path)) all.push_back(to_json(rep));
    reports.push_back(all.dump());
  }
  const bool ens_ok = ens[0] == ens[1] && ens[1] == ens[2];
  const bool rep_ok = reports[0] == reports[1] && reports[1] == reports[2];
  r.passed = ens_ok && rep_ok;
  r.measured = std::string("ensemble outputs ") + (ens_ok ? "identical" : "DIFFER") +
               " (threads 1,4,1); path reports " + (rep_ok ? "identical" : "DIFFER") +
               " (threads 1,3,1)";
  r.expected = "bit-identical serialized outputs";
  r.details = Json{{"ensemble_identical", ens_ok}, {"path_reports_identical", rep_ok}};
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  static const Fn table[kCriterionCount] = {
      closed_form_vs_series, closed_form_vs_dp,      dp_vs_enumeration, marginal_identities,
      boundary_geometry,     weight_limit_agreement, monte_carlo_laws,  single_path_lln,
      limit_trends,          determinism,
  };
  if (id < 1 || id > kCriterionCount) {
    throw ValidationError("criterion id must be in 1.." + std::to_string(kCriterionCount));
  }
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](options);
  } catch (const std::exception& e) {
    r.passed = false;
    r.measured = std::string("exception: ") + e.what();
  }
  r.id = id;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = options.only;
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  }
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << " | measured: "
     << r.measured << " | expected: " << r.expected << " | " << fixed(r.seconds, 1) << " s";
  return os.str();
}

Json to_json(const CriterionResult& r) {
  return Json{{"id", r.id},
              {"title", r.title},
              {"passed", r.passed},
              {"measured", r.measured},
              {"expected", r.expected},
              {"seconds", round_sig(r.seconds)},
              {"details", r.details}};
}

}  // namespace walklab
