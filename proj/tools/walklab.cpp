// Command-line front end: constants, exact laws, boundary, oracle,
// simulation and the acceptance suite.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "walklab/acceptance.hpp"
#include "walklab/boundary.hpp"
#include "walklab/closedform.hpp"
#include "walklab/genfunc.hpp"
#include "walklab/io.hpp"
#include "walklab/kernels.hpp"
#include "walklab/montecarlo.hpp"
#include "walklab/oracle.hpp"

namespace {

using walklab::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;

#ifndef WALKLAB_VERSION
#define WALKLAB_VERSION "0.0.0"
#endif

void round_doubles(Json& j) {
  if (j.is_number_float()) {
    j = walklab::round_sig(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) round_doubles(v);
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw walklab::ValidationError("not an integer list: " + s);
    out.push_back(v);
  }
  return out;
}

std::string json_scalar_to_arg(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_scalar_to_arg(v[i]);
    return s;
  }
  return v.dump();
}

Json arg_to_json(const std::string& s) {
  if (s.empty()) return s;
  char* end = nullptr;
  const long long i = std::strtoll(s.c_str(), &end, 10);
  if (*end == '\0') return i;
  const double d = std::strtod(s.c_str(), &end);
  if (*end == '\0') return d;
  return s;
}

// Command line after merging a JSON config file: entries of "params" that the
// command line does not set are appended, so flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const std::vector<std::string>& commands) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw walklab::ValidationError("cannot open config file " + path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const std::exception& e) {
    throw walklab::ValidationError("config file " + path + " is not valid JSON: " + e.what());
  }
  bool has_command = false;
  for (std::size_t i = 1; i < args.size(); ++i) {
    for (const auto& c : commands) has_command = has_command || args[i] == c;
  }
  if (!has_command) {
    if (!cfg.contains("command")) throw walklab::ValidationError("config file has no command");
    args.insert(args.begin() + 1, cfg["command"].get<std::string>());
  }
  if (!cfg.contains("params")) return args;
  for (const auto& [key, value] : cfg["params"].items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args) present = present || a == flag || a.rfind(flag + "=", 0) == 0;
    if (present || value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      // One flag per recorded value of a repeatable option.
      for (const auto& v : value) args.push_back(flag + "=" + json_scalar_to_arg(v));
      continue;
    }
    args.push_back(flag + "=" + json_scalar_to_arg(value));
  }
  return args;
}

// Effective parameters of a subcommand, keyed by long option name.
Json collect_params(const CLI::App* sub) {
  Json params = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty()) continue;
    const std::string& name = names.front();
    if (name == "help" || name == "out" || name == "config") continue;
    if (opt->get_expected_min() == 0) {
      params[name] = opt->count() > 0;
      continue;
    }
    std::vector<std::string> values = opt->results();
    const bool repeatable = opt->get_expected_max() > 1;
    if (values.empty() && !repeatable) {
      const std::string d = opt->get_default_str();
      if (d.empty()) continue;
      values.push_back(d);
    }
    if (repeatable) {
      Json list = Json::array();
      for (const auto& v : values) list.push_back(arg_to_json(v));
      params[name] = list;
    } else {
      params[name] = arg_to_json(values.front());
    }
  }
  return params;
}

struct Output {
  std::string path;  // empty: stdout
  std::vector<std::string> written;

  void emit(const std::string& text) {
    if (path.empty()) {
      std::cout << text;
      if (!text.empty() && text.back() != '\n') std::cout << '\n';
      return;
    }
    std::ofstream f(path);
    if (!f) throw walklab::ValidationError("cannot write " + path);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
    written.push_back(path);
  }

  void emit_json(Json j) {
    round_doubles(j);
    emit(j.dump(2));
  }

  void side_file(const std::string& file, const std::string& text) {
    std::ofstream f(file);
    if (!f) throw walklab::ValidationError("cannot write " + file);
    f << text;
    written.push_back(file);
  }
};

walklab::PmfTable first_return_table(const walklab::WalkParams& params, std::int64_t nmax) {
  walklab::PmfTable t;
  for (std::int64_t n = 1; n <= nmax; ++n) t.push(2 * n, walklab::first_return_pmf(params, n));
  t.law_mass = 2.0 * params.q;
  t.tail_bound = walklab::return_tail(params, 2 * nmax + 1).tail;
  return t;
}

walklab::Side parse_side(const std::string& s) {
  if (s == "pos" || s == "+") return walklab::Side::Positive;
  if (s == "neg" || s == "-") return walklab::Side::Negative;
  throw walklab::ValidationError("side must be pos or neg");
}

walklab::Start parse_start(const std::string& s) {
  if (s == "0" || s == "origin") return walklab::Start::Origin;
  if (s == "+1" || s == "1" || s == "plus") return walklab::Start::Plus;
  if (s == "-1" || s == "minus") return walklab::Start::Minus;
  throw walklab::ValidationError("start must be 0, +1 or -1");
}

std::string pmf_text(const walklab::PmfTable& t, const std::string& format, Json header) {
  if (format == "csv") {
    std::ostringstream os;
    walklab::write_pmf_csv(os, t);
    return os.str();
  }
  header["table"] = walklab::to_json(t);
  round_doubles(header);
  return header.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace walklab;
  const std::vector<std::string> commands{"constants", "dist",     "boundary",
                                          "oracle",    "simulate", "verify"};
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = merge_config(args, commands);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Local time and occupation time of the asymmetric Bernoulli walk"};
  app.set_version_flag("--version", std::string(WALKLAB_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file with \"command\" and \"params\"; flags win on conflict");
  std::string out_path;
  std::string isa = "auto";

  double p = 0.75;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", p, "up-step probability, 1/2 < p < 1");
    sub->add_option("--out", out_path, "write the result here (manifest goes to <out>.manifest.json)");
  };

  auto* constants = app.add_subcommand("constants", "derived constants and extremal points (JSON)");
  add_common(constants);

  auto* dist = app.add_subcommand("dist", "exact probability laws");
  add_common(dist);
  std::string law;
  std::int64_t z = 1;
  std::string side = "pos";
  std::int64_t kmax = 50;
  std::int64_t lmax = 50;
  std::string start = "0";
  std::string format = "csv";
  dist->add_option("law,--law", law,
                   "first-return | local-time | two-point | center-sphere-joint | sphere | ball | "
                   "excursion")
      ->required();
  dist->add_option("--z", z, "site or offset");
  dist->add_option("--side", side, "pos or neg (two-point laws)");
  dist->add_option("--kmax", kmax, "largest listed outcome");
  dist->add_option("--lmax", lmax, "largest sphere occupation (center-sphere-joint)");
  dist->add_option("--start", start, "0, +1 or -1 (center-sphere-joint)");
  dist->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* boundary = app.add_subcommand("boundary", "boundary polyline of D (CSV x,y,branch,marker)");
  add_common(boundary);
  int gridsize = 200;
  std::string bformat = "csv";
  boundary->add_option("--gridsize", gridsize, "number of x samples in [0, lambda0]");
  boundary->add_option("--format", bformat, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* oracle = app.add_subcommand("oracle", "exact joint law of visit counters (JSON)");
  add_common(oracle);
  std::string method = "dp";
  std::int64_t horizon = 100;
  double eps = 1e-10;
  std::vector<std::string> local_sites;
  std::vector<std::string> set_sites;
  int cap = 20;
  oracle->add_option("--method", method, "dp, enumerate or infinite")
      ->check(CLI::IsMember({"dp", "enumerate", "infinite"}));
  oracle->add_option("--n", horizon, "horizon (dp, enumerate)");
  oracle->add_option("--eps", eps, "certificate target (infinite)");
  oracle->add_option("--local-time", local_sites, "track the local time of this site")
      ->delimiter(';');
  oracle->add_option("--set", set_sites, "track the occupation of a comma-separated site set")
      ->delimiter(';');
  oracle->add_option("--cap", cap, "counter cap; larger counts share an overflow bucket");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo path reports and ensembles (JSON)");
  add_common(simulate);
  std::int64_t n = 100000;
  std::int64_t replicas = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double escape_eps = 1e-12;
  double heavy_delta = -1.0;
  double heavy_c = 0.5;
  std::string xi_star_z = "1";
  std::string mode = "report";
  std::string ens_stat = "occupation";
  std::vector<std::string> ens_sets;
  std::int64_t ens_horizon = 200;
  std::string field_csv;
  simulate->add_option("--n", n, "horizon in steps");
  simulate->add_option("--replicas", replicas, "number of replicas");
  simulate->add_option("--seed", seed, "64-bit seed")->envname("WALKLAB_SEED");
  simulate->add_option("--threads", threads, "worker threads (results do not depend on it)");
  simulate->add_option("--escape-eps", escape_eps, "truncation tolerance for infinite-time counts");
  simulate->add_option("--heavy-delta", heavy_delta,
                       "heavy-point threshold slack delta_n; negative disables the profile");
  simulate->add_option("--heavy-c", heavy_c, "heavy-point window coefficient c");
  simulate->add_option("--xi-star-z", xi_star_z, "comma-separated offsets z for Xi*({0,z},n)");
  simulate->add_option("--mode", mode, "report, ensemble or reversed")
      ->check(CLI::IsMember({"report", "ensemble", "reversed"}));
  simulate->add_option("--statistic", ens_stat, "ensemble statistic: occupation, no-return, final-position")
      ->check(CLI::IsMember({"occupation", "no-return", "final-position"}));
  simulate->add_option("--sites", ens_sets, "site sets for the occupation statistic, e.g. 0 or -1,1")
      ->delimiter(';');
  simulate->add_option("--horizon", ens_horizon, "horizon of the no-return statistic");
  simulate->add_option("--field-csv", field_csv, "also write replica 0's local times (site,count)");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite; exit 2 on failure");
  add_common(verify);
  std::string level = "desk";
  std::uint64_t vseed = 42;
  unsigned vthreads = std::max(1u, std::thread::hardware_concurrency());
  std::string only;
  verify->add_option("--level", level, "desk or quick")->check(CLI::IsMember({"desk", "quick"}));
  verify->add_option("--seed", vseed, "seed of the Monte Carlo criteria");
  verify->add_option("--threads", vthreads, "worker threads");
  verify->add_option("--only", only, "comma-separated criterion ids");

  for (auto* sub : {constants, dist, boundary, oracle, simulate, verify}) {
    sub->add_option("--isa", isa, "kernel instruction set: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  }

  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest;
  manifest.version = WALKLAB_VERSION;
  manifest.command = sub->get_name();
  manifest.params = collect_params(sub);
  manifest.seed = sub == verify ? vseed : seed;
  manifest.started_at = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  Output out{out_path, {}};
  int status = kExitOk;

  try {
    if (isa == "scalar") kernels::set_active_isa(kernels::Isa::Scalar);
    if (isa == "avx2") kernels::set_active_isa(kernels::Isa::Avx2);
    const WalkParams params = make_params(p);

    if (sub == constants) {
      Json j{{"params", to_json(params)},
             {"constants", to_json(derived_constants(params))},
             {"extremal_points", to_json(extremal_points(params))},
             {"weight_limit", to_json(weight_limit(params))}};
      Json th = Json::array();
      for (int zz = 1; zz <= 8; ++zz) {
        th.push_back(Json{{"z", zz}, {"theta", theta(params, zz)}, {"rate", 1.0 / theta(params, zz)}});
      }
      j["theta"] = th;
      out.emit_json(j);
    } else if (sub == dist) {
      Json header{{"law", law}, {"params", to_json(params)}};
      if (law == "first-return") {
        out.emit(pmf_text(first_return_table(params, kmax), format, header));
      } else if (law == "local-time") {
        header["z"] = z;
        out.emit(pmf_text(local_time_pmf(params, z, kmax), format, header));
      } else if (law == "two-point") {
        header["z"] = z;
        header["side"] = side;
        out.emit(pmf_text(two_point_occupation_pmf(params, z, parse_side(side), kmax), format,
                          header));
      } else if (law == "sphere") {
        out.emit(pmf_text(sphere_occupation_pmf(params, kmax), format, header));
      } else if (law == "ball") {
        out.emit(pmf_text(ball_occupation_pmf(params, kmax), format, header));
      } else if (law == "center-sphere-joint") {
        const Start st = parse_start(start);
        const std::int64_t kmin = st == Start::Minus ? 1 : 0;
        std::ostringstream csv;
        csv << "K,L,mass\n";
        Json rows = Json::array();
        for (std::int64_t K = kmin; K <= kmax; ++K) {
          const std::int64_t lo = st == Start::Origin ? K + 1 : K;
          for (std::int64_t L = std::max<std::int64_t>(lo, 0); L <= lmax; ++L) {
            const double m = center_sphere_joint_pmf(params, st, K, L);
            csv << K << ',' << L << ',' << format_sig(m) << '\n';
            rows.push_back(Json{{"K", K}, {"L", L}, {"mass", m}});
          }
        }
        if (format == "csv") {
          out.emit(csv.str());
        } else {
          header["start"] = start;
          header["rows"] = rows;
          out.emit_json(header);
        }
      } else if (law == "excursion") {
        const ExcursionLaw e = excursion_law(params, z);
        const ExcursionVisits v = excursion_visits_pmf(params, z, kmax);
        header["z"] = z;
        header["excursion"] = Json{{"Pz", e.Pz}, {"Qz", e.Qz}, {"s_pos", e.s_pos},
                                   {"s_neg", e.s_neg}, {"q_pos", e.q_pos}, {"q_neg", e.q_neg}};
        header["finite_return"] = to_json(v.finite_return);
        header["escape_pos"] = to_json(v.escape_pos);
        header["escape_neg"] = to_json(v.escape_neg);
        if (format == "csv") {
          std::ostringstream csv;
          csv << "j,finite_return,escape_pos,escape_neg\n";
          for (std::int64_t j = 0; j <= kmax; ++j) {
            csv << j << ',' << format_sig(v.finite_return.at(j)) << ','
                << format_sig(v.escape_pos.at(j)) << ',' << format_sig(v.escape_neg.at(j))
                << '\n';
          }
          out.emit(csv.str());
        } else {
          out.emit_json(header);
        }
      } else {
        throw ValidationError("unknown law '" + law +
                              "'; expected first-return, local-time, two-point, "
                              "center-sphere-joint, sphere, ball or excursion");
      }
    } else if (sub == boundary) {
      const std::vector<BoundaryPoint> pts = boundary_polyline(params, gridsize);
      const ExtremalPoints e = extremal_points(params);
      if (bformat == "csv") {
        std::ostringstream os;
        write_boundary_csv(os, pts, e);
        out.emit(os.str());
      } else {
        Json arr = Json::array();
        for (const BoundaryPoint& b : pts) arr.push_back(to_json(b));
        out.emit_json(Json{{"params", to_json(params)}, {"points", arr},
                           {"extremal_points", to_json(e)}});
      }
    } else if (sub == oracle) {
      std::vector<Functional> fs;
      for (const std::string& s : local_sites) {
        const std::vector<int> v = parse_int_list(s);
        if (v.size() != 1) throw ValidationError("--local-time takes one site");
        fs.push_back(Functional::local_time(v.front(), cap));
      }
      for (const std::string& s : set_sites) fs.push_back(Functional::set_occupation(parse_int_list(s), cap));
      if (fs.empty()) fs.push_back(Functional::local_time(0, cap));
      JointLaw jl;
      if (method == "dp") {
        jl = dp_law(params, horizon, fs);
      } else if (method == "enumerate") {
        jl = enumerate_paths(params, horizon, fs);
      } else {
        jl = infinite_law(params, fs, eps);
      }
      Json j{{"method", method}, {"params", to_json(params)}, {"law", to_json(jl)}};
      out.emit_json(j);
    } else if (sub == simulate) {
      SimConfig config;
      config.params = params;
      config.n = n;
      config.replicas = replicas;
      config.seed = seed;
      config.threads = threads;
      config.escape_eps = escape_eps;
      config.xi_star_offsets = parse_int_list(xi_star_z);
      if (heavy_delta >= 0.0) config.heavy = HeavyPointConfig{heavy_delta, heavy_c};
      validate(config);
      Json j{{"mode", mode}, {"params", to_json(params)}, {"n", n}, {"replicas", replicas},
             {"seed", seed}};
      if (mode == "report") {
        const std::vector<PathReport> reps = path_reports(config);
        Json arr = Json::array();
        for (const PathReport& r : reps) arr.push_back(to_json(r));
        j["reports"] = arr;
        if (!field_csv.empty()) {
          std::ostringstream os;
          write_field_csv(os, simulate_path(params, n, seed, 0));
          out.side_file(field_csv, os.str());
        }
      } else if (mode == "ensemble") {
        Statistic stat;
        if (ens_stat == "no-return") {
          stat = no_return_statistic(ens_horizon);
        } else if (ens_stat == "final-position") {
          stat = final_position_statistic();
        } else {
          std::vector<std::pair<std::string, std::vector<std::int64_t>>> sets;
          if (ens_sets.empty()) ens_sets.push_back("0");
          for (const std::string& s : ens_sets) {
            std::vector<std::int64_t> v;
            for (int x : parse_int_list(s)) v.push_back(x);
            sets.emplace_back("{" + s + "}", v);
          }
          stat = escape_occupation_statistic(sets);
        }
        j["ensemble"] = to_json(ensemble(config, stat));
      } else {
        j["reversed"] = to_json(reversed_walk_check(params, n, seed,
                                                    static_cast<std::uint64_t>(replicas), 1, threads));
      }
      out.emit_json(j);
    } else if (sub == verify) {
      AcceptanceOptions o;
      o.p = p;
      o.level = level == "desk" ? Level::Desk : Level::Quick;
      o.seed = vseed;
      o.threads = vthreads;
      o.only = parse_int_list(only);
      const auto results = run_acceptance(o, [](const CriterionResult& r) {
        std::cout << format_result_line(r) << std::endl;
      });
      bool all = true;
      Json arr = Json::array();
      for (const auto& r : results) {
        all = all && r.passed;
        arr.push_back(to_json(r));
      }
      std::cout << (all ? "all criteria passed" : "some criteria FAILED") << std::endl;
      if (!out_path.empty()) {
        out.emit_json(Json{{"level", level}, {"p", p}, {"seed", vseed}, {"criteria", arr},
                           {"passed", all}});
      }
      status = all ? kExitOk : kExitVerify;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.outputs = out.written;
  Json mj = to_json(manifest);
  if (out_path.empty()) {
    std::cerr << mj.dump() << '\n';
  } else {
    std::ofstream f(out_path + ".manifest.json");
    f << mj.dump(2) << '\n';
  }
  return status;
}
