// Copyright 2026 The qrcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qrc: experiment driver.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure or completed
// with invalid points, 4 check threshold missed.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"

namespace fs = std::filesystem;
using namespace qrc;
using namespace qrc::cli;

namespace {

constexpr int kOk = 0, kConfig = 2, kNumerical = 3, kThreshold = 4;

struct Run {
  std::string command;
  json cfg;
  fs::path out;
  unsigned workers = 1;
  std::string hash;
  json artifacts = json::array();
  json failures = json::array();
  json checks = json::array();
  int failed_points = 0;

  std::uint64_t seed() const {
    if (!cfg.contains("seed") || !cfg["seed"].is_number_integer())
      throw ConfigError("a master seed is required (config 'seed' or --seed)");
    return cfg["seed"].get<std::uint64_t>();
  }
  json section(const char* key) const { return cfg.value(key, json::object()); }

  std::ofstream open(const std::string& name, bool binary = false) {
    std::ofstream os(out / name, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot write " + (out / name).string());
    artifacts.push_back(name);
    return os;
  }
  void write_text(const std::string& name, const std::string& s) { open(name) << s << "\n"; }
  // A failed check is recorded and mapped to exit code 4.
  void check(const std::string& name, double value, double bound, bool upper) {
    const bool ok = upper ? value <= bound : value >= bound;
    checks.push_back({{"name", name}, {"value", value}, {"bound", bound}, {"kind", upper ? "max" : "min"}, {"ok", ok}});
  }
  bool checks_ok() const {
    for (const auto& c : checks)
      if (!c["ok"].get<bool>()) return false;
    return true;
  }
  json stamp() const { return {{"config_hash", hash}, {"seed", cfg.value("seed", json())}}; }

  int finish() {
    json m;
    m["format"] = "qrc-manifest";
    m["version"] = 1;
    m["command"] = command;
    m["config_hash"] = hash;
    m["seed"] = cfg.value("seed", json());
    m["config"] = cfg;
    m["artifacts"] = artifacts;
    m["failed_points"] = failed_points;
    m["failures"] = failures;
    m["checks"] = checks;
    const int code = failed_points > 0 ? kNumerical : (checks_ok() ? kOk : kThreshold);
    m["status"] = code == kOk ? "ok" : code == kNumerical ? "completed_with_invalid_points" : "check_failed";
    std::ofstream(out / "manifest.json") << m.dump(2) << "\n";
    std::cout << command << ": " << m["status"].get<std::string>() << " (config " << hash << ", " << artifacts.size()
              << " artifacts in " << out.string() << ")\n";
    for (const auto& c : checks)
      if (!c["ok"].get<bool>())
        std::cout << "  check " << c["name"].get<std::string>() << " = " << c["value"].get<double>() << " misses "
                  << c["kind"].get<std::string>() << " " << c["bound"].get<double>() << "\n";
    return code;
  }
};

void apply_checks(Run& run, const json& values) {
  const json chk = run.section("check");
  for (const auto& [k, bound] : chk.items()) {
    const bool upper = k.size() > 4 && k.compare(k.size() - 4, 4, "_max") == 0;
    const bool lower = k.size() > 4 && k.compare(k.size() - 4, 4, "_min") == 0;
    if (!upper && !lower) throw ConfigError("check." + k + ": keys end in _max or _min");
    const std::string name = k.substr(0, k.size() - 4);
    if (!values.contains(name)) throw ConfigError("check." + k + ": '" + name + "' is not reported by " + run.command);
    if (!bound.is_number()) throw ConfigError("check." + k + ": bound must be a number");
    run.check(k, values[name].get<double>(), bound.get<double>(), upper);
  }
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(Run& run) {
  if (!run.cfg.contains("chain")) throw ConfigError("simulate: 'chain' table required");
  const ChainSpec chain = chain_from_json(run.cfg["chain"]);
  const IntegratorConfig integ = integrator_from_json(run.cfg.value("integrator", json()), run.seed());
  const json sim = run.section("simulate");
  const int n_traj = sim.value("trajectories", 1);
  const bool conditional = sim.value("conditional", true);
  const bool write_csv = sim.value("csv", true);
  if (n_traj < 1) throw ConfigError("simulate.trajectories must be >= 1");

  if (!conditional) {
    TrajectoryResult r;
    r.states = evolve_unconditional(chain, integ, vacuum(chain.network.size()));
    for (std::size_t i = 0; i < r.states.size(); ++i)
      r.record.times.push_back(static_cast<double>((i + 1) * integ.store_stride) * integ.dt);
    auto os = run.open("unconditional.csv");
    write_trajectory_csv(os, r);
    return run.finish();
  }
  std::vector<TrajectoryResult> res(static_cast<std::size_t>(n_traj));
  std::vector<std::string> err(res.size());
  parallel_for(res.size(), run.workers, [&](std::size_t i) {
    try {
      res[i] = simulate_trajectory(chain, integ, i);
    } catch (const NumericalFailure& e) {
      err[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!err[i].empty()) {
      ++run.failed_points;
      run.failures.push_back({{"trajectory", i}, {"error", err[i]}});
      continue;
    }
    const std::string stem = "traj_" + std::to_string(i);
    auto bin = run.open(stem + ".steo", true);
    write_steo(bin, res[i]);
    if (write_csv) {
      auto os = run.open(stem + ".csv");
      write_trajectory_csv(os, res[i]);
    }
  }
  return run.finish();
}

// ----------------------------------------------------------- phase-diagram

int cmd_phase(Run& run) {
  const PhaseDiagramSpec spec = phase_from_json(run.section("phase_diagram"));
  const std::vector<PhaseCell> cells = phase_diagram(spec);
  auto os = run.open("phase.csv");
  write_phase_csv(os, cells);
  int multi = 0, failed = 0;
  for (const auto& c : cells) {
    multi += c.n_stable > 1;
    failed += c.failed;
  }
  if (failed > 0) {
    run.failed_points = failed;
    run.failures.push_back({{"cells_failed", failed}});
  }
  apply_checks(run, {{"multistable_cells", multi}, {"cells", cells.size()}});
  return run.finish();
}

// ---------------------------------------------------------- oracle-compare

int cmd_oracle(Run& run) {
  const json o = run.section("oracle");
  const std::string kind = o.value("kind", "complex_p");
  if (kind == "complex_p") {
    const std::vector<double> lams = grid_values(o.value("lambda_ratios", json{0.005, 0.02, 0.05}), "oracle.lambda_ratios");
    const std::vector<double> Ns = grid_values(o.value("N_grid", json{{"from", 0.1}, {"to", 0.45}, {"n", 20}}), "oracle.N_grid");
    for (double l : lams)
      if (!(l > 0.0)) throw ConfigError("oracle.lambda_ratios must be > 0");
    const KerrOracleReport r = kerr_steady_oracle(o.value("delta", -1.0), lams, Ns, o.value("gamma", 1.0), run.workers);
    json rep = json::parse(r.to_json());
    rep["provenance"] = run.stamp();
    run.write_text("oracle_steady.json", rep.dump(2));
    json vals;
    double worst = 0.0;
    for (double l : lams) worst = std::max(worst, r.max_err(l));
    vals["max_rel_err"] = worst;
    apply_checks(run, vals);
    return run.finish();
  }
  if (kind == "matched_noise") {
    const ChainSpec chain = run.cfg.contains("chain") ? chain_from_json(run.cfg["chain"]) : build_benchmark_chain();
    FockTrajectoryOptions fo;
    fo.integrator = integrator_from_json(run.cfg.value("integrator", json()), run.seed());
    if (o.contains("cutoffs")) fo.cutoffs = o["cutoffs"].get<std::vector<int>>();
    else fo.cutoffs.assign(chain.network.size(), 20);
    fo.leak_tol = o.value("leak_tol", fo.leak_tol);
    const MatchedNoiseReport r = matched_noise_compare(chain, fo, o.value("trajectory", std::uint64_t{0}));
    json rep = json::parse(r.to_json());
    rep["provenance"] = run.stamp();
    run.write_text("oracle_matched_noise.json", rep.dump(2));
    apply_checks(run, {{"first_order", r.first_order}, {"second_order", r.second_order}});
    return run.finish();
  }
  throw ConfigError("oracle.kind must be complex_p or matched_noise");
}

// -------------------------------------------------------------------- task

void write_curve(Run& run, const std::string& name, const std::string& xname, const json& sweep_rows) {
  auto os = run.open(name);
  os.precision(17);
  os << "# qrc-curve v1 config=" << run.hash << "\n";
  os << "point," << xname << ",accuracy\n";
  for (const auto& r : sweep_rows) os << r[0].get<int>() << "," << r[1].get<double>() << "," << r[2].get<double>() << "\n";
}

std::vector<double> means_baseline_curve(const Task1Result& r) {
  std::vector<double> acc;
  for (double t : r.times) {
    auto slice = [t](const Dataset& d) {
      Dataset s;
      s.n_classes = d.n_classes;
      std::vector<Eigen::Index> cols;
      for (std::size_t i = 0; i < d.size(); ++i)
        if (d.t[i] == t) cols.push_back(static_cast<Eigen::Index>(i));
      s.X.resize(d.X.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) {
        s.X.col(static_cast<Eigen::Index>(k)) = d.X.col(cols[k]);
        s.labels.push_back(d.labels[static_cast<std::size_t>(cols[k])]);
        s.q.push_back(d.q[static_cast<std::size_t>(cols[k])]);
        s.t.push_back(t);
      }
      return s;
    };
    acc.push_back(accuracy(train_on_means_baseline(slice(r.train_set)), slice(r.test_set)));
  }
  return acc;
}

void set_sweep_value(json& task, const std::string& kind, const std::string& p, double v) {
  if (kind == "task1") {
    if (p == "lambda" || p == "g" || p == "delta" || p == "gamma" || p == "epsilon") task["qrc"][p] = v;
    else if (p == "eta" || p == "chi1" || p == "chi2" || p == "Gamma_c") task["task1"][p] = v;
    else throw ConfigError("task.sweep.parameter '" + p + "' not supported for task1");
  } else {
    if (p == "lambda1" || p == "delta1" || p == "gamma1" || p == "Gamma_c") task["task2"][p] = v;
    else if (p == "eta_eff") task["task2"]["instance"]["eta_eff"] = v;
    else if (p == "pa_gain") {
      task["task2"]["pa"]["enabled"] = true;
      task["task2"]["pa"]["gain"] = v;
    } else throw ConfigError("task.sweep.parameter '" + p + "' not supported for task2");
  }
}

int cmd_task(Run& run) {
  json task = run.section("task");
  const std::string kind = task.value("kind", "");
  if (kind != "task1" && kind != "task2") throw ConfigError("task.kind must be task1 or task2");
  if (kind == "task1" && !task.contains("integrator") && run.cfg.contains("integrator")) task["integrator"] = run.cfg["integrator"];
  std::string param;
  std::vector<double> values{0.0};
  if (task.contains("sweep")) {
    const json& sw = task["sweep"];
    param = sw.value("parameter", "");
    if (param.empty() || !sw.contains("values")) throw ConfigError("task.sweep needs parameter and values");
    values = grid_values(sw["values"], "task.sweep.values");
  }
  const bool compare_linear = task.value("compare_linear", false);
  const bool baseline = task.value("means_baseline", false);
  json clean = task;
  for (const char* k : {"sweep", "compare_linear", "means_baseline"}) clean.erase(k);

  json metrics_out = json::array();
  json rows = json::array(), rows_lin = json::array(), rows_base = json::array();
  json last_vals;
  for (std::size_t p = 0; p < values.size(); ++p) {
    json tp = clean;
    if (!param.empty()) set_sweep_value(tp, kind, param, values[p]);
    const std::string tag = values.size() > 1 ? "_p" + std::to_string(p) : "";
    json m{{"point", p}};
    if (!param.empty()) m[param] = values[p];
    if (kind == "task1") {
      const Task1Config c = task1_from_json(tp, run.seed(), run.workers);
      const Task1Result r = run_task1(c);
      if (r.failed_trajectories > 0) {
        run.failed_points += r.failed_trajectories;
        run.failures.push_back({{"point", p}, {"failed_trajectories", r.failed_trajectories}, {"summary", r.failure_summary}});
      }
      for (std::size_t i = 0; i < r.times.size(); ++i) rows.push_back({p, r.times[i], r.test_accuracy[i]});
      const int am = r.metrics.argfirst_max;
      m["c_max"] = r.metrics.c_max;
      m["t_max"] = am >= 0 ? json(r.times[static_cast<std::size_t>(am)]) : json();
      m["reaches_threshold"] = r.metrics.index_at_threshold >= 0;
      m["failed_trajectories"] = r.failed_trajectories;
      last_vals = {{"c_max", r.metrics.c_max}, {"t_max", am >= 0 ? r.times[static_cast<std::size_t>(am)] : 1e300}};
      {
        auto os = run.open("dataset_train" + tag + ".csv");
        write_dataset_csv(os, r.train_set);
      }
      {
        auto os = run.open("dataset_test" + tag + ".csv");
        write_dataset_csv(os, r.test_set);
      }
      run.write_text("layer" + tag + ".json", layer_to_json(r.layer, run.stamp().dump()));
      if (compare_linear) {
        Task1Config cl = c;
        cl.spec.qrc.lambda = 0.0;
        const Task1Result rl = run_task1(cl);
        double lo = 1.0, hi = 0.0;
        for (std::size_t i = 0; i < rl.times.size(); ++i) {
          rows_lin.push_back({p, rl.times[i], rl.test_accuracy[i]});
          lo = std::min(lo, rl.test_accuracy[i]);
          hi = std::max(hi, rl.test_accuracy[i]);
        }
        m["linear_c_max"] = rl.metrics.c_max;
        m["linear_accuracy_min"] = lo;
        m["linear_accuracy_max"] = hi;
        last_vals["linear_accuracy_min"] = lo;
        last_vals["linear_accuracy_max"] = hi;
      }
      if (baseline) {
        const std::vector<double> b = means_baseline_curve(r);
        for (std::size_t i = 0; i < r.times.size(); ++i) rows_base.push_back({p, r.times[i], b[i]});
        m["means_baseline_c_max"] = metrics(b).c_max;
      }
    } else {
      const Task2Config c = task2_from_json(tp, run.seed(), run.workers);
      const Task2Result r = run_task2(c);
      if (r.failed_trajectories > 0) {
        run.failed_points += r.failed_trajectories;
        run.failures.push_back({{"point", p}, {"failed_trajectories", r.failed_trajectories}, {"summary", r.failure_summary}});
      }
      for (std::size_t i = 0; i < r.ns_grid.size(); ++i) rows.push_back({p, r.ns_grid[i], r.test_accuracy[i]});
      const int am = r.metrics.argfirst_max;
      m["c_max"] = r.metrics.c_max;
      m["ns_max"] = am >= 0 ? json(r.ns_grid[static_cast<std::size_t>(am)]) : json();
      m["spearman"] = r.spearman;
      m["pool_per_class"] = r.pool_per_class;
      m["lambda1"] = c.spec.lambda1;
      m["eta_eff"] = {eta_eff_task2(c.spec, 1), eta_eff_task2(c.spec, 2)};
      m["b12"] = b12_metric(build_task2_chain(c.spec, 1), build_task2_chain(c.spec, 2), 2);
      m["failed_trajectories"] = r.failed_trajectories;
      last_vals = {{"c_max", r.metrics.c_max}, {"spearman", r.spearman}, {"accuracy_last", r.test_accuracy.back()}};
      if (!r.train_sets.empty()) {
        auto os = run.open("dataset_train" + tag + ".csv");
        write_dataset_csv(os, r.train_sets.back());
        auto ot = run.open("dataset_test" + tag + ".csv");
        write_dataset_csv(ot, r.test_sets.back());
      }
      if (compare_linear) {
        Task2Config cl = c;
        cl.spec.lambda1 = 0.0;
        const Task2Result rl = run_task2(cl);
        for (std::size_t i = 0; i < rl.ns_grid.size(); ++i) rows_lin.push_back({p, rl.ns_grid[i], rl.test_accuracy[i]});
        m["linear_c_max"] = rl.metrics.c_max;
        m["gap_last"] = r.test_accuracy.back() - rl.test_accuracy.back();
        last_vals["gap_last"] = m["gap_last"];
      }
    }
    metrics_out.push_back(m);
  }
  const std::string xname = kind == "task1" ? "t" : "n_shots";
  write_curve(run, "accuracy.csv", xname, rows);
  if (compare_linear) write_curve(run, "accuracy_linear.csv", xname, rows_lin);
  if (baseline) write_curve(run, "accuracy_means_baseline.csv", xname, rows_base);
  run.write_text("metrics.json", json{{"format", "qrc-task-metrics"}, {"version", 1}, {"task", kind},
                                      {"sweep_parameter", param}, {"points", metrics_out}, {"provenance", run.stamp()}}
                                     .dump(2));
  if (values.size() == 1) apply_checks(run, last_vals);
  else if (!run.section("check").empty()) throw ConfigError("check is only supported without a sweep");
  return run.finish();
}

// ------------------------------------------------------------- train, eval

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open dataset '" + path + "'");
  try {
    return read_dataset_csv(is);
  } catch (const std::exception& e) {
    throw ConfigError("dataset '" + path + "': " + e.what());
  }
}

int cmd_train(Run& run) {
  const json t = run.section("train");
  if (!t.contains("dataset")) throw ConfigError("train.dataset required");
  const Dataset d = load_dataset(t["dataset"].get<std::string>());
  const std::string method = t.value("method", "softmax");
  json opts = t;
  for (const char* k : {"dataset", "test", "method"}) opts.erase(k);
  OutputLayer layer;
  if (method == "softmax") layer = train(d, train_from_json(opts, TrainOptions{}));
  else if (method == "means") layer = train_on_means_baseline(d);
  else throw ConfigError("train.method must be softmax or means");
  run.write_text("layer.json", layer_to_json(layer, run.stamp().dump()));
  json vals{{"train_accuracy", layer.train_accuracy}};
  if (t.contains("test")) vals["test_accuracy"] = accuracy(layer, load_dataset(t["test"].get<std::string>()));
  run.write_text("train.json", json{{"format", "qrc-train"}, {"version", 1}, {"converged", layer.converged},
                                    {"iterations", layer.iterations}, {"loss", layer.loss}, {"metrics", vals},
                                    {"provenance", run.stamp()}}
                                   .dump(2));
  apply_checks(run, vals);
  return run.finish();
}

int cmd_eval(Run& run) {
  const json e = run.section("eval");
  if (!e.contains("layer") || !e.contains("dataset")) throw ConfigError("eval.layer and eval.dataset required");
  std::ifstream is(e["layer"].get<std::string>());
  if (!is) throw ConfigError("cannot open layer '" + e["layer"].get<std::string>() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  OutputLayer layer;
  try {
    layer = layer_from_json(ss.str());
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("layer: ") + ex.what());
  }
  const Dataset d = load_dataset(e["dataset"].get<std::string>());
  // accuracy per distinct time, for time-resolved datasets
  std::map<double, std::pair<int, int>> per_t;
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& [hit, n] = per_t[d.t[i]];
    hit += predict(layer, d.X.col(static_cast<Eigen::Index>(i))) == d.labels[i];
    ++n;
  }
  std::vector<double> curve;
  auto os = run.open("eval_curve.csv");
  os.precision(17);
  os << "# qrc-curve v1 config=" << run.hash << "\nt,accuracy\n";
  for (const auto& [t, hn] : per_t) {
    curve.push_back(static_cast<double>(hn.first) / hn.second);
    os << t << "," << curve.back() << "\n";
  }
  const ClassificationMetrics cm = metrics(curve);
  const json vals{{"accuracy", accuracy(layer, d)}, {"c_max", cm.c_max}};
  run.write_text("eval.json", json{{"format", "qrc-eval"}, {"version", 1}, {"metrics", vals}, {"provenance", run.stamp()}}.dump(2));
  apply_checks(run, vals);
  return run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrc: quantum reservoir computing simulator"};
  app.require_subcommand(1);
  std::string config_path, preset, out = "out";
  std::optional<std::uint64_t> seed;
  unsigned workers = default_workers();
  app.add_option("--config", config_path, "YAML or JSON experiment config");
  app.add_option("--preset", preset, "built-in config (task1-fig4, task2-fig6, task2-pa, single-kerr)");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  const std::vector<std::pair<std::string, std::function<int(Run&)>>> cmds = {
      {"simulate", cmd_simulate}, {"phase-diagram", cmd_phase}, {"oracle-compare", cmd_oracle},
      {"task", cmd_task},         {"train", cmd_train},         {"eval", cmd_eval}};
  for (const auto& [name, fn] : cmds) app.add_subcommand(name)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  Run run;
  try {
    json cfg = json::object();
    if (!preset.empty()) cfg = preset_config(preset);
    if (!config_path.empty()) cfg = merge(cfg, load_config_file(config_path));
    if (preset.empty() && config_path.empty()) throw ConfigError("--config or --preset required");
    if (seed) cfg["seed"] = *seed;
    for (const auto& [k, v] : cfg.items())
      if (k != "seed" && k != "chain" && k != "integrator" && k != "simulate" && k != "phase_diagram" &&
          k != "oracle" && k != "task" && k != "train" && k != "eval" && k != "check")
        throw ConfigError("unknown top-level key '" + k + "'");
    run.cfg = cfg;
    run.hash = config_hash(cfg);
    run.workers = workers;
    run.out = out;
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out + ": " + ec.message());
    for (const auto& [name, fn] : cmds)
      if (app.got_subcommand(name)) {
        run.command = name;
        return fn(run);
      }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const NoConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kConfig;
}
