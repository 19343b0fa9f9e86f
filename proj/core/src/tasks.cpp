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

#include "qrc/tasks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qrc/special.hpp"

namespace qrc {

unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned w = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ChainSpec single_kerr_chain(double delta, double lambda, cplx eta, double gamma, bool monitored) {
  ChainSpec c;
  c.network = ModeNetwork({"b1"});
  if (delta != 0.0) c.blocks.push_back(Detuning{0, delta});
  if (lambda != 0.0) c.blocks.push_back(Kerr{0, lambda});
  c.blocks.push_back(CoherentDrive{0, eta});
  c.add_loss(0, gamma, monitored);
  c.validate();
  return c;
}

double drive_for_n(double N, double lambda, double gamma) {
  if (!(lambda > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("drive_for_n: lambda and gamma must be > 0");
  return N * gamma / std::sqrt(lambda / gamma);
}

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

double KerrOraclePoint::max_err() const { return std::max({err_mean, err_nb, err_cbb}); }

double KerrOracleReport::max_err(double lambda_ratio) const {
  double m = 0.0;
  for (const auto& p : points)
    if (p.lambda_ratio == lambda_ratio) m = std::max(m, p.max_err());
  return m;
}

std::string KerrOracleReport::to_json() const {
  nlohmann::json j;
  j["format"] = "qrc-oracle-steady";
  j["version"] = 1;
  std::vector<double> lams;
  for (const auto& p : points)
    if (std::find(lams.begin(), lams.end(), p.lambda_ratio) == lams.end()) lams.push_back(p.lambda_ratio);
  for (double l : lams) {
    nlohmann::json q;
    q["lambda_ratio"] = l;
    double mx[3] = {0, 0, 0}, mean[3] = {0, 0, 0};
    int n = 0;
    for (const auto& p : points) {
      if (p.lambda_ratio != l) continue;
      const double e[3] = {p.err_mean, p.err_nb, p.err_cbb};
      for (int k = 0; k < 3; ++k) {
        mx[k] = std::max(mx[k], e[k]);
        mean[k] += e[k];
      }
      ++n;
    }
    const char* names[3] = {"abs_mean_b", "C_bdb", "abs_C_bb"};
    for (int k = 0; k < 3; ++k) q[names[k]] = {{"max_rel_err", mx[k]}, {"mean_rel_err", n ? mean[k] / n : 0.0}};
    j["sweeps"].push_back(q);
  }
  for (const auto& p : points)
    j["points"].push_back({{"lambda_ratio", p.lambda_ratio},
                           {"N", p.N},
                           {"abs_mean_b", {p.mean_teom, p.mean_exact}},
                           {"C_bdb", {p.nb_teom, p.nb_exact}},
                           {"abs_C_bb", {p.cbb_teom, p.cbb_exact}}});
  return j.dump(2);
}

KerrOracleReport kerr_steady_oracle(double delta, const std::vector<double>& lambda_ratios,
                                    const std::vector<double>& N_grid, double gamma, unsigned workers) {
  KerrOracleReport rep;
  for (double lr : lambda_ratios)
    for (double N : N_grid) {
      KerrOraclePoint p;
      p.lambda_ratio = lr;
      p.N = N;
      rep.points.push_back(p);
    }
  parallel_for(rep.points.size(), workers, [&](std::size_t i) {
    KerrOraclePoint& p = rep.points[i];
    const double lambda = p.lambda_ratio * gamma;
    const double eta = drive_for_n(p.N, lambda, gamma);
    const CumulantState s = steady_state(single_kerr_chain(delta, lambda, eta, gamma, false), 1e-12);
    const KerrParams kp{delta, lambda, eta, gamma};
    const cplx m = complexp_moment(kp, 0, 1);
    const cplx nb = complexp_moment(kp, 1, 1) - std::norm(m);
    const cplx bb = complexp_moment(kp, 0, 2) - m * m;
    p.mean_teom = std::abs(s.mu(0));
    p.mean_exact = std::abs(m);
    p.nb_teom = s.c_bdb(0, 0).real();
    p.nb_exact = nb.real();
    p.cbb_teom = std::abs(s.c_bb(0, 0));
    p.cbb_exact = std::abs(bb);
    p.err_mean = rel_err(p.mean_teom, p.mean_exact);
    p.err_nb = rel_err(p.nb_teom, p.nb_exact);
    p.err_cbb = rel_err(p.cbb_teom, p.cbb_exact);
  });
  return rep;
}

MatchedNoiseReport matched_noise_discrepancy(const std::vector<double>& times, std::vector<CumulantState> teom,
                                             std::vector<CumulantState> fock) {
  if (teom.size() != fock.size() || teom.size() != times.size())
    throw std::invalid_argument("matched_noise_discrepancy: series lengths differ");
  MatchedNoiseReport r;
  r.times = times;
  double d1 = 0.0, n1 = 0.0, d2 = 0.0, n2 = 0.0;
  for (std::size_t t = 0; t < times.size(); ++t) {
    const CumulantState& s = teom[t];
    const CumulantState& f = fock[t];
    d1 += (s.mu - f.mu).norm();
    n1 += f.mu.norm();
    d2 += std::sqrt((s.c_bb - f.c_bb).squaredNorm() + (s.c_bdb - f.c_bdb).squaredNorm());
    n2 += std::sqrt(f.c_bb.squaredNorm() + f.c_bdb.squaredNorm());
  }
  r.first_order = n1 > 0.0 ? d1 / n1 : d1;
  r.second_order = n2 > 0.0 ? d2 / n2 : d2;
  r.teom = std::move(teom);
  r.fock = std::move(fock);
  return r;
}

MatchedNoiseReport matched_noise_compare(const ChainSpec& chain, const FockTrajectoryOptions& opts,
                                         std::uint64_t traj) {
  const TrajectoryResult s = simulate_trajectory(chain, opts.integrator, traj);
  double top = 0.0;
  const TrajectoryResult f = simulate_fock_trajectory(chain, opts, traj, nullptr, &top);
  MatchedNoiseReport r = matched_noise_discrepancy(s.record.times, s.states, f.states);
  r.fock_max_top_population = top;
  return r;
}

std::string MatchedNoiseReport::to_json() const {
  nlohmann::json j;
  j["format"] = "qrc-oracle-matched-noise";
  j["version"] = 1;
  j["first_order_rel_discrepancy"] = first_order;
  j["second_order_rel_discrepancy"] = second_order;
  j["fock_max_top_population"] = fock_max_top_population;
  for (std::size_t t = 0; t < times.size(); ++t) {
    nlohmann::json row;
    row["t"] = times[t];
    for (const auto* src : {&teom, &fock}) {
      const CumulantState& c = (*src)[t];
      std::vector<double> flat = serialize(c);
      row[src == &teom ? "teom" : "fock"] = flat;
    }
    j["series"].push_back(row);
  }
  return j.dump();
}

void Task1Config::validate() const {
  integrator.validate();
  if (q_train < 1 || q_test < 1) throw std::invalid_argument("task1: q_train and q_test must be >= 1");
  spec.qrc.validate();
}

Task1Result run_task1(const Task1Config& cfg) {
  cfg.validate();
  Task1Result res;
  res.nodes = sample_random_qrc(cfg.spec.qrc);
  const int C = TaskISpec::n_classes;
  const int Q = cfg.q_train + cfg.q_test;
  std::vector<Model> models;
  for (int s = 1; s <= C; ++s) models.emplace_back(build_task1_chain(cfg.spec, s, res.nodes));

  const std::size_t jobs = static_cast<std::size_t>(C * Q);
  std::vector<QuadratureSeries> series(jobs);
  std::vector<std::string> errors(jobs);
  parallel_for(jobs, cfg.workers, [&](std::size_t i) {
    const int sigma = static_cast<int>(i / Q) + 1;
    const std::uint64_t q = i % Q;
    const Model& m = models[static_cast<std::size_t>(sigma - 1)];
    try {
      const TrajectoryResult tr = simulate_trajectory(m, cfg.integrator, trajectory_id(sigma, q), vacuum(m.n_modes()));
      series[i] = boxcar_filter(tr.record, 0.0);
    } catch (const NumericalFailure& e) {
      errors[i] = e.what();
    }
  });
  std::ostringstream fails;
  for (std::size_t i = 0; i < jobs; ++i)
    if (!errors[i].empty()) {
      ++res.failed_trajectories;
      if (res.failed_trajectories <= 5) fails << "class " << i / Q + 1 << " q " << i % Q << ": " << errors[i] << "\n";
    }
  res.failure_summary = fails.str();

  std::size_t nt = 0;
  for (const auto& s : series)
    if (s.size() > 0) {
      nt = s.size();
      res.times = s.times;
      break;
    }
  if (nt == 0) throw NumericalFailure("task1: every trajectory failed");

  auto build = [&](bool train_part) {
    Dataset d;
    d.n_classes = C;
    std::size_t count = 0;
    for (std::size_t i = 0; i < jobs; ++i) {
      const bool is_train = static_cast<int>(i % Q) < cfg.q_train;
      if (is_train == train_part && series[i].size() == nt) count += nt;
    }
    const Eigen::Index D = static_cast<Eigen::Index>(2 * res.nodes.K());
    d.X.resize(D, static_cast<Eigen::Index>(count));
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < jobs; ++i) {
      const bool is_train = static_cast<int>(i % Q) < cfg.q_train;
      if (is_train != train_part || series[i].size() != nt) continue;
      for (std::size_t k = 0; k < nt; ++k) {
        d.X.col(col++) = series[i].features(k);
        d.labels.push_back(static_cast<int>(i / Q) + 1);
        d.q.push_back(static_cast<int>(i % Q));
        d.t.push_back(series[i].times[k]);
      }
    }
    return d;
  };
  res.train_set = build(true);
  res.test_set = build(false);
  series.clear();
  res.layer = train(res.train_set, cfg.train);

  std::vector<int> correct(nt, 0), total(nt, 0);
  for (std::size_t j = 0; j < res.test_set.size(); ++j) {
    const std::size_t k = j % nt;
    ++total[k];
    if (predict(res.layer, res.test_set.X.col(static_cast<Eigen::Index>(j))) == res.test_set.labels[j]) ++correct[k];
  }
  for (std::size_t k = 0; k < nt; ++k)
    res.test_accuracy.push_back(total[k] ? static_cast<double>(correct[k]) / total[k] : 0.0);
  res.metrics = metrics(res.test_accuracy);
  return res;
}

int Task2Config::ns_max() const {
  if (ns_grid.empty()) throw std::invalid_argument("task2: empty N_S grid");
  return *std::max_element(ns_grid.begin(), ns_grid.end());
}

void Task2Config::validate() const {
  if (q_train < 1 || q_test < 1) throw std::invalid_argument("task2: q_train and q_test must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("task2: dt must be > 0");
  if (!(t0 >= 0.0 && t0 < t_final)) throw std::invalid_argument("task2: need 0 <= t0 < t_final");
  if (ns_grid.empty()) throw std::invalid_argument("task2: empty N_S grid");
  for (int n : ns_grid)
    if (n < 1) throw std::invalid_argument("task2: N_S values must be >= 1");
}

std::vector<double> final_quadratures(const Model& model, const IntegratorConfig& integ, double t0,
                                      std::uint64_t traj) {
  const std::size_t nch = model.n_channels();
  std::vector<double> acc(2 * nch, 0.0);
  const NoiseStream ns(integ.seed, traj);
  const double dt = integ.dt;
  const std::size_t first = static_cast<std::size_t>(std::llround(t0 / dt));
  NoiseSource noise = [&](std::uint64_t step, double* dW) { ns.increments(step, nch, dt, dW); };
  StepObserver obs = [&](std::size_t s, double, const Stepper&, const double* J) {
    if (s < first) return;
    for (std::size_t i = 0; i < 2 * nch; ++i) acc[i] += J[i] * dt;
  };
  run_conditional(model, integ, vacuum(model.n_modes()), noise, obs);
  const double span = static_cast<double>(integ.n_steps() - first) * dt;
  for (auto& a : acc) a /= span;
  return acc;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Task2Result run_task2(const Task2Config& cfg) {
  cfg.validate();
  Task2Result res;
  res.ns_grid = cfg.ns_grid;
  const int C = TaskIISpec::n_classes;
  const std::size_t nmax = static_cast<std::size_t>(cfg.ns_max());
  const std::size_t groups = static_cast<std::size_t>(cfg.q_train + cfg.q_test);
  // bootstrap draws from a pool sized for N_S = 1 per sample group
  const std::size_t P = cfg.bootstrap ? groups * std::max<std::size_t>(1, nmax / 5) : groups * nmax;

  IntegratorConfig integ;
  integ.dt = cfg.dt;
  integ.t_final = cfg.t_final;
  integ.seed = cfg.seed;
  integ.store_stride = 1;
  integ.validate();

  std::vector<Model> models;
  for (int s = 1; s <= C; ++s) models.emplace_back(build_task2_chain(cfg.spec, s));
  const std::size_t nch = models[0].n_channels();
  const std::size_t D = 2 * nch;

  std::vector<std::vector<double>> raw(static_cast<std::size_t>(C), std::vector<double>(P * D, 0.0));
  std::vector<std::string> errors(static_cast<std::size_t>(C) * P);
  parallel_for(static_cast<std::size_t>(C) * P, cfg.workers, [&](std::size_t i) {
    const int sigma = static_cast<int>(i / P) + 1;
    const std::size_t q = i % P;
    try {
      const std::vector<double> f =
          final_quadratures(models[static_cast<std::size_t>(sigma - 1)], integ, cfg.t0, trajectory_id(sigma, q));
      std::copy(f.begin(), f.end(), raw[static_cast<std::size_t>(sigma - 1)].begin() + static_cast<std::ptrdiff_t>(q * D));
    } catch (const NumericalFailure& e) {
      errors[i] = e.what();
    }
  });

  std::ostringstream fails;
  res.pool.assign(static_cast<std::size_t>(C), {});
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const std::size_t c = i / P, q = i % P;
    if (!errors[i].empty()) {
      ++res.failed_trajectories;
      if (res.failed_trajectories <= 5) fails << "class " << c + 1 << " q " << q << ": " << errors[i] << "\n";
      continue;
    }
    for (std::size_t k = 0; k < D; ++k) res.pool[c].push_back(raw[c][q * D + k]);
  }
  res.failure_summary = fails.str();
  raw.clear();
  res.pool_per_class = P;
  for (const auto& p : res.pool) res.pool_per_class = std::min(res.pool_per_class, p.size() / D);

  for (int ns : cfg.ns_grid) {
    const std::size_t n = static_cast<std::size_t>(ns);
    Dataset tr, te;
    tr.n_classes = te.n_classes = C;
    std::vector<RVec> trc, tec;
    for (int c = 0; c < C; ++c) {
      const std::vector<double>& pool = res.pool[static_cast<std::size_t>(c)];
      const std::size_t avail = pool.size() / D;
      std::vector<std::vector<std::size_t>> g_train, g_test;
      if (cfg.bootstrap) {
        const std::size_t split = avail * static_cast<std::size_t>(cfg.q_train) / groups;
        g_train = bootstrap_pool(split, n, static_cast<std::size_t>(cfg.q_train), cfg.seed ^ (0x9e37u + ns + 7919u * c));
        g_test = bootstrap_pool(avail - split, n, static_cast<std::size_t>(cfg.q_test),
                                cfg.seed ^ (0x7f4au + ns + 104729u * c));
        for (auto& g : g_test)
          for (auto& idx : g) idx += split;
      } else {
        const auto all = partition_pool(avail, n);
        if (all.size() < groups) {
          std::ostringstream os;
          os << "task2: pool of " << avail << " shots cannot supply " << groups << " disjoint groups of " << n;
          throw NumericalFailure(os.str());
        }
        g_train.assign(all.begin(), all.begin() + cfg.q_train);
        g_test.assign(all.begin() + cfg.q_train, all.begin() + static_cast<std::ptrdiff_t>(groups));
      }
      auto emit = [&](const std::vector<std::vector<std::size_t>>& gs, Dataset& d, std::vector<RVec>& cols) {
        int qi = 0;
        for (const auto& g : gs) {
          RVec x = RVec::Zero(static_cast<Eigen::Index>(D));
          for (std::size_t idx : g)
            for (std::size_t k = 0; k < D; ++k) x(static_cast<Eigen::Index>(k)) += pool[idx * D + k];
          x /= static_cast<double>(g.size());
          cols.push_back(x);
          d.labels.push_back(c + 1);
          d.q.push_back(qi++);
          d.t.push_back(cfg.t_final);
        }
      };
      emit(g_train, tr, trc);
      emit(g_test, te, tec);
    }
    auto pack = [&](Dataset& d, const std::vector<RVec>& cols) {
      d.X.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) d.X.col(static_cast<Eigen::Index>(j)) = cols[j];
    };
    pack(tr, trc);
    pack(te, tec);
    const OutputLayer layer = train(tr, cfg.train);
    res.test_accuracy.push_back(accuracy(layer, te));
    res.train_sets.push_back(std::move(tr));
    res.test_sets.push_back(std::move(te));
  }
  res.metrics = metrics(res.test_accuracy);
  std::vector<double> xs(cfg.ns_grid.begin(), cfg.ns_grid.end());
  res.spearman = spearman(xs, res.test_accuracy);
  return res;
}

}  // namespace qrc
