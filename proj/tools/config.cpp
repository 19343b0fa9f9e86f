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

#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qrc::cli {
namespace {

json from_yaml(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& x : n) a.push_back(from_yaml(x));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = from_yaml(kv.second);
      return o;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  const std::string s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s == "null" || s == "~") return nullptr;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(s, &used);
    if (used == s.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used == s.size()) return d;
  } catch (const std::exception&) {
  }
  return s;
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a table");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(where + ": unknown key '" + k + "'");
}

cplx get_cplx(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing '") + key + "'");
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(std::string("'") + key + "' must be a number or [re, im]");
}

double need(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("missing number '") + key + "'");
  return j.at(key).get<double>();
}

std::size_t mode_ref(const json& j, const char* key, const ModeNetwork& net) {
  if (!j.contains(key)) throw ConfigError(std::string("missing mode '") + key + "'");
  const json& v = j.at(key);
  if (v.is_string()) {
    try {
      return net.index_of(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
    const auto i = v.get<std::size_t>();
    if (i >= net.size()) throw ConfigError(std::string("mode index out of range for '") + key + "'");
    return i;
  }
  throw ConfigError(std::string("'") + key + "' must be a mode label or index");
}

}  // namespace

json parse_config_text(const std::string& text) {
  try {
    return from_yaml(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

json load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  const json j = parse_config_text(ss.str());
  if (!j.is_object()) throw ConfigError("config root must be a table");
  return j;
}

json preset_config(const std::string& name) {
  if (name == "task1-fig4")
    return {{"seed", 1}, {"task", {{"kind", "task1"}}}};
  if (name == "task2-fig6")
    return {{"seed", 1}, {"task", {{"kind", "task2"}}}};
  if (name == "task2-pa")
    return {{"seed", 1}, {"task", {{"kind", "task2"}, {"task2", {{"pa", {{"enabled", true}, {"G_PA", pa_for_unit_gain(1.0)}}}}}}}};
  if (name == "single-kerr")
    return {{"seed", 1},
            {"chain",
             {{"modes", {"b1"}},
              {"blocks",
               {{{"type", "detuning"}, {"mode", "b1"}, {"delta", -1.0}},
                {{"type", "kerr"}, {"mode", "b1"}, {"lambda", 0.05}},
                {{"type", "drive"}, {"mode", "b1"}, {"eta", 1.0}},
                {{"type", "loss"}, {"mode", "b1"}, {"gamma", 1.0}, {"monitored", true}}}}}},
            {"integrator", {{"dt", 1e-3}, {"t_final", 10.0}, {"store_stride", 100}}}};
  throw ConfigError("unknown preset '" + name + "'");
}

json merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (const auto& [k, v] : over.items()) base[k] = base.contains(k) ? merge(base[k], v) : v;
  return base;
}

std::string config_hash(const json& cfg) {
  const std::string s = cfg.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> grid_values(const json& j, const std::string& what) {
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(what + ": grid entries must be numbers");
      v.push_back(x.get<double>());
    }
    if (v.empty()) throw ConfigError(what + ": empty grid");
    return v;
  }
  if (j.is_object()) {
    check_keys(j, {"from", "to", "n"}, what);
    const int n = get<int>(j, "n", 0);
    if (n < 1) throw ConfigError(what + ": n must be >= 1");
    return linspace(need(j, "from"), need(j, "to"), static_cast<std::size_t>(n));
  }
  throw ConfigError(what + ": expected a list or {from, to, n}");
}

ChainSpec chain_from_json(const json& j) {
  check_keys(j, {"modes", "blocks"}, "chain");
  if (!j.contains("modes") || !j["modes"].is_array()) throw ConfigError("chain.modes must be a list of labels");
  std::vector<std::string> labels;
  for (const auto& m : j["modes"]) {
    if (!m.is_string()) throw ConfigError("chain.modes must be strings");
    labels.push_back(m.get<std::string>());
  }
  ChainSpec c;
  try {
    c.network = ModeNetwork(labels);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("chain.modes: ") + e.what());
  }
  if (!j.contains("blocks") || !j["blocks"].is_array()) throw ConfigError("chain.blocks must be a list");
  const ModeNetwork& net = c.network;
  for (const auto& b : j["blocks"]) {
    const std::string type = get<std::string>(b, "type", "");
    const std::string where = "chain.blocks[" + type + "]";
    if (type == "detuning") {
      check_keys(b, {"type", "mode", "delta"}, where);
      c.blocks.push_back(Detuning{mode_ref(b, "mode", net), need(b, "delta")});
    } else if (type == "kerr") {
      check_keys(b, {"type", "mode", "lambda"}, where);
      c.blocks.push_back(Kerr{mode_ref(b, "mode", net), need(b, "lambda")});
    } else if (type == "drive") {
      check_keys(b, {"type", "mode", "eta"}, where);
      c.blocks.push_back(CoherentDrive{mode_ref(b, "mode", net), get_cplx(b, "eta")});
    } else if (type == "beam_splitter") {
      check_keys(b, {"type", "i", "j", "g"}, where);
      c.blocks.push_back(BeamSplitter{mode_ref(b, "i", net), mode_ref(b, "j", net), need(b, "g")});
    } else if (type == "dpa") {
      check_keys(b, {"type", "mode", "G", "phase"}, where);
      c.blocks.push_back(DegenerateParametric{mode_ref(b, "mode", net), need(b, "G"), get<double>(b, "phase", 0.0)});
    } else if (type == "ndpa") {
      check_keys(b, {"type", "i", "j", "G", "phase"}, where);
      c.blocks.push_back(
          NonDegenerateParametric{mode_ref(b, "i", net), mode_ref(b, "j", net), need(b, "G"), get<double>(b, "phase", 0.0)});
    } else if (type == "loss") {
      check_keys(b, {"type", "mode", "gamma", "monitored"}, where);
      c.add_loss(mode_ref(b, "mode", net), need(b, "gamma"), get<bool>(b, "monitored", false));
    } else if (type == "directional_amp" || type == "circulator") {
      check_keys(b, {"type", "from", "to", "g_c", "Gamma_c"}, where);
      const std::size_t from = mode_ref(b, "from", net), to = mode_ref(b, "to", net);
      const double gc = need(b, "g_c"), Gc = get<double>(b, "Gamma_c", gc);
      if (type == "directional_amp") c.blocks.push_back(DirectionalAmpCoupling{from, to, gc, Gc});
      else c.blocks.push_back(CirculatorCoupling{from, to, gc, Gc});
    } else {
      throw ConfigError("unknown block type '" + type + "'");
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("chain: ") + e.what());
  }
  return c;
}

IntegratorConfig integrator_from_json(const json& j, std::uint64_t seed) {
  IntegratorConfig c;
  if (!j.is_null()) {
    check_keys(j, {"dt", "t_final", "store_stride", "scheme"}, "integrator");
    c.dt = get<double>(j, "dt", c.dt);
    c.t_final = get<double>(j, "t_final", c.t_final);
    c.store_stride = get<std::size_t>(j, "store_stride", c.store_stride);
    c.scheme = get<std::string>(j, "scheme", c.scheme);
  }
  c.seed = seed;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("integrator: ") + e.what());
  }
  return c;
}

QRCHyperparams qrc_from_json(const json& j, QRCHyperparams q) {
  if (j.is_null()) return q;
  check_keys(j, {"K", "lambda", "delta", "g", "gamma", "epsilon", "sampler_seed"}, "qrc");
  q.K = get<std::size_t>(j, "K", q.K);
  q.lambda = get<double>(j, "lambda", q.lambda);
  q.delta = get<double>(j, "delta", q.delta);
  q.g = get<double>(j, "g", q.g);
  q.gamma = get<double>(j, "gamma", q.gamma);
  q.epsilon = get<double>(j, "epsilon", q.epsilon);
  q.sampler_seed = get<std::uint64_t>(j, "sampler_seed", q.sampler_seed);
  return q;
}

TrainOptions train_from_json(const json& j, TrainOptions t) {
  if (j.is_null()) return t;
  check_keys(j, {"max_iter", "grad_tol", "train_phi", "phi_grid", "phi_sweeps", "phi_inner_iter", "fit_bias"}, "train");
  t.max_iter = get<int>(j, "max_iter", t.max_iter);
  t.grad_tol = get<double>(j, "grad_tol", t.grad_tol);
  t.train_phi = get<bool>(j, "train_phi", t.train_phi);
  t.phi_grid = get<int>(j, "phi_grid", t.phi_grid);
  t.phi_sweeps = get<int>(j, "phi_sweeps", t.phi_sweeps);
  t.phi_inner_iter = get<int>(j, "phi_inner_iter", t.phi_inner_iter);
  t.fit_bias = get<bool>(j, "fit_bias", t.fit_bias);
  return t;
}

Task1Config task1_from_json(const json& task, std::uint64_t seed, unsigned workers) {
  Task1Config c;
  c.integrator.seed = seed;
  if (task.contains("integrator")) c.integrator = integrator_from_json(task["integrator"], seed);
  c.q_train = get<int>(task, "q_train", c.q_train);
  c.q_test = get<int>(task, "q_test", c.q_test);
  c.train = train_from_json(task.value("train", json()), c.train);
  const json s = task.value("task1", json::object());
  check_keys(s, {"kappa", "eta", "chi1", "chi2", "Gamma_c"}, "task.task1");
  c.spec.kappa = get<double>(s, "kappa", c.spec.kappa);
  c.spec.eta = get<double>(s, "eta", c.spec.eta);
  c.spec.chi1 = get<double>(s, "chi1", c.spec.chi1);
  c.spec.chi2 = get<double>(s, "chi2", c.spec.chi2);
  c.spec.Gamma_c = get<double>(s, "Gamma_c", c.spec.Gamma_c);
  c.spec.qrc = qrc_from_json(task.value("qrc", json()), c.spec.qrc);
  if (get<bool>(task, "linear", false)) c.spec.qrc.lambda = 0.0;
  c.workers = workers;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
  return c;
}

Task2Config task2_from_json(const json& task, std::uint64_t seed, unsigned workers) {
  Task2Config c;
  c.seed = seed;
  c.dt = get<double>(task, "dt", c.dt);
  c.t0 = get<double>(task, "t0", c.t0);
  c.t_final = get<double>(task, "t_final", c.t_final);
  c.q_train = get<int>(task, "q_train", c.q_train);
  c.q_test = get<int>(task, "q_test", c.q_test);
  c.bootstrap = get<bool>(task, "bootstrap", c.bootstrap);
  if (task.contains("ns_grid")) {
    c.ns_grid.clear();
    for (double v : grid_values(task["ns_grid"], "task.ns_grid")) c.ns_grid.push_back(static_cast<int>(v));
  }
  c.train = train_from_json(task.value("train", json()), c.train);
  const json s = task.value("task2", json::object());
  check_keys(s, {"kappa", "kappa1", "kappa2", "Gamma_c", "lambda1", "delta1", "gamma1", "classes", "pa", "instance"},
             "task.task2");
  c.spec.kappa = get<double>(s, "kappa", c.spec.kappa);
  c.spec.kappa1 = get<double>(s, "kappa1", c.spec.kappa1);
  c.spec.kappa2 = get<double>(s, "kappa2", c.spec.kappa2);
  c.spec.Gamma_c = get<double>(s, "Gamma_c", c.spec.Gamma_c);
  c.spec.lambda1 = get<double>(s, "lambda1", c.spec.lambda1);
  c.spec.delta1 = get<double>(s, "delta1", c.spec.delta1);
  c.spec.gamma1 = get<double>(s, "gamma1", c.spec.gamma1);
  if (s.contains("classes")) {
    const json& cl = s["classes"];
    if (!cl.is_array() || cl.size() != 2) throw ConfigError("task.task2.classes must list two classes");
    for (std::size_t k = 0; k < 2; ++k) {
      check_keys(cl[k], {"eta", "G1", "G12"}, "task.task2.classes");
      c.spec.classes[k] = {need(cl[k], "eta"), need(cl[k], "G1"), need(cl[k], "G12")};
    }
  }
  if (s.contains("pa")) {
    const json& p = s["pa"];
    check_keys(p, {"enabled", "G_PA", "gain", "gamma_d1", "gamma_d2", "g_c", "Gamma_c"}, "task.task2.pa");
    c.spec.pa.enabled = get<bool>(p, "enabled", true);
    c.spec.pa.gamma_d1 = get<double>(p, "gamma_d1", c.spec.pa.gamma_d1);
    c.spec.pa.gamma_d2 = get<double>(p, "gamma_d2", c.spec.pa.gamma_d2);
    c.spec.pa.g_c = get<double>(p, "g_c", c.spec.pa.g_c);
    c.spec.pa.Gamma_c = get<double>(p, "Gamma_c", c.spec.pa.g_c);
    c.spec.pa.G_PA = get<double>(p, "G_PA", c.spec.pa.G_PA);
    if (p.contains("gain")) {
      try {
        c.spec.pa.G_PA = pa_for_gain(need(p, "gain"), c.spec.pa.gamma_d1, c.spec.pa.Gamma_c, c.spec.pa.gamma_d2);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("task.task2.pa.gain: ") + e.what());
      }
    }
  }
  if (s.contains("instance")) {
    const json& in = s["instance"];
    check_keys(in, {"eta_eff", "n_eff"}, "task.task2.instance");
    c.spec = task2_instance(c.spec, need(in, "eta_eff"), get<double>(in, "n_eff", 0.354));
  }
  if (get<bool>(task, "linear", false)) c.spec.lambda1 = 0.0;
  c.workers = workers;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
  return c;
}

PhaseDiagramSpec phase_from_json(const json& j) {
  check_keys(j, {"axis1", "axis2", "values1", "values2", "delta", "g", "N"}, "phase_diagram");
  PhaseDiagramSpec p;
  p.axis1 = get<std::string>(j, "axis1", p.axis1);
  p.axis2 = get<std::string>(j, "axis2", p.axis2);
  for (const auto& a : {p.axis1, p.axis2})
    if (a != "delta" && a != "g" && a != "N") throw ConfigError("phase_diagram: axis must be delta, g or N");
  if (p.axis1 == p.axis2) throw ConfigError("phase_diagram: axes must differ");
  if (!j.contains("values1") || !j.contains("values2")) throw ConfigError("phase_diagram: values1 and values2 required");
  p.values1 = grid_values(j["values1"], "phase_diagram.values1");
  p.values2 = grid_values(j["values2"], "phase_diagram.values2");
  p.delta = get<double>(j, "delta", p.delta);
  p.g = get<double>(j, "g", p.g);
  p.N = get<double>(j, "N", p.N);
  return p;
}

}  // namespace qrc::cli
