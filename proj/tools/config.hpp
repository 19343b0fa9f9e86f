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

#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/fixed_points.hpp"
#include "qrc/tasks.hpp"

namespace qrc::cli {

using json = nlohmann::json;

// Invalid or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a YAML or JSON file into a JSON tree.
json load_config_file(const std::string& path);
json parse_config_text(const std::string& text);
// Built-in experiment configs by preset name.
json preset_config(const std::string& name);
// Merges `over` into `base` key by key (objects recurse, other values replace).
json merge(json base, const json& over);

// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const json& cfg);

std::vector<double> grid_values(const json& j, const std::string& what);
ChainSpec chain_from_json(const json& j);
IntegratorConfig integrator_from_json(const json& j, std::uint64_t seed);
QRCHyperparams qrc_from_json(const json& j, QRCHyperparams base);
TrainOptions train_from_json(const json& j, TrainOptions base);
Task1Config task1_from_json(const json& task, std::uint64_t seed, unsigned workers);
Task2Config task2_from_json(const json& task, std::uint64_t seed, unsigned workers);
PhaseDiagramSpec phase_from_json(const json& j);

}  // namespace qrc::cli
