/* Copyright 2026 The sdtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// JSON configuration. Every key is optional and defaults to the value of the
// corresponding C++ member; unknown keys are errors.
//
// {
//   "seed": 1,
//   "backbone": {"channels": [3,16,32,32,64], "strides": [2,2,2,1], "kernel": 3},
//   "dropout": {"kind": "slice", "n": 21, "rate": 0.2,
//               "fractions": [0.25, 0.333.., 0.5], "seed": 0},
//   "combiner": {"kind": "encoder", "alpha_c": 0.2, "B": 0.9},
//   "tracker": {"exemplar_size": 64, "search_size": 128, "context": 0.5, ...},
//   "trainer": {"batch_size": 8, "pretrain_epochs": 20, ..., "pairs": {...}},
//   "paths": {"data": "data", "weights": "weights", "output": "out"}
// }
//
// The top-level seed drives backbone initialization, training and dropout
// masks; dropout.seed is mixed into the mask seed.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sdtrack/backbone.hpp"
#include "sdtrack/dropout.hpp"
#include "sdtrack/synth.hpp"
#include "sdtrack/tracker.hpp"
#include "sdtrack/trainer.hpp"

namespace sdtrack {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Paths {
  std::string data = "data";
  std::string weights = "weights";
  std::string output = "out";
};

struct Config {
  std::uint64_t seed = 1;
  BackboneConfig backbone;
  DropoutSpec dropout{MaskKind::slice};
  CombinerKind combiner = CombinerKind::encoder;
  double alpha_c = 0.2;
  double boost = 0.9;  // "B"
  TrackerGeometry tracker;
  TrainConfig trainer;
  Paths paths;

  /// Backbone, trainer and dropout seeds derived from `seed`.
  BackboneConfig resolved_backbone() const;
  TrainConfig resolved_trainer() const;
  DropoutSpec resolved_dropout() const;
  TrackingOptions tracking() const;
};

std::string_view to_string(CombinerKind kind);
CombinerKind parse_combiner(std::string_view name);

nlohmann::json to_json(const Config& config);
/// Throws ConfigError naming the offending key.
Config config_from_json(const nlohmann::json& json);
Config load_config(const std::string& path);
/// Compact one-line JSON of the config.
std::string config_echo(const Config& config);

nlohmann::json to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const nlohmann::json& json);

}  // namespace sdtrack
