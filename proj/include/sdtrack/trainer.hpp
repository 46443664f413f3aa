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

// Staged SGD training on synthetic pairs:
//   1. backbone-pretrain  no dropout, no head (this is the baseline tracker)
//   2. head-train         backbone frozen, dropout passes aggregated by the head
//   3. joint              everything trainable, short and at a lower rate

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sdtrack/dropout.hpp"
#include "sdtrack/model.hpp"
#include "sdtrack/synth.hpp"
#include "sdtrack/tracker.hpp"

namespace sdtrack {

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { backbone_pretrain = 0, head_train = 1, joint = 2 };
std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 8;
  std::size_t pretrain_epochs = 20;
  std::size_t head_epochs = 10;
  std::size_t joint_epochs = 5;
  double lr = 1e-2;
  double joint_lr = 1e-3;
  double lr_decay = 0.5;
  std::size_t decay_every = 5;  // epochs
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t pairs_per_sequence = 16;  // fresh pairs per sequence per epoch
  std::size_t easy_sequences = 10;
  std::size_t heavy_sequences = 10;
  std::uint64_t corpus_seed = 1001;
  std::size_t val_sequences = 4;  // easy profile; 0 disables validation
  std::uint64_t val_seed = 2002;
  PairConfig pairs;
  /// Head and joint stages draw search frames occluded above this fraction,
  /// from the sequences that have such frames, keeping the per-epoch pair
  /// count of the pretrain stage. 0 samples them like the pretrain stage.
  double head_min_occlusion = 0.3;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on a zero batch size or negative rates.
  void validate() const;
  double learning_rate(Stage stage, std::size_t epoch) const;
  std::size_t epochs(Stage stage) const;
};

struct LossRecord {
  Stage stage = Stage::backbone_pretrain;
  std::size_t epoch = 0;  // 1-based within the stage
  double mean_loss = 0;
  std::optional<double> val_auc;
  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

/// Resumable position: the stage being trained, epochs finished within it,
/// optimizer velocities (in the stage's parameter order) and records so far.
struct TrainCheckpoint {
  Stage stage = Stage::backbone_pretrain;
  std::size_t epochs_done = 0;
  std::vector<std::vector<float>> velocity;
  std::vector<LossRecord> records;
};

struct TrainData {
  std::vector<SequenceDataset> train;
  std::vector<SequenceDataset> val;
};

/// Training and validation suites described by the config.
TrainData default_corpus(const TrainConfig& config, int jobs = 0);

using PairSource = std::function<std::vector<TrainingPair>(Stage stage, std::size_t epoch)>;
/// Validation score of the model after an epoch of the given stage.
using Validator = std::function<double(const Model& model, Stage stage)>;
using EpochHook = std::function<void(const Model& model, const TrainCheckpoint& checkpoint)>;

struct TrainHooks {
  EpochHook on_epoch;
  std::function<void(Stage stage, const Model& model)> on_stage_end;
};

/// Balanced logistic loss of one response map against a +1/-1 label map.
double loss(const FeatureMap& response, const FeatureMap& labels);

/// Trains one stage from checkpoint->epochs_done (0 without a checkpoint).
/// The checkpoint, when given, is updated after every epoch.
std::vector<LossRecord> train_stage(Model& model, Stage stage, const TrainConfig& config,
                                    const DropoutSpec& dropout, const PairSource& pairs,
                                    const Validator& validate = {},
                                    TrainCheckpoint* checkpoint = nullptr,
                                    const EpochHook& on_epoch = {});

/// Pair source used by train(): uniform pairs for the pretrain stage,
/// occlusion-focused pairs for the head and joint stages. `train` must
/// outlive the returned source.
PairSource default_pairs(const std::vector<SequenceDataset>& train, const TrainConfig& config);

/// All three stages, resuming from `resume` when given. The model gains a
/// head sized for the dropout spec before the head stage.
std::vector<LossRecord> train(Model& model, const TrainData& data, const TrainConfig& config,
                              const DropoutSpec& dropout, const TrackingOptions& tracking,
                              const TrainHooks& hooks = {},
                              std::optional<TrainCheckpoint> resume = std::nullopt);

/// Tracking options used to validate (and later run) the model after a stage.
TrackingOptions stage_tracking(Stage stage, const TrackingOptions& base, const DropoutSpec& dropout);

}  // namespace sdtrack
