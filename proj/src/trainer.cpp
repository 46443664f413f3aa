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
#include "sdtrack/trainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sdtrack/ops.hpp"
#include "sdtrack/pipeline.hpp"
#include "sdtrack/seed.hpp"
#include "sdtrack/sgd.hpp"

namespace sdtrack {
namespace {

void set_stage_trainable(Model& model, Stage stage) {
  const bool backbone = stage != Stage::head_train;
  model.backbone.set_trainable(backbone);
  model.bias.trainable = backbone;
  model.gain.trainable = false;
  if (model.head) {
    for (auto* p : model.head->params()) p->trainable = stage != Stage::backbone_pretrain;
  }
}

Shape3 code_shape(const Model& model, const PairConfig& pairs) {
  const std::size_t side = model.backbone.output_size(pairs.exemplar_size);
  return {model.backbone.out_channels(), side, side};
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::backbone_pretrain: return "backbone-pretrain";
    case Stage::head_train: return "head-train";
    case Stage::joint: return "joint";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  if (name == "backbone-pretrain") return Stage::backbone_pretrain;
  if (name == "head-train") return Stage::head_train;
  if (name == "joint") return Stage::joint;
  throw std::invalid_argument(fmt::format("unknown training stage '{}'", name));
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("trainer: batch size must be positive");
  if (decay_every == 0) throw std::invalid_argument("trainer: decay_every must be positive");
  if (pairs_per_sequence == 0) throw std::invalid_argument("trainer: pairs_per_sequence must be positive");
  if (!(lr >= 0) || !(joint_lr >= 0)) throw std::invalid_argument("trainer: negative learning rate");
  if (!(head_min_occlusion >= 0 && head_min_occlusion < 1)) {
    throw std::invalid_argument("trainer: head_min_occlusion must lie in [0, 1)");
  }
  if (!(lr_decay > 0) || !(momentum >= 0) || !(weight_decay >= 0)) {
    throw std::invalid_argument("trainer: decay, momentum and weight decay must be non-negative");
  }
}

double TrainConfig::learning_rate(Stage stage, std::size_t epoch) const {
  const double base = stage == Stage::joint ? joint_lr : lr;
  return base * std::pow(lr_decay, static_cast<double>(epoch / decay_every));
}

std::size_t TrainConfig::epochs(Stage stage) const {
  switch (stage) {
    case Stage::backbone_pretrain: return pretrain_epochs;
    case Stage::head_train: return head_epochs;
    case Stage::joint: return joint_epochs;
  }
  return 0;
}

TrainData default_corpus(const TrainConfig& config, int jobs) {
  TrainData data;
  if (config.easy_sequences > 0) {
    data.train = make_benchmark(Profile::easy, config.easy_sequences, config.corpus_seed, jobs);
  }
  if (config.heavy_sequences > 0) {
    auto heavy = make_benchmark(Profile::occlusion_heavy, config.heavy_sequences, config.corpus_seed, jobs);
    for (auto& s : heavy) data.train.push_back(std::move(s));
  }
  if (config.val_sequences > 0) {
    data.val = make_benchmark(Profile::easy, config.val_sequences, config.val_seed, jobs);
  }
  return data;
}

double loss(const FeatureMap& response, const FeatureMap& labels) {
  return logistic_loss(response, labels);
}

std::vector<LossRecord> train_stage(Model& model, Stage stage, const TrainConfig& config,
                                    const DropoutSpec& dropout, const PairSource& pairs,
                                    const Validator& validate, TrainCheckpoint* checkpoint,
                                    const EpochHook& on_epoch) {
  config.validate();
  const bool use_head = stage != Stage::backbone_pretrain;
  if (use_head && (!model.head || model.head->passes() != dropout.passes())) {
    throw std::invalid_argument(fmt::format("trainer: stage {} needs a head with {} passes",
                                            to_string(stage), dropout.passes()));
  }
  set_stage_trainable(model, stage);
  const BnMode backbone_mode = stage == Stage::head_train ? BnMode::eval : BnMode::train;
  const Shape3 shape = code_shape(model, config.pairs);
  const auto stage_id = static_cast<std::uint64_t>(stage);

  SgdOptimizer<float> optimizer(model.params(), static_cast<float>(config.momentum),
                                static_cast<float>(config.weight_decay));
  std::size_t start = 0;
  if (checkpoint && checkpoint->stage == stage) {
    start = checkpoint->epochs_done;
    if (!checkpoint->velocity.empty()) {
      if (checkpoint->velocity.size() != optimizer.velocity().size()) {
        throw std::invalid_argument("trainer: checkpoint velocity does not match the model");
      }
      optimizer.velocity() = checkpoint->velocity;
    }
  }

  std::vector<LossRecord> records;
  const std::size_t epochs = config.epochs(stage);
  for (std::size_t epoch = start; epoch < epochs; ++epoch) {
    const auto lr = static_cast<float>(config.learning_rate(stage, epoch));
    std::vector<TrainingPair> data = pairs(stage, epoch);
    if (data.empty()) throw std::invalid_argument("trainer: no training pairs");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(config.seed, {stage_id, epoch, 0}));
    std::shuffle(order.begin(), order.end(), rng);

    double total = 0;
    std::size_t steps = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++steps) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<FeatureMap> exemplars, searches, labels;
      for (std::size_t k = begin; k < end; ++k) {
        const auto& p = data[order[k]];
        exemplars.push_back(p.exemplar);
        searches.push_back(p.search);
        labels.push_back(p.labels);
      }
      std::vector<FeatureMap> keeps;
      if (use_head) {
        DropoutSpec spec = dropout;
        keeps = make_masks(spec, shape, derive_seed(config.seed, {stage_id, epoch, steps + 1}))
                    .keep_maps<float>();
      }

      optimizer.zero_grad();
      Tape<float> tape;
      auto z = tape.leaf(std::move(exemplars));
      auto x = tape.leaf(std::move(searches));
      auto r = model.forward(tape, z, x, keeps, backbone_mode, BnMode::train, use_head);
      auto l = tape.logistic_loss(r, labels);
      const double value = tape.value(l)[0].data()[0];
      if (!std::isfinite(value)) {
        throw TrainingDiverged(fmt::format("training diverged: stage {} epoch {} step {} loss {}",
                                           to_string(stage), epoch + 1, steps + 1, value));
      }
      tape.backward(l);
      optimizer.step(lr);
      total += value;
    }

    LossRecord rec;
    rec.stage = stage;
    rec.epoch = epoch + 1;
    rec.mean_loss = total / static_cast<double>(steps);
    if (validate) rec.val_auc = validate(model, stage);
    records.push_back(rec);
    if (checkpoint) {
      checkpoint->stage = stage;
      checkpoint->epochs_done = epoch + 1;
      checkpoint->velocity = optimizer.velocity();
      checkpoint->records.push_back(rec);
    }
    if (on_epoch) {
      TrainCheckpoint snapshot;
      if (checkpoint) {
        snapshot = *checkpoint;
      } else {
        snapshot.stage = stage;
        snapshot.epochs_done = epoch + 1;
        snapshot.velocity = optimizer.velocity();
        snapshot.records = records;
      }
      on_epoch(model, snapshot);
    }
  }
  return records;
}

PairSource default_pairs(const std::vector<SequenceDataset>& train, const TrainConfig& config) {
  std::vector<SequenceDataset> occluded;
  if (config.head_min_occlusion > 0) {
    for (const auto& s : train) {
      if (std::any_of(s.occ_fraction.begin(), s.occ_fraction.end(),
                      [&](double f) { return f > config.head_min_occlusion; })) {
        occluded.push_back(s);
      }
    }
  }
  const std::size_t focused_per_seq =
      occluded.empty() ? 0
                       : (config.pairs_per_sequence * train.size() + occluded.size() - 1) / occluded.size();
  return [&train, config, occluded = std::move(occluded), focused_per_seq](Stage stage, std::size_t epoch) {
    const std::uint64_t seed = derive_seed(config.seed, {static_cast<std::uint64_t>(stage), epoch, 1});
    if (stage == Stage::backbone_pretrain || occluded.empty()) {
      return training_pairs(train, config.pairs_per_sequence, seed, config.pairs);
    }
    PairConfig focused = config.pairs;
    focused.min_search_occlusion = config.head_min_occlusion;
    return training_pairs(occluded, focused_per_seq, seed, focused);
  };
}

TrackingOptions stage_tracking(Stage stage, const TrackingOptions& base, const DropoutSpec& dropout) {
  TrackingOptions out = base;
  out.combiner = CombinerKind::encoder;
  out.dropout = dropout;
  if (stage == Stage::backbone_pretrain) out.dropout.kind = MaskKind::none;
  return out;
}

std::vector<LossRecord> train(Model& model, const TrainData& data, const TrainConfig& config,
                              const DropoutSpec& dropout, const TrackingOptions& tracking,
                              const TrainHooks& hooks, std::optional<TrainCheckpoint> resume) {
  config.validate();
  if (data.train.empty()) throw std::invalid_argument("trainer: empty training corpus");

  const PairSource source = default_pairs(data.train, config);
  Validator validator;
  if (!data.val.empty()) {
    validator = [&](const Model& m, Stage stage) {
      const auto runs = track_suite(m, stage_tracking(stage, tracking, dropout), data.val);
      const auto results = results_of(runs);
      return evaluate(results).aggregate.auc;
    };
  }

  TrainCheckpoint state = resume ? *resume : TrainCheckpoint{};
  const Stage stages[] = {Stage::backbone_pretrain, Stage::head_train, Stage::joint};
  for (Stage stage : stages) {
    if (static_cast<int>(stage) < static_cast<int>(state.stage)) continue;
    if (stage != state.stage) {
      state.stage = stage;
      state.epochs_done = 0;
      state.velocity.clear();
    }
    if (stage != Stage::backbone_pretrain &&
        (!model.head || model.head->passes() != dropout.passes())) {
      model.head = EncoderHead<float>(dropout.passes(), derive_seed(config.seed, {0x4ead}));
    }
    train_stage(model, stage, config, dropout, source, validator, &state, hooks.on_epoch);
    if (hooks.on_stage_end) hooks.on_stage_end(stage, model);
  }
  return state.records;
}

}  // namespace sdtrack
