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
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "sdtrack/trainer.hpp"

using namespace sdtrack;

namespace {

const std::vector<SequenceDataset>& tiny_corpus() {
  static const auto data = make_benchmark(Profile::easy, 2, 11);
  return data;
}

PairSource fixed_pairs(std::size_t per_seq) {
  return [per_seq](Stage stage, std::size_t epoch) {
    return training_pairs(tiny_corpus(), per_seq, 100 + static_cast<std::uint64_t>(stage) * 50 + epoch);
  };
}

TrainConfig quick_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.pretrain_epochs = epochs;
  cfg.head_epochs = epochs;
  cfg.joint_epochs = epochs;
  cfg.batch_size = 4;
  return cfg;
}

std::vector<std::vector<float>> snapshot(Model& m) {
  std::vector<std::vector<float>> out;
  for (auto* p : m.params()) out.push_back(p->value);
  for (auto& b : m.backbone.blocks()) {
    out.push_back(b.bn.running_mean);
    out.push_back(b.bn.running_var);
  }
  return out;
}

}  // namespace

TEST_CASE("loss saturates and takes log 2 at zero") {
  FeatureMap labels(1, 9, 9, -1.0f);
  labels(0, 4, 4) = 1.0f;
  FeatureMap zero(1, 9, 9, 0.0f);
  CHECK(loss(zero, labels) == doctest::Approx(std::log(2.0)));
  FeatureMap sharp(1, 9, 9, -1e4f);
  sharp(0, 4, 4) = 1e4f;
  CHECK(loss(sharp, labels) < 1e-12);
  CHECK_THROWS(loss(FeatureMap(1, 8, 9), labels));
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  TrainConfig cfg = quick_config(2);
  cfg.lr = 0;
  Model m;
  const auto before = snapshot(m);
  const auto records = train_stage(m, Stage::backbone_pretrain, cfg, {}, fixed_pairs(4));
  REQUIRE(records.size() == 2);
  const auto after = snapshot(m);
  // Running statistics move in train mode; the learnable parameters must not.
  for (std::size_t i = 0; i < m.params().size(); ++i) CHECK(after[i] == before[i]);

  // A single batch holding the same pairs every epoch gives a flat curve.
  cfg.batch_size = 8;
  Model h;
  h.head = EncoderHead<float>(13, 2);
  const auto hb = snapshot(h);
  const PairSource same = [](Stage, std::size_t) { return training_pairs(tiny_corpus(), 4, 9); };
  const auto hr = train_stage(h, Stage::head_train, cfg, DropoutSpec{MaskKind::slice}, same);
  CHECK(snapshot(h) == hb);
  CHECK(hr[0].mean_loss == doctest::Approx(hr[1].mean_loss).epsilon(1e-6));
}

TEST_CASE("head training freezes the backbone") {
  TrainConfig cfg = quick_config(1);
  Model m;
  m.head = EncoderHead<float>(13, 3);
  const auto backbone_before = snapshot(m);
  const std::size_t backbone_params = m.backbone.params().size();
  train_stage(m, Stage::head_train, cfg, DropoutSpec{MaskKind::slice}, fixed_pairs(4));
  const auto after = snapshot(m);
  for (std::size_t i = 0; i < backbone_params; ++i) CHECK(after[i] == backbone_before[i]);
  CHECK(m.head->params().front()->value != EncoderHead<float>(13, 3).params().front()->value);
  CHECK_THROWS(train_stage(m, Stage::head_train, cfg, DropoutSpec{MaskKind::channel, 5}, fixed_pairs(1)));
}

TEST_CASE("a single pair can be overfit") {
  TrainConfig cfg = quick_config(200);
  cfg.lr = 0.2;
  cfg.batch_size = 1;
  cfg.decay_every = 1000;
  cfg.weight_decay = 0;
  const auto one = training_pairs(tiny_corpus(), 1, 5);
  const PairSource source = [&](Stage, std::size_t) { return std::vector<TrainingPair>{one[0]}; };
  Model m;
  const auto records = train_stage(m, Stage::backbone_pretrain, cfg, {}, source);
  CHECK(records.back().mean_loss < 0.1 * std::log(2.0));
}

TEST_CASE("training is deterministic") {
  TrainConfig cfg = quick_config(2);
  Model a, b;
  const auto ra = train_stage(a, Stage::backbone_pretrain, cfg, {}, fixed_pairs(4));
  const auto rb = train_stage(b, Stage::backbone_pretrain, cfg, {}, fixed_pairs(4));
  CHECK(ra == rb);
  CHECK(snapshot(a) == snapshot(b));
}

TEST_CASE("resuming from a checkpoint matches an uninterrupted run") {
  TrainConfig cfg = quick_config(3);
  Model whole;
  const auto full = train_stage(whole, Stage::backbone_pretrain, cfg, {}, fixed_pairs(4));

  Model part;
  TrainCheckpoint ck;
  TrainConfig first = cfg;
  first.pretrain_epochs = 1;
  train_stage(part, Stage::backbone_pretrain, first, {}, fixed_pairs(4), {}, &ck);
  CHECK(ck.epochs_done == 1);
  train_stage(part, Stage::backbone_pretrain, cfg, {}, fixed_pairs(4), {}, &ck);
  CHECK(ck.records == full);
  CHECK(snapshot(part) == snapshot(whole));
}

TEST_CASE("non-finite loss aborts training") {
  TrainConfig wild = quick_config(5);
  wild.lr = 1e12;
  Model w;
  CHECK_THROWS_AS(train_stage(w, Stage::backbone_pretrain, wild, {}, fixed_pairs(4)), TrainingDiverged);
}

TEST_CASE("default pairs focus the head stages on occlusion") {
  std::vector<SequenceDataset> corpus = make_benchmark(Profile::easy, 2, 11);
  for (auto& s : make_benchmark(Profile::occlusion_heavy, 1, 11)) corpus.push_back(std::move(s));
  TrainConfig cfg;
  cfg.pairs_per_sequence = 4;
  const PairSource source = default_pairs(corpus, cfg);
  const auto pre = source(Stage::backbone_pretrain, 0);
  CHECK(pre.size() == 12);
  for (const Stage stage : {Stage::head_train, Stage::joint}) {
    const auto focused = source(stage, 0);
    CHECK(focused.size() == 12);
    for (const auto& p : focused) CHECK(p.search.data().size() == pre[0].search.data().size());
  }
  // Pairs only come from the occluded sequence, at its occluded frames.
  for (const auto& p : source(Stage::head_train, 1)) {
    CHECK(p.sequence == 0);
    CHECK(corpus[2].occ_fraction[p.search_frame] > cfg.head_min_occlusion);
  }
  cfg.head_min_occlusion = 0;
  const auto uniform = default_pairs(corpus, cfg)(Stage::head_train, 0);
  CHECK(uniform.size() == 12);
}

TEST_CASE("config validation and schedule") {
  TrainConfig cfg;
  CHECK(cfg.learning_rate(Stage::backbone_pretrain, 0) == 1e-2);
  CHECK(cfg.learning_rate(Stage::backbone_pretrain, 5) == 5e-3);
  CHECK(cfg.learning_rate(Stage::joint, 0) == 1e-3);
  CHECK(cfg.epochs(Stage::head_train) == 10);
  cfg.batch_size = 0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.lr = -1;
  CHECK_THROWS(cfg.validate());
  CHECK(parse_stage("joint") == Stage::joint);
  CHECK_THROWS(parse_stage("finetune"));
}
