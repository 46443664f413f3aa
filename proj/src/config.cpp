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
#include "sdtrack/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

#include "sdtrack/seed.hpp"

namespace sdtrack {
namespace {

using nlohmann::json;

// Reads keys of one JSON object, rejecting any key that is never asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("config: '{}' must be an object", name()));
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("config: unknown key '{}'", qualified(key)));
    }
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("config: bad value for '{}': {}", qualified(key), e.what()));
    }
  }

  template <class Fn>
  void get_with(const char* key, Fn&& fn) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      fn(*it);
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("config: bad value for '{}': {}", qualified(key), e.what()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("config: bad value for '{}': {}", qualified(key), e.what()));
    }
  }

  /// Nested object, or nullptr when absent.
  const json* sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string name() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json pair_json(const PairConfig& p) {
  return {{"exemplar_size", p.exemplar_size}, {"search_size", p.search_size},
          {"context", p.context},             {"stride", p.stride},
          {"response_size", p.response_size}, {"max_gap", p.max_gap},
          {"max_shift", p.max_shift},         {"label_radius", p.label_radius},
          {"max_exemplar_occlusion", p.max_exemplar_occlusion},
          {"min_search_occlusion", p.min_search_occlusion}};
}

void read_pairs(const json& j, PairConfig& p) {
  Section s(j, "trainer.pairs");
  s.get("exemplar_size", p.exemplar_size);
  s.get("search_size", p.search_size);
  s.get("context", p.context);
  s.get("stride", p.stride);
  s.get("response_size", p.response_size);
  s.get("max_gap", p.max_gap);
  s.get("max_shift", p.max_shift);
  s.get("label_radius", p.label_radius);
  s.get("max_exemplar_occlusion", p.max_exemplar_occlusion);
  s.get("min_search_occlusion", p.min_search_occlusion);
}

Side parse_side(std::string_view name) {
  for (Side s : {Side::left, Side::right, Side::top, Side::bottom}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument(fmt::format("unknown side '{}'", name));
}

}  // namespace

std::string_view to_string(CombinerKind kind) {
  return kind == CombinerKind::encoder ? "encoder" : "explicit";
}

CombinerKind parse_combiner(std::string_view name) {
  if (name == "encoder") return CombinerKind::encoder;
  if (name == "explicit") return CombinerKind::explicit_sampling;
  throw ConfigError(fmt::format("unknown combiner '{}' (expected encoder or explicit)", name));
}

BackboneConfig Config::resolved_backbone() const {
  BackboneConfig b = backbone;
  b.seed = derive_seed(seed, {0xb0});
  return b;
}

TrainConfig Config::resolved_trainer() const {
  TrainConfig t = trainer;
  t.seed = derive_seed(seed, {0x7a});
  return t;
}

DropoutSpec Config::resolved_dropout() const {
  DropoutSpec d = dropout;
  d.seed = derive_seed(seed, {0xd0, dropout.seed});
  return d;
}

TrackingOptions Config::tracking() const {
  TrackingOptions o;
  o.geometry = tracker;
  o.dropout = resolved_dropout();
  o.combiner = combiner;
  o.alpha_c = alpha_c;
  o.boost = boost;
  return o;
}

json to_json(const Config& c) {
  const auto& t = c.tracker;
  const auto& r = c.trainer;
  return {
      {"seed", c.seed},
      {"backbone", {{"channels", c.backbone.channels}, {"strides", c.backbone.strides}, {"kernel", c.backbone.kernel}}},
      {"dropout",
       {{"kind", std::string(to_string(c.dropout.kind))},
        {"n", c.dropout.n},
        {"rate", c.dropout.rate},
        {"fractions", c.dropout.fractions},
        {"seed", c.dropout.seed}}},
      {"combiner", {{"kind", std::string(to_string(c.combiner))}, {"alpha_c", c.alpha_c}, {"B", c.boost}}},
      {"tracker",
       {{"exemplar_size", t.exemplar_size},
        {"search_size", t.search_size},
        {"context", t.context},
        {"num_scales", t.num_scales},
        {"scale_step", t.scale_step},
        {"scale_penalty", t.scale_penalty},
        {"scale_damping", t.scale_damping},
        {"position_damping", t.position_damping},
        {"window_influence", t.window_influence},
        {"upsample", t.upsample},
        {"min_size", t.min_size}}},
      {"trainer",
       {{"batch_size", r.batch_size},
        {"pretrain_epochs", r.pretrain_epochs},
        {"head_epochs", r.head_epochs},
        {"joint_epochs", r.joint_epochs},
        {"lr", r.lr},
        {"joint_lr", r.joint_lr},
        {"lr_decay", r.lr_decay},
        {"decay_every", r.decay_every},
        {"momentum", r.momentum},
        {"weight_decay", r.weight_decay},
        {"pairs_per_sequence", r.pairs_per_sequence},
        {"head_min_occlusion", r.head_min_occlusion},
        {"easy_sequences", r.easy_sequences},
        {"heavy_sequences", r.heavy_sequences},
        {"corpus_seed", r.corpus_seed},
        {"val_sequences", r.val_sequences},
        {"val_seed", r.val_seed},
        {"pairs", pair_json(r.pairs)}}},
      {"paths", {{"data", c.paths.data}, {"weights", c.paths.weights}, {"output", c.paths.output}}},
  };
}

Config config_from_json(const json& j) {
  Config c;
  Section root(j, "");
  root.get("seed", c.seed);
  if (const json* b = root.sub("backbone")) {
    Section s(*b, "backbone");
    s.get("channels", c.backbone.channels);
    s.get("strides", c.backbone.strides);
    s.get("kernel", c.backbone.kernel);
    if (c.backbone.channels.size() < 2 || c.backbone.strides.size() + 1 != c.backbone.channels.size()) {
      throw ConfigError("config: backbone.strides needs one entry per block (channels - 1)");
    }
  }
  if (const json* d = root.sub("dropout")) {
    Section s(*d, "dropout");
    s.get_with("kind", [&](const json& v) { c.dropout.kind = parse_mask_kind(v.get<std::string>()); });
    s.get("n", c.dropout.n);
    s.get("rate", c.dropout.rate);
    s.get("fractions", c.dropout.fractions);
    s.get("seed", c.dropout.seed);
    if (c.dropout.n == 0) throw ConfigError("config: dropout.n must be at least 1");
    if (!(c.dropout.rate >= 0 && c.dropout.rate < 1)) throw ConfigError("config: dropout.rate must lie in [0, 1)");
  }
  if (const json* m = root.sub("combiner")) {
    Section s(*m, "combiner");
    s.get_with("kind", [&](const json& v) { c.combiner = parse_combiner(v.get<std::string>()); });
    s.get("alpha_c", c.alpha_c);
    s.get("B", c.boost);
  }
  if (const json* t = root.sub("tracker")) {
    Section s(*t, "tracker");
    auto& g = c.tracker;
    s.get("exemplar_size", g.exemplar_size);
    s.get("search_size", g.search_size);
    s.get("context", g.context);
    s.get("num_scales", g.num_scales);
    s.get("scale_step", g.scale_step);
    s.get("scale_penalty", g.scale_penalty);
    s.get("scale_damping", g.scale_damping);
    s.get("position_damping", g.position_damping);
    s.get("window_influence", g.window_influence);
    s.get("upsample", g.upsample);
    s.get("min_size", g.min_size);
    if (g.num_scales == 0 || g.upsample == 0) throw ConfigError("config: tracker.num_scales and upsample must be positive");
  }
  if (const json* t = root.sub("trainer")) {
    Section s(*t, "trainer");
    auto& r = c.trainer;
    s.get("batch_size", r.batch_size);
    s.get("pretrain_epochs", r.pretrain_epochs);
    s.get("head_epochs", r.head_epochs);
    s.get("joint_epochs", r.joint_epochs);
    s.get("lr", r.lr);
    s.get("joint_lr", r.joint_lr);
    s.get("lr_decay", r.lr_decay);
    s.get("decay_every", r.decay_every);
    s.get("momentum", r.momentum);
    s.get("weight_decay", r.weight_decay);
    s.get("pairs_per_sequence", r.pairs_per_sequence);
    s.get("head_min_occlusion", r.head_min_occlusion);
    s.get("easy_sequences", r.easy_sequences);
    s.get("heavy_sequences", r.heavy_sequences);
    s.get("corpus_seed", r.corpus_seed);
    s.get("val_sequences", r.val_sequences);
    s.get("val_seed", r.val_seed);
    if (const json* p = s.sub("pairs")) read_pairs(*p, r.pairs);
    try {
      r.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (const json* p = root.sub("paths")) {
    Section s(*p, "paths");
    s.get("data", c.paths.data);
    s.get("weights", c.paths.weights);
    s.get("output", c.paths.output);
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config: {} is not valid JSON: {}", path, e.what()));
  }
  return config_from_json(j);
}

std::string config_echo(const Config& config) { return to_json(config).dump(); }

json to_json(const SceneSpec& s) {
  json events = json::array();
  for (const auto& e : s.events) {
    events.push_back({{"kind", std::string(to_string(e.kind))},
                      {"side", std::string(to_string(e.side))},
                      {"onset", e.onset},
                      {"coverage", e.coverage},
                      {"texture_seed", e.texture_seed}});
  }
  json distractors = json::array();
  for (const auto& d : s.distractors) {
    distractors.push_back({{"start_x", d.start_x}, {"start_y", d.start_y}, {"similarity", d.similarity}, {"seed", d.seed}});
  }
  return {{"width", s.width},
          {"height", s.height},
          {"length", s.length},
          {"shape", std::string(to_string(s.shape))},
          {"target_w", s.target_w},
          {"target_h", s.target_h},
          {"start_x", s.start_x},
          {"start_y", s.start_y},
          {"motion", std::string(to_string(s.motion))},
          {"velocity_x", s.velocity_x},
          {"velocity_y", s.velocity_y},
          {"max_speed", s.max_speed},
          {"acceleration", s.acceleration},
          {"texture_seed", s.texture_seed},
          {"texture_cell", s.texture_cell},
          {"clutter", s.clutter},
          {"distractors", distractors},
          {"events", events},
          {"seed", s.seed}};
}

SceneSpec scene_from_json(const json& j) {
  SceneSpec s;
  Section r(j, "scene");
  r.get("width", s.width);
  r.get("height", s.height);
  r.get("length", s.length);
  r.get_with("shape", [&](const json& v) {
    const auto name = v.get<std::string>();
    if (name == "rectangle") s.shape = TargetShape::rectangle;
    else if (name == "ellipse") s.shape = TargetShape::ellipse;
    else throw std::invalid_argument("unknown shape " + name);
  });
  r.get("target_w", s.target_w);
  r.get("target_h", s.target_h);
  r.get("start_x", s.start_x);
  r.get("start_y", s.start_y);
  r.get_with("motion", [&](const json& v) {
    const auto name = v.get<std::string>();
    if (name == "linear") s.motion = MotionKind::linear;
    else if (name == "random-walk") s.motion = MotionKind::random_walk;
    else throw std::invalid_argument("unknown motion " + name);
  });
  r.get("velocity_x", s.velocity_x);
  r.get("velocity_y", s.velocity_y);
  r.get("max_speed", s.max_speed);
  r.get("acceleration", s.acceleration);
  r.get("texture_seed", s.texture_seed);
  r.get("texture_cell", s.texture_cell);
  r.get("clutter", s.clutter);
  r.get("seed", s.seed);
  r.get_with("distractors", [&](const json& list) {
    for (const auto& item : list) {
      Distractor d;
      Section ds(item, "scene.distractors[]");
      ds.get("start_x", d.start_x);
      ds.get("start_y", d.start_y);
      ds.get("similarity", d.similarity);
      ds.get("seed", d.seed);
      s.distractors.push_back(d);
    }
  });
  r.get_with("events", [&](const json& list) {
    for (const auto& item : list) {
      OcclusionEvent e;
      Section es(item, "scene.events[]");
      es.get_with("kind", [&](const json& v) {
        const auto name = v.get<std::string>();
        if (name == "patch") e.kind = EventKind::patch;
        else if (name == "feature") e.kind = EventKind::feature;
        else throw std::invalid_argument("unknown event kind " + name);
      });
      es.get_with("side", [&](const json& v) { e.side = parse_side(v.get<std::string>()); });
      es.get("onset", e.onset);
      es.get("coverage", e.coverage);
      es.get("texture_seed", e.texture_seed);
      s.events.push_back(std::move(e));
    }
  });
  return s;
}

}  // namespace sdtrack
