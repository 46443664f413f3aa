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
#include "sdtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdtrack/ops.hpp"
#include "sdtrack/seed.hpp"

namespace sdtrack {
namespace {

double exemplar_side(const BBox& box, double context) {
  const double pad = context * (box.w + box.h);
  return std::sqrt((box.w + pad) * (box.h + pad));
}

std::uint64_t decode_ops(const FeatureMap& response, std::size_t upsample) {
  const std::uint64_t h = response.height();
  const std::uint64_t w = response.width();
  const std::uint64_t uh = (h - 1) * upsample + 1;
  const std::uint64_t uw = (w - 1) * upsample + 1;
  return 4 * (h * uw + uh * uw) + uh * uw;
}

}  // namespace

Tracker::Tracker(const Model& model, TrackingOptions options)
    : model_(model), options_(std::move(options)) {
  const auto& g = options_.geometry;
  if (g.num_scales == 0 || g.exemplar_size == 0 || g.search_size < g.exemplar_size) {
    throw TrackingError("tracker: invalid patch geometry");
  }
  const std::size_t stride = model_.backbone.total_stride();
  if ((g.search_size - g.exemplar_size) % stride != 0) {
    throw TrackingError("tracker: total stride " + std::to_string(stride) +
                        " does not divide the search/exemplar size difference");
  }
}

bool Tracker::uses_head() const {
  if (options_.combiner != CombinerKind::encoder) return false;
  if (options_.dropout.kind == MaskKind::none) {
    return model_.head.has_value() && model_.head->passes() == 1;
  }
  return true;
}

TrackerState Tracker::init(const Image& frame, const BBox& target) const {
  const auto& g = options_.geometry;
  if (!target.valid()) throw TrackingError("init: box must have positive size");
  const auto W = static_cast<double>(frame.width);
  const auto H = static_cast<double>(frame.height);
  if (target.x < 0 || target.y < 0 || target.x + target.w > W || target.y + target.h > H) {
    throw TrackingError("init: box lies outside the frame");
  }
  const double side_z = exemplar_side(target, g.context);
  if (side_z > std::min(W, H)) {
    throw TrackingError("init: frame smaller than the exemplar crop with context");
  }

  TrackerState state;
  state.options = options_;
  state.bbox = target;
  state.frame_width = frame.width;
  state.frame_height = frame.height;
  state.search_side =
      side_z * static_cast<double>(g.search_size) / static_cast<double>(g.exemplar_size);
  const Rgb fill = mean_color(frame);
  const FeatureMap patch = crop_patch(frame, target.cx(), target.cy(), side_z, g.exemplar_size, fill);
  state.exemplar_code = model_.backbone.embed(patch);
  state.init_ops.embeds = 1;
  state.init_ops.macs = model_.backbone.macs(g.exemplar_size, g.exemplar_size);

  if (uses_head()) {
    state.masks = make_masks(options_.dropout, state.exemplar_code.shape());
    if (!model_.head) throw TrackingError("init: encoder combiner needs a trained head");
    if (model_.head->passes() != state.masks.size()) {
      throw TrackingError("init: head expects " + std::to_string(model_.head->passes()) +
                          " passes but the dropout config yields " +
                          std::to_string(state.masks.size()));
    }
  } else {
    state.masks = identity_masks(state.exemplar_code.shape());
  }
  return state;
}

Tracker::ScaleResult Tracker::evaluate_scale(TrackerState& state, const FeatureMap& search_code,
                                             const DecodeGeometry& geometry,
                                             const MaskSet& masks) const {
  const auto& g = options_.geometry;
  const auto xg = xcorr_geometry(state.exemplar_code.shape(), search_code.shape());
  const std::uint64_t xcorr_macs = xg.macs();
  ScaleResult result;

  auto masked_response = [&](const DropoutMask& mask) {
    state.ops.xcorrs += 1;
    state.ops.macs += xcorr_macs;
    if (mask.kind() == MaskKind::none) return model_.response(state.exemplar_code, search_code);
    state.ops.mask_applies += 1;
    state.ops.resample_ops += state.exemplar_code.size();
    return model_.response(apply(mask, state.exemplar_code), search_code);
  };

  if (options_.combiner == CombinerKind::encoder || options_.dropout.kind == MaskKind::none) {
    FeatureMap map;
    if (uses_head()) {
      std::vector<FeatureMap> maps;
      maps.reserve(masks.size());
      for (const auto& m : masks.masks) maps.push_back(masked_response(m));
      map = encode_aggregate(stack_maps(maps), *model_.head);
      state.ops.head_calls += 1;
      state.ops.macs += model_.head->macs(map.height(), map.width());
    } else {
      map = masked_response(masks[0]);
    }
    result.prediction = decode(map, geometry);
    state.ops.decodes += 1;
    state.ops.resample_ops += decode_ops(map, g.upsample);
  } else {
    std::vector<PassOutput> passes;
    passes.reserve(masks.size());
    for (const auto& m : masks.masks) {
      PassOutput pass{masked_response(m), m, {}};
      pass.decoded = decode(pass.response, geometry);
      state.ops.decodes += 1;
      state.ops.resample_ops += decode_ops(pass.response, g.upsample);
      passes.push_back(std::move(pass));
    }
    const MaskKind kind = options_.dropout.kind;
    if (kind == MaskKind::segment || kind == MaskKind::slice) {
      result.prediction = combine_patch_explicit(passes, options_.boost);
    } else {
      result.prediction = combine_channel_explicit(passes, options_.alpha_c);
    }
  }
  result.penalized = result.prediction.score;
  return result;
}

Prediction Tracker::track(TrackerState& state, const Image& frame) const {
  if (frame.width != state.frame_width || frame.height != state.frame_height) {
    throw TrackingError("track: frame size " + std::to_string(frame.width) + "x" +
                        std::to_string(frame.height) + " differs from the init frame " +
                        std::to_string(state.frame_width) + "x" +
                        std::to_string(state.frame_height));
  }
  const auto& g = options_.geometry;
  ++state.frame_index;

  // Explicit sampling draws fresh masks every frame; the encoder path keeps
  // the run's fixed, ordered set.
  MaskSet frame_masks;
  const MaskSet* masks = &state.masks;
  if (options_.combiner == CombinerKind::explicit_sampling &&
      options_.dropout.kind != MaskKind::none) {
    frame_masks = make_masks(options_.dropout, state.exemplar_code.shape(),
                             derive_seed(options_.dropout.seed, {state.frame_index}));
    masks = &frame_masks;
  }

  const Rgb fill = mean_color(frame);
  const double cx = state.bbox.cx();
  const double cy = state.bbox.cy();
  const auto half = static_cast<long>(g.num_scales / 2);
  ScaleResult best;
  double best_factor = 1.0;
  bool have_best = false;
  for (std::size_t s = 0; s < g.num_scales; ++s) {
    const long exponent = static_cast<long>(s) - half;
    const double factor = std::pow(g.scale_step, static_cast<double>(exponent));
    const double side = state.search_side * factor;
    const FeatureMap patch = crop_patch(frame, cx, cy, side, g.search_size, fill);
    const FeatureMap search_code = model_.backbone.embed(patch);
    state.ops.embeds += 1;
    state.ops.macs += model_.backbone.macs(g.search_size, g.search_size);

    DecodeGeometry dg;
    dg.center_x = cx;
    dg.center_y = cy;
    dg.target_w = state.bbox.w * factor;
    dg.target_h = state.bbox.h * factor;
    dg.crop_side = side;
    dg.search_size = g.search_size;
    dg.stride = model_.backbone.total_stride();
    dg.upsample = g.upsample;
    dg.window_influence = g.window_influence;

    ScaleResult r = evaluate_scale(state, search_code, dg, *masks);
    if (exponent != 0) r.penalized *= g.scale_penalty;
    if (!have_best || r.penalized > best.penalized) {
      best = r;
      best_factor = factor;
      have_best = true;
    }
  }

  const double shrink = 1.0 - g.scale_damping + g.scale_damping * best_factor;
  const double new_cx = cx + g.position_damping * (best.prediction.bbox.cx() - cx);
  const double new_cy = cy + g.position_damping * (best.prediction.bbox.cy() - cy);
  const auto W = static_cast<double>(frame.width);
  const auto H = static_cast<double>(frame.height);
  const double w = std::clamp(state.bbox.w * shrink, g.min_size, W);
  const double h = std::clamp(state.bbox.h * shrink, g.min_size, H);
  state.search_side *= shrink;
  state.bbox = BBox::from_center(std::clamp(new_cx, 0.0, W), std::clamp(new_cy, 0.0, H), w, h);

  Prediction out;
  out.bbox = state.bbox;
  out.score = best.prediction.score;
  out.degenerate = best.prediction.degenerate;
  return out;
}

}  // namespace sdtrack
