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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sdtrack/bbox.hpp"
#include "sdtrack/combine.hpp"
#include "sdtrack/dropout.hpp"
#include "sdtrack/image.hpp"
#include "sdtrack/model.hpp"

namespace sdtrack {

class TrackingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrackerGeometry {
  std::size_t exemplar_size = 64;
  std::size_t search_size = 128;
  double context = 0.5;  // context margin as a fraction of (w + h)
  std::size_t num_scales = 3;
  double scale_step = 1.0375;
  double scale_penalty = 0.9745;
  double scale_damping = 0.59;
  double position_damping = 1.0;
  double window_influence = 0.176;
  std::size_t upsample = 4;
  double min_size = 4.0;
};

struct TrackingOptions {
  TrackerGeometry geometry;
  DropoutSpec dropout;
  CombinerKind combiner = CombinerKind::encoder;
  double alpha_c = 0.2;
  double boost = 0.9;
};

/// Work counters for one tracker run.
struct OpCounts {
  std::uint64_t embeds = 0;
  std::uint64_t xcorrs = 0;
  std::uint64_t mask_applies = 0;
  std::uint64_t head_calls = 0;
  std::uint64_t decodes = 0;
  std::uint64_t macs = 0;          // convolution / correlation / head multiply-adds
  std::uint64_t resample_ops = 0;  // upsampling taps, window blends, mask products

  std::uint64_t total() const { return macs + resample_ops; }
};

struct TrackerState {
  FeatureMap exemplar_code;  // fixed after init
  BBox bbox;
  double search_side = 0;  // search crop side in frame px
  std::size_t frame_width = 0;
  std::size_t frame_height = 0;
  std::size_t frame_index = 0;
  MaskSet masks;  // used by the encoder path for the whole run
  TrackingOptions options;
  OpCounts init_ops;
  OpCounts ops;  // accumulated over track() calls
};

/// One-pass Siamese tracker with structured dropout on the exemplar code.
class Tracker {
 public:
  Tracker(const Model& model, TrackingOptions options);

  TrackerState init(const Image& frame, const BBox& target) const;
  Prediction track(TrackerState& state, const Image& frame) const;

  const TrackingOptions& options() const { return options_; }

 private:
  struct ScaleResult {
    Prediction prediction;
    double penalized = 0;
  };

  ScaleResult evaluate_scale(TrackerState& state, const FeatureMap& search_code,
                             const DecodeGeometry& geometry, const MaskSet& masks) const;
  bool uses_head() const;

  const Model& model_;
  TrackingOptions options_;
};

}  // namespace sdtrack
