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

// Turning n dropout passes into one prediction.
//
// Explicit regime: every pass is decoded to (box, score) and fused, either by
// IoU clustering (channel / mc masks) or by area-rescaled score argmax
// (segment / slice masks). Encoder regime: the n response maps are stacked
// and reduced to one map by a small learned 1x1-conv head.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdtrack/bbox.hpp"
#include "sdtrack/dropout.hpp"
#include "sdtrack/layers.hpp"
#include "sdtrack/tape.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack {

struct PassOutput {
  FeatureMap response;  // single channel
  DropoutMask mask = DropoutMask::none({});
  Prediction decoded;
};

enum class CombinerKind { encoder, explicit_sampling };

/// Greedy IoU clustering. Passes are visited by descending score (lower index
/// first on ties); each unassigned pass seeds a cluster and absorbs every
/// unassigned pass whose IoU with the seed exceeds alpha_c. The largest
/// cluster wins (ties: higher seed score, then lower seed index) and its seed
/// is returned. Returns the winning pass index.
std::size_t select_channel_explicit(std::span<const PassOutput> passes, double alpha_c);
Prediction combine_channel_explicit(std::span<const PassOutput> passes, double alpha_c = 0.2);

/// Area-rescaled scores s* = B / (1 - A) * s with A the dropped fraction of
/// the pass's mask; argmax with lowest index on ties.
double rescaled_score(const PassOutput& pass, double boost);
std::size_t select_patch_explicit(std::span<const PassOutput> passes, double boost);
/// The selected pass's box, with its rescaled score.
Prediction combine_patch_explicit(std::span<const PassOutput> passes, double boost = 0.9);

/// n -> 4 -> 1 channel head of 1x1 convolutions:
///   conv(n->4) -> batchnorm -> relu -> conv(4->1) -> batchnorm
template <class Real>
class EncoderHead {
 public:
  static constexpr std::size_t kHidden = 4;

  EncoderHead() = default;
  /// Starts out reproducing slot 0 (the undropped pass) with small random
  /// weights on the remaining slots.
  EncoderHead(std::size_t passes, std::uint64_t seed);

  /// Output = mean of the n inputs exactly representable through the relu:
  /// hidden channels carry +mean and -mean, the collapse layer subtracts them.
  /// Batchnorm layers are set to exact identities (eps = 0).
  static EncoderHead averaging(std::size_t passes);

  std::size_t passes() const { return project.in_channels; }

  /// Eval-mode aggregation of an n-channel stack.
  Tensor3<Real> aggregate(const Tensor3<Real>& stacked) const;
  typename Tape<Real>::Var aggregate(Tape<Real>& tape, typename Tape<Real>::Var stacked,
                                     BnMode mode);

  std::uint64_t macs(std::size_t height, std::size_t width) const;
  std::vector<Param<Real>*> params();

  ConvLayer<Real> project;
  BatchNorm<Real> project_bn;
  ConvLayer<Real> collapse;
  BatchNorm<Real> collapse_bn;
};

/// Aggregates stacked response maps (canonical mask order) into one map.
template <class Real>
Tensor3<Real> encode_aggregate(const Tensor3<Real>& stacked, const EncoderHead<Real>& head);

/// Stack single-channel maps into one n-channel map.
FeatureMap stack_maps(std::span<const FeatureMap> maps);

/// Where a response map sits in the frame.
struct DecodeGeometry {
  double center_x = 0;  // search region center, frame pixels
  double center_y = 0;
  double target_w = 1;  // box size to report at this scale
  double target_h = 1;
  double crop_side = 1;  // search crop side, frame pixels
  std::size_t search_size = 128;
  std::size_t stride = 8;
  std::size_t upsample = 4;
  double window_influence = 0.176;
};

struct DecodedPeak {
  Prediction prediction;
  double dx_patch = 0;  // displacement of the peak from the map center, search-patch px
  double dy_patch = 0;
  double raw_peak = 0;  // upsampled response value at the chosen cell
};

/// Bicubic (Keys, a = -0.5) upsampling with aligned corners: output size
/// (n - 1) * factor + 1, sample i taken at source position i / factor.
FeatureMap upsample_bicubic(const FeatureMap& map, std::size_t factor);

/// Separable Hann window peaking at 1 in the center.
std::vector<double> hann_window(std::size_t height, std::size_t width);

/// Peak of a single-channel response mapped back to a frame box. The map is
/// upsampled, range-normalized and blended with a Hann window; the score is
/// the logistic of the raw upsampled value at the chosen cell. A flat map
/// decodes to the center with `degenerate` set.
DecodedPeak decode_peak(const FeatureMap& response, const DecodeGeometry& geometry);
Prediction decode(const FeatureMap& response, const DecodeGeometry& geometry);

}  // namespace sdtrack
