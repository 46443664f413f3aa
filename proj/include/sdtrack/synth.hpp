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

// Synthetic tracking sequences with exact ground truth and occlusion.
//
// A textured target moves over a blocky background, optionally among
// look-alike distractors. Two kinds of occlusion events:
//   patch   - an opaque textured object slides over the target from one side
//   feature - a strip of the target is retextured in place
// Rasterization uses pixel centers: pixel (px, py) belongs to a shape when
// (px + 0.5, py + 0.5) lies inside it.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdtrack/bbox.hpp"
#include "sdtrack/dropout.hpp"
#include "sdtrack/image.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack {

class SceneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TargetShape { rectangle, ellipse };
enum class MotionKind { linear, random_walk };
enum class EventKind { patch, feature };

std::string_view to_string(TargetShape shape);
std::string_view to_string(MotionKind kind);
std::string_view to_string(EventKind kind);

struct OcclusionEvent {
  EventKind kind = EventKind::patch;
  Side side = Side::left;  // entry side (patch) or retextured edge (feature)
  std::size_t onset = 0;   // first affected frame, 0-based
  /// Covered fraction of the target extent along the entry axis, one value
  /// per frame starting at onset. Values in [0, 1].
  std::vector<double> coverage;
  std::uint64_t texture_seed = 0;

  std::size_t duration() const { return coverage.size(); }
  /// Coverage at `frame`, 0 outside the event.
  double coverage_at(std::size_t frame) const;
};

/// Trapezoid profile: linear ramp up over `ramp` frames, `hold` frames at
/// peak, linear ramp down over `ramp` frames.
std::vector<double> trapezoid_profile(std::size_t ramp, std::size_t hold, double peak);

struct Distractor {
  double start_x = 0;  // center
  double start_y = 0;
  double similarity = 0;  // fraction of texture cells copied from the target
  std::uint64_t seed = 0;
};

struct SceneSpec {
  std::size_t width = 256;
  std::size_t height = 256;
  std::size_t length = 120;

  TargetShape shape = TargetShape::rectangle;
  double target_w = 32;
  double target_h = 32;
  double start_x = 128;  // target center at frame 0
  double start_y = 128;
  MotionKind motion = MotionKind::linear;
  double velocity_x = 0;  // linear: px per frame; random walk: initial velocity
  double velocity_y = 0;
  double max_speed = 3.0;    // random walk speed bound, px per frame
  double acceleration = 0.5; // random walk velocity jitter bound, px per frame^2

  std::uint64_t texture_seed = 1;
  std::size_t texture_cell = 4;  // texture block side, px
  double clutter = 0.3;          // background contrast in [0, 1]
  std::vector<Distractor> distractors;
  std::vector<OcclusionEvent> events;
  std::uint64_t seed = 1;  // background and motion randomness

  /// Throws SceneError on an inconsistent spec.
  void validate() const;
};

struct SequenceDataset {
  std::string id;
  SceneSpec spec;
  std::vector<Image> frames;
  std::vector<BBox> gt;  // tight bound of the target's pixels
  /// Target pixels hidden by occluders or retextured, over target pixels.
  std::vector<double> occ_fraction;
  std::vector<double> center_x;  // exact target center per frame
  std::vector<double> center_y;

  std::size_t size() const { return frames.size(); }
};

/// Deterministic in spec. Throws SceneError for an invalid spec, events
/// whose coverages sum above 1 on some frame, or a target leaving the frame.
SequenceDataset render(const SceneSpec& spec);

enum class Profile { easy, occlusion_heavy };
std::string_view to_string(Profile profile);
Profile parse_profile(std::string_view name);

/// Random scene for a profile. Easy scenes carry no occlusion events;
/// occlusion-heavy scenes carry several events and similar distractors.
SceneSpec random_scene(Profile profile, std::uint64_t seed);

/// Fraction of frames with occ_fraction above 0.3 required per sequence in
/// the occlusion-heavy profile.
inline constexpr double kHeavyFrameShare = 0.4;
inline constexpr double kHeavyThreshold = 0.3;

/// `count` sequences named "<profile>_NNN". Occlusion-heavy scenes failing
/// the frame-share audit are redrawn from a derived seed.
std::vector<SequenceDataset> make_benchmark(Profile profile, std::size_t count,
                                            std::uint64_t seed, int jobs = 0);

struct PairConfig {
  std::size_t exemplar_size = 64;
  std::size_t search_size = 128;
  double context = 0.5;
  std::size_t stride = 8;
  std::size_t response_size = 9;
  std::size_t max_gap = 30;
  double max_shift = 32;          // search center jitter, search-patch px
  double label_radius = 2.0;      // cells
  double max_exemplar_occlusion = 0.1;
  /// When positive, search frames are drawn only from frames occluded above
  /// this fraction; every sequence must have one.
  double min_search_occlusion = 0;
};

struct TrainingPair {
  FeatureMap exemplar;  // 3 x exemplar_size^2
  FeatureMap search;    // 3 x search_size^2
  FeatureMap labels;    // 1 x response_size^2, values +1 / -1
  double dx = 0;        // target displacement from the search center, search-patch px
  double dy = 0;
  std::size_t sequence = 0;
  std::size_t exemplar_frame = 0;
  std::size_t search_frame = 0;
};

/// Label map with +1 within `radius` cells of the displaced center.
FeatureMap pair_labels(std::size_t response_size, std::size_t stride, double dx, double dy,
                       double radius);

/// pairs_per_seq pairs from each sequence, deterministic in seed.
std::vector<TrainingPair> training_pairs(const std::vector<SequenceDataset>& datasets,
                                         std::size_t pairs_per_seq, std::uint64_t seed,
                                         const PairConfig& config = {});

/// Builds one pair from given frames and search jitter.
TrainingPair make_pair(const SequenceDataset& seq, std::size_t exemplar_frame,
                       std::size_t search_frame, double shift_x, double shift_y,
                       const PairConfig& config);

}  // namespace sdtrack
