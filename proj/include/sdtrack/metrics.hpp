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

// One-pass evaluation metrics. The first frame is the initialization and is
// excluded from every metric.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdtrack/bbox.hpp"

namespace sdtrack {

class MetricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunResult {
  std::string sequence;
  std::vector<Prediction> predictions;
  std::vector<BBox> gt;
  std::vector<double> occ_fraction;  // empty when unknown
};

inline constexpr double kPrecisionThreshold = 20.0;
inline constexpr std::size_t kSuccessSteps = 100;  // thresholds k / 100, k = 0..100

/// Per-frame IoU for frames 2..N. Throws on length mismatch or no frames.
std::vector<double> frame_ious(const RunResult& run);
std::vector<double> center_errors(const RunResult& run);

/// Fraction of frames whose center error is at most threshold_px.
double precision_at(const RunResult& run, double threshold_px = kPrecisionThreshold);

struct SuccessCurve {
  std::vector<double> thresholds;
  std::vector<double> rate;  // fraction of frames with IoU > threshold
  double auc = 0;            // mean of rate over the grid
};
SuccessCurve success_curve(std::span<const double> ious);
SuccessCurve success_auc(const RunResult& run);

struct GotMetrics {
  double ao = 0;
  double sr50 = 0;
  double sr75 = 0;
};
GotMetrics got_metrics(std::span<const double> ious);
GotMetrics got_metrics(const RunResult& run);

struct SequenceMetrics {
  std::string sequence;
  std::size_t frames = 0;  // evaluated frames
  double precision = 0;
  double auc = 0;
  double ao = 0;
  double sr50 = 0;
  double sr75 = 0;
  std::vector<double> curve;
};

struct MetricsReport {
  std::vector<SequenceMetrics> sequences;
  SequenceMetrics aggregate;  // unweighted mean over sequences
};

SequenceMetrics evaluate_sequence(const RunResult& run);
MetricsReport evaluate(std::span<const RunResult> runs);

/// Spearman rank correlation with average ranks for ties; nullopt when either
/// side has zero rank variance or fewer than two points.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct OcclusionRow {
  std::string sequence;
  std::size_t frame = 0;  // 1-based frame number
  double occ_fraction = 0;
  double iou_a = 0;
  double iou_b = 0;
  double delta = 0;  // iou_b - iou_a
};

struct OcclusionAnalysis {
  std::vector<OcclusionRow> rows;
  std::optional<double> correlation;  // rank correlation of delta vs occ_fraction
  double mean_delta = 0;
};

/// Per-frame IoU change of run b over run a against the occlusion fraction.
/// Runs must cover the same sequence and carry occ_fraction.
OcclusionAnalysis occlusion_gain_analysis(const RunResult& a, const RunResult& b);
/// Suite version: frames pooled over all sequence pairs (matched by name).
OcclusionAnalysis occlusion_gain_analysis(std::span<const RunResult> a, std::span<const RunResult> b);

}  // namespace sdtrack
