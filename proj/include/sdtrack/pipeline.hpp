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

#include <span>
#include <vector>

#include "sdtrack/metrics.hpp"
#include "sdtrack/model.hpp"
#include "sdtrack/synth.hpp"
#include "sdtrack/tracker.hpp"

namespace sdtrack {

struct TrackedRun {
  RunResult result;
  OpCounts init_ops;
  OpCounts ops;        // summed over frames 2..N
  double seconds = 0;  // wall time of frames 2..N
};

/// One-pass run: init on the first ground-truth box, track every later frame.
/// Frame 1's prediction is the ground truth with score 1.
TrackedRun track_sequence(const Model& model, const TrackingOptions& options,
                          const SequenceDataset& sequence);

/// Runs every sequence, in parallel over `jobs` threads (0: OpenMP default).
std::vector<TrackedRun> track_suite(const Model& model, const TrackingOptions& options,
                                    std::span<const SequenceDataset> suite, int jobs = 0);

std::vector<RunResult> results_of(std::span<const TrackedRun> runs);

}  // namespace sdtrack
