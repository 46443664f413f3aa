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
#include "sdtrack/pipeline.hpp"

#include <omp.h>

#include <chrono>
#include <exception>

namespace sdtrack {

TrackedRun track_sequence(const Model& model, const TrackingOptions& options,
                          const SequenceDataset& sequence) {
  if (sequence.frames.empty() || sequence.gt.size() != sequence.frames.size()) {
    throw TrackingError("sequence " + sequence.id + " has no frames or mismatched ground truth");
  }
  const Tracker tracker(model, options);
  TrackedRun run;
  run.result.sequence = sequence.id;
  run.result.gt = sequence.gt;
  run.result.occ_fraction = sequence.occ_fraction;
  run.result.predictions.reserve(sequence.size());

  TrackerState state = tracker.init(sequence.frames[0], sequence.gt[0]);
  run.result.predictions.push_back({sequence.gt[0], 1.0, false});
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 1; t < sequence.size(); ++t) {
    run.result.predictions.push_back(tracker.track(state, sequence.frames[t]));
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.init_ops = state.init_ops;
  run.ops = state.ops;
  return run;
}

std::vector<TrackedRun> track_suite(const Model& model, const TrackingOptions& options,
                                    std::span<const SequenceDataset> suite, int jobs) {
  std::vector<TrackedRun> out(suite.size());
  std::exception_ptr error;
  const auto n = static_cast<long>(suite.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = track_sequence(model, options, suite[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<RunResult> results_of(std::span<const TrackedRun> runs) {
  std::vector<RunResult> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.result);
  return out;
}

}  // namespace sdtrack
