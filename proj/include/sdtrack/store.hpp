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

// Persistent formats. All writes go to a temporary sibling and are renamed
// into place.
//
// Weights (little-endian):
//   "SDTW" | u32 version | u32 meta_len | meta (JSON text) | u32 count |
//   count x { u32 name_len | name | u32 rank | rank x u64 dim | f32 values } |
//   u32 crc32 of all preceding bytes
//
// Sequence directory:
//   img/0001.png ...        8-bit RGB frames
//   groundtruth_rect.txt    x,y,w,h per frame
//   occlusion.txt           occluded fraction per frame (optional)
//   scene.json              generating scene (optional)
//
// Results file: '#' comment lines (format, sequence, config, seed), then one
// record per frame: frame,x,y,w,h,score,degenerate
//
// Report: '#' comment lines, then "key = value" lines.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdtrack/image.hpp"
#include "sdtrack/metrics.hpp"
#include "sdtrack/model.hpp"
#include "sdtrack/synth.hpp"

namespace sdtrack {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kWeightsVersion = 1;

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

struct WeightsFile {
  std::string meta;  // JSON text
  std::vector<NamedTensor> tensors;
};

std::string encode_weights(const WeightsFile& file);
/// Verifies the checksum before parsing; throws StoreError on any defect.
WeightsFile decode_weights(const std::string& bytes);
void save_weights(const std::filesystem::path& path, const WeightsFile& file);
WeightsFile load_weights(const std::filesystem::path& path);

/// Model state plus meta. Loading builds a fresh model and replaces `model`
/// only when everything parsed.
void save_model(const std::filesystem::path& path, const Model& model, const std::string& meta);
std::string load_model(const std::filesystem::path& path, Model& model);

void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

void save_sequence(const std::filesystem::path& dir, const SequenceDataset& seq);
/// Reads a sequence directory; occlusion.txt and scene.json are optional.
SequenceDataset load_sequence(const std::filesystem::path& dir);

/// Writes each sequence under dir/<id> plus dir/suite.json holding `meta`
/// and the id list.
void save_suite(const std::filesystem::path& dir, const std::vector<SequenceDataset>& suite,
                const std::string& meta);
/// Sequences listed in suite.json, or every subdirectory holding a
/// groundtruth_rect.txt, in name order.
std::vector<SequenceDataset> load_suite(const std::filesystem::path& dir);
std::vector<std::string> suite_ids(const std::filesystem::path& dir);

struct ResultsFile {
  std::vector<std::string> header;  // comment lines without the leading "# "
  std::vector<Prediction> predictions;
};

std::string format_results(const ResultsFile& file);
ResultsFile parse_results(const std::string& text);
void save_results(const std::filesystem::path& path, const ResultsFile& file);
ResultsFile load_results(const std::filesystem::path& path);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
std::string format_report(const std::vector<std::string>& header, const KeyValues& values);
KeyValues parse_report(const std::string& text);

/// Report fields for a metrics report, aggregate first.
KeyValues report_values(const MetricsReport& report);

/// Shortest round-trip decimal form.
std::string format_real(double v);

}  // namespace sdtrack
