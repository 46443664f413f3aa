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
#include "sdtrack/store.hpp"

#include <fmt/format.h>
#include <png.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdtrack/config.hpp"

namespace sdtrack {

namespace fs = std::filesystem;
static_assert(std::endian::native == std::endian::little, "weights IO assumes a little-endian host");

namespace {

fs::path temp_sibling(const fs::path& path) {
  return path.parent_path() / fmt::format(".{}.tmp{}", path.filename().string(), ::getpid());
}

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void floats(std::vector<float>& out, std::size_t n) {
    if (n > (end_ - pos_) / sizeof(float)) throw StoreError("weights: tensor payload runs past the end");
    out.resize(n);
    std::memcpy(out.data(), bytes_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) throw StoreError("weights: unexpected end of data");
  }
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& line, const std::string& where) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t')) ++p;
    if (p >= end) break;
    double v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) throw StoreError(fmt::format("{}: cannot parse number in '{}'", where, line));
    out.push_back(v);
    p = next;
  }
  return out;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{}", v); }

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StoreError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw StoreError(fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string encode_weights(const WeightsFile& file) {
  std::string out = "SDTW";
  put<std::uint32_t>(out, kWeightsVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(file.meta.size()));
  out += file.meta;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(file.tensors.size()));
  for (const auto& t : file.tensors) {
    std::size_t count = 1;
    for (auto d : t.shape) count *= d;
    if (count != t.values.size()) {
      throw StoreError(fmt::format("weights: tensor {} has {} values for shape of {}", t.name,
                                   t.values.size(), count));
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint64_t>(out, d);
    out.append(reinterpret_cast<const char*>(t.values.data()), t.values.size() * sizeof(float));
  }
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())));
  put<std::uint32_t>(out, crc);
  return out;
}

WeightsFile decode_weights(const std::string& bytes) {
  if (bytes.size() < 4 + 4 + 4 + 4 + 4) throw StoreError("weights: file too short (checksum failure)");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, 4);
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(body)));
  if (stored != actual) {
    throw StoreError(fmt::format("weights: checksum mismatch (stored {:08x}, computed {:08x})", stored, actual));
  }
  Reader r(bytes, body);
  if (r.str(4) != "SDTW") throw StoreError("weights: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kWeightsVersion) {
    throw StoreError(fmt::format("weights: version {} not supported (expected {})", version, kWeightsVersion));
  }
  WeightsFile f;
  f.meta = r.str(r.get<std::uint32_t>());
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.str(r.get<std::uint32_t>());
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw StoreError("weights: implausible rank for " + t.name);
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
      n *= t.shape.back();
    }
    r.floats(t.values, n);
    f.tensors.push_back(std::move(t));
  }
  if (r.pos() != body) throw StoreError("weights: trailing bytes before the checksum");
  return f;
}

void save_weights(const fs::path& path, const WeightsFile& file) {
  write_file_atomic(path, encode_weights(file));
}

WeightsFile load_weights(const fs::path& path) {
  try {
    return decode_weights(read_file(path));
  } catch (const StoreError& e) {
    throw StoreError(path.string() + ": " + e.what());
  }
}

void save_model(const fs::path& path, const Model& model, const std::string& meta) {
  save_weights(path, {meta, state_dict(model)});
}

std::string load_model(const fs::path& path, Model& model) {
  WeightsFile f = load_weights(path);
  Model fresh(model.backbone.config());
  try {
    load_state_dict(fresh, f.tensors);
  } catch (const std::exception& e) {
    throw StoreError(path.string() + ": " + e.what());
  }
  model = std::move(fresh);
  return f.meta;
}

void write_png(const fs::path& path, const Image& image) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  const fs::path tmp = temp_sibling(path);
  if (!png_image_write_to_file(&img, tmp.c_str(), 0, image.rgb.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw StoreError(fmt::format("cannot write {}: {}", path.string(), msg));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError(fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
}

Image read_png(const fs::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw StoreError(fmt::format("cannot read {}: {}", path.string(), img.message));
  }
  img.format = PNG_FORMAT_RGB;
  Image out(img.width, img.height);
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw StoreError(fmt::format("cannot decode {}: {}", path.string(), msg));
  }
  return out;
}

void save_sequence(const fs::path& dir, const SequenceDataset& seq) {
  fs::create_directories(dir / "img");
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    write_png(dir / "img" / fmt::format("{:04d}.png", t + 1), seq.frames[t]);
  }
  std::string gt;
  for (const auto& b : seq.gt) {
    gt += fmt::format("{},{},{},{}\n", format_real(b.x), format_real(b.y), format_real(b.w), format_real(b.h));
  }
  write_file_atomic(dir / "groundtruth_rect.txt", gt);
  if (!seq.occ_fraction.empty()) {
    std::string occ;
    for (double f : seq.occ_fraction) occ += format_real(f) + "\n";
    write_file_atomic(dir / "occlusion.txt", occ);
  }
  write_file_atomic(dir / "scene.json", to_json(seq.spec).dump(2) + "\n");
}

SequenceDataset load_sequence(const fs::path& dir) {
  SequenceDataset seq;
  seq.id = dir.filename().string();
  if (seq.id.empty()) seq.id = dir.parent_path().filename().string();
  const fs::path gt_path = dir / "groundtruth_rect.txt";
  if (!fs::exists(gt_path)) throw StoreError(dir.string() + ": missing groundtruth_rect.txt");
  for (const auto& line : split_lines(read_file(gt_path))) {
    if (line.empty()) continue;
    const auto v = parse_numbers(line, gt_path.string());
    if (v.size() != 4) throw StoreError(gt_path.string() + ": expected x,y,w,h in '" + line + "'");
    seq.gt.push_back({v[0], v[1], v[2], v[3]});
  }
  std::vector<fs::path> frames;
  if (fs::is_directory(dir / "img")) {
    for (const auto& e : fs::directory_iterator(dir / "img")) {
      const auto ext = e.path().extension().string();
      if (e.is_regular_file() && (ext == ".png" || ext == ".PNG")) frames.push_back(e.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  if (frames.size() != seq.gt.size()) {
    throw StoreError(fmt::format("{}: {} frames but {} ground-truth boxes", dir.string(), frames.size(), seq.gt.size()));
  }
  for (const auto& f : frames) seq.frames.push_back(read_png(f));
  const fs::path occ_path = dir / "occlusion.txt";
  if (fs::exists(occ_path)) {
    for (const auto& line : split_lines(read_file(occ_path))) {
      if (line.empty()) continue;
      const auto v = parse_numbers(line, occ_path.string());
      if (v.size() != 1) throw StoreError(occ_path.string() + ": expected one value per line");
      seq.occ_fraction.push_back(v[0]);
    }
    if (seq.occ_fraction.size() != seq.gt.size()) throw StoreError(occ_path.string() + ": wrong line count");
  }
  if (fs::exists(dir / "scene.json")) {
    seq.spec = scene_from_json(nlohmann::json::parse(read_file(dir / "scene.json")));
  }
  for (const auto& b : seq.gt) {
    seq.center_x.push_back(b.cx());
    seq.center_y.push_back(b.cy());
  }
  return seq;
}

void save_suite(const fs::path& dir, const std::vector<SequenceDataset>& suite, const std::string& meta) {
  fs::create_directories(dir);
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& s : suite) {
    save_sequence(dir / s.id, s);
    ids.push_back(s.id);
  }
  nlohmann::json j = nlohmann::json::parse(meta.empty() ? "{}" : meta);
  j["sequences"] = ids;
  write_file_atomic(dir / "suite.json", j.dump(2) + "\n");
}

std::vector<std::string> suite_ids(const fs::path& dir) {
  std::vector<std::string> ids;
  if (fs::exists(dir / "suite.json")) {
    const auto j = nlohmann::json::parse(read_file(dir / "suite.json"));
    for (const auto& id : j.at("sequences")) ids.push_back(id.get<std::string>());
    return ids;
  }
  if (!fs::is_directory(dir)) throw StoreError(dir.string() + ": not a directory");
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "groundtruth_rect.txt")) ids.push_back(e.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw StoreError(dir.string() + ": no sequences found");
  return ids;
}

std::vector<SequenceDataset> load_suite(const fs::path& dir) {
  std::vector<SequenceDataset> out;
  for (const auto& id : suite_ids(dir)) out.push_back(load_sequence(dir / id));
  return out;
}

std::string format_results(const ResultsFile& file) {
  std::string out;
  for (const auto& h : file.header) out += "# " + h + "\n";
  for (std::size_t i = 0; i < file.predictions.size(); ++i) {
    const auto& p = file.predictions[i];
    out += fmt::format("{},{},{},{},{},{},{}\n", i + 1, format_real(p.bbox.x), format_real(p.bbox.y),
                       format_real(p.bbox.w), format_real(p.bbox.h), format_real(p.score),
                       p.degenerate ? 1 : 0);
  }
  return out;
}

ResultsFile parse_results(const std::string& text) {
  ResultsFile f;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      f.header.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    const auto v = parse_numbers(line, fmt::format("results line {}", line_no));
    if (v.size() != 7) throw StoreError(fmt::format("results line {}: expected 7 fields", line_no));
    if (v[0] != static_cast<double>(f.predictions.size() + 1)) {
      throw StoreError(fmt::format("results line {}: frame {} out of order", line_no, v[0]));
    }
    f.predictions.push_back({{v[1], v[2], v[3], v[4]}, v[5], v[6] != 0});
  }
  return f;
}

void save_results(const fs::path& path, const ResultsFile& file) { write_file_atomic(path, format_results(file)); }

ResultsFile load_results(const fs::path& path) {
  try {
    return parse_results(read_file(path));
  } catch (const StoreError& e) {
    throw StoreError(path.string() + ": " + e.what());
  }
}

std::string format_report(const std::vector<std::string>& header, const KeyValues& values) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  for (const auto& [k, v] : values) out += k + " = " + v + "\n";
  return out;
}

KeyValues parse_report(const std::string& text) {
  KeyValues out;
  for (const auto& line : split_lines(text)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw StoreError("report: malformed line '" + line + "'");
    out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return out;
}

KeyValues report_values(const MetricsReport& report) {
  KeyValues kv;
  auto add = [&](const std::string& prefix, const SequenceMetrics& m) {
    kv.emplace_back(prefix + "frames", std::to_string(m.frames));
    kv.emplace_back(prefix + "precision_20px", format_real(m.precision));
    kv.emplace_back(prefix + "success_auc", format_real(m.auc));
    kv.emplace_back(prefix + "ao", format_real(m.ao));
    kv.emplace_back(prefix + "sr_0.50", format_real(m.sr50));
    kv.emplace_back(prefix + "sr_0.75", format_real(m.sr75));
  };
  kv.emplace_back("sequences", std::to_string(report.sequences.size()));
  add("", report.aggregate);
  for (const auto& s : report.sequences) add("sequence." + s.sequence + ".", s);
  return kv;
}

}  // namespace sdtrack
