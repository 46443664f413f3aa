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
#include "sdtrack/dropout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sdtrack {

std::string_view to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::none: return "none";
    case MaskKind::channel: return "channel";
    case MaskKind::segment: return "segment";
    case MaskKind::slice: return "slice";
    case MaskKind::mc: return "mc";
  }
  return "none";
}

MaskKind parse_mask_kind(std::string_view name) {
  for (auto k : {MaskKind::none, MaskKind::channel, MaskKind::segment, MaskKind::slice,
                 MaskKind::mc}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown dropout kind '" + std::string(name) + "'");
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::top: return "top";
    case Side::bottom: return "bottom";
  }
  return "left";
}

DropoutMask DropoutMask::none(Shape3 shape) {
  DropoutMask m(MaskKind::none, shape);
  m.kept_ = shape.size();
  return m;
}

DropoutMask DropoutMask::channels(Shape3 shape, std::vector<std::uint8_t> keep_channel) {
  if (keep_channel.size() != shape.channels) {
    throw ShapeError("channel mask has " + std::to_string(keep_channel.size()) +
                     " bits for " + std::to_string(shape.channels) + " channels");
  }
  DropoutMask m(MaskKind::channel, shape);
  m.bits_ = std::move(keep_channel);
  m.count_kept();
  return m;
}

DropoutMask DropoutMask::rectangle(MaskKind kind, Shape3 shape, CellRect zeroed,
                                   std::optional<Side> side) {
  if (kind != MaskKind::segment && kind != MaskKind::slice) {
    throw std::invalid_argument("rectangle masks are segment or slice");
  }
  if (zeroed.area() == 0 || zeroed.y0 + zeroed.height > shape.height ||
      zeroed.x0 + zeroed.width > shape.width) {
    throw std::invalid_argument("zeroed rectangle outside the grid or empty");
  }
  DropoutMask m(kind, shape);
  m.bits_.assign(shape.height * shape.width, 1);
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      if (zeroed.contains(y, x)) m.bits_[y * shape.width + x] = 0;
    }
  }
  m.rect_ = zeroed;
  m.side_ = side;
  m.count_kept();
  return m;
}

DropoutMask DropoutMask::elements(Shape3 shape, std::vector<std::uint8_t> keep) {
  if (keep.size() != shape.size()) {
    throw ShapeError("element mask has " + std::to_string(keep.size()) + " bits for shape " +
                     to_string(shape));
  }
  DropoutMask m(MaskKind::mc, shape);
  m.bits_ = std::move(keep);
  m.count_kept();
  return m;
}

void DropoutMask::count_kept() {
  const std::size_t set = static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
  switch (kind_) {
    case MaskKind::none: kept_ = shape_.size(); break;
    case MaskKind::channel: kept_ = set * shape_.height * shape_.width; break;
    case MaskKind::segment:
    case MaskKind::slice: kept_ = set * shape_.channels; break;
    case MaskKind::mc: kept_ = set; break;
  }
}

bool DropoutMask::keeps(std::size_t c, std::size_t y, std::size_t x) const {
  switch (kind_) {
    case MaskKind::none: return true;
    case MaskKind::channel: return bits_[c] != 0;
    case MaskKind::segment:
    case MaskKind::slice: return bits_[y * shape_.width + x] != 0;
    case MaskKind::mc: return bits_[(c * shape_.height + y) * shape_.width + x] != 0;
  }
  return true;
}

template <class Real>
Tensor3<Real> DropoutMask::keep_map() const {
  Tensor3<Real> out(shape_);
  for (std::size_t c = 0; c < shape_.channels; ++c) {
    for (std::size_t y = 0; y < shape_.height; ++y) {
      for (std::size_t x = 0; x < shape_.width; ++x) out(c, y, x) = keeps(c, y, x) ? 1 : 0;
    }
  }
  return out;
}

template Tensor3<float> DropoutMask::keep_map<float>() const;
template Tensor3<double> DropoutMask::keep_map<double>() const;

namespace {

void check_rate(double rate) {
  if (!(rate >= 0.0) || rate >= 1.0) {
    throw std::invalid_argument("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

void check_count(std::size_t n) {
  if (n < 2) throw std::invalid_argument("dropout needs n >= 2 passes, got " + std::to_string(n));
}

MaskSet start_set(MaskKind kind, std::uint64_t seed, Shape3 shape, std::size_t n) {
  MaskSet set{kind, seed, {}};
  set.masks.reserve(n);
  set.masks.push_back(DropoutMask::none(shape));
  return set;
}

}  // namespace

MaskSet channel_masks(std::size_t n, double rate, Shape3 shape, std::uint64_t seed) {
  check_rate(rate);
  check_count(n);
  const auto dropped = static_cast<std::size_t>(std::floor(rate * static_cast<double>(shape.channels)));
  std::mt19937_64 rng(seed);
  MaskSet set = start_set(MaskKind::channel, seed, shape, n);
  std::vector<std::size_t> order(shape.channels);
  for (std::size_t i = 1; i < n; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `dropped` entries are a uniform sample.
    for (std::size_t k = 0; k < dropped; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, shape.channels - 1);
      std::swap(order[k], order[pick(rng)]);
    }
    std::vector<std::uint8_t> keep(shape.channels, 1);
    for (std::size_t k = 0; k < dropped; ++k) keep[order[k]] = 0;
    set.masks.push_back(DropoutMask::channels(shape, std::move(keep)));
  }
  return set;
}

MaskSet segment_masks(std::size_t n, double rate, Shape3 shape, std::uint64_t seed) {
  check_rate(rate);
  check_count(n);
  const double cells = static_cast<double>(shape.height * shape.width);
  const double target = rate * cells;
  if (target < 1.0) {
    throw std::invalid_argument("segment dropout: rate * H * W = " + std::to_string(target) +
                                " is below one cell");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_aspect(std::log(1.0 / 3.0), std::log(3.0));
  MaskSet set = start_set(MaskKind::segment, seed, shape, n);
  const auto H = static_cast<long>(shape.height);
  const auto W = static_cast<long>(shape.width);
  for (std::size_t i = 1; i < n; ++i) {
    const double aspect = std::exp(log_aspect(rng));
    const long h = std::clamp(std::lround(std::sqrt(target * aspect)), 1L, H);
    long w = std::clamp(std::lround(target / static_cast<double>(h)), 1L, W);
    if (h == H && w == W) w = W - 1;  // keep at least one column
    std::uniform_int_distribution<long> py(0, H - h);
    std::uniform_int_distribution<long> px(0, W - w);
    const auto y0 = static_cast<std::size_t>(py(rng));
    const auto x0 = static_cast<std::size_t>(px(rng));
    set.masks.push_back(DropoutMask::rectangle(
        MaskKind::segment, shape,
        CellRect{y0, x0, static_cast<std::size_t>(h), static_cast<std::size_t>(w)}));
  }
  return set;
}

MaskSet slice_masks(Shape3 shape, std::span<const double> fractions) {
  if (fractions.empty()) throw std::invalid_argument("slice dropout needs at least one fraction");
  MaskSet set = start_set(MaskKind::slice, 0, shape, 4 * fractions.size() + 1);
  for (double f : fractions) {
    if (!(f > 0.0) || !(f < 1.0)) {
      throw std::invalid_argument("slice fraction must lie in (0, 1), got " + std::to_string(f));
    }
    const auto cols = static_cast<std::size_t>(std::lround(f * static_cast<double>(shape.width)));
    const auto rows = static_cast<std::size_t>(std::lround(f * static_cast<double>(shape.height)));
    if (cols == 0 || rows == 0) {
      throw std::invalid_argument("slice fraction " + std::to_string(f) +
                                  " gives a zero-width strip on a " + to_string(shape) + " code");
    }
    if (cols >= shape.width || rows >= shape.height) {
      throw std::invalid_argument("slice fraction " + std::to_string(f) +
                                  " covers the whole " + to_string(shape) + " code");
    }
    const std::size_t H = shape.height;
    const std::size_t W = shape.width;
    set.masks.push_back(
        DropoutMask::rectangle(MaskKind::slice, shape, CellRect{0, 0, H, cols}, Side::left));
    set.masks.push_back(DropoutMask::rectangle(MaskKind::slice, shape,
                                               CellRect{0, W - cols, H, cols}, Side::right));
    set.masks.push_back(
        DropoutMask::rectangle(MaskKind::slice, shape, CellRect{0, 0, rows, W}, Side::top));
    set.masks.push_back(DropoutMask::rectangle(MaskKind::slice, shape,
                                               CellRect{H - rows, 0, rows, W}, Side::bottom));
  }
  return set;
}

MaskSet mc_masks(std::size_t n, double rate, Shape3 shape, std::uint64_t seed) {
  check_rate(rate);
  check_count(n);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep_bit(1.0 - rate);
  MaskSet set = start_set(MaskKind::mc, seed, shape, n);
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<std::uint8_t> keep(shape.size());
    std::size_t kept = 0;
    while (kept == 0) {  // an all-zero mask is not a valid member
      kept = 0;
      for (auto& b : keep) {
        b = keep_bit(rng) ? 1 : 0;
        kept += b;
      }
    }
    set.masks.push_back(DropoutMask::elements(shape, std::move(keep)));
  }
  return set;
}

MaskSet identity_masks(Shape3 shape) { return start_set(MaskKind::none, 0, shape, 1); }

std::size_t DropoutSpec::passes() const {
  switch (kind) {
    case MaskKind::none: return 1;
    case MaskKind::slice: return 4 * fractions.size() + 1;
    default: return n;
  }
}

MaskSet make_masks(const DropoutSpec& spec, Shape3 shape) {
  return make_masks(spec, shape, spec.seed);
}

MaskSet make_masks(const DropoutSpec& spec, Shape3 shape, std::uint64_t seed) {
  switch (spec.kind) {
    case MaskKind::none: return identity_masks(shape);
    case MaskKind::channel: return channel_masks(spec.n, spec.rate, shape, seed);
    case MaskKind::segment: return segment_masks(spec.n, spec.rate, shape, seed);
    case MaskKind::slice: return slice_masks(shape, spec.fractions);
    case MaskKind::mc: return mc_masks(spec.n, spec.rate, shape, seed);
  }
  return identity_masks(shape);
}

template <class Real>
Tensor3<Real> apply(const DropoutMask& mask, const Tensor3<Real>& code) {
  require_same_shape(mask.shape(), code.shape(), "apply mask");
  if (mask.kind() == MaskKind::none) return code;
  Tensor3<Real> out(code.shape());
  const Shape3& s = code.shape();
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        out(c, y, x) = mask.keeps(c, y, x) ? code(c, y, x) : Real(0);
      }
    }
  }
  return out;
}

template Tensor3<float> apply(const DropoutMask&, const Tensor3<float>&);
template Tensor3<double> apply(const DropoutMask&, const Tensor3<double>&);

}  // namespace sdtrack
