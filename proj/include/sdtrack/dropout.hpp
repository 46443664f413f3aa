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

// Structured dropout masks over the exemplar code.
//
//   channel  - whole channels zeroed (appearance change hiding some features)
//   segment  - one random spatial rectangle zeroed across all channels
//   slice    - deterministic edge strips from the four sides
//   mc       - i.i.d. per-element dropout (Monte-Carlo baseline)
//
// Masks zero activations only; kept values are never rescaled. Every MaskSet
// carries exactly one `none` mask, always in slot 0.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdtrack/tensor.hpp"

namespace sdtrack {

enum class MaskKind { none, channel, segment, slice, mc };
enum class Side { left, right, top, bottom };

std::string_view to_string(MaskKind kind);
MaskKind parse_mask_kind(std::string_view name);
std::string_view to_string(Side side);

/// Zeroed spatial rectangle, in cells.
struct CellRect {
  std::size_t y0 = 0;
  std::size_t x0 = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  bool contains(std::size_t y, std::size_t x) const {
    return y >= y0 && y < y0 + height && x >= x0 && x < x0 + width;
  }
  std::size_t area() const { return height * width; }
  friend bool operator==(const CellRect&, const CellRect&) = default;
};

class DropoutMask {
 public:
  static DropoutMask none(Shape3 shape);
  /// keep_channel[c] != 0 keeps channel c.
  static DropoutMask channels(Shape3 shape, std::vector<std::uint8_t> keep_channel);
  /// Zeroes `zeroed` across all channels. kind must be segment or slice.
  static DropoutMask rectangle(MaskKind kind, Shape3 shape, CellRect zeroed,
                               std::optional<Side> side = std::nullopt);
  /// Full per-element keep bits in (c, y, x) order.
  static DropoutMask elements(Shape3 shape, std::vector<std::uint8_t> keep);

  MaskKind kind() const { return kind_; }
  const Shape3& shape() const { return shape_; }
  bool keeps(std::size_t c, std::size_t y, std::size_t x) const;
  std::size_t kept_count() const { return kept_; }
  /// Kept elements over total elements, by counting.
  double kept_fraction() const {
    return static_cast<double>(kept_) / static_cast<double>(shape_.size());
  }
  /// Area fraction of the dropped part.
  double dropped_fraction() const { return 1.0 - kept_fraction(); }
  const std::optional<CellRect>& zeroed_rect() const { return rect_; }
  const std::optional<Side>& side() const { return side_; }

  template <class Real>
  Tensor3<Real> keep_map() const;

 private:
  DropoutMask(MaskKind kind, Shape3 shape) : kind_(kind), shape_(shape) {}
  void count_kept();

  MaskKind kind_ = MaskKind::none;
  Shape3 shape_{};
  // none: empty; channel: per channel; segment/slice: per cell; mc: per element.
  std::vector<std::uint8_t> bits_;
  std::optional<CellRect> rect_;
  std::optional<Side> side_;
  std::size_t kept_ = 0;
};

struct MaskSet {
  MaskKind kind = MaskKind::none;
  std::uint64_t seed = 0;
  std::vector<DropoutMask> masks;

  std::size_t size() const { return masks.size(); }
  const DropoutMask& operator[](std::size_t i) const { return masks[i]; }

  template <class Real>
  std::vector<Tensor3<Real>> keep_maps() const {
    std::vector<Tensor3<Real>> out;
    out.reserve(masks.size());
    for (const auto& m : masks) out.push_back(m.template keep_map<Real>());
    return out;
  }
};

/// Channel dropout: n-1 masks each zeroing floor(rate * C) distinct channels.
MaskSet channel_masks(std::size_t n, double rate, Shape3 shape, std::uint64_t seed);

/// Segment dropout: n-1 masks each zeroing one rectangle of area nearest to
/// rate * H * W, with log-uniform aspect ratio in [1/3, 3] and uniform position.
MaskSet segment_masks(std::size_t n, double rate, Shape3 shape, std::uint64_t seed);

/// Slice dropout: for each fraction f and each side (left, right, top,
/// bottom), zero the edge strip of width round(f * W) or height round(f * H).
/// Size 4 * fractions.size() + 1.
MaskSet slice_masks(Shape3 shape, std::span<const double> fractions);

/// Monte-Carlo dropout: n-1 masks with i.i.d. keep probability 1 - rate.
MaskSet mc_masks(std::size_t n, double rate, Shape3 shape, std::uint64_t seed);

/// The single-element set {none}.
MaskSet identity_masks(Shape3 shape);

struct DropoutSpec {
  MaskKind kind = MaskKind::none;
  std::size_t n = 21;
  double rate = 0.2;
  std::vector<double> fractions{1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0};
  std::uint64_t seed = 0;

  /// Number of masks these settings produce (slice: 4 * fractions + 1; none: 1).
  std::size_t passes() const;
};

MaskSet make_masks(const DropoutSpec& spec, Shape3 shape);
MaskSet make_masks(const DropoutSpec& spec, Shape3 shape, std::uint64_t seed);

/// Elementwise product of the code with the mask's keep bits.
template <class Real>
Tensor3<Real> apply(const DropoutMask& mask, const Tensor3<Real>& code);

}  // namespace sdtrack
