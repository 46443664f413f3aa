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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdtrack/tensor.hpp"

namespace sdtrack {

/// 8-bit interleaved RGB frame.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}

  std::uint8_t* pixel(std::size_t x, std::size_t y) { return rgb.data() + (y * width + x) * 3; }
  const std::uint8_t* pixel(std::size_t x, std::size_t y) const {
    return rgb.data() + (y * width + x) * 3;
  }
  friend bool operator==(const Image&, const Image&) = default;
};

using Rgb = std::array<double, 3>;

/// Per-channel mean over the whole frame, in [0, 255].
Rgb mean_color(const Image& image);

/// Square crop of side `side` (frame px) centered at (cx, cy), resampled
/// bilinearly to out_size x out_size, channels scaled to [0, 1]. Pixels
/// outside the frame take the `fill` color.
FeatureMap crop_patch(const Image& image, double cx, double cy, double side, std::size_t out_size,
                      const Rgb& fill);

}  // namespace sdtrack
