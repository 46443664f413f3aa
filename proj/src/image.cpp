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
#include "sdtrack/image.hpp"

#include <cmath>

namespace sdtrack {

Rgb mean_color(const Image& image) {
  Rgb sum{0, 0, 0};
  const std::size_t n = image.width * image.height;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) sum[c] += image.rgb[i * 3 + c];
  }
  if (n > 0) {
    for (auto& s : sum) s /= static_cast<double>(n);
  }
  return sum;
}

FeatureMap crop_patch(const Image& image, double cx, double cy, double side, std::size_t out_size,
                      const Rgb& fill) {
  FeatureMap out(3, out_size, out_size);
  const double step = side / static_cast<double>(out_size);
  const double x0 = cx - side / 2.0;
  const double y0 = cy - side / 2.0;
  const auto W = static_cast<long>(image.width);
  const auto H = static_cast<long>(image.height);
  auto fetch = [&](long x, long y, int c) -> double {
    if (x < 0 || y < 0 || x >= W || y >= H) return fill[c];
    return image.rgb[(static_cast<std::size_t>(y) * image.width + static_cast<std::size_t>(x)) * 3 + c];
  };
  for (std::size_t i = 0; i < out_size; ++i) {
    const double sy = y0 + (static_cast<double>(i) + 0.5) * step - 0.5;
    const long iy = static_cast<long>(std::floor(sy));
    const double fy = sy - static_cast<double>(iy);
    for (std::size_t j = 0; j < out_size; ++j) {
      const double sx = x0 + (static_cast<double>(j) + 0.5) * step - 0.5;
      const long ix = static_cast<long>(std::floor(sx));
      const double fx = sx - static_cast<double>(ix);
      for (int c = 0; c < 3; ++c) {
        const double top = fetch(ix, iy, c) * (1 - fx) + fetch(ix + 1, iy, c) * fx;
        const double bottom = fetch(ix, iy + 1, c) * (1 - fx) + fetch(ix + 1, iy + 1, c) * fx;
        out(static_cast<std::size_t>(c), i, j) =
            static_cast<float>((top * (1 - fy) + bottom * fy) / 255.0);
      }
    }
  }
  return out;
}

}  // namespace sdtrack
