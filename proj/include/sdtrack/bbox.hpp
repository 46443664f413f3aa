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

#include <algorithm>
#include <cmath>

namespace sdtrack {

/// Axis-aligned box in frame pixels; (x, y) is the top-left corner.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double cx() const { return x + w / 2; }
  double cy() const { return y + h / 2; }
  double area() const { return w * h; }
  bool valid() const { return w > 0 && h > 0 && std::isfinite(x) && std::isfinite(y); }

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - w / 2, cy - h / 2, w, h};
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Prediction {
  BBox bbox;
  double score = 0;
  /// Set when the response map carried no peak (all cells equal).
  bool degenerate = false;
};

/// Intersection over union; 0 for disjoint boxes.
inline double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

inline double center_distance(const BBox& a, const BBox& b) {
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

}  // namespace sdtrack
