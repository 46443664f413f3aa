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
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdtrack {

/// Raised when operand shapes are incompatible. The message names the
/// offending dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Shape3 {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return channels * height * width; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& shape);

/// Dense rank-3 array stored row-major in (channel, y, x) order.
template <class Real>
class Tensor3 {
 public:
  using value_type = Real;

  Tensor3() = default;
  Tensor3(std::size_t channels, std::size_t height, std::size_t width, Real fill = Real(0))
      : shape_{channels, height, width}, data_(channels * height * width, fill) {}
  explicit Tensor3(Shape3 shape, Real fill = Real(0))
      : Tensor3(shape.channels, shape.height, shape.width, fill) {}
  Tensor3(Shape3 shape, std::vector<Real> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  const Shape3& shape() const { return shape_; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Real& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  Real operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }
  std::span<Real> channel(std::size_t c) {
    return std::span<Real>(data_).subspan(c * plane(), plane());
  }
  std::span<const Real> channel(std::size_t c) const {
    return std::span<const Real>(data_).subspan(c * plane(), plane());
  }
  std::size_t plane() const { return shape_.height * shape_.width; }

  void fill(Real value) { std::fill(data_.begin(), data_.end(), value); }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](Real v) { return std::isfinite(v); });
  }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape3 shape_{};
  std::vector<Real> data_;
};

using FeatureMap = Tensor3<float>;

template <class To, class From>
Tensor3<To> tensor_cast(const Tensor3<From>& in) {
  Tensor3<To> out(in.shape());
  std::transform(in.data().begin(), in.data().end(), out.data().begin(),
                 [](From v) { return static_cast<To>(v); });
  return out;
}

/// Throws ShapeError unless both shapes match.
void require_same_shape(const Shape3& a, const Shape3& b, const char* what);

}  // namespace sdtrack
