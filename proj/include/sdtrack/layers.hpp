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

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sdtrack/kernels.hpp"

namespace sdtrack {

/// A named, trainable array with its gradient accumulator.
template <class Real>
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<Real> value;
  std::vector<Real> grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> s, Real fill = Real(0))
      : name(std::move(n)), shape(std::move(s)) {
    std::size_t count = 1;
    for (auto d : shape) count *= d;
    value.assign(count, fill);
    grad.assign(count, Real(0));
  }

  std::size_t size() const { return value.size(); }
  void zero_grad() { grad.assign(value.size(), Real(0)); }
};

/// Weights of a grouped 2-D convolution (valid mode).
template <class Real>
struct ConvLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride = 1;
  std::size_t groups = 1;
  Param<Real> weight;  // out x (in / groups) x kh x kw
  Param<Real> bias;    // out

  ConvLayer() = default;
  ConvLayer(std::string name, std::size_t in, std::size_t out, std::size_t kh, std::size_t kw,
            std::size_t stride_ = 1, std::size_t groups_ = 1);

  /// Uniform init with bound sqrt(3 / fan_in); zero bias.
  void init_fan_in(std::mt19937_64& rng);

  /// Geometry for an input of the given spatial size; throws ShapeError when
  /// the kernel does not fit or channels disagree.
  kernels::ConvGeometry geometry(std::size_t in_c, std::size_t in_h, std::size_t in_w) const;
};

enum class BnMode { train, eval };

/// Per-channel batch normalization parameters and running statistics.
template <class Real>
struct BatchNorm {
  std::size_t channels = 0;
  Param<Real> scale;
  Param<Real> shift;
  std::vector<Real> running_mean;
  std::vector<Real> running_var;
  Real momentum = Real(0.1);
  Real eps = Real(1e-5);

  BatchNorm() = default;
  BatchNorm(std::string name, std::size_t c);
};

}  // namespace sdtrack
