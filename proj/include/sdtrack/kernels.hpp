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

// Raw convolution kernels over contiguous (c, y, x) buffers. Two variants
// share one contract: `reference` is the plain nested-loop form kept for
// testing, `parallel` is the blocked form with OpenMP over output channels.
// Shapes are validated by the callers in ops.hpp.

#include <cstddef>
#include <cstdint>
#include <span>

namespace sdtrack::kernels {

struct ConvGeometry {
  std::size_t in_channels = 0;
  std::size_t in_height = 0;
  std::size_t in_width = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride = 1;
  std::size_t groups = 1;

  std::size_t out_height() const { return (in_height - kernel_h) / stride + 1; }
  std::size_t out_width() const { return (in_width - kernel_w) / stride + 1; }
  std::size_t in_per_group() const { return in_channels / groups; }
  std::size_t out_per_group() const { return out_channels / groups; }
  std::size_t weight_size() const { return out_channels * in_per_group() * kernel_h * kernel_w; }
  std::size_t input_size() const { return in_channels * in_height * in_width; }
  std::size_t output_size() const { return out_channels * out_height() * out_width(); }
  /// Multiply-accumulates performed by one forward application.
  std::uint64_t macs() const {
    return static_cast<std::uint64_t>(output_size()) * in_per_group() * kernel_h * kernel_w;
  }
};

enum class Variant { reference, parallel };

namespace reference {

// out = conv(in, weight) + bias; bias may be empty.
template <class Real>
void conv2d(std::span<const Real> in, std::span<const Real> weight, std::span<const Real> bias,
            const ConvGeometry& g, std::span<Real> out);

// grad_in += d out / d in applied to grad_out.
template <class Real>
void conv2d_backward_input(std::span<const Real> grad_out, std::span<const Real> weight,
                           const ConvGeometry& g, std::span<Real> grad_in);

// grad_weight += ..., grad_bias += ... (grad_bias may be empty).
template <class Real>
void conv2d_backward_weight(std::span<const Real> grad_out, std::span<const Real> in,
                            const ConvGeometry& g, std::span<Real> grad_weight,
                            std::span<Real> grad_bias);

}  // namespace reference

namespace parallel {

template <class Real>
void conv2d(std::span<const Real> in, std::span<const Real> weight, std::span<const Real> bias,
            const ConvGeometry& g, std::span<Real> out);

template <class Real>
void conv2d_backward_input(std::span<const Real> grad_out, std::span<const Real> weight,
                           const ConvGeometry& g, std::span<Real> grad_in);

template <class Real>
void conv2d_backward_weight(std::span<const Real> grad_out, std::span<const Real> in,
                            const ConvGeometry& g, std::span<Real> grad_weight,
                            std::span<Real> grad_bias);

}  // namespace parallel

template <class Real>
void conv2d(Variant v, std::span<const Real> in, std::span<const Real> weight,
            std::span<const Real> bias, const ConvGeometry& g, std::span<Real> out) {
  if (v == Variant::reference) {
    reference::conv2d(in, weight, bias, g, out);
  } else {
    parallel::conv2d(in, weight, bias, g, out);
  }
}

template <class Real>
void conv2d_backward_input(Variant v, std::span<const Real> grad_out, std::span<const Real> weight,
                           const ConvGeometry& g, std::span<Real> grad_in) {
  if (v == Variant::reference) {
    reference::conv2d_backward_input(grad_out, weight, g, grad_in);
  } else {
    parallel::conv2d_backward_input(grad_out, weight, g, grad_in);
  }
}

template <class Real>
void conv2d_backward_weight(Variant v, std::span<const Real> grad_out, std::span<const Real> in,
                            const ConvGeometry& g, std::span<Real> grad_weight,
                            std::span<Real> grad_bias) {
  if (v == Variant::reference) {
    reference::conv2d_backward_weight(grad_out, in, g, grad_weight, grad_bias);
  } else {
    parallel::conv2d_backward_weight(grad_out, in, g, grad_weight, grad_bias);
  }
}

}  // namespace sdtrack::kernels
