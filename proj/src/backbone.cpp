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
#include "sdtrack/backbone.hpp"

#include <random>
#include <string>

#include "sdtrack/ops.hpp"

namespace sdtrack {

template <class Real>
Backbone<Real>::Backbone(const BackboneConfig& config) : config_(config) {
  if (config.channels.size() < 2 || config.strides.size() != config.channels.size() - 1) {
    throw std::invalid_argument("backbone: need one stride per block");
  }
  std::mt19937_64 rng(config.seed);
  for (std::size_t i = 0; i + 1 < config.channels.size(); ++i) {
    const std::string name = "backbone." + std::to_string(i);
    Block block{ConvLayer<Real>(name + ".conv", config.channels[i], config.channels[i + 1],
                                config.kernel, config.kernel, config.strides[i]),
                BatchNorm<Real>(name + ".bn", config.channels[i + 1]),
                i + 2 < config.channels.size()};
    block.conv.init_fan_in(rng);
    blocks_.push_back(std::move(block));
  }
}

template <class Real>
std::size_t Backbone<Real>::total_stride() const {
  std::size_t s = 1;
  for (const auto& b : blocks_) s *= b.conv.stride;
  return s;
}

template <class Real>
std::size_t Backbone<Real>::receptive_field() const {
  std::size_t rf = 1;
  std::size_t jump = 1;
  for (const auto& b : blocks_) {
    rf += (b.conv.kernel_h - 1) * jump;
    jump *= b.conv.stride;
  }
  return rf;
}

template <class Real>
std::size_t Backbone<Real>::output_size(std::size_t input) const {
  std::size_t size = input;
  for (const auto& b : blocks_) {
    if (size < b.conv.kernel_h) return 0;
    size = (size - b.conv.kernel_h) / b.conv.stride + 1;
  }
  return size;
}

template <class Real>
std::uint64_t Backbone<Real>::macs(std::size_t height, std::size_t width) const {
  std::uint64_t total = 0;
  std::size_t c = blocks_.front().conv.in_channels;
  for (const auto& b : blocks_) {
    const auto g = b.conv.geometry(c, height, width);
    total += g.macs();
    c = g.out_channels;
    height = g.out_height();
    width = g.out_width();
  }
  return total;
}

template <class Real>
void Backbone<Real>::check_patch(const Shape3& shape) const {
  if (shape.channels != blocks_.front().conv.in_channels) {
    throw ShapeError("embed: patch has " + std::to_string(shape.channels) + " channels, expected " +
                     std::to_string(blocks_.front().conv.in_channels));
  }
  const std::size_t rf = receptive_field();
  if (shape.height < rf || shape.width < rf) {
    throw PatchTooSmall("embed: patch " + std::to_string(shape.height) + "x" +
                        std::to_string(shape.width) + " smaller than receptive field " +
                        std::to_string(rf));
  }
}

template <class Real>
Tensor3<Real> Backbone<Real>::embed(const Tensor3<Real>& patch, kernels::Variant variant) const {
  check_patch(patch.shape());
  Tensor3<Real> x = patch;
  for (const auto& b : blocks_) {
    x = batchnorm_eval(conv2d(x, b.conv, variant), b.bn);
    if (b.relu) relu_inplace(x);
  }
  return x;
}

template <class Real>
typename Tape<Real>::Var Backbone<Real>::embed(Tape<Real>& tape, typename Tape<Real>::Var patches,
                                               BnMode mode) {
  for (const auto& p : tape.value(patches)) check_patch(p.shape());
  auto x = patches;
  for (auto& b : blocks_) {
    x = tape.batchnorm(tape.conv2d(x, b.conv), b.bn, mode);
    if (b.relu) x = tape.relu(x);
  }
  return x;
}

template <class Real>
std::vector<Param<Real>*> Backbone<Real>::params() {
  std::vector<Param<Real>*> out;
  for (auto& b : blocks_) {
    out.push_back(&b.conv.weight);
    out.push_back(&b.conv.bias);
    out.push_back(&b.bn.scale);
    out.push_back(&b.bn.shift);
  }
  return out;
}

template <class Real>
void Backbone<Real>::set_trainable(bool trainable) {
  for (auto* p : params()) p->trainable = trainable;
}

template class Backbone<float>;
template class Backbone<double>;

}  // namespace sdtrack
