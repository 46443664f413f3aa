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
#include <stdexcept>
#include <vector>

#include "sdtrack/layers.hpp"
#include "sdtrack/tape.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack {

class PatchTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BackboneConfig {
  /// Channel counts from input to output; blocks = channels.size() - 1.
  std::vector<std::size_t> channels{3, 16, 32, 32, 64};
  std::vector<std::size_t> strides{2, 2, 2, 1};
  std::size_t kernel = 3;
  std::uint64_t seed = 1;
};

/// Fully-convolutional embedding network shared by the exemplar and search
/// branches. Each block is conv -> batchnorm -> relu, except the last block
/// which stops after batchnorm.
template <class Real>
class Backbone {
 public:
  struct Block {
    ConvLayer<Real> conv;
    BatchNorm<Real> bn;
    bool relu = true;
  };

  explicit Backbone(const BackboneConfig& config = {});

  /// Inference embedding with batchnorm in eval mode.
  Tensor3<Real> embed(const Tensor3<Real>& patch,
                      kernels::Variant variant = kernels::Variant::parallel) const;

  /// Taped embedding of a batch of patches.
  typename Tape<Real>::Var embed(Tape<Real>& tape, typename Tape<Real>::Var patches, BnMode mode);

  std::size_t total_stride() const;
  std::size_t out_channels() const { return blocks_.back().conv.out_channels; }
  std::size_t receptive_field() const;
  /// Output spatial extent for an input extent, or 0 when too small.
  std::size_t output_size(std::size_t input) const;
  std::uint64_t macs(std::size_t height, std::size_t width) const;

  std::vector<Param<Real>*> params();
  void set_trainable(bool trainable);

  std::vector<Block>& blocks() { return blocks_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const BackboneConfig& config() const { return config_; }

 private:
  void check_patch(const Shape3& shape) const;

  BackboneConfig config_;
  std::vector<Block> blocks_;
};

}  // namespace sdtrack
