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

// Reverse-mode differentiation over batches of rank-3 maps.
//
// Every value on the tape is a batch (a vector of Tensor3). Operations are
// applied per batch member except batchnorm, which pools statistics across
// the batch. Parameter gradients accumulate into Param::grad; callers zero
// them between steps. A tape supports exactly one backward() call.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "sdtrack/kernels.hpp"
#include "sdtrack/layers.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack {

class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class Real>
class Tape {
 public:
  using Map = Tensor3<Real>;
  using Batch = std::vector<Map>;

  struct Var {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    bool valid() const { return index != std::numeric_limits<std::size_t>::max(); }
  };

  explicit Tape(kernels::Variant variant = kernels::Variant::parallel) : variant_(variant) {}

  /// Leaf value. With requires_grad its gradient is kept for inspection.
  Var leaf(Batch value, bool requires_grad = false);

  const Batch& value(Var v) const;
  /// Gradient of the loss w.r.t. v; only available after backward().
  const Batch& grad(Var v) const;

  Var conv2d(Var x, ConvLayer<Real>& layer);
  Var batchnorm(Var x, BatchNorm<Real>& bn, BnMode mode);
  Var relu(Var x);
  /// y = gain * x + bias with scalar (one-element) parameters.
  Var scale_shift(Var x, Param<Real>& gain, Param<Real>& bias);
  /// For batch member b and keep map k: channel k of the output is
  /// xcorr(target[b] * keep[k], search[b]). An empty keep list means one
  /// unmasked correlation.
  Var masked_xcorr(Var target, Var search, std::span<const Map> keeps);
  /// Balanced logistic loss averaged over the batch; a 1x1x1 scalar.
  Var logistic_loss(Var response, const Batch& labels);
  /// Sum of all entries over the batch; a 1x1x1 scalar.
  Var sum(Var x);

  /// Propagates d(loss)/d(.) to every recorded node and parameter.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

 private:
  struct Node {
    Batch value;
    Batch grad;
    bool needs_grad = false;
    std::function<void()> backward;
  };

  Var push(Batch value, bool needs_grad, std::function<void()> backward);
  Node& node(Var v);
  const Node& node(Var v) const;
  Batch& grad_buffer(Var v);

  kernels::Variant variant_;
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace sdtrack
