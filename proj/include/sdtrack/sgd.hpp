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

#include <span>
#include <string>
#include <vector>

#include "sdtrack/layers.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack {

/// One momentum-SGD update:
///   v <- momentum * v + (grad + weight_decay * value)
///   value <- value - lr * v
template <class Real>
void sgd_step(Param<Real>& param, std::vector<Real>& velocity, Real lr, Real momentum,
              Real weight_decay = Real(0)) {
  if (param.grad.size() != param.value.size()) {
    throw ShapeError("sgd_step: gradient of " + param.name + " has " +
                     std::to_string(param.grad.size()) + " entries, value has " +
                     std::to_string(param.value.size()));
  }
  if (velocity.empty()) velocity.assign(param.value.size(), Real(0));
  if (velocity.size() != param.value.size()) {
    throw ShapeError("sgd_step: velocity of " + param.name + " has wrong length");
  }
  for (std::size_t i = 0; i < param.value.size(); ++i) {
    velocity[i] = momentum * velocity[i] + (param.grad[i] + weight_decay * param.value[i]);
    param.value[i] -= lr * velocity[i];
  }
}

/// Momentum SGD over a fixed, ordered list of parameters.
template <class Real>
class SgdOptimizer {
 public:
  SgdOptimizer(std::vector<Param<Real>*> params, Real momentum, Real weight_decay)
      : params_(std::move(params)), velocity_(params_.size()), momentum_(momentum),
        weight_decay_(weight_decay) {}

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  void step(Real lr) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (!params_[i]->trainable) continue;
      sgd_step(*params_[i], velocity_[i], lr, momentum_, weight_decay_);
    }
  }

  std::vector<std::vector<Real>>& velocity() { return velocity_; }
  const std::vector<Param<Real>*>& params() const { return params_; }

 private:
  std::vector<Param<Real>*> params_;
  std::vector<std::vector<Real>> velocity_;
  Real momentum_;
  Real weight_decay_;
};

}  // namespace sdtrack
