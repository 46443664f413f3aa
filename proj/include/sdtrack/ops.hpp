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

// Forward operations on single feature maps (inference path). The taped,
// differentiable versions live in tape.hpp and call the same kernels.

#include <span>
#include <vector>

#include "sdtrack/kernels.hpp"
#include "sdtrack/layers.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack {

template <class Real>
Tensor3<Real> conv2d(const Tensor3<Real>& input, const ConvLayer<Real>& layer,
                     kernels::Variant variant = kernels::Variant::parallel);

/// Dense cross-correlation of a target code over a search code, summed over
/// channels: out(u, v) = sum_c sum_{dy,dx} target(c,dy,dx) * search(c,u+dy,v+dx).
template <class Real>
Tensor3<Real> xcorr(const Tensor3<Real>& target, const Tensor3<Real>& search,
                    kernels::Variant variant = kernels::Variant::parallel);

kernels::ConvGeometry xcorr_geometry(const Shape3& target, const Shape3& search);

/// Batch normalization over a batch of maps. Train mode normalizes with the
/// batch statistics (over batch and space) and updates the running stats.
template <class Real>
std::vector<Tensor3<Real>> batchnorm(std::span<const Tensor3<Real>> batch, BatchNorm<Real>& bn,
                                     BnMode mode);

/// Eval-mode batch normalization of a single map.
template <class Real>
Tensor3<Real> batchnorm_eval(const Tensor3<Real>& input, const BatchNorm<Real>& bn);

template <class Real>
void relu_inplace(Tensor3<Real>& x);

/// Balanced logistic loss: weighted mean of log(1 + exp(-label * value)) with
/// positive and negative cells each carrying half the total weight.
template <class Real>
Real logistic_loss(const Tensor3<Real>& response, const Tensor3<Real>& labels);

/// Numerically stable log(1 + exp(t)).
template <class Real>
Real softplus(Real t);

}  // namespace sdtrack
