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
#include "sdtrack/ops.hpp"

#include <cmath>
#include <string>

namespace sdtrack {

std::string to_string(const Shape3& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
         std::to_string(s.width);
}

void require_same_shape(const Shape3& a, const Shape3& b, const char* what) {
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": shape " + to_string(a) + " does not match " +
                     to_string(b));
  }
}

template <class Real>
ConvLayer<Real>::ConvLayer(std::string name, std::size_t in, std::size_t out, std::size_t kh,
                           std::size_t kw, std::size_t stride_, std::size_t groups_)
    : in_channels(in), out_channels(out), kernel_h(kh), kernel_w(kw), stride(stride_),
      groups(groups_) {
  if (groups == 0 || in % groups != 0 || out % groups != 0) {
    throw ShapeError("conv " + name + ": in-ch " + std::to_string(in) + " and out-ch " +
                     std::to_string(out) + " must be divisible by groups " +
                     std::to_string(groups));
  }
  if (stride == 0 || kh == 0 || kw == 0) throw ShapeError("conv " + name + ": zero extent");
  weight = Param<Real>(name + ".weight", {out, in / groups, kh, kw});
  bias = Param<Real>(name + ".bias", {out});
}

template <class Real>
void ConvLayer<Real>::init_fan_in(std::mt19937_64& rng) {
  const double fan_in = static_cast<double>(in_channels / groups * kernel_h * kernel_w);
  const double bound = std::sqrt(3.0 / fan_in);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& w : weight.value) w = static_cast<Real>(dist(rng));
  std::fill(bias.value.begin(), bias.value.end(), Real(0));
}

template <class Real>
kernels::ConvGeometry ConvLayer<Real>::geometry(std::size_t in_c, std::size_t in_h,
                                                std::size_t in_w) const {
  if (in_c != in_channels) {
    throw ShapeError("conv2d: input has " + std::to_string(in_c) + " channels, layer " +
                     weight.name + " expects " + std::to_string(in_channels));
  }
  if (in_h < kernel_h || in_w < kernel_w) {
    throw ShapeError("conv2d: kernel " + std::to_string(kernel_h) + "x" +
                     std::to_string(kernel_w) + " larger than input " + std::to_string(in_h) +
                     "x" + std::to_string(in_w));
  }
  return {in_c, in_h, in_w, out_channels, kernel_h, kernel_w, stride, groups};
}

template <class Real>
BatchNorm<Real>::BatchNorm(std::string name, std::size_t c)
    : channels(c),
      scale(name + ".scale", {c}, Real(1)),
      shift(name + ".shift", {c}, Real(0)),
      running_mean(c, Real(0)),
      running_var(c, Real(1)) {}

template <class Real>
Tensor3<Real> conv2d(const Tensor3<Real>& input, const ConvLayer<Real>& layer,
                     kernels::Variant variant) {
  const auto g = layer.geometry(input.channels(), input.height(), input.width());
  Tensor3<Real> out(g.out_channels, g.out_height(), g.out_width());
  kernels::conv2d<Real>(variant, input.data(), layer.weight.value, layer.bias.value, g,
                        out.data());
  return out;
}

kernels::ConvGeometry xcorr_geometry(const Shape3& target, const Shape3& search) {
  if (target.channels != search.channels) {
    throw ShapeError("xcorr: target has " + std::to_string(target.channels) +
                     " channels, search has " + std::to_string(search.channels));
  }
  if (target.height > search.height || target.width > search.width) {
    throw ShapeError("xcorr: target " + to_string(target) + " larger than search " +
                     to_string(search));
  }
  return {search.channels, search.height, search.width, 1, target.height, target.width, 1, 1};
}

template <class Real>
Tensor3<Real> xcorr(const Tensor3<Real>& target, const Tensor3<Real>& search,
                    kernels::Variant variant) {
  const auto g = xcorr_geometry(target.shape(), search.shape());
  Tensor3<Real> out(1, g.out_height(), g.out_width());
  kernels::conv2d<Real>(variant, search.data(), target.data(), {}, g, out.data());
  return out;
}

template <class Real>
std::vector<Tensor3<Real>> batchnorm(std::span<const Tensor3<Real>> batch, BatchNorm<Real>& bn,
                                     BnMode mode) {
  std::vector<Tensor3<Real>> out;
  out.reserve(batch.size());
  if (mode == BnMode::eval) {
    for (const auto& x : batch) out.push_back(batchnorm_eval(x, bn));
    return out;
  }
  if (batch.empty()) return out;
  const Shape3 shape = batch.front().shape();
  if (shape.channels != bn.channels) {
    throw ShapeError("batchnorm: input has " + std::to_string(shape.channels) +
                     " channels, params have " + std::to_string(bn.channels));
  }
  for (const auto& x : batch) require_same_shape(x.shape(), shape, "batchnorm");
  const std::size_t count = batch.size() * shape.height * shape.width;
  for (std::size_t b = 0; b < batch.size(); ++b) out.emplace_back(shape);
  for (std::size_t c = 0; c < shape.channels; ++c) {
    Real mean = 0;
    for (const auto& x : batch) {
      for (Real v : x.channel(c)) mean += v;
    }
    mean /= static_cast<Real>(count);
    Real var = 0;
    for (const auto& x : batch) {
      for (Real v : x.channel(c)) var += (v - mean) * (v - mean);
    }
    var /= static_cast<Real>(count);
    const Real inv_std = Real(1) / std::sqrt(var + bn.eps);
    const Real gamma = bn.scale.value[c];
    const Real beta = bn.shift.value[c];
    for (std::size_t b = 0; b < batch.size(); ++b) {
      auto src = batch[b].channel(c);
      auto dst = out[b].channel(c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - mean) * inv_std * gamma + beta;
    }
    const Real unbiased = count > 1 ? var * static_cast<Real>(count) / static_cast<Real>(count - 1)
                                    : var;
    bn.running_mean[c] = (Real(1) - bn.momentum) * bn.running_mean[c] + bn.momentum * mean;
    bn.running_var[c] = (Real(1) - bn.momentum) * bn.running_var[c] + bn.momentum * unbiased;
  }
  return out;
}

template <class Real>
Tensor3<Real> batchnorm_eval(const Tensor3<Real>& input, const BatchNorm<Real>& bn) {
  if (input.channels() != bn.channels) {
    throw ShapeError("batchnorm: input has " + std::to_string(input.channels()) +
                     " channels, params have " + std::to_string(bn.channels));
  }
  Tensor3<Real> out(input.shape());
  for (std::size_t c = 0; c < input.channels(); ++c) {
    const Real inv_std = Real(1) / std::sqrt(bn.running_var[c] + bn.eps);
    const Real mean = bn.running_mean[c];
    const Real gamma = bn.scale.value[c];
    const Real beta = bn.shift.value[c];
    auto src = input.channel(c);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - mean) * inv_std * gamma + beta;
  }
  return out;
}

template <class Real>
void relu_inplace(Tensor3<Real>& x) {
  for (auto& v : x.data()) v = v > Real(0) ? v : Real(0);
}

template <class Real>
Real softplus(Real t) {
  return std::max(t, Real(0)) + std::log1p(std::exp(-std::abs(t)));
}

template <class Real>
Real logistic_loss(const Tensor3<Real>& response, const Tensor3<Real>& labels) {
  require_same_shape(response.shape(), labels.shape(), "logistic_loss");
  std::size_t positives = 0;
  for (Real l : labels.data()) {
    if (l != Real(1) && l != Real(-1)) throw std::invalid_argument("labels must be +1 or -1");
    if (l > 0) ++positives;
  }
  const std::size_t negatives = labels.size() - positives;
  const Real wp = positives ? (negatives ? Real(0.5) : Real(1)) / static_cast<Real>(positives) : 0;
  const Real wn = negatives ? (positives ? Real(0.5) : Real(1)) / static_cast<Real>(negatives) : 0;
  Real loss = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Real l = labels.data()[i];
    loss += (l > 0 ? wp : wn) * softplus(-l * response.data()[i]);
  }
  return loss;
}

#define SDTRACK_INSTANTIATE(Real)                                                              \
  template struct ConvLayer<Real>;                                                             \
  template struct BatchNorm<Real>;                                                             \
  template Tensor3<Real> conv2d(const Tensor3<Real>&, const ConvLayer<Real>&, kernels::Variant); \
  template Tensor3<Real> xcorr(const Tensor3<Real>&, const Tensor3<Real>&, kernels::Variant);   \
  template std::vector<Tensor3<Real>> batchnorm(std::span<const Tensor3<Real>>,                 \
                                                BatchNorm<Real>&, BnMode);                     \
  template Tensor3<Real> batchnorm_eval(const Tensor3<Real>&, const BatchNorm<Real>&);          \
  template void relu_inplace(Tensor3<Real>&);                                                  \
  template Real softplus(Real);                                                                \
  template Real logistic_loss(const Tensor3<Real>&, const Tensor3<Real>&);

SDTRACK_INSTANTIATE(float)
SDTRACK_INSTANTIATE(double)
#undef SDTRACK_INSTANTIATE

}  // namespace sdtrack
