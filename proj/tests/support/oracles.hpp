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

// Scalar-loop oracles written from the formulas, independent of the kernels
// under test. Everything is computed in double over plain vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "sdtrack/layers.hpp"
#include "sdtrack/tensor.hpp"

namespace sdtrack::testing {

/// Plain (c, y, x) array in double.
struct Grid {
  std::size_t c = 0, h = 0, w = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(std::size_t c_, std::size_t h_, std::size_t w_) : c(c_), h(h_), w(w_), v(c_ * h_ * w_, 0.0) {}
  double& at(std::size_t k, std::size_t y, std::size_t x) { return v[(k * h + y) * w + x]; }
  double at(std::size_t k, std::size_t y, std::size_t x) const { return v[(k * h + y) * w + x]; }
};

template <class Real>
Grid to_grid(const Tensor3<Real>& t) {
  Grid g(t.channels(), t.height(), t.width());
  for (std::size_t k = 0; k < g.c; ++k)
    for (std::size_t y = 0; y < g.h; ++y)
      for (std::size_t x = 0; x < g.w; ++x) g.at(k, y, x) = static_cast<double>(t(k, y, x));
  return g;
}

template <class Real>
Tensor3<Real> random_tensor(std::mt19937_64& rng, std::size_t c, std::size_t h, std::size_t w,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor3<Real> t(c, h, w);
  for (auto& x : t.data()) x = static_cast<Real>(u(rng));
  return t;
}

template <class Real>
void randomize(Param<Real>& p, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& x : p.value) x = static_cast<Real>(u(rng));
}

/// Grouped valid-mode convolution straight from its definition.
template <class Real>
Grid naive_conv(const Grid& in, const ConvLayer<Real>& layer) {
  const std::size_t oh = (in.h - layer.kernel_h) / layer.stride + 1;
  const std::size_t ow = (in.w - layer.kernel_w) / layer.stride + 1;
  const std::size_t ipg = layer.in_channels / layer.groups;
  const std::size_t opg = layer.out_channels / layer.groups;
  Grid out(layer.out_channels, oh, ow);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    const std::size_t group = o / opg;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double s = layer.bias.value.empty() ? 0.0 : static_cast<double>(layer.bias.value[o]);
        for (std::size_t i = 0; i < ipg; ++i) {
          for (std::size_t ky = 0; ky < layer.kernel_h; ++ky) {
            for (std::size_t kx = 0; kx < layer.kernel_w; ++kx) {
              const std::size_t widx = ((o * ipg + i) * layer.kernel_h + ky) * layer.kernel_w + kx;
              s += static_cast<double>(layer.weight.value[widx]) *
                   in.at(group * ipg + i, y * layer.stride + ky, x * layer.stride + kx);
            }
          }
        }
        out.at(o, y, x) = s;
      }
    }
  }
  return out;
}

/// Sliding-window dot product summed over channels.
inline Grid naive_xcorr(const Grid& target, const Grid& search) {
  Grid out(1, search.h - target.h + 1, search.w - target.w + 1);
  for (std::size_t u = 0; u < out.h; ++u) {
    for (std::size_t v = 0; v < out.w; ++v) {
      double s = 0;
      for (std::size_t k = 0; k < target.c; ++k)
        for (std::size_t dy = 0; dy < target.h; ++dy)
          for (std::size_t dx = 0; dx < target.w; ++dx)
            s += target.at(k, dy, dx) * search.at(k, u + dy, v + dx);
      out.at(0, u, v) = s;
    }
  }
  return out;
}

/// Train-mode batchnorm over a batch: biased variance over batch and space.
template <class Real>
std::vector<Grid> naive_bn_train(const std::vector<Grid>& batch, const BatchNorm<Real>& bn) {
  std::vector<Grid> out = batch;
  for (std::size_t k = 0; k < bn.channels; ++k) {
    double sum = 0, count = 0;
    for (const auto& g : batch)
      for (std::size_t y = 0; y < g.h; ++y)
        for (std::size_t x = 0; x < g.w; ++x) sum += g.at(k, y, x), count += 1;
    const double mean = sum / count;
    double sq = 0;
    for (const auto& g : batch)
      for (std::size_t y = 0; y < g.h; ++y)
        for (std::size_t x = 0; x < g.w; ++x) sq += (g.at(k, y, x) - mean) * (g.at(k, y, x) - mean);
    const double var = sq / count;
    for (auto& g : out)
      for (std::size_t y = 0; y < g.h; ++y)
        for (std::size_t x = 0; x < g.w; ++x)
          g.at(k, y, x) = static_cast<double>(bn.scale.value[k]) * (g.at(k, y, x) - mean) /
                              std::sqrt(var + static_cast<double>(bn.eps)) +
                          static_cast<double>(bn.shift.value[k]);
  }
  return out;
}

template <class Real>
Grid naive_bn_eval(const Grid& in, const BatchNorm<Real>& bn) {
  Grid out = in;
  for (std::size_t k = 0; k < in.c; ++k)
    for (std::size_t y = 0; y < in.h; ++y)
      for (std::size_t x = 0; x < in.w; ++x)
        out.at(k, y, x) = static_cast<double>(bn.scale.value[k]) *
                              (in.at(k, y, x) - static_cast<double>(bn.running_mean[k])) /
                              std::sqrt(static_cast<double>(bn.running_var[k]) +
                                        static_cast<double>(bn.eps)) +
                          static_cast<double>(bn.shift.value[k]);
  return out;
}

/// Balanced logistic loss: positives and negatives each carry half of the
/// total weight; a map with only one class weighs its cells uniformly.
inline double naive_logistic_loss(const Grid& r, const Grid& labels) {
  double pos = 0, neg = 0;
  for (double l : labels.v) (l > 0 ? pos : neg) += 1;
  double total = 0;
  for (std::size_t i = 0; i < r.v.size(); ++i) {
    const double l = labels.v[i];
    double weight;
    if (pos == 0 || neg == 0) {
      weight = 1.0 / static_cast<double>(r.v.size());
    } else {
      weight = l > 0 ? 0.5 / pos : 0.5 / neg;
    }
    total += weight * std::log1p(std::exp(-l * r.v[i]));
  }
  return total;
}

/// |a - b| <= rtol * max|b| elementwise (scale-relative comparison).
inline double max_abs(const Grid& g) {
  double m = 0;
  for (double x : g.v) m = std::max(m, std::abs(x));
  return m;
}

inline bool close_scaled(const Grid& a, const Grid& b, double rtol) {
  if (a.c != b.c || a.h != b.h || a.w != b.w) return false;
  const double scale = std::max(max_abs(b), 1e-30);
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (std::abs(a.v[i] - b.v[i]) > rtol * scale) return false;
  }
  return true;
}

}  // namespace sdtrack::testing
