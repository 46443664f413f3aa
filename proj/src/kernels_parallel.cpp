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
#include <algorithm>
#include <vector>

#include <omp.h>

#include "sdtrack/kernels.hpp"

namespace sdtrack::kernels::parallel {
namespace {

// Strided inputs are rearranged once into per-(channel, kx) phase planes so
// that every inner loop below runs over contiguous memory:
//   phase[ic][kx][y][ox] = in[ic][y][ox * stride + kx]
// With stride 1 the input rows are used directly.
template <class Real>
class RowSource {
 public:
  RowSource(std::span<const Real> in, const ConvGeometry& g) : in_(in), g_(g) {
    if (g.stride == 1) return;
    const std::size_t ow = g.out_width();
    phase_.resize(g.in_channels * g.kernel_w * g.in_height * ow);
    for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
      for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
        for (std::size_t y = 0; y < g.in_height; ++y) {
          Real* dst = phase_.data() + ((ic * g.kernel_w + kx) * g.in_height + y) * ow;
          const Real* src = in.data() + (ic * g.in_height + y) * g.in_width + kx;
          for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] = src[ox * g.stride];
        }
      }
    }
  }

  // Row of out_width() contiguous values feeding tap kx at input row y.
  const Real* row(std::size_t ic, std::size_t kx, std::size_t y) const {
    if (g_.stride == 1) return in_.data() + (ic * g_.in_height + y) * g_.in_width + kx;
    return phase_.data() + ((ic * g_.kernel_w + kx) * g_.in_height + y) * g_.out_width();
  }

 private:
  std::span<const Real> in_;
  const ConvGeometry& g_;
  std::vector<Real> phase_;
};

template <class Real>
inline void axpy(std::size_t n, Real a, const Real* __restrict x, Real* __restrict y) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class Real>
inline Real dot(std::size_t n, const Real* __restrict x, const Real* __restrict y) {
  Real acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

template <class Real>
void conv2d(std::span<const Real> in, std::span<const Real> weight, std::span<const Real> bias,
            const ConvGeometry& g, std::span<Real> out) {
  const RowSource<Real> rows(in, g);
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const std::size_t ipg = g.in_per_group();
  const std::size_t opg = g.out_per_group();
  const auto out_channels = static_cast<std::ptrdiff_t>(g.out_channels);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t oc_i = 0; oc_i < out_channels; ++oc_i) {
    const auto oc = static_cast<std::size_t>(oc_i);
    Real* plane = out.data() + oc * oh * ow;
    std::fill(plane, plane + oh * ow, bias.empty() ? Real(0) : bias[oc]);
    const std::size_t group = oc / opg;
    for (std::size_t icg = 0; icg < ipg; ++icg) {
      const std::size_t ic = group * ipg + icg;
      const Real* w = weight.data() + (oc * ipg + icg) * g.kernel_h * g.kernel_w;
      for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
        for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
          const Real wv = w[ky * g.kernel_w + kx];
          for (std::size_t oy = 0; oy < oh; ++oy) {
            axpy(ow, wv, rows.row(ic, kx, oy * g.stride + ky), plane + oy * ow);
          }
        }
      }
    }
  }
}

template <class Real>
void conv2d_backward_input(std::span<const Real> grad_out, std::span<const Real> weight,
                           const ConvGeometry& g, std::span<Real> grad_in) {
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const std::size_t ipg = g.in_per_group();
  const std::size_t opg = g.out_per_group();
  const auto in_channels = static_cast<std::ptrdiff_t>(g.in_channels);

#pragma omp parallel
  {
    // Per-thread phase accumulator for strided layers, scattered at the end.
    std::vector<Real> acc(g.stride == 1 ? 0 : g.kernel_w * g.in_height * ow);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ic_i = 0; ic_i < in_channels; ++ic_i) {
      const auto ic = static_cast<std::size_t>(ic_i);
      const std::size_t group = ic / ipg;
      const std::size_t icg = ic % ipg;
      Real* gin = grad_in.data() + ic * g.in_height * g.in_width;
      std::fill(acc.begin(), acc.end(), Real(0));
      for (std::size_t ocg = 0; ocg < opg; ++ocg) {
        const std::size_t oc = group * opg + ocg;
        const Real* w = weight.data() + (oc * ipg + icg) * g.kernel_h * g.kernel_w;
        const Real* go = grad_out.data() + oc * oh * ow;
        for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
          for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
            const Real wv = w[ky * g.kernel_w + kx];
            for (std::size_t oy = 0; oy < oh; ++oy) {
              const std::size_t iy = oy * g.stride + ky;
              Real* dst = g.stride == 1 ? gin + iy * g.in_width + kx
                                        : acc.data() + (kx * g.in_height + iy) * ow;
              axpy(ow, wv, go + oy * ow, dst);
            }
          }
        }
      }
      if (g.stride != 1) {
        for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
          for (std::size_t y = 0; y < g.in_height; ++y) {
            const Real* src = acc.data() + (kx * g.in_height + y) * ow;
            Real* dst = gin + y * g.in_width + kx;
            for (std::size_t ox = 0; ox < ow; ++ox) dst[ox * g.stride] += src[ox];
          }
        }
      }
    }
  }
}

template <class Real>
void conv2d_backward_weight(std::span<const Real> grad_out, std::span<const Real> in,
                            const ConvGeometry& g, std::span<Real> grad_weight,
                            std::span<Real> grad_bias) {
  const RowSource<Real> rows(in, g);
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const std::size_t ipg = g.in_per_group();
  const std::size_t opg = g.out_per_group();
  const auto out_channels = static_cast<std::ptrdiff_t>(g.out_channels);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t oc_i = 0; oc_i < out_channels; ++oc_i) {
    const auto oc = static_cast<std::size_t>(oc_i);
    const Real* go = grad_out.data() + oc * oh * ow;
    if (!grad_bias.empty()) {
      Real sum = 0;
      for (std::size_t i = 0; i < oh * ow; ++i) sum += go[i];
      grad_bias[oc] += sum;
    }
    const std::size_t group = oc / opg;
    for (std::size_t icg = 0; icg < ipg; ++icg) {
      const std::size_t ic = group * ipg + icg;
      Real* gw = grad_weight.data() + (oc * ipg + icg) * g.kernel_h * g.kernel_w;
      for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
        for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
          Real sum = 0;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            sum += dot(ow, go + oy * ow, rows.row(ic, kx, oy * g.stride + ky));
          }
          gw[ky * g.kernel_w + kx] += sum;
        }
      }
    }
  }
}

template void conv2d<float>(std::span<const float>, std::span<const float>,
                            std::span<const float>, const ConvGeometry&, std::span<float>);
template void conv2d<double>(std::span<const double>, std::span<const double>,
                             std::span<const double>, const ConvGeometry&, std::span<double>);
template void conv2d_backward_input<float>(std::span<const float>, std::span<const float>,
                                           const ConvGeometry&, std::span<float>);
template void conv2d_backward_input<double>(std::span<const double>, std::span<const double>,
                                            const ConvGeometry&, std::span<double>);
template void conv2d_backward_weight<float>(std::span<const float>, std::span<const float>,
                                            const ConvGeometry&, std::span<float>,
                                            std::span<float>);
template void conv2d_backward_weight<double>(std::span<const double>, std::span<const double>,
                                             const ConvGeometry&, std::span<double>,
                                             std::span<double>);

}  // namespace sdtrack::kernels::parallel
