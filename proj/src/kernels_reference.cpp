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
#include "sdtrack/kernels.hpp"

namespace sdtrack::kernels::reference {

template <class Real>
void conv2d(std::span<const Real> in, std::span<const Real> weight, std::span<const Real> bias,
            const ConvGeometry& g, std::span<Real> out) {
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const std::size_t ipg = g.in_per_group();
  const std::size_t opg = g.out_per_group();
  for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
    const std::size_t group = oc / opg;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        Real acc = bias.empty() ? Real(0) : bias[oc];
        for (std::size_t icg = 0; icg < ipg; ++icg) {
          const std::size_t ic = group * ipg + icg;
          for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
            for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
              const std::size_t iy = oy * g.stride + ky;
              const std::size_t ix = ox * g.stride + kx;
              acc += weight[((oc * ipg + icg) * g.kernel_h + ky) * g.kernel_w + kx] *
                     in[(ic * g.in_height + iy) * g.in_width + ix];
            }
          }
        }
        out[(oc * oh + oy) * ow + ox] = acc;
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
  for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
    const std::size_t group = oc / opg;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const Real go = grad_out[(oc * oh + oy) * ow + ox];
        for (std::size_t icg = 0; icg < ipg; ++icg) {
          const std::size_t ic = group * ipg + icg;
          for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
            for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
              const std::size_t iy = oy * g.stride + ky;
              const std::size_t ix = ox * g.stride + kx;
              grad_in[(ic * g.in_height + iy) * g.in_width + ix] +=
                  go * weight[((oc * ipg + icg) * g.kernel_h + ky) * g.kernel_w + kx];
            }
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
  const std::size_t oh = g.out_height();
  const std::size_t ow = g.out_width();
  const std::size_t ipg = g.in_per_group();
  const std::size_t opg = g.out_per_group();
  for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
    const std::size_t group = oc / opg;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const Real go = grad_out[(oc * oh + oy) * ow + ox];
        if (!grad_bias.empty()) grad_bias[oc] += go;
        for (std::size_t icg = 0; icg < ipg; ++icg) {
          const std::size_t ic = group * ipg + icg;
          for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
            for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
              const std::size_t iy = oy * g.stride + ky;
              const std::size_t ix = ox * g.stride + kx;
              grad_weight[((oc * ipg + icg) * g.kernel_h + ky) * g.kernel_w + kx] +=
                  go * in[(ic * g.in_height + iy) * g.in_width + ix];
            }
          }
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

}  // namespace sdtrack::kernels::reference
