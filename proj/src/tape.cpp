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
#include "sdtrack/tape.hpp"

#include <cmath>
#include <string>

#include "sdtrack/ops.hpp"

namespace sdtrack {

template <class Real>
typename Tape<Real>::Var Tape<Real>::push(Batch value, bool needs_grad,
                                          std::function<void()> backward) {
  if (consumed_) throw TapeError("tape already consumed by backward()");
  nodes_.push_back(Node{std::move(value), {}, needs_grad, std::move(backward)});
  return Var{nodes_.size() - 1};
}

template <class Real>
typename Tape<Real>::Node& Tape<Real>::node(Var v) {
  if (!v.valid() || v.index >= nodes_.size()) throw TapeError("variable not on this tape");
  return nodes_[v.index];
}

template <class Real>
const typename Tape<Real>::Node& Tape<Real>::node(Var v) const {
  if (!v.valid() || v.index >= nodes_.size()) throw TapeError("variable not on this tape");
  return nodes_[v.index];
}

template <class Real>
typename Tape<Real>::Batch& Tape<Real>::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.empty()) {
    n.grad.reserve(n.value.size());
    for (const auto& m : n.value) n.grad.emplace_back(m.shape());
  }
  return n.grad;
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::leaf(Batch value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

template <class Real>
const typename Tape<Real>::Batch& Tape<Real>::value(Var v) const {
  return node(v).value;
}

template <class Real>
const typename Tape<Real>::Batch& Tape<Real>::grad(Var v) const {
  const Node& n = node(v);
  if (!consumed_) throw TapeError("gradients requested before backward()");
  if (!n.needs_grad) throw TapeError("variable does not require gradients");
  return n.grad;
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::conv2d(Var x, ConvLayer<Real>& layer) {
  const Batch& in = value(x);
  Batch out;
  out.reserve(in.size());
  for (const auto& m : in) out.push_back(sdtrack::conv2d(m, layer, variant_));
  const bool params = layer.weight.trainable || layer.bias.trainable;
  const bool needs = node(x).needs_grad || params;
  Var y{nodes_.size()};
  return push(std::move(out), needs, [this, x, y, &layer]() {
    const Batch& gout = node(y).grad;
    const Batch& in = node(x).value;
    const bool input_grad = node(x).needs_grad;
    Batch* gin = input_grad ? &grad_buffer(x) : nullptr;
    for (std::size_t b = 0; b < in.size(); ++b) {
      const auto g = layer.geometry(in[b].channels(), in[b].height(), in[b].width());
      if (input_grad) {
        kernels::conv2d_backward_input<Real>(variant_, gout[b].data(), layer.weight.value, g,
                                             (*gin)[b].data());
      }
      if (layer.weight.trainable) {
        layer.weight.grad.resize(layer.weight.size());
        std::span<Real> gbias;
        if (layer.bias.trainable) {
          layer.bias.grad.resize(layer.bias.size());
          gbias = layer.bias.grad;
        }
        kernels::conv2d_backward_weight<Real>(variant_, gout[b].data(), in[b].data(), g,
                                              layer.weight.grad, gbias);
      } else if (layer.bias.trainable) {
        layer.bias.grad.resize(layer.bias.size());
        for (std::size_t oc = 0; oc < gout[b].channels(); ++oc) {
          for (Real v : gout[b].channel(oc)) layer.bias.grad[oc] += v;
        }
      }
    }
  });
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::batchnorm(Var x, BatchNorm<Real>& bn, BnMode mode) {
  Batch out = sdtrack::batchnorm<Real>(value(x), bn, mode);
  const bool needs = node(x).needs_grad || bn.scale.trainable || bn.shift.trainable;
  Var y{nodes_.size()};
  return push(std::move(out), needs, [this, x, y, &bn, mode]() {
    const Batch& gout = node(y).grad;
    const Batch& in = node(x).value;
    const bool input_grad = node(x).needs_grad;
    Batch* gin = input_grad ? &grad_buffer(x) : nullptr;
    const std::size_t plane = in.front().plane();
    const std::size_t count = in.size() * plane;
    bn.scale.grad.resize(bn.channels);
    bn.shift.grad.resize(bn.channels);
    for (std::size_t c = 0; c < bn.channels; ++c) {
      Real mean = 0;
      Real inv_std = 0;
      if (mode == BnMode::train) {
        for (const auto& m : in) {
          for (Real v : m.channel(c)) mean += v;
        }
        mean /= static_cast<Real>(count);
        Real var = 0;
        for (const auto& m : in) {
          for (Real v : m.channel(c)) var += (v - mean) * (v - mean);
        }
        var /= static_cast<Real>(count);
        inv_std = Real(1) / std::sqrt(var + bn.eps);
      } else {
        mean = bn.running_mean[c];
        inv_std = Real(1) / std::sqrt(bn.running_var[c] + bn.eps);
      }
      Real sum_g = 0;
      Real sum_g_xhat = 0;
      for (std::size_t b = 0; b < in.size(); ++b) {
        auto xs = in[b].channel(c);
        auto gs = gout[b].channel(c);
        for (std::size_t i = 0; i < plane; ++i) {
          sum_g += gs[i];
          sum_g_xhat += gs[i] * (xs[i] - mean) * inv_std;
        }
      }
      if (bn.scale.trainable) bn.scale.grad[c] += sum_g_xhat;
      if (bn.shift.trainable) bn.shift.grad[c] += sum_g;
      if (!input_grad) continue;
      const Real gamma = bn.scale.value[c];
      for (std::size_t b = 0; b < in.size(); ++b) {
        auto xs = in[b].channel(c);
        auto gs = gout[b].channel(c);
        auto dst = (*gin)[b].channel(c);
        if (mode == BnMode::train) {
          const Real k = gamma * inv_std / static_cast<Real>(count);
          for (std::size_t i = 0; i < plane; ++i) {
            const Real xhat = (xs[i] - mean) * inv_std;
            dst[i] += k * (static_cast<Real>(count) * gs[i] - sum_g - xhat * sum_g_xhat);
          }
        } else {
          for (std::size_t i = 0; i < plane; ++i) dst[i] += gamma * inv_std * gs[i];
        }
      }
    }
  });
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::relu(Var x) {
  Batch out = value(x);
  for (auto& m : out) relu_inplace(m);
  Var y{nodes_.size()};
  return push(std::move(out), node(x).needs_grad, [this, x, y]() {
    const Batch& gout = node(y).grad;
    const Batch& out = node(y).value;
    Batch& gin = grad_buffer(x);
    for (std::size_t b = 0; b < out.size(); ++b) {
      auto o = out[b].data();
      auto g = gout[b].data();
      auto d = gin[b].data();
      for (std::size_t i = 0; i < o.size(); ++i) {
        if (o[i] > Real(0)) d[i] += g[i];
      }
    }
  });
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::scale_shift(Var x, Param<Real>& gain, Param<Real>& bias) {
  if (gain.size() != 1 || bias.size() != 1) {
    throw ShapeError("scale_shift expects scalar gain and bias");
  }
  Batch out = value(x);
  const Real a = gain.value[0];
  const Real c = bias.value[0];
  for (auto& m : out) {
    for (auto& v : m.data()) v = a * v + c;
  }
  const bool needs = node(x).needs_grad || gain.trainable || bias.trainable;
  Var y{nodes_.size()};
  return push(std::move(out), needs, [this, x, y, &gain, &bias]() {
    const Batch& gout = node(y).grad;
    const Batch& in = node(x).value;
    const bool input_grad = node(x).needs_grad;
    Batch* gin = input_grad ? &grad_buffer(x) : nullptr;
    Real sum_g = 0;
    Real sum_gx = 0;
    for (std::size_t b = 0; b < in.size(); ++b) {
      auto xs = in[b].data();
      auto gs = gout[b].data();
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sum_g += gs[i];
        sum_gx += gs[i] * xs[i];
        if (input_grad) (*gin)[b].data()[i] += gain.value[0] * gs[i];
      }
    }
    gain.grad.resize(1);
    bias.grad.resize(1);
    if (gain.trainable) gain.grad[0] += sum_gx;
    if (bias.trainable) bias.grad[0] += sum_g;
  });
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::masked_xcorr(Var target, Var search,
                                                  std::span<const Map> keeps) {
  const Batch& z = value(target);
  const Batch& x = value(search);
  if (z.size() != x.size()) {
    throw ShapeError("masked_xcorr: batch sizes " + std::to_string(z.size()) + " and " +
                     std::to_string(x.size()) + " differ");
  }
  for (const auto& k : keeps) {
    if (!z.empty()) require_same_shape(k.shape(), z.front().shape(), "masked_xcorr keep map");
  }
  const std::size_t passes = keeps.empty() ? 1 : keeps.size();
  Batch out;
  out.reserve(z.size());
  for (std::size_t b = 0; b < z.size(); ++b) {
    const auto g = xcorr_geometry(z[b].shape(), x[b].shape());
    Map response(passes, g.out_height(), g.out_width());
    Map masked(z[b].shape());
    for (std::size_t k = 0; k < passes; ++k) {
      const Map* used = &z[b];
      if (!keeps.empty()) {
        auto zs = z[b].data();
        auto ks = keeps[k].data();
        for (std::size_t i = 0; i < zs.size(); ++i) masked.data()[i] = zs[i] * ks[i];
        used = &masked;
      }
      kernels::conv2d<Real>(variant_, x[b].data(), used->data(), {}, g, response.channel(k));
    }
    out.push_back(std::move(response));
  }
  std::vector<Map> kept(keeps.begin(), keeps.end());
  const bool needs = node(target).needs_grad || node(search).needs_grad;
  Var y{nodes_.size()};
  return push(std::move(out), needs, [this, target, search, y, kept = std::move(kept)]() {
    const Batch& gout = node(y).grad;
    const Batch& z = node(target).value;
    const Batch& x = node(search).value;
    const bool z_grad = node(target).needs_grad;
    const bool x_grad = node(search).needs_grad;
    Batch* gz = z_grad ? &grad_buffer(target) : nullptr;
    Batch* gx = x_grad ? &grad_buffer(search) : nullptr;
    const std::size_t passes = kept.empty() ? 1 : kept.size();
    for (std::size_t b = 0; b < z.size(); ++b) {
      const auto g = xcorr_geometry(z[b].shape(), x[b].shape());
      Map masked(z[b].shape());
      Map tmp(z[b].shape());
      for (std::size_t k = 0; k < passes; ++k) {
        auto go = gout[b].channel(k);
        const Map* used = &z[b];
        if (!kept.empty()) {
          auto zs = z[b].data();
          auto ks = kept[k].data();
          for (std::size_t i = 0; i < zs.size(); ++i) masked.data()[i] = zs[i] * ks[i];
          used = &masked;
        }
        if (z_grad) {
          tmp.fill(Real(0));
          kernels::conv2d_backward_weight<Real>(variant_, go, x[b].data(), g, tmp.data(), {});
          auto dst = (*gz)[b].data();
          if (kept.empty()) {
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += tmp.data()[i];
          } else {
            auto ks = kept[k].data();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += ks[i] * tmp.data()[i];
          }
        }
        if (x_grad) {
          kernels::conv2d_backward_input<Real>(variant_, go, used->data(), g, (*gx)[b].data());
        }
      }
    }
  });
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::logistic_loss(Var response, const Batch& labels) {
  const Batch& r = value(response);
  if (r.size() != labels.size() || r.empty()) {
    throw ShapeError("logistic_loss: " + std::to_string(r.size()) + " responses vs " +
                     std::to_string(labels.size()) + " label maps");
  }
  Real total = 0;
  for (std::size_t b = 0; b < r.size(); ++b) total += sdtrack::logistic_loss(r[b], labels[b]);
  Batch out;
  out.emplace_back(1, 1, 1, total / static_cast<Real>(r.size()));
  Var y{nodes_.size()};
  return push(std::move(out), node(response).needs_grad, [this, response, y, labels]() {
    const Real g = node(y).grad.front().data()[0];
    const Batch& r = node(response).value;
    Batch& gin = grad_buffer(response);
    const Real scale = g / static_cast<Real>(r.size());
    for (std::size_t b = 0; b < r.size(); ++b) {
      auto ls = labels[b].data();
      std::size_t positives = 0;
      for (Real l : ls) positives += l > 0 ? 1 : 0;
      const std::size_t negatives = ls.size() - positives;
      const Real wp =
          positives ? (negatives ? Real(0.5) : Real(1)) / static_cast<Real>(positives) : 0;
      const Real wn =
          negatives ? (positives ? Real(0.5) : Real(1)) / static_cast<Real>(negatives) : 0;
      auto vs = r[b].data();
      auto ds = gin[b].data();
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const Real l = ls[i];
        const Real t = -l * vs[i];
        const Real sigmoid = t >= 0 ? Real(1) / (Real(1) + std::exp(-t))
                                    : std::exp(t) / (Real(1) + std::exp(t));
        ds[i] += scale * (l > 0 ? wp : wn) * (-l) * sigmoid;
      }
    }
  });
}

template <class Real>
typename Tape<Real>::Var Tape<Real>::sum(Var x) {
  Real total = 0;
  for (const auto& m : value(x)) {
    for (Real v : m.data()) total += v;
  }
  Batch out;
  out.emplace_back(1, 1, 1, total);
  Var y{nodes_.size()};
  return push(std::move(out), node(x).needs_grad, [this, x, y]() {
    const Real g = node(y).grad.front().data()[0];
    for (auto& m : grad_buffer(x)) {
      for (auto& v : m.data()) v += g;
    }
  });
}

template <class Real>
void Tape<Real>::backward(Var loss) {
  if (consumed_) throw TapeError("backward() called twice; double backward is unsupported");
  if (nodes_.empty() || !loss.valid() || loss.index >= nodes_.size()) {
    throw TapeError("backward() without a recorded forward pass");
  }
  Node& root = nodes_[loss.index];
  if (root.value.size() != 1 || root.value.front().size() != 1) {
    throw TapeError("backward() needs a scalar loss");
  }
  consumed_ = true;
  if (!root.needs_grad) return;
  grad_buffer(loss).front().data()[0] = Real(1);
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || !n.backward || n.grad.empty()) continue;
    n.backward();
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace sdtrack
