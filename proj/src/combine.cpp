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
#include "sdtrack/combine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "sdtrack/ops.hpp"

namespace sdtrack {

std::size_t select_channel_explicit(std::span<const PassOutput> passes, double alpha_c) {
  if (passes.empty()) throw std::invalid_argument("combine: no passes");
  if (!(alpha_c >= 0.0 && alpha_c <= 1.0)) {
    throw std::invalid_argument("combine: alpha_c must lie in [0, 1]");
  }
  std::vector<std::size_t> order(passes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return passes[a].decoded.score > passes[b].decoded.score;
  });

  std::vector<bool> assigned(passes.size(), false);
  std::size_t best_seed = order.front();
  std::size_t best_size = 0;
  for (std::size_t seed : order) {
    if (assigned[seed]) continue;
    assigned[seed] = true;
    std::size_t size = 1;
    for (std::size_t j : order) {
      if (assigned[j]) continue;
      if (iou(passes[seed].decoded.bbox, passes[j].decoded.bbox) > alpha_c) {
        assigned[j] = true;
        ++size;
      }
    }
    // Clusters are seeded in score order, so the first of equal size wins.
    if (size > best_size) {
      best_size = size;
      best_seed = seed;
    }
  }
  return best_seed;
}

Prediction combine_channel_explicit(std::span<const PassOutput> passes, double alpha_c) {
  return passes[select_channel_explicit(passes, alpha_c)].decoded;
}

double rescaled_score(const PassOutput& pass, double boost) {
  const double dropped = pass.mask.kind() == MaskKind::none ? 0.0 : pass.mask.dropped_fraction();
  if (!(dropped < 1.0)) throw std::invalid_argument("combine: mask drops the whole code");
  return boost / (1.0 - dropped) * pass.decoded.score;
}

std::size_t select_patch_explicit(std::span<const PassOutput> passes, double boost) {
  if (passes.empty()) throw std::invalid_argument("combine: no passes");
  if (!(boost > 0.0 && boost <= 1.0)) throw std::invalid_argument("combine: B must lie in (0, 1]");
  std::size_t best = 0;
  double best_score = rescaled_score(passes[0], boost);
  for (std::size_t i = 1; i < passes.size(); ++i) {
    const double s = rescaled_score(passes[i], boost);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

Prediction combine_patch_explicit(std::span<const PassOutput> passes, double boost) {
  const std::size_t i = select_patch_explicit(passes, boost);
  Prediction out = passes[i].decoded;
  out.score = rescaled_score(passes[i], boost);
  return out;
}

template <class Real>
EncoderHead<Real>::EncoderHead(std::size_t passes, std::uint64_t seed)
    : project("head.project", passes, kHidden, 1, 1),
      project_bn("head.project_bn", kHidden),
      collapse("head.collapse", kHidden, 1, 1, 1),
      collapse_bn("head.collapse_bn", 1) {
  if (passes == 0) throw std::invalid_argument("encoder head needs at least one pass");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> small(-0.1, 0.1);
  auto& w = project.weight.value;
  for (std::size_t h = 0; h < kHidden; ++h) {
    for (std::size_t i = 0; i < passes; ++i) {
      Real v = 0;
      if (h >= 2) v = static_cast<Real>(small(rng));
      w[h * passes + i] = v;
    }
  }
  w[0 * passes] = Real(1);
  w[1 * passes] = Real(-1);
  collapse.weight.value = {Real(1), Real(-1), static_cast<Real>(small(rng)),
                           static_cast<Real>(small(rng))};
}

template <class Real>
EncoderHead<Real> EncoderHead<Real>::averaging(std::size_t passes) {
  EncoderHead head(passes, 0);
  auto& w = head.project.weight.value;
  std::fill(w.begin(), w.end(), Real(0));
  const Real share = Real(1) / static_cast<Real>(passes);
  for (std::size_t i = 0; i < passes; ++i) {
    w[0 * passes + i] = share;
    w[1 * passes + i] = -share;
  }
  head.collapse.weight.value = {Real(1), Real(-1), Real(0), Real(0)};
  head.project_bn.eps = 0;
  head.collapse_bn.eps = 0;
  return head;
}

template <class Real>
Tensor3<Real> EncoderHead<Real>::aggregate(const Tensor3<Real>& stacked) const {
  Tensor3<Real> hidden = batchnorm_eval(conv2d(stacked, project), project_bn);
  relu_inplace(hidden);
  return batchnorm_eval(conv2d(hidden, collapse), collapse_bn);
}

template <class Real>
typename Tape<Real>::Var EncoderHead<Real>::aggregate(Tape<Real>& tape,
                                                      typename Tape<Real>::Var stacked,
                                                      BnMode mode) {
  auto h = tape.relu(tape.batchnorm(tape.conv2d(stacked, project), project_bn, mode));
  return tape.batchnorm(tape.conv2d(h, collapse), collapse_bn, mode);
}

template <class Real>
std::uint64_t EncoderHead<Real>::macs(std::size_t height, std::size_t width) const {
  return static_cast<std::uint64_t>(height * width) * (passes() * kHidden + kHidden);
}

template <class Real>
std::vector<Param<Real>*> EncoderHead<Real>::params() {
  return {&project.weight,    &project.bias,   &project_bn.scale,  &project_bn.shift,
          &collapse.weight,   &collapse.bias,  &collapse_bn.scale, &collapse_bn.shift};
}

template <class Real>
Tensor3<Real> encode_aggregate(const Tensor3<Real>& stacked, const EncoderHead<Real>& head) {
  if (stacked.channels() != head.passes()) {
    throw ShapeError("encode_aggregate: " + std::to_string(stacked.channels()) +
                     " stacked maps for a head built for " + std::to_string(head.passes()));
  }
  return head.aggregate(stacked);
}

template class EncoderHead<float>;
template class EncoderHead<double>;
template Tensor3<float> encode_aggregate(const Tensor3<float>&, const EncoderHead<float>&);
template Tensor3<double> encode_aggregate(const Tensor3<double>&, const EncoderHead<double>&);

FeatureMap stack_maps(std::span<const FeatureMap> maps) {
  if (maps.empty()) throw std::invalid_argument("stack_maps: no maps");
  const Shape3 first = maps.front().shape();
  FeatureMap out(maps.size(), first.height, first.width);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].channels() != 1 || maps[i].height() != first.height ||
        maps[i].width() != first.width) {
      throw ShapeError("stack_maps: map " + std::to_string(i) + " has shape " +
                       to_string(maps[i].shape()) + ", expected 1x" +
                       std::to_string(first.height) + "x" + std::to_string(first.width));
    }
    std::copy(maps[i].data().begin(), maps[i].data().end(), out.channel(i).begin());
  }
  return out;
}

namespace {

double keys_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Resamples one axis: out[i] = sum_k w(i / f - k) * in[k], indices clamped.
std::vector<double> upsample_axis(std::span<const double> in, std::size_t factor) {
  const std::size_t n = in.size();
  const std::size_t m = (n - 1) * factor + 1;
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double pos = static_cast<double>(i) / static_cast<double>(factor);
    const auto base = static_cast<long>(std::floor(pos));
    double acc = 0;
    for (long k = base - 1; k <= base + 2; ++k) {
      const long idx = std::clamp(k, 0L, static_cast<long>(n) - 1);
      acc += keys_weight(pos - static_cast<double>(k)) * in[static_cast<std::size_t>(idx)];
    }
    out[i] = acc;
  }
  return out;
}

double sigmoid(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace

FeatureMap upsample_bicubic(const FeatureMap& map, std::size_t factor) {
  if (map.channels() != 1) throw ShapeError("upsample: expects a single-channel map");
  if (factor <= 1) return map;
  const std::size_t h = map.height();
  const std::size_t w = map.width();
  const std::size_t uh = (h - 1) * factor + 1;
  const std::size_t uw = (w - 1) * factor + 1;
  std::vector<double> rows(h * uw);
  std::vector<double> line(w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) line[x] = map(0, y, x);
    const auto up = upsample_axis(line, factor);
    std::copy(up.begin(), up.end(), rows.begin() + static_cast<long>(y * uw));
  }
  FeatureMap out(1, uh, uw);
  std::vector<double> column(h);
  for (std::size_t x = 0; x < uw; ++x) {
    for (std::size_t y = 0; y < h; ++y) column[y] = rows[y * uw + x];
    const auto up = upsample_axis(column, factor);
    for (std::size_t y = 0; y < uh; ++y) out(0, y, x) = static_cast<float>(up[y]);
  }
  return out;
}

std::vector<double> hann_window(std::size_t height, std::size_t width) {
  auto axis = [](std::size_t n) {
    std::vector<double> v(n, 1.0);
    if (n < 2) return v;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
    }
    return v;
  };
  const auto hy = axis(height);
  const auto hx = axis(width);
  std::vector<double> out(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) out[y * width + x] = hy[y] * hx[x];
  }
  return out;
}

DecodedPeak decode_peak(const FeatureMap& response, const DecodeGeometry& g) {
  if (response.channels() != 1 || response.empty()) {
    throw ShapeError("decode: expects a non-empty single-channel response, got " +
                     to_string(response.shape()));
  }
  const FeatureMap up = upsample_bicubic(response, g.upsample);
  const std::size_t uh = up.height();
  const std::size_t uw = up.width();
  const auto values = up.data();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double mn = *lo;
  const double mx = *hi;
  const double center_y = static_cast<double>(uh - 1) / 2.0;
  const double center_x = static_cast<double>(uw - 1) / 2.0;

  DecodedPeak out;
  double py = center_y;
  double px = center_x;
  std::size_t chosen = (uh / 2) * uw + uw / 2;
  if (!(mx > mn) || !std::isfinite(mx - mn)) {
    out.prediction.degenerate = true;
  } else {
    const auto window = hann_window(uh, uw);
    const double lambda = g.window_influence;
    double best = -1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double p = (1.0 - lambda) * (values[i] - mn) / (mx - mn) + lambda * window[i];
      if (p > best) {
        best = p;
        chosen = i;
      }
    }
    py = static_cast<double>(chosen / uw);
    px = static_cast<double>(chosen % uw);
  }
  const double cell = static_cast<double>(g.stride) / static_cast<double>(std::max<std::size_t>(1, g.upsample));
  out.dy_patch = (py - center_y) * cell;
  out.dx_patch = (px - center_x) * cell;
  const double to_frame = g.crop_side / static_cast<double>(g.search_size);
  out.raw_peak = values[chosen];
  out.prediction.bbox = BBox::from_center(g.center_x + out.dx_patch * to_frame,
                                          g.center_y + out.dy_patch * to_frame, g.target_w,
                                          g.target_h);
  out.prediction.score = sigmoid(out.raw_peak);
  return out;
}

Prediction decode(const FeatureMap& response, const DecodeGeometry& geometry) {
  return decode_peak(response, geometry).prediction;
}

}  // namespace sdtrack
