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
// Reference against OpenMP kernels on the backbone's layer shapes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sdtrack/kernels.hpp"
#include "sdtrack/ops.hpp"

namespace {

using sdtrack::kernels::ConvGeometry;
using sdtrack::kernels::Variant;

// Search-branch layers of the default backbone, 128 px input.
const ConvGeometry kLayers[] = {
    {3, 128, 128, 16, 3, 3, 2, 1},
    {16, 63, 63, 32, 3, 3, 2, 1},
    {32, 31, 31, 32, 3, 3, 2, 1},
    {32, 15, 15, 64, 3, 3, 1, 1},
};

std::vector<float> random_buffer(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1, 1);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void set_counters(benchmark::State& state, const ConvGeometry& g) {
  state.counters["MACs"] = benchmark::Counter(static_cast<double>(g.macs()) * static_cast<double>(state.iterations()),
                                              benchmark::Counter::kIsRate);
}

template <Variant V>
void BM_Conv2dForward(benchmark::State& state) {
  const ConvGeometry& g = kLayers[state.range(0)];
  const auto in = random_buffer(g.input_size(), 1);
  const auto w = random_buffer(g.weight_size(), 2);
  const auto b = random_buffer(g.out_channels, 3);
  std::vector<float> out(g.output_size());
  for (auto _ : state) {
    sdtrack::kernels::conv2d<float>(V, in, w, b, g, out);
    benchmark::DoNotOptimize(out.data());
  }
  set_counters(state, g);
}

template <Variant V>
void BM_Conv2dBackwardInput(benchmark::State& state) {
  const ConvGeometry& g = kLayers[state.range(0)];
  const auto grad_out = random_buffer(g.output_size(), 4);
  const auto w = random_buffer(g.weight_size(), 5);
  std::vector<float> grad_in(g.input_size());
  for (auto _ : state) {
    sdtrack::kernels::conv2d_backward_input<float>(V, grad_out, w, g, grad_in);
    benchmark::DoNotOptimize(grad_in.data());
  }
  set_counters(state, g);
}

template <Variant V>
void BM_Conv2dBackwardWeight(benchmark::State& state) {
  const ConvGeometry& g = kLayers[state.range(0)];
  const auto grad_out = random_buffer(g.output_size(), 6);
  const auto in = random_buffer(g.input_size(), 7);
  std::vector<float> grad_w(g.weight_size()), grad_b(g.out_channels);
  for (auto _ : state) {
    sdtrack::kernels::conv2d_backward_weight<float>(V, grad_out, in, g, grad_w, grad_b);
    benchmark::DoNotOptimize(grad_w.data());
  }
  set_counters(state, g);
}

// 64 x 5 x 5 exemplar code over a 64 x 13 x 13 search code.
template <Variant V>
void BM_Xcorr(benchmark::State& state) {
  sdtrack::Tensor3<float> target(64, 5, 5), search(64, 13, 13);
  const auto t = random_buffer(target.size(), 8), s = random_buffer(search.size(), 9);
  std::copy(t.begin(), t.end(), target.data().begin());
  std::copy(s.begin(), s.end(), search.data().begin());
  for (auto _ : state) {
    auto out = sdtrack::xcorr(target, search, V);
    benchmark::DoNotOptimize(out.data().data());
  }
  set_counters(state, sdtrack::xcorr_geometry(target.shape(), search.shape()));
}

}  // namespace

BENCHMARK(BM_Conv2dForward<Variant::reference>)->DenseRange(0, 3);
BENCHMARK(BM_Conv2dForward<Variant::parallel>)->DenseRange(0, 3);
BENCHMARK(BM_Conv2dBackwardInput<Variant::reference>)->DenseRange(0, 3);
BENCHMARK(BM_Conv2dBackwardInput<Variant::parallel>)->DenseRange(0, 3);
BENCHMARK(BM_Conv2dBackwardWeight<Variant::reference>)->DenseRange(0, 3);
BENCHMARK(BM_Conv2dBackwardWeight<Variant::parallel>)->DenseRange(0, 3);
BENCHMARK(BM_Xcorr<Variant::reference>);
BENCHMARK(BM_Xcorr<Variant::parallel>);

BENCHMARK_MAIN();
