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
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sdtrack/backbone.hpp"
#include "sdtrack/model.hpp"
#include "sdtrack/ops.hpp"

using namespace sdtrack;
using namespace sdtrack::testing;

namespace {

// Valid-mode shape arithmetic applied block by block.
std::size_t shape_oracle(std::size_t n, const BackboneConfig& c) {
  for (std::size_t s : c.strides) {
    if (n < c.kernel) return 0;
    n = (n - c.kernel) / s + 1;
  }
  return n;
}

std::size_t argmax(const FeatureMap& r) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r.data()[i] > r.data()[best]) best = i;
  return best;
}

}  // namespace

TEST_CASE("default architecture geometry") {
  Backbone<float> net;
  CHECK(net.total_stride() == 8);
  CHECK(net.out_channels() == 64);
  CHECK(net.receptive_field() == 31);
  for (std::size_t n : {31u, 40u, 64u, 100u, 128u, 255u}) {
    CHECK(net.output_size(n) == shape_oracle(n, net.config()));
  }
  CHECK(net.output_size(64) == 5);
  CHECK(net.output_size(128) == 13);
  CHECK(net.output_size(30) == 0);
}

TEST_CASE("embedding shapes follow the shape oracle for every input size") {
  Backbone<float> net;
  std::mt19937_64 rng(1);
  for (std::size_t n : {31u, 47u, 64u, 128u}) {
    const auto code = net.embed(random_tensor<float>(rng, 3, n, n, 0, 1));
    CHECK(code.shape() == Shape3{64, shape_oracle(n, net.config()), shape_oracle(n, net.config())});
  }
  CHECK_THROWS_AS(net.embed(Tensor3<float>(3, 30, 30)), PatchTooSmall);
  CHECK_THROWS_AS(net.embed(Tensor3<float>(1, 64, 64)), ShapeError);
}

TEST_CASE("a zero image maps to a zero code") {
  Backbone<float> net;
  const auto code = net.embed(Tensor3<float>(3, 64, 64));
  for (float v : code.data()) CHECK(v == 0.0f);
}

TEST_CASE("embedding is deterministic") {
  Backbone<float> net;
  std::mt19937_64 rng(2);
  const auto patch = random_tensor<float>(rng, 3, 64, 64, 0, 1);
  CHECK(net.embed(patch) == net.embed(patch));
  CHECK(Backbone<float>().embed(patch) == net.embed(patch));
}

TEST_CASE("both branches share weights") {
  Backbone<float> net;
  std::mt19937_64 rng(3);
  const auto z = random_tensor<float>(rng, 3, 64, 64, 0, 1);
  const auto x = random_tensor<float>(rng, 3, 128, 128, 0, 1);
  const auto z0 = net.embed(z);
  const auto x0 = net.embed(x);
  net.blocks().back().conv.weight.value[7] += 0.5f;
  CHECK_FALSE(net.embed(z) == z0);
  CHECK_FALSE(net.embed(x) == x0);
}

TEST_CASE("stride-aligned translation shifts the code by whole cells") {
  Backbone<float> net;
  std::mt19937_64 rng(4);
  const auto big = random_tensor<float>(rng, 3, 128, 144, 0, 1);
  Tensor3<float> a(3, 128, 128), b(3, 128, 128);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 128; ++y)
      for (std::size_t x = 0; x < 128; ++x) {
        a(c, y, x) = big(c, y, x);
        b(c, y, x) = big(c, y, x + 16);
      }
  const auto ca = to_grid(net.embed(a));
  const auto cb = to_grid(net.embed(b));
  Grid shifted(ca.c, ca.h, ca.w - 2), cropped(ca.c, ca.h, ca.w - 2);
  for (std::size_t c = 0; c < ca.c; ++c)
    for (std::size_t y = 0; y < ca.h; ++y)
      for (std::size_t x = 0; x + 2 < ca.w; ++x) {
        shifted.at(c, y, x) = ca.at(c, y, x + 2);
        cropped.at(c, y, x) = cb.at(c, y, x);
      }
  CHECK(close_scaled(cropped, shifted, 1e-5));
}

TEST_CASE("response to an embedded copy of the exemplar peaks at the copy") {
  Backbone<float> net;
  std::mt19937_64 rng(5);
  const auto exemplar = random_tensor<float>(rng, 3, 64, 64, 0, 1);
  const auto code = net.embed(exemplar);
  for (auto [oy, ox] : {std::pair{16, 40}, std::pair{0, 0}, std::pair{56, 24}}) {
    Tensor3<float> search(3, 128, 128);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < 64; ++y)
        for (std::size_t x = 0; x < 64; ++x) search(c, oy + y, ox + x) = exemplar(c, y, x);
    const auto r = response(net, code, search);
    const std::size_t best = argmax(r);
    CHECK(best / r.width() == std::size_t(oy / 8));
    CHECK(best % r.width() == std::size_t(ox / 8));
  }
}

TEST_CASE("a zero exemplar code gives a flat zero response") {
  Backbone<float> net;
  std::mt19937_64 rng(6);
  const auto r = response(net, Tensor3<float>(64, 5, 5), random_tensor<float>(rng, 3, 128, 128, 0, 1));
  CHECK(r.shape() == Shape3{1, 9, 9});
  for (float v : r.data()) CHECK(v == 0.0f);
}

TEST_CASE("translated searches give translated responses") {
  Backbone<float> net;
  std::mt19937_64 rng(7);
  const auto code = net.embed(random_tensor<float>(rng, 3, 64, 64, 0, 1));
  const auto big = random_tensor<float>(rng, 3, 136, 128, 0, 1);
  Tensor3<float> a(3, 128, 128), b(3, 128, 128);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 128; ++y)
      for (std::size_t x = 0; x < 128; ++x) {
        a(c, y, x) = big(c, y, x);
        b(c, y, x) = big(c, y + 8, x);
      }
  const auto ra = response(net, code, a);
  const auto rb = response(net, code, b);
  Grid want(1, 8, 9), got(1, 8, 9);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 9; ++x) {
      want.at(0, y, x) = ra(0, y + 1, x);
      got.at(0, y, x) = rb(0, y, x);
    }
  CHECK(close_scaled(got, want, 1e-5));
}
