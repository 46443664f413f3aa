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
#include <set>

#include "checks.hpp"
#include "oracles.hpp"
#include "sdtrack/dropout.hpp"
#include "sdtrack/ops.hpp"

using namespace sdtrack;
using namespace sdtrack::testing;

TEST_CASE("channel masks") {
  const Shape3 shape{64, 5, 5};
  SUBCASE("rate 0 keeps everything") {
    const auto set = channel_masks(7, 0.0, shape, 3);
    CHECK(set.size() == 7);
    for (const auto& m : set.masks) CHECK(m.kept_fraction() == 1.0);
  }
  SUBCASE("rate 0.2 over 64 channels zeroes 12 whole channels") {
    const auto set = channel_masks(21, 0.2, shape, 4);
    for (std::size_t i = 1; i < set.size(); ++i) {
      std::size_t zeroed = 0;
      for (std::size_t c = 0; c < 64; ++c) zeroed += set[i].keeps(c, 0, 0) ? 0 : 1;
      CHECK(zeroed == 12);
      CHECK(set[i].kept_fraction() == 52.0 / 64.0);
    }
  }
  SUBCASE("seeded generation is reproducible") {
    CHECK(channel_masks(9, 0.2, shape, 5).keep_maps<float>() ==
          channel_masks(9, 0.2, shape, 5).keep_maps<float>());
    CHECK_FALSE(channel_masks(9, 0.2, shape, 5).keep_maps<float>() ==
                channel_masks(9, 0.2, shape, 6).keep_maps<float>());
  }
}

TEST_CASE("segment masks") {
  SUBCASE("a rate below one cell is rejected") {
    CHECK_THROWS(segment_masks(5, 0.02, {8, 6, 6}, 1));
    CHECK_THROWS(segment_masks(5, 0.0, {8, 6, 6}, 1));
  }
  SUBCASE("6x6 at rate 0.25 zeroes 8, 9 or 10 cells") {
    // Admissible integer rectangles for a 9-cell target with aspect in
    // [1/3, 3]: 2x5 / 5x2 (10), 3x3 (9), 4x2 (8).
    std::set<std::size_t> areas;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto set = segment_masks(5, 0.25, {4, 6, 6}, seed);
      for (std::size_t i = 1; i < set.size(); ++i) {
        const std::size_t area = set[i].zeroed_rect()->area();
        areas.insert(area);
        CHECK(set[i].kept_fraction() == doctest::Approx(1.0 - area / 36.0));
      }
    }
    CHECK(areas == std::set<std::size_t>{8, 9, 10});
  }
  SUBCASE("the zeroed set is one rectangle across all channels") {
    const auto set = segment_masks(21, 0.3, {8, 5, 5}, 11);
    for (std::size_t i = 1; i < set.size(); ++i) {
      const CellRect r = *set[i].zeroed_rect();
      for (std::size_t c = 0; c < 8; ++c)
        for (std::size_t y = 0; y < 5; ++y)
          for (std::size_t x = 0; x < 5; ++x) CHECK(set[i].keeps(c, y, x) == !r.contains(y, x));
    }
  }
}

TEST_CASE("slice masks") {
  const std::vector<double> fractions{1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0};
  CHECK(slice_masks({64, 5, 5}, fractions).size() == 13);
  SUBCASE("half from the left on 6x6 zeroes columns 0..2") {
    const std::vector<double> half{0.5};
    const auto set = slice_masks({3, 6, 6}, half);
    const auto& left = set[1];
    CHECK(left.side() == Side::left);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < 6; ++y)
        for (std::size_t x = 0; x < 6; ++x) CHECK(left.keeps(c, y, x) == (x >= 3));
    CHECK(left.kept_fraction() == 0.5);
  }
  SUBCASE("no seed, same output") {
    CHECK(slice_masks({64, 5, 5}, fractions).keep_maps<float>() ==
          slice_masks({64, 5, 5}, fractions).keep_maps<float>());
  }
  SUBCASE("degenerate fractions are rejected") {
    CHECK_THROWS(slice_masks({4, 5, 5}, std::vector<double>{}));
    CHECK_THROWS(slice_masks({4, 5, 5}, std::vector<double>{1.0}));
    CHECK_THROWS(slice_masks({4, 5, 5}, std::vector<double>{0.05}));
  }
}

TEST_CASE("Monte-Carlo masks") {
  const Shape3 shape{64, 6, 6};
  for (const auto& m : mc_masks(5, 0.0, shape, 1).masks) CHECK(m.kept_fraction() == 1.0);
  const auto set = mc_masks(21, 0.2, shape, 2);
  double zeroed = 0, total = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    zeroed += static_cast<double>(shape.size() - set[i].kept_count());
    total += static_cast<double>(shape.size());
  }
  CHECK(std::abs(zeroed / total - 0.2) <= 0.02);
  CHECK(mc_masks(21, 0.2, shape, 2).keep_maps<float>() == set.keep_maps<float>());
}

TEST_CASE("mask parameters are validated") {
  CHECK_THROWS(channel_masks(1, 0.2, {8, 5, 5}, 0));
  CHECK_THROWS(channel_masks(5, 1.0, {8, 5, 5}, 0));
  CHECK_THROWS(mc_masks(5, -0.1, {8, 5, 5}, 0));
}

TEST_CASE("apply") {
  std::mt19937_64 rng(7);
  const auto code = random_tensor<float>(rng, 8, 5, 5);
  CHECK(apply(DropoutMask::none(code.shape()), code) == code);

  const auto zero = DropoutMask::elements(code.shape(), std::vector<std::uint8_t>(code.size(), 0));
  const auto zeroed = apply(zero, code);
  for (float v : zeroed.data()) CHECK(v == 0.0f);

  const auto set = segment_masks(5, 0.3, code.shape(), 9);
  for (const auto& m : set.masks) CHECK(apply(m, apply(m, code)) == apply(m, code));
}

TEST_CASE("zeroing a channel removes exactly its contribution to the correlation") {
  std::mt19937_64 rng(8);
  const auto z = random_tensor<float>(rng, 6, 3, 3);
  const auto x = random_tensor<float>(rng, 6, 8, 8);
  std::vector<std::uint8_t> keep(6, 1);
  keep[3] = 0;
  const auto masked = apply(DropoutMask::channels(z.shape(), keep), z);
  Grid zg(5, 3, 3), xg(5, 8, 8);
  const Grid zf = to_grid(z), xf = to_grid(x);
  for (std::size_t c = 0, o = 0; c < 6; ++c) {
    if (c == 3) continue;
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t k = 0; k < 3; ++k) zg.at(o, y, k) = zf.at(c, y, k);
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t k = 0; k < 8; ++k) xg.at(o, y, k) = xf.at(c, y, k);
    ++o;
  }
  CHECK(close_scaled(to_grid(xcorr(masked, x)), naive_xcorr(zg, xg), kOracleRtol));
}

TEST_CASE("masked correlation equals the sum over kept cells") {
  std::mt19937_64 rng(9);
  const auto z = random_tensor<float>(rng, 4, 5, 5);
  const auto x = random_tensor<float>(rng, 4, 13, 13);
  const std::vector<double> fractions{1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0};
  const auto set = slice_masks(z.shape(), fractions);
  const Grid zf = to_grid(z), xf = to_grid(x);
  for (const auto& m : set.masks) {
    Grid want(1, 9, 9);
    for (std::size_t u = 0; u < 9; ++u)
      for (std::size_t v = 0; v < 9; ++v)
        for (std::size_t c = 0; c < 4; ++c)
          for (std::size_t dy = 0; dy < 5; ++dy)
            for (std::size_t dx = 0; dx < 5; ++dx)
              if (m.keeps(c, dy, dx)) want.at(0, u, v) += zf.at(c, dy, dx) * xf.at(c, u + dy, v + dx);
    CHECK(close_scaled(to_grid(xcorr(apply(m, z), x)), want, kOracleRtol));
  }
}

TEST_CASE("1000 seeded mask sets per kind satisfy the structural invariants") {
  const Summary s = mask_suite(1000, 77);
  for (const auto& f : s.failures) MESSAGE(f);
  CHECK(s.ok());
}

TEST_CASE("make_masks follows the dropout settings") {
  DropoutSpec spec;
  spec.kind = MaskKind::slice;
  CHECK(spec.passes() == 13);
  CHECK(make_masks(spec, {64, 5, 5}).size() == 13);
  spec.kind = MaskKind::none;
  CHECK(make_masks(spec, {64, 5, 5}).size() == 1);
  spec.kind = MaskKind::channel;
  spec.n = 9;
  CHECK(make_masks(spec, {64, 5, 5}, 4).size() == 9);
  CHECK(parse_mask_kind("segment") == MaskKind::segment);
  CHECK_THROWS(parse_mask_kind("blocks"));
}
