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

#include <algorithm>
#include <random>

#include "checks.hpp"
#include "oracles.hpp"
#include "sdtrack/combine.hpp"

using namespace sdtrack;
using namespace sdtrack::testing;

namespace {

PassOutput pass(BBox box, double score, DropoutMask mask = DropoutMask::none({1, 4, 4})) {
  PassOutput p;
  p.decoded.bbox = box;
  p.decoded.score = score;
  p.mask = std::move(mask);
  return p;
}

// Segment mask on a 4x4 grid dropping `cells` cells (first rows first).
DropoutMask dropping(std::size_t cells) {
  if (cells == 0) return DropoutMask::none({1, 4, 4});
  return DropoutMask::rectangle(MaskKind::segment, {1, 4, 4}, CellRect{0, 0, cells / 4, 4});
}

}  // namespace

TEST_CASE("clustering examples") {
  SUBCASE("single pass") {
    const std::vector<PassOutput> one{pass({3, 4, 5, 6}, 0.3)};
    const auto out = combine_channel_explicit(one, 0.2);
    CHECK(out.bbox == BBox{3, 4, 5, 6});
    CHECK(out.score == 0.3);
  }
  SUBCASE("the larger cluster wins over a higher lone score") {
    // IoU(A, B) = 9 * 10 / (2 * 100 - 90) = 0.82 > 0.2; C is far away.
    const std::vector<PassOutput> p{pass({0, 0, 10, 10}, 0.6), pass({1, 0, 10, 10}, 0.5),
                                    pass({100, 100, 10, 10}, 0.9)};
    CHECK(iou(p[0].decoded.bbox, p[1].decoded.bbox) == doctest::Approx(90.0 / 110.0));
    CHECK(select_channel_explicit(p, 0.2) == 0);
    CHECK(combine_channel_explicit(p, 0.2).bbox == BBox{0, 0, 10, 10});
  }
  SUBCASE("identical boxes return the highest score") {
    const std::vector<PassOutput> p{pass({5, 5, 8, 8}, 0.2), pass({5, 5, 8, 8}, 0.7),
                                    pass({5, 5, 8, 8}, 0.4)};
    CHECK(select_channel_explicit(p, 0.2) == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS(select_channel_explicit(std::vector<PassOutput>{}, 0.2));
    const std::vector<PassOutput> one{pass({0, 0, 1, 1}, 0.5)};
    CHECK_THROWS(select_channel_explicit(one, 1.5));
  }
}

TEST_CASE("clustering ignores input order when scores are distinct") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PassOutput> p;
    for (int i = 0; i < 9; ++i) {
      p.push_back(pass({std::floor(u(rng) * 4) * 6, 0, 10, 10}, u(rng)));
    }
    const BBox want = combine_channel_explicit(p, 0.2).bbox;
    const double score = combine_channel_explicit(p, 0.2).score;
    for (int k = 0; k < 5; ++k) {
      std::shuffle(p.begin(), p.end(), rng);
      CHECK(combine_channel_explicit(p, 0.2).bbox == want);
      CHECK(combine_channel_explicit(p, 0.2).score == score);
    }
  }
}

TEST_CASE("rescaled score examples") {
  const DropoutMask a20 = DropoutMask::rectangle(MaskKind::segment, {1, 10, 10}, CellRect{0, 0, 2, 10});
  CHECK(a20.dropped_fraction() == doctest::Approx(0.2));
  CHECK(rescaled_score(pass({0, 0, 1, 1}, 0.5, a20), 0.9) == doctest::Approx(0.5625));

  SUBCASE("three passes, the most dropped one wins") {
    const std::vector<PassOutput> p{pass({0, 0, 1, 1}, 0.50, dropping(0)),
                                    pass({1, 0, 1, 1}, 0.42, dropping(4)),
                                    pass({2, 0, 1, 1}, 0.30, dropping(8))};
    CHECK(rescaled_score(p[0], 0.9) == doctest::Approx(0.45));
    CHECK(rescaled_score(p[1], 0.9) == doctest::Approx(0.504));
    CHECK(rescaled_score(p[2], 0.9) == doctest::Approx(0.54));
    CHECK(select_patch_explicit(p, 0.9) == 2);
    const auto out = combine_patch_explicit(p);
    CHECK(out.bbox == BBox{2, 0, 1, 1});
    CHECK(out.score == doctest::Approx(0.54));
  }
  SUBCASE("equal scores and areas pick the first pass") {
    const std::vector<PassOutput> p{pass({0, 0, 1, 1}, 0.4, dropping(4)),
                                    pass({1, 0, 1, 1}, 0.4, dropping(4)),
                                    pass({2, 0, 1, 1}, 0.4, dropping(4))};
    CHECK(select_patch_explicit(p, 0.9) == 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS(select_patch_explicit(std::vector<PassOutput>{}, 0.9));
    const std::vector<PassOutput> one{pass({0, 0, 1, 1}, 0.5)};
    CHECK_THROWS(select_patch_explicit(one, 0.0));
    CHECK_THROWS(select_patch_explicit(one, 1.1));
  }
}

TEST_CASE("rescaled argmax properties") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.01, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PassOutput> p, scaled, plain;
    for (int i = 0; i < 7; ++i) {
      const std::size_t cells = 4 * (rng() % 4);
      const double s = u(rng);
      p.push_back(pass({double(i), 0, 1, 1}, s, dropping(cells)));
      scaled.push_back(pass({double(i), 0, 1, 1}, 3.7 * s, dropping(cells)));
      plain.push_back(pass({double(i), 0, 1, 1}, s));
    }
    CHECK(select_patch_explicit(p, 0.9) == select_patch_explicit(scaled, 0.9));
    std::size_t best = 0;
    for (std::size_t i = 1; i < plain.size(); ++i)
      if (plain[i].decoded.score > plain[best].decoded.score) best = i;
    CHECK(select_patch_explicit(plain, 1.0) == best);
  }
}

TEST_CASE("explicit combiners agree with reference traces on 1000 random sets") {
  const Summary s = combiner_suite(1000, 31);
  for (const auto& f : s.failures) MESSAGE(f);
  CHECK(s.ok());
}

TEST_CASE("averaging head returns the mean") {
  std::mt19937_64 rng(23);
  const auto head = EncoderHead<double>::averaging(5);
  const auto stacked = random_tensor<double>(rng, 5, 4, 6);
  const auto out = encode_aggregate(stacked, head);
  REQUIRE(out.shape() == Shape3{1, 4, 6});
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 6; ++x) {
      double mean = 0;
      for (std::size_t c = 0; c < 5; ++c) mean += stacked(c, y, x) / 5.0;
      CHECK(out(0, y, x) == doctest::Approx(mean).epsilon(1e-12));
    }

  Tensor3<double> same(5, 4, 6);
  const auto m = random_tensor<double>(rng, 1, 4, 6);
  for (std::size_t c = 0; c < 5; ++c)
    std::copy(m.data().begin(), m.data().end(), same.channel(c).begin());
  const auto back = encode_aggregate(same, head);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(back.data()[i] == doctest::Approx(m.data()[i]).epsilon(1e-12));
}

TEST_CASE("equal inputs make the output independent of slot order") {
  std::mt19937_64 rng(24);
  EncoderHead<double> head(4, 9);
  randomize(head.project.weight, rng);
  const auto m = random_tensor<double>(rng, 1, 3, 3);
  Tensor3<double> same(4, 3, 3);
  for (std::size_t c = 0; c < 4; ++c) std::copy(m.data().begin(), m.data().end(), same.channel(c).begin());
  const auto a = encode_aggregate(same, head);
  std::reverse(head.project.weight.value.begin(), head.project.weight.value.begin() + 4);
  CHECK(close_scaled(to_grid(encode_aggregate(same, head)), to_grid(a), 1e-12));
}

TEST_CASE("encode_aggregate matches a scalar evaluation of the head") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 13;
    EncoderHead<double> head(n, trial);
    randomize(head.project.weight, rng);
    randomize(head.project.bias, rng);
    randomize(head.collapse.weight, rng);
    randomize(head.collapse.bias, rng);
    for (auto* bn : {&head.project_bn, &head.collapse_bn}) {
      randomize(bn->scale, rng, 0.5, 1.5);
      randomize(bn->shift, rng);
      for (auto& v : bn->running_mean) v = u(rng);
      for (auto& v : bn->running_var) v = 0.5 + std::abs(u(rng));
    }
    const auto stacked = random_tensor<double>(rng, n, 5, 5);
    const auto got = encode_aggregate(stacked, head);
    Grid want(1, 5, 5);
    for (std::size_t y = 0; y < 5; ++y)
      for (std::size_t x = 0; x < 5; ++x) {
        double out = head.collapse.bias.value[0];
        for (std::size_t h = 0; h < 4; ++h) {
          double a = head.project.bias.value[h];
          for (std::size_t i = 0; i < n; ++i) a += head.project.weight.value[h * n + i] * stacked(i, y, x);
          const auto& bn = head.project_bn;
          a = bn.scale.value[h] * (a - bn.running_mean[h]) / std::sqrt(bn.running_var[h] + bn.eps) +
              bn.shift.value[h];
          out += head.collapse.weight.value[h] * std::max(a, 0.0);
        }
        const auto& bn = head.collapse_bn;
        want.at(0, y, x) = bn.scale.value[0] * (out - bn.running_mean[0]) /
                               std::sqrt(bn.running_var[0] + bn.eps) + bn.shift.value[0];
      }
    CHECK(close_scaled(to_grid(got), want, 1e-12));
  }
  CHECK_THROWS_AS(encode_aggregate(Tensor3<double>(3, 2, 2), EncoderHead<double>(4, 0)), ShapeError);
}

TEST_CASE("a fresh head starts out close to slot 0") {
  std::mt19937_64 rng(26);
  const auto stacked = random_tensor<float>(rng, 13, 9, 9);
  const auto out = encode_aggregate(stacked, EncoderHead<float>(13, 5));
  // Slots 1.. enter only through two hidden units with weights below 0.1.
  for (std::size_t i = 0; i < 81; ++i) CHECK(std::abs(out.data()[i] - stacked.data()[i]) < 0.05);
}

TEST_CASE("bicubic upsampling interpolates and preserves constants") {
  std::mt19937_64 rng(27);
  const auto m = random_tensor<float>(rng, 1, 5, 7);
  const auto up = upsample_bicubic(m, 4);
  REQUIRE(up.shape() == Shape3{1, 17, 25});
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 7; ++x) CHECK(up(0, 4 * y, 4 * x) == doctest::Approx(m(0, y, x)).epsilon(1e-6));
  const auto flat = upsample_bicubic(FeatureMap(1, 3, 3, 2.5f), 4);
  for (float v : flat.data()) CHECK(v == doctest::Approx(2.5f));
}

TEST_CASE("hann window peaks at 1 in the center and vanishes on the border") {
  const auto w = hann_window(33, 33);
  CHECK(w[16 * 33 + 16] == doctest::Approx(1.0));
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[16 * 33 + 8] == doctest::Approx(0.5));
}

TEST_CASE("decode geometry") {
  DecodeGeometry g;
  g.center_x = 100;
  g.center_y = 80;
  g.target_w = 30;
  g.target_h = 20;
  g.crop_side = 128;  // scale 1: search patch px equal frame px
  FeatureMap r(1, 9, 9);

  SUBCASE("a centered peak keeps the box") {
    r(0, 4, 4) = 3;
    const auto p = decode(r, g);
    CHECK(p.bbox == BBox::from_center(100, 80, 30, 20));
    CHECK_FALSE(p.degenerate);
  }
  SUBCASE("one cell right of center moves the box by the stride") {
    r(0, 4, 5) = 3;
    const auto d = decode_peak(r, g);
    CHECK(d.dx_patch == 8.0);
    CHECK(d.dy_patch == 0.0);
    CHECK(d.prediction.bbox.cx() == doctest::Approx(108));
    CHECK(d.prediction.bbox.cy() == doctest::Approx(80));
    CHECK(d.prediction.score == doctest::Approx(1.0 / (1.0 + std::exp(-3.0))));
  }
  SUBCASE("displacements scale with the crop") {
    r(0, 2, 4) = 3;
    g.crop_side = 256;
    const auto p = decode(r, g);
    CHECK(p.bbox.cy() == doctest::Approx(80 - 2 * 8 * 2));
  }
  SUBCASE("a flat map falls back to the center") {
    const auto p = decode(r, g);
    CHECK(p.degenerate);
    CHECK(p.bbox == BBox::from_center(100, 80, 30, 20));
  }
  SUBCASE("multi-channel maps are rejected") {
    CHECK_THROWS_AS(decode(FeatureMap(2, 9, 9), g), ShapeError);
  }
}

TEST_CASE("stack_maps") {
  const std::vector<FeatureMap> maps{FeatureMap(1, 2, 3, 1.0f), FeatureMap(1, 2, 3, 2.0f)};
  const auto s = stack_maps(maps);
  CHECK(s.shape() == Shape3{2, 2, 3});
  CHECK(s(1, 1, 2) == 2.0f);
  const std::vector<FeatureMap> bad{FeatureMap(1, 2, 3), FeatureMap(1, 3, 3)};
  CHECK_THROWS_AS(stack_maps(bad), ShapeError);
}
