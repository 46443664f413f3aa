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
#include <cmath>

#include "sdtrack/seed.hpp"
#include "sdtrack/synth.hpp"

using namespace sdtrack;

namespace {

bool in_target(const SceneSpec& s, double cx, double cy, double px, double py) {
  if (s.shape == TargetShape::rectangle) {
    return std::abs(px - cx) <= s.target_w / 2 && px - cx < s.target_w / 2 &&
           std::abs(py - cy) <= s.target_h / 2 && py - cy < s.target_h / 2;
  }
  const double u = 2 * (px - cx) / s.target_w, v = 2 * (py - cy) / s.target_h;
  return u * u + v * v <= 1.0;
}

bool covered(const SceneSpec& s, const OcclusionEvent& e, double c, double cx, double cy, double px,
             double py) {
  const double left = cx - s.target_w / 2, top = cy - s.target_h / 2;
  switch (e.side) {
    case Side::left: return px < left + c * s.target_w;
    case Side::right: return px >= left + (1 - c) * s.target_w;
    case Side::top: return py < top + c * s.target_h;
    case Side::bottom: return py >= top + (1 - c) * s.target_h;
  }
  return false;
}

// Whole-frame rasterization pass: hidden target pixels over target pixels.
double recount_occlusion(const SequenceDataset& d, std::size_t t) {
  const SceneSpec& s = d.spec;
  double total = 0, hidden = 0;
  for (std::size_t y = 0; y < s.height; ++y) {
    for (std::size_t x = 0; x < s.width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      if (!in_target(s, d.center_x[t], d.center_y[t], px, py)) continue;
      total += 1;
      for (const auto& e : s.events) {
        const double c = e.coverage_at(t);
        if (c > 0 && covered(s, e, c, d.center_x[t], d.center_y[t], px, py)) {
          hidden += 1;
          break;
        }
      }
    }
  }
  return hidden / total;
}

// Target pixels whose color differs from an event-free render of the scene.
double changed_fraction(const SequenceDataset& with, const SequenceDataset& without, std::size_t t) {
  const SceneSpec& s = with.spec;
  double total = 0, changed = 0;
  for (std::size_t y = 0; y < s.height; ++y) {
    for (std::size_t x = 0; x < s.width; ++x) {
      if (!in_target(s, with.center_x[t], with.center_y[t], x + 0.5, y + 0.5)) continue;
      total += 1;
      changed += !std::equal(with.frames[t].pixel(x, y), with.frames[t].pixel(x, y) + 3,
                             without.frames[t].pixel(x, y));
    }
  }
  return changed / total;
}

SceneSpec static_scene() {
  SceneSpec s;
  s.width = 160;
  s.height = 160;
  s.length = 10;
  s.start_x = 80;
  s.start_y = 80;
  return s;
}

}  // namespace

TEST_CASE("no events means no occlusion") {
  SceneSpec s = static_scene();
  s.motion = MotionKind::random_walk;
  const auto d = render(s);
  REQUIRE(d.size() == 10);
  for (double f : d.occ_fraction) CHECK(f == 0.0);
}

TEST_CASE("a left-half patch occludes half the target at its peak") {
  for (const double offset : {0.0, 0.3, 0.5, 0.75}) {
    SceneSpec s = static_scene();
    s.start_x += offset;
    s.start_y += offset;
    OcclusionEvent e;
    e.side = Side::left;
    e.onset = 4;
    e.coverage = trapezoid_profile(1, 1, 0.5);
    e.texture_seed = 9;
    s.events.push_back(e);
    const auto d = render(s);
    // Peak frame is onset + ramp; one pixel column of quantization is allowed.
    CHECK(std::abs(d.occ_fraction[5] - 0.5) <= 1.0 / 32 + 1e-12);
    CHECK(d.occ_fraction[3] == 0.0);
    CHECK(d.occ_fraction[7] == 0.0);
    CHECK(d.occ_fraction[4] > 0.0);
    CHECK(d.occ_fraction[4] < d.occ_fraction[5]);
  }
}

TEST_CASE("occlusion fractions match an independent rasterization of random scenes") {
  for (const Profile profile : {Profile::easy, Profile::occlusion_heavy}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto d = render(random_scene(profile, seed));
      SceneSpec bare = d.spec;
      bare.events.clear();
      const auto clean = render(bare);
      for (std::size_t t = 0; t < d.size(); ++t) {
        const double recount = recount_occlusion(d, t);
        CHECK(d.occ_fraction[t] == doctest::Approx(recount).epsilon(1e-12));
        CHECK(changed_fraction(d, clean, t) == doctest::Approx(recount).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("feature events retexture in place") {
  SceneSpec s = static_scene();
  OcclusionEvent e;
  e.kind = EventKind::feature;
  e.side = Side::bottom;
  e.onset = 2;
  e.coverage = {0.25, 0.25};
  e.texture_seed = 3;
  s.events.push_back(e);
  const auto d = render(s);
  SceneSpec bare = s;
  bare.events.clear();
  const auto clean = render(bare);
  CHECK(d.occ_fraction[2] == doctest::Approx(0.25));
  CHECK(changed_fraction(d, clean, 2) == doctest::Approx(0.25));
  // Nothing outside the target changes.
  CHECK(d.gt[2].x == clean.gt[2].x);
  CHECK(d.gt[2].h == clean.gt[2].h);
}

TEST_CASE("rendering is deterministic") {
  const auto spec = random_scene(Profile::occlusion_heavy, 11);
  const auto a = render(spec), b = render(spec);
  CHECK(a.frames == b.frames);
  CHECK(a.occ_fraction == b.occ_fraction);
  const auto c = render(random_scene(Profile::occlusion_heavy, 12));
  CHECK(a.frames != c.frames);
}

TEST_CASE("ground truth moves within the speed bound") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = render(random_scene(seed % 2 ? Profile::easy : Profile::occlusion_heavy, seed));
    const double bound = d.spec.motion == MotionKind::random_walk
                             ? d.spec.max_speed
                             : std::hypot(d.spec.velocity_x, d.spec.velocity_y);
    for (std::size_t t = 1; t < d.size(); ++t) {
      const double step = std::hypot(d.center_x[t] - d.center_x[t - 1], d.center_y[t] - d.center_y[t - 1]);
      CHECK(step <= bound + 1e-9);
      // The tight pixel box adds at most one pixel of quantization per axis.
      CHECK(std::abs(d.gt[t].cx() - d.gt[t - 1].cx()) <= bound + 1 + 1e-9);
      CHECK(std::abs(d.gt[t].cy() - d.gt[t - 1].cy()) <= bound + 1 + 1e-9);
    }
  }
}

TEST_CASE("ground truth is the tight box of the target pixels") {
  SceneSpec s = static_scene();
  s.start_x = 80.2;
  s.target_w = 20;
  s.target_h = 12;
  const auto d = render(s);
  // Centers 70.2 .. 90.2 in x contain columns 70 .. 89; 74 .. 86 in y contain rows 74 .. 85.
  CHECK(d.gt[0].x == 70);
  CHECK(d.gt[0].w == 20);
  CHECK(d.gt[0].y == 74);
  CHECK(d.gt[0].h == 12);
}

TEST_CASE("easy benchmark stays unoccluded") {
  const auto easy = make_benchmark(Profile::easy, 6, 3);
  REQUIRE(easy.size() == 6);
  for (const auto& d : easy) {
    CHECK(d.id.rfind("easy_", 0) == 0);
    CHECK(*std::max_element(d.occ_fraction.begin(), d.occ_fraction.end()) < 0.1);
  }
}

TEST_CASE("occlusion-heavy benchmark passes the frame-share audit") {
  const auto heavy = make_benchmark(Profile::occlusion_heavy, 20, 7);
  REQUIRE(heavy.size() == 20);
  for (const auto& d : heavy) {
    CHECK(d.id.rfind("occlusion-heavy_", 0) == 0);
    const auto n = std::count_if(d.occ_fraction.begin(), d.occ_fraction.end(),
                                 [](double f) { return f > 0.3; });
    CHECK(static_cast<double>(n) >= 0.4 * static_cast<double>(d.size()));
  }
  // Parallel and serial generation agree.
  const auto serial = make_benchmark(Profile::occlusion_heavy, 3, 7, 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(serial[i].frames == heavy[i].frames);
}

TEST_CASE("pair labels follow the displaced center") {
  auto at = [](const FeatureMap& m, std::size_t y, std::size_t x) { return m(0, y, x); };
  const auto centered = pair_labels(9, 8, 0, 0, 0.5);
  const auto shifted = pair_labels(9, 8, 8, 0, 0.5);
  std::size_t positives = 0;
  for (float v : shifted.data()) {
    CHECK((v == 1.0f || v == -1.0f));
    positives += v > 0;
  }
  CHECK(positives == 1);
  CHECK(at(centered, 4, 4) == 1.0f);
  CHECK(at(shifted, 4, 5) == 1.0f);
  CHECK(at(pair_labels(9, 8, 0, -16, 0.5), 2, 4) == 1.0f);

  // Radius 2 on the grid: the 13 cells with y^2 + x^2 <= 4.
  const auto wide = pair_labels(9, 8, 0, 0, 2.0);
  std::size_t disk = 0;
  for (float v : wide.data()) disk += v > 0;
  CHECK(disk == 13);
}

TEST_CASE("training pairs carry consistent displacement") {
  const auto data = make_benchmark(Profile::easy, 2, 5);
  const auto same = make_pair(data[0], 3, 3, 0, 0, {});
  CHECK(same.dx == doctest::Approx(0.0));
  CHECK(same.dy == doctest::Approx(0.0));
  const auto moved = make_pair(data[0], 3, 3, -8, 16, {});
  CHECK(moved.dx == doctest::Approx(8.0));
  CHECK(moved.dy == doctest::Approx(-16.0));
  CHECK(moved.labels(0, 2, 5) == 1.0f);
  CHECK(same.exemplar.channels() == 3);
  CHECK(same.exemplar.height() == 64);
  CHECK(same.search.height() == 128);

  const auto pairs = training_pairs(data, 4, 1);
  CHECK(pairs.size() == 8);
  for (const auto& p : pairs) {
    CHECK(p.search_frame - std::min(p.search_frame, p.exemplar_frame) <= 30);
  }
  const auto again = training_pairs(data, 4, 1);
  CHECK(std::ranges::equal(again[5].search.data(), pairs[5].search.data()));
}

TEST_CASE("occlusion-focused pairs draw occluded search frames") {
  const auto heavy = make_benchmark(Profile::occlusion_heavy, 2, 5);
  PairConfig cfg;
  cfg.min_search_occlusion = 0.3;
  const auto pairs = training_pairs(heavy, 10, 4, cfg);
  REQUIRE(pairs.size() == 20);
  for (const auto& p : pairs) {
    const auto& seq = heavy[p.sequence];
    CHECK(seq.occ_fraction[p.search_frame] > 0.3);
    CHECK(seq.occ_fraction[p.exemplar_frame] <= cfg.max_exemplar_occlusion);
    const std::size_t gap = p.search_frame > p.exemplar_frame ? p.search_frame - p.exemplar_frame
                                                              : p.exemplar_frame - p.search_frame;
    CHECK(gap <= cfg.max_gap);
  }
  CHECK_THROWS_AS(training_pairs(make_benchmark(Profile::easy, 1, 5), 2, 4, cfg), SceneError);
}

TEST_CASE("invalid scenes are rejected") {
  SceneSpec s = static_scene();
  s.start_x = 2;
  CHECK_THROWS_AS(render(s), SceneError);
  s = static_scene();
  OcclusionEvent e;
  e.coverage = {0.7};
  e.onset = 1;
  s.events = {e, e};
  CHECK_THROWS_AS(render(s), SceneError);
  CHECK_THROWS_AS(parse_profile("medium"), SceneError);
  CHECK_THROWS_AS(make_benchmark(Profile::easy, 0, 1), SceneError);
}
