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
#include <random>

#include "checks.hpp"
#include "sdtrack/metrics.hpp"

using namespace sdtrack;
using namespace sdtrack::testing;

namespace {

// Average rank by counting: rank = #smaller + (#equal + 1) / 2.
std::vector<double> count_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) less += w < v[i], equal += w == v[i];
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i] / n, mb += b[i] / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

RunResult random_run(std::mt19937_64& rng, std::size_t frames, const std::string& name) {
  std::uniform_real_distribution<double> u(0, 1);
  RunResult r;
  r.sequence = name;
  for (std::size_t f = 0; f < frames; ++f) {
    const BBox gt{50 + u(rng) * 50, 50 + u(rng) * 50, 20 + u(rng) * 20, 20 + u(rng) * 20};
    r.gt.push_back(gt);
    r.predictions.push_back({{gt.x + (u(rng) - 0.5) * 40, gt.y + (u(rng) - 0.5) * 40, gt.w, gt.h}, u(rng), false});
    r.occ_fraction.push_back(std::round(u(rng) * 5) / 5);
  }
  return r;
}

}  // namespace

TEST_CASE("metric fixtures match hand-computed values") {
  const Summary s = metrics_fixtures();
  for (const auto& f : s.failures) MESSAGE(f);
  CHECK(s.ok());
}

TEST_CASE("iou properties") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 50);
  for (int i = 0; i < 500; ++i) {
    const BBox a{u(rng), u(rng), 1 + u(rng), 1 + u(rng)};
    const BBox b{u(rng), u(rng), 1 + u(rng), 1 + u(rng)};
    CHECK(iou(a, b) == iou(b, a));
    CHECK(iou(a, a) == doctest::Approx(1.0));
    CHECK(iou(a, b) >= 0.0);
    CHECK(iou(a, b) <= 1.0);
  }
  // Sliding a box away shrinks the intersection monotonically.
  double last = 1.0;
  for (double dx = 0; dx <= 12; dx += 0.5) {
    const double v = iou({0, 0, 10, 10}, {dx, 0, 10, 10});
    CHECK(v <= last);
    last = v;
  }
  CHECK(last == 0.0);
}

TEST_CASE("the success curve is non-increasing") {
  std::mt19937_64 rng(2);
  const RunResult r = random_run(rng, 60, "s");
  const auto curve = success_auc(r);
  REQUIRE(curve.rate.size() == kSuccessSteps + 1);
  for (std::size_t k = 1; k < curve.rate.size(); ++k) CHECK(curve.rate[k] <= curve.rate[k - 1]);
  CHECK(curve.thresholds.front() == 0.0);
  CHECK(curve.thresholds.back() == 1.0);
}

TEST_CASE("the initialization frame is excluded") {
  RunResult r;
  r.sequence = "x";
  r.gt = {{0, 0, 10, 10}, {0, 0, 10, 10}};
  r.predictions = {{{90, 90, 10, 10}, 1, false}, {{0, 0, 10, 10}, 1, false}};
  CHECK(frame_ious(r).size() == 1);
  CHECK(precision_at(r) == 1.0);
  CHECK(got_metrics(r).ao == 1.0);
}

TEST_CASE("metric inputs are validated") {
  RunResult r;
  r.sequence = "x";
  r.gt = {{0, 0, 10, 10}};
  r.predictions = {{{0, 0, 10, 10}, 1, false}};
  CHECK_THROWS_AS(frame_ious(r), MetricsError);
  r.gt.push_back({0, 0, 10, 10});
  CHECK_THROWS_AS(frame_ious(r), MetricsError);
}

TEST_CASE("aggregates do not depend on sequence order") {
  std::mt19937_64 rng(3);
  std::vector<RunResult> runs;
  for (int i = 0; i < 6; ++i) runs.push_back(random_run(rng, 30, "seq" + std::to_string(i)));
  const auto a = evaluate(runs).aggregate;
  std::reverse(runs.begin(), runs.end());
  std::swap(runs[1], runs[4]);
  const auto b = evaluate(runs).aggregate;
  CHECK(a.ao == doctest::Approx(b.ao).epsilon(1e-12));
  CHECK(a.auc == doctest::Approx(b.auc).epsilon(1e-12));
  CHECK(a.precision == doctest::Approx(b.precision).epsilon(1e-12));
  CHECK(a.sr50 == doctest::Approx(b.sr50).epsilon(1e-12));
  CHECK(a.sr75 == doctest::Approx(b.sr75).epsilon(1e-12));
}

TEST_CASE("aggregate is the unweighted mean over sequences") {
  std::mt19937_64 rng(4);
  const std::vector<RunResult> runs{random_run(rng, 10, "a"), random_run(rng, 50, "b")};
  const auto rep = evaluate(runs);
  REQUIRE(rep.sequences.size() == 2);
  CHECK(rep.aggregate.ao == doctest::Approx((rep.sequences[0].ao + rep.sequences[1].ao) / 2));
  CHECK(rep.sequences[0].frames == 9);
}

TEST_CASE("rank correlation matches a brute-force oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng() % 30;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = level(rng), y[i] = level(rng) * 0.1;
    const auto got = spearman(x, y);
    const auto rx = count_ranks(x), ry = count_ranks(y);
    const bool flat = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
                      std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (flat) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == doctest::Approx(pearson(rx, ry)).epsilon(1e-12));
    }
  }
  CHECK_FALSE(spearman(std::vector<double>{1.0}, std::vector<double>{2.0}).has_value());
}

TEST_CASE("occlusion analysis pools frames across sequences") {
  std::mt19937_64 rng(6);
  std::vector<RunResult> a, b;
  for (int i = 0; i < 3; ++i) {
    a.push_back(random_run(rng, 20, "seq" + std::to_string(i)));
    b.push_back(a.back());
    for (auto& p : b.back().predictions) p.bbox.x += 1.5;
  }
  const auto pooled = occlusion_gain_analysis(a, b);
  CHECK(pooled.rows.size() == 3 * 19);
  CHECK(pooled.rows.front().frame == 2);
  std::vector<double> occ, delta;
  for (const auto& r : pooled.rows) {
    occ.push_back(r.occ_fraction);
    delta.push_back(r.delta);
    CHECK(r.delta == doctest::Approx(r.iou_b - r.iou_a));
  }
  REQUIRE(pooled.correlation.has_value());
  CHECK(*pooled.correlation == doctest::Approx(*spearman(delta, occ)).epsilon(1e-12));

  // Sequences are matched by name, not position.
  std::reverse(b.begin(), b.end());
  CHECK(occlusion_gain_analysis(a, b).mean_delta == doctest::Approx(pooled.mean_delta));
  b.pop_back();
  CHECK_THROWS(occlusion_gain_analysis(a, b));
}

TEST_CASE("occlusion analysis needs occlusion data") {
  std::mt19937_64 rng(7);
  RunResult a = random_run(rng, 10, "s");
  a.occ_fraction.clear();
  CHECK_THROWS(occlusion_gain_analysis(a, a));
}
