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
#include "sdtrack/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sdtrack {
namespace {

void check_run(const RunResult& run) {
  if (run.predictions.size() != run.gt.size()) {
    throw MetricsError(fmt::format("{}: {} predictions for {} ground-truth frames", run.sequence,
                                   run.predictions.size(), run.gt.size()));
  }
  if (run.predictions.size() < 2) {
    throw MetricsError(fmt::format("{}: no frames to evaluate after the first", run.sequence));
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double fraction_above(std::span<const double> v, double t) {
  const auto n = std::count_if(v.begin(), v.end(), [t](double x) { return x > t; });
  return static_cast<double>(n) / static_cast<double>(v.size());
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<double> frame_ious(const RunResult& run) {
  check_run(run);
  std::vector<double> out;
  out.reserve(run.gt.size() - 1);
  for (std::size_t i = 1; i < run.gt.size(); ++i) out.push_back(iou(run.predictions[i].bbox, run.gt[i]));
  return out;
}

std::vector<double> center_errors(const RunResult& run) {
  check_run(run);
  std::vector<double> out;
  out.reserve(run.gt.size() - 1);
  for (std::size_t i = 1; i < run.gt.size(); ++i) {
    out.push_back(center_distance(run.predictions[i].bbox, run.gt[i]));
  }
  return out;
}

double precision_at(const RunResult& run, double threshold_px) {
  const auto errors = center_errors(run);
  const auto n = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= threshold_px; });
  return static_cast<double>(n) / static_cast<double>(errors.size());
}

SuccessCurve success_curve(std::span<const double> ious) {
  if (ious.empty()) throw MetricsError("success curve of an empty IoU list");
  SuccessCurve c;
  c.thresholds.reserve(kSuccessSteps + 1);
  c.rate.reserve(kSuccessSteps + 1);
  for (std::size_t k = 0; k <= kSuccessSteps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(kSuccessSteps);
    c.thresholds.push_back(t);
    c.rate.push_back(fraction_above(ious, t));
  }
  c.auc = mean(c.rate);
  return c;
}

SuccessCurve success_auc(const RunResult& run) {
  const auto ious = frame_ious(run);
  return success_curve(ious);
}

GotMetrics got_metrics(std::span<const double> ious) {
  if (ious.empty()) throw MetricsError("metrics of an empty IoU list");
  return {mean(ious), fraction_above(ious, 0.5), fraction_above(ious, 0.75)};
}

GotMetrics got_metrics(const RunResult& run) {
  const auto ious = frame_ious(run);
  return got_metrics(ious);
}

SequenceMetrics evaluate_sequence(const RunResult& run) {
  const auto ious = frame_ious(run);
  SequenceMetrics m;
  m.sequence = run.sequence;
  m.frames = ious.size();
  m.precision = precision_at(run);
  auto curve = success_curve(ious);
  m.auc = curve.auc;
  m.curve = std::move(curve.rate);
  const auto g = got_metrics(ious);
  m.ao = g.ao;
  m.sr50 = g.sr50;
  m.sr75 = g.sr75;
  return m;
}

MetricsReport evaluate(std::span<const RunResult> runs) {
  if (runs.empty()) throw MetricsError("no runs to evaluate");
  MetricsReport r;
  for (const auto& run : runs) r.sequences.push_back(evaluate_sequence(run));
  auto& a = r.aggregate;
  a.sequence = "all";
  a.curve.assign(kSuccessSteps + 1, 0.0);
  const auto n = static_cast<double>(runs.size());
  for (const auto& s : r.sequences) {
    a.frames += s.frames;
    a.precision += s.precision / n;
    a.auc += s.auc / n;
    a.ao += s.ao / n;
    a.sr50 += s.sr50 / n;
    a.sr75 += s.sr75 / n;
    for (std::size_t k = 0; k < a.curve.size(); ++k) a.curve[k] += s.curve[k] / n;
  }
  return r;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MetricsError("rank correlation of unequal-length series");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

void append_rows(const RunResult& a, const RunResult& b, std::vector<OcclusionRow>& rows) {
  if (a.sequence != b.sequence) {
    throw MetricsError(fmt::format("occlusion analysis of different sequences '{}' and '{}'",
                                   a.sequence, b.sequence));
  }
  if (a.gt != b.gt) throw MetricsError(a.sequence + ": runs disagree on ground truth");
  const auto& occ = !b.occ_fraction.empty() ? b.occ_fraction : a.occ_fraction;
  if (occ.size() != a.gt.size()) {
    throw MetricsError(a.sequence + ": occlusion fractions missing or of the wrong length");
  }
  const auto ia = frame_ious(a);
  const auto ib = frame_ious(b);
  for (std::size_t i = 0; i < ia.size(); ++i) {
    rows.push_back({a.sequence, i + 2, occ[i + 1], ia[i], ib[i], ib[i] - ia[i]});
  }
}

void summarize(OcclusionAnalysis& out) {
  std::vector<double> occ, delta;
  for (const auto& r : out.rows) {
    occ.push_back(r.occ_fraction);
    delta.push_back(r.delta);
  }
  out.correlation = spearman(delta, occ);
  out.mean_delta = delta.empty() ? 0.0 : mean(delta);
}

}  // namespace

OcclusionAnalysis occlusion_gain_analysis(const RunResult& a, const RunResult& b) {
  OcclusionAnalysis out;
  append_rows(a, b, out.rows);
  summarize(out);
  return out;
}

OcclusionAnalysis occlusion_gain_analysis(std::span<const RunResult> a, std::span<const RunResult> b) {
  if (a.size() != b.size() || a.empty()) {
    throw MetricsError(fmt::format("occlusion analysis needs matching suites ({} vs {} runs)", a.size(), b.size()));
  }
  std::map<std::string, const RunResult*> by_name;
  for (const auto& r : b) by_name[r.sequence] = &r;
  OcclusionAnalysis out;
  for (const auto& ra : a) {
    auto it = by_name.find(ra.sequence);
    if (it == by_name.end()) throw MetricsError("sequence " + ra.sequence + " missing from the second run");
    append_rows(ra, *it->second, out.rows);
  }
  summarize(out);
  return out;
}

}  // namespace sdtrack
