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
#include "sdtrack/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <omp.h>

#include "sdtrack/seed.hpp"

namespace sdtrack {
namespace {

using Color = std::array<std::uint8_t, 3>;
using Palette = std::array<Color, 4>;

constexpr double kOccluderMargin = 6.0;
constexpr int kPaletteSeparation = 90;  // min L1 distance between occluder and target colors

int color_distance(const Color& a, const Color& b) {
  int d = 0;
  for (int c = 0; c < 3; ++c) d += std::abs(int(a[c]) - int(b[c]));
  return d;
}

Palette random_palette(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> channel(0, 255);
  Palette p{};
  for (auto& col : p) {
    for (auto& v : col) v = static_cast<std::uint8_t>(channel(rng));
  }
  return p;
}

// Palette whose colors all sit far from every color of `avoid`.
Palette separated_palette(std::uint64_t seed, const Palette& avoid) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> channel(0, 255);
  Palette p{};
  for (auto& col : p) {
    for (;;) {
      for (auto& v : col) v = static_cast<std::uint8_t>(channel(rng));
      bool ok = true;
      for (const auto& a : avoid) ok = ok && color_distance(col, a) >= kPaletteSeparation;
      if (ok) break;
    }
  }
  return p;
}

std::size_t cell_index(std::uint64_t seed, long cx, long cy) {
  const auto h = mix64(seed ^ mix64(static_cast<std::uint64_t>(cx) * 0x9e3779b1ULL +
                                    static_cast<std::uint64_t>(cy)));
  return static_cast<std::size_t>(h % 4);
}

long cell_of(double v, std::size_t cell) {
  return static_cast<long>(std::floor(v / static_cast<double>(cell)));
}

struct Body {
  TargetShape shape;
  double cx, cy, w, h;

  bool contains(double x, double y) const {
    if (shape == TargetShape::rectangle) {
      return x >= cx - w / 2 && x < cx + w / 2 && y >= cy - h / 2 && y < cy + h / 2;
    }
    const double u = (x - cx) / (w / 2);
    const double v = (y - cy) / (h / 2);
    return u * u + v * v <= 1.0;
  }
  double left() const { return cx - w / 2; }
  double top() const { return cy - h / 2; }
};

// Pixel index range [lo, hi) whose centers can fall in [a, b).
std::pair<long, long> pixel_span(double a, double b, std::size_t limit) {
  const long lo = std::max(0L, static_cast<long>(std::floor(a - 0.5)));
  const long hi = std::min(static_cast<long>(limit), static_cast<long>(std::ceil(b + 0.5)));
  return {lo, hi};
}

// Strip of the body's box covered from `side` at coverage c.
bool in_strip(const Body& b, Side side, double c, double x, double y) {
  switch (side) {
    case Side::left: return x < b.left() + c * b.w;
    case Side::right: return x >= b.left() + (1 - c) * b.w;
    case Side::top: return y < b.top() + c * b.h;
    case Side::bottom: return y >= b.top() + (1 - c) * b.h;
  }
  return false;
}

// Occluder rectangle [x0, x1) x [y0, y1) for a patch event.
std::array<double, 4> occluder_rect(const Body& b, Side side, double c) {
  const double m = kOccluderMargin;
  const double l = b.left(), t = b.top(), r = b.left() + b.w, d = b.top() + b.h;
  switch (side) {
    case Side::left: return {l - m, t - m, l + c * b.w, d + m};
    case Side::right: return {r - c * b.w, t - m, r + m, d + m};
    case Side::top: return {l - m, t - m, r + m, t + c * b.h};
    case Side::bottom: return {l - m, d - c * b.h, r + m, d + m};
  }
  return {0, 0, 0, 0};
}

// Outer corner the occluder texture is anchored to, so it slides in with the edge.
std::pair<double, double> occluder_anchor(const std::array<double, 4>& r, Side side) {
  switch (side) {
    case Side::left: return {r[2], r[1]};
    case Side::right: return {r[0], r[1]};
    case Side::top: return {r[0], r[3]};
    case Side::bottom: return {r[0], r[1]};
  }
  return {r[0], r[1]};
}

void put(Image& img, long x, long y, const Color& c) {
  auto* p = img.pixel(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
  p[0] = c[0];
  p[1] = c[1];
  p[2] = c[2];
}

struct Walker {
  double x, y, vx, vy;
};

void reflect(double& pos, double& vel, double lo, double hi) {
  if (hi <= lo) {
    pos = (lo + hi) / 2;
    vel = 0;
    return;
  }
  for (int guard = 0; guard < 4 && (pos < lo || pos > hi); ++guard) {
    if (pos < lo) {
      pos = 2 * lo - pos;
      vel = -vel;
    } else if (pos > hi) {
      pos = 2 * hi - pos;
      vel = -vel;
    }
  }
  pos = std::clamp(pos, lo, hi);
}

void walk_step(Walker& w, std::mt19937_64& rng, double accel, double max_speed, double lo_x,
               double hi_x, double lo_y, double hi_y) {
  std::uniform_real_distribution<double> jitter(-accel, accel);
  w.vx += jitter(rng);
  w.vy += jitter(rng);
  const double speed = std::hypot(w.vx, w.vy);
  if (speed > max_speed) {
    w.vx *= max_speed / speed;
    w.vy *= max_speed / speed;
  }
  w.x += w.vx;
  w.y += w.vy;
  reflect(w.x, w.vx, lo_x, hi_x);
  reflect(w.y, w.vy, lo_y, hi_y);
}

}  // namespace

std::string_view to_string(TargetShape shape) {
  return shape == TargetShape::rectangle ? "rectangle" : "ellipse";
}
std::string_view to_string(MotionKind kind) {
  return kind == MotionKind::linear ? "linear" : "random-walk";
}
std::string_view to_string(EventKind kind) { return kind == EventKind::patch ? "patch" : "feature"; }

std::string_view to_string(Profile profile) {
  return profile == Profile::easy ? "easy" : "occlusion-heavy";
}

Profile parse_profile(std::string_view name) {
  if (name == "easy") return Profile::easy;
  if (name == "occlusion-heavy") return Profile::occlusion_heavy;
  throw SceneError(fmt::format("unknown profile '{}' (expected easy or occlusion-heavy)", name));
}

double OcclusionEvent::coverage_at(std::size_t frame) const {
  if (frame < onset || frame >= onset + coverage.size()) return 0.0;
  return coverage[frame - onset];
}

std::vector<double> trapezoid_profile(std::size_t ramp, std::size_t hold, double peak) {
  std::vector<double> out;
  out.reserve(2 * ramp + hold);
  for (std::size_t i = 0; i < ramp; ++i) {
    out.push_back(peak * static_cast<double>(i + 1) / static_cast<double>(ramp + 1));
  }
  for (std::size_t i = 0; i < hold; ++i) out.push_back(peak);
  for (std::size_t i = 0; i < ramp; ++i) {
    out.push_back(peak * static_cast<double>(ramp - i) / static_cast<double>(ramp + 1));
  }
  return out;
}

void SceneSpec::validate() const {
  if (width == 0 || height == 0 || length == 0) throw SceneError("scene: empty frame or sequence");
  if (!(target_w >= 2 && target_h >= 2)) throw SceneError("scene: target smaller than 2 px");
  if (target_w > static_cast<double>(width) || target_h > static_cast<double>(height)) {
    throw SceneError("scene: target larger than the frame");
  }
  if (texture_cell == 0) throw SceneError("scene: texture cell must be positive");
  if (!(clutter >= 0 && clutter <= 1)) throw SceneError("scene: clutter must lie in [0, 1]");
  if (!(max_speed >= 0)) throw SceneError("scene: negative speed bound");
  if (motion == MotionKind::linear && std::hypot(velocity_x, velocity_y) > max_speed + 1e-12) {
    throw SceneError("scene: linear velocity exceeds the speed bound");
  }
  for (const auto& d : distractors) {
    if (!(d.similarity >= 0 && d.similarity <= 1)) {
      throw SceneError("scene: distractor similarity must lie in [0, 1]");
    }
  }
  for (const auto& e : events) {
    if (e.coverage.empty()) throw SceneError("scene: event with empty coverage profile");
    if (e.onset + e.coverage.size() > length) {
      throw SceneError(fmt::format("scene: event at frame {} runs past the sequence end", e.onset));
    }
    for (double c : e.coverage) {
      if (!(c >= 0 && c <= 1)) throw SceneError("scene: coverage outside [0, 1]");
    }
  }
  for (std::size_t t = 0; t < length; ++t) {
    double total = 0;
    for (const auto& e : events) total += e.coverage_at(t);
    if (total > 1.0 + 1e-12) {
      throw SceneError(fmt::format("scene: events overlap beyond full coverage at frame {}", t));
    }
  }
}

SequenceDataset render(const SceneSpec& spec) {
  spec.validate();
  const auto W = static_cast<double>(spec.width);
  const auto H = static_cast<double>(spec.height);
  std::mt19937_64 rng(spec.seed);

  // Background: blocks of 16 px around mid gray.
  Image background(spec.width, spec.height);
  {
    const std::size_t block = 16;
    std::uniform_real_distribution<double> jitter(-100.0, 100.0);
    const std::size_t bw = (spec.width + block - 1) / block;
    const std::size_t bh = (spec.height + block - 1) / block;
    std::vector<Color> blocks(bw * bh);
    for (auto& c : blocks) {
      for (auto& v : c) {
        v = static_cast<std::uint8_t>(std::clamp(std::lround(128 + spec.clutter * jitter(rng)), 0L, 255L));
      }
    }
    for (std::size_t y = 0; y < spec.height; ++y) {
      for (std::size_t x = 0; x < spec.width; ++x) {
        put(background, static_cast<long>(x), static_cast<long>(y), blocks[(y / block) * bw + x / block]);
      }
    }
  }

  // Target trajectory.
  const double lo_x = spec.target_w / 2, hi_x = W - spec.target_w / 2;
  const double lo_y = spec.target_h / 2, hi_y = H - spec.target_h / 2;
  std::vector<double> cx(spec.length), cy(spec.length);
  {
    Walker w{spec.start_x, spec.start_y, spec.velocity_x, spec.velocity_y};
    for (std::size_t t = 0; t < spec.length; ++t) {
      if (t > 0) {
        if (spec.motion == MotionKind::linear) {
          w.x += w.vx;
          w.y += w.vy;
        } else {
          walk_step(w, rng, spec.acceleration, spec.max_speed, lo_x, hi_x, lo_y, hi_y);
        }
      }
      if (w.x < lo_x || w.x > hi_x || w.y < lo_y || w.y > hi_y) {
        throw SceneError(fmt::format("scene: target leaves the frame at frame {}", t));
      }
      cx[t] = w.x;
      cy[t] = w.y;
    }
  }

  // Distractor trajectories share the target's size and shape.
  std::vector<std::vector<std::pair<double, double>>> distractor_paths;
  for (const auto& d : spec.distractors) {
    std::mt19937_64 drng(d.seed);
    std::uniform_real_distribution<double> v0(-1.5, 1.5);
    Walker w{std::clamp(d.start_x, lo_x, hi_x), std::clamp(d.start_y, lo_y, hi_y), v0(drng), v0(drng)};
    std::vector<std::pair<double, double>> path(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
      if (t > 0) walk_step(w, drng, spec.acceleration, std::max(spec.max_speed, 1.0), lo_x, hi_x, lo_y, hi_y);
      path[t] = {w.x, w.y};
    }
    distractor_paths.push_back(std::move(path));
  }

  std::mt19937_64 tex_rng(spec.texture_seed);
  const Palette target_palette = random_palette(tex_rng);
  std::vector<Palette> event_palettes;
  for (const auto& e : spec.events) event_palettes.push_back(separated_palette(e.texture_seed, target_palette));
  std::vector<Palette> distractor_palettes;
  for (const auto& d : spec.distractors) {
    std::mt19937_64 prng(derive_seed(d.seed, {1}));
    distractor_palettes.push_back(random_palette(prng));
  }
  const std::size_t cell = spec.texture_cell;
  const std::uint64_t target_tex = derive_seed(spec.texture_seed, {2});

  SequenceDataset out;
  out.spec = spec;
  out.center_x = cx;
  out.center_y = cy;
  out.frames.reserve(spec.length);
  std::vector<std::uint8_t> mask;
  for (std::size_t t = 0; t < spec.length; ++t) {
    Image img = background;
    const Body target{spec.shape, cx[t], cy[t], spec.target_w, spec.target_h};

    for (std::size_t k = 0; k < spec.distractors.size(); ++k) {
      const auto& d = spec.distractors[k];
      const Body body{spec.shape, distractor_paths[k][t].first, distractor_paths[k][t].second,
                      spec.target_w, spec.target_h};
      const auto [x0, x1] = pixel_span(body.left(), body.left() + body.w, spec.width);
      const auto [y0, y1] = pixel_span(body.top(), body.top() + body.h, spec.height);
      const double threshold = d.similarity;
      for (long y = y0; y < y1; ++y) {
        for (long x = x0; x < x1; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          if (!body.contains(px, py)) continue;
          const long u = cell_of(px - body.left(), cell), v = cell_of(py - body.top(), cell);
          const double pick = static_cast<double>(mix64(d.seed ^ mix64(static_cast<std::uint64_t>(u * 131 + v))) >> 11) * 0x1.0p-53;
          const Color& c = pick < threshold ? target_palette[cell_index(target_tex, u, v)]
                                            : distractor_palettes[k][cell_index(d.seed, u, v)];
          put(img, x, y, c);
        }
      }
    }

    // Target, then in-place retexturing, then opaque occluders.
    const auto [x0, x1] = pixel_span(target.left(), target.left() + target.w, spec.width);
    const auto [y0, y1] = pixel_span(target.top(), target.top() + target.h, spec.height);
    const long mw = x1 - x0;
    mask.assign(static_cast<std::size_t>(mw * (y1 - y0)), 0);
    long min_x = x1, max_x = x0 - 1, min_y = y1, max_y = y0 - 1;
    std::size_t target_pixels = 0;
    for (long y = y0; y < y1; ++y) {
      for (long x = x0; x < x1; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        if (!target.contains(px, py)) continue;
        mask[static_cast<std::size_t>((y - y0) * mw + (x - x0))] = 1;
        ++target_pixels;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        const long u = cell_of(px - target.left(), cell), v = cell_of(py - target.top(), cell);
        put(img, x, y, target_palette[cell_index(target_tex, u, v)]);
      }
    }
    if (target_pixels == 0) throw SceneError(fmt::format("scene: target covers no pixel at frame {}", t));

    std::size_t hidden = 0;
    auto hide = [&](long x, long y) {
      auto& m = mask[static_cast<std::size_t>((y - y0) * mw + (x - x0))];
      if (m == 1) {
        m = 2;
        ++hidden;
      }
    };
    for (std::size_t k = 0; k < spec.events.size(); ++k) {
      const auto& e = spec.events[k];
      const double c = e.coverage_at(t);
      if (c <= 0 || e.kind != EventKind::feature) continue;
      for (long y = y0; y < y1; ++y) {
        for (long x = x0; x < x1; ++x) {
          if (mask[static_cast<std::size_t>((y - y0) * mw + (x - x0))] == 0) continue;
          const double px = x + 0.5, py = y + 0.5;
          if (!in_strip(target, e.side, c, px, py)) continue;
          const long u = cell_of(px - target.left(), cell), v = cell_of(py - target.top(), cell);
          put(img, x, y, event_palettes[k][cell_index(e.texture_seed, u, v)]);
          hide(x, y);
        }
      }
    }
    for (std::size_t k = 0; k < spec.events.size(); ++k) {
      const auto& e = spec.events[k];
      const double c = e.coverage_at(t);
      if (c <= 0 || e.kind != EventKind::patch) continue;
      const auto r = occluder_rect(target, e.side, c);
      const auto [ax, ay] = occluder_anchor(r, e.side);
      const auto [ox0, ox1] = pixel_span(r[0], r[2], spec.width);
      const auto [oy0, oy1] = pixel_span(r[1], r[3], spec.height);
      for (long y = oy0; y < oy1; ++y) {
        for (long x = ox0; x < ox1; ++x) {
          const double px = x + 0.5, py = y + 0.5;
          if (px < r[0] || px >= r[2] || py < r[1] || py >= r[3]) continue;
          const long u = cell_of(px - ax, cell), v = cell_of(py - ay, cell);
          put(img, x, y, event_palettes[k][cell_index(e.texture_seed, u, v)]);
          if (x >= x0 && x < x1 && y >= y0 && y < y1) hide(x, y);
        }
      }
    }

    out.frames.push_back(std::move(img));
    out.gt.push_back({static_cast<double>(min_x), static_cast<double>(min_y),
                      static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)});
    out.occ_fraction.push_back(static_cast<double>(hidden) / static_cast<double>(target_pixels));
  }
  return out;
}

SceneSpec random_scene(Profile profile, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };

  SceneSpec s;
  s.seed = derive_seed(seed, {1});
  s.texture_seed = derive_seed(seed, {2});
  s.shape = unit(rng) < 0.5 ? TargetShape::rectangle : TargetShape::ellipse;
  s.target_w = std::round(uniform(24, 40));
  s.target_h = std::round(uniform(24, 40));
  const double W = static_cast<double>(s.width), H = static_cast<double>(s.height);
  const double lo_x = s.target_w / 2 + 8, hi_x = W - s.target_w / 2 - 8;
  const double lo_y = s.target_h / 2 + 8, hi_y = H - s.target_h / 2 - 8;
  s.start_x = uniform(lo_x, hi_x);
  s.start_y = uniform(lo_y, hi_y);
  if (unit(rng) < 0.5) {
    s.motion = MotionKind::linear;
    s.max_speed = 2.5;
    const double ex = uniform(lo_x, hi_x), ey = uniform(lo_y, hi_y);
    const double steps = static_cast<double>(s.length - 1);
    double vx = (ex - s.start_x) / steps, vy = (ey - s.start_y) / steps;
    const double speed = std::hypot(vx, vy);
    if (speed > s.max_speed) {
      vx *= s.max_speed / speed;
      vy *= s.max_speed / speed;
    }
    s.velocity_x = vx;
    s.velocity_y = vy;
  } else {
    s.motion = MotionKind::random_walk;
    s.max_speed = 3.0;
    s.acceleration = 0.5;
    s.velocity_x = uniform(-1.5, 1.5);
    s.velocity_y = uniform(-1.5, 1.5);
  }

  auto add_distractor = [&](double similarity) {
    Distractor d;
    d.start_x = uniform(lo_x, hi_x);
    d.start_y = uniform(lo_y, hi_y);
    d.similarity = similarity;
    d.seed = derive_seed(seed, {3, s.distractors.size()});
    s.distractors.push_back(d);
  };

  if (profile == Profile::easy) {
    s.clutter = uniform(0.2, 0.4);
    if (unit(rng) < 0.5) add_distractor(uniform(0.0, 0.3));
    return s;
  }

  s.clutter = uniform(0.3, 0.5);
  add_distractor(0.6);
  add_distractor(0.6);
  const std::size_t events = 3;
  const std::size_t first = 8;
  const std::size_t slot = (s.length - first) / events;
  for (std::size_t k = 0; k < events; ++k) {
    OcclusionEvent e;
    e.kind = unit(rng) < 0.75 ? EventKind::patch : EventKind::feature;
    e.side = static_cast<Side>(std::min<std::size_t>(3, static_cast<std::size_t>(unit(rng) * 4)));
    const std::size_t ramp = 4;
    const auto hold = static_cast<std::size_t>(std::lround(uniform(18, 26)));
    e.coverage = trapezoid_profile(ramp, hold, uniform(0.45, 0.7));
    const std::size_t slack = slot > e.duration() ? slot - e.duration() : 0;
    e.onset = first + k * slot + static_cast<std::size_t>(unit(rng) * static_cast<double>(slack + 1));
    e.onset = std::min(e.onset, first + k * slot + slack);
    e.texture_seed = derive_seed(seed, {4, k});
    s.events.push_back(std::move(e));
  }
  return s;
}

std::vector<SequenceDataset> make_benchmark(Profile profile, std::size_t count, std::uint64_t seed,
                                            int jobs) {
  if (count == 0) throw SceneError("benchmark: count must be at least 1");
  std::vector<SequenceDataset> out(count);
  const auto n = static_cast<long>(count);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(profile), static_cast<std::uint64_t>(i)});
    for (std::uint64_t attempt = 0;; ++attempt) {
      SequenceDataset seq = render(random_scene(profile, s));
      bool ok = true;
      if (profile == Profile::occlusion_heavy) {
        const auto heavy = std::count_if(seq.occ_fraction.begin(), seq.occ_fraction.end(),
                                         [](double f) { return f > kHeavyThreshold; });
        ok = static_cast<double>(heavy) >= kHeavyFrameShare * static_cast<double>(seq.size());
      }
      if (ok) {
        seq.id = fmt::format("{}_{:03d}", to_string(profile), i);
        out[static_cast<std::size_t>(i)] = std::move(seq);
        break;
      }
      s = derive_seed(s, {attempt + 1});
    }
  }
  return out;
}

FeatureMap pair_labels(std::size_t response_size, std::size_t stride, double dx, double dy,
                       double radius) {
  FeatureMap labels(1, response_size, response_size, -1.0f);
  const double center = (static_cast<double>(response_size) - 1) / 2;
  const double px = center + dx / static_cast<double>(stride);
  const double py = center + dy / static_cast<double>(stride);
  for (std::size_t y = 0; y < response_size; ++y) {
    for (std::size_t x = 0; x < response_size; ++x) {
      if (std::hypot(static_cast<double>(y) - py, static_cast<double>(x) - px) <= radius) {
        labels(0, y, x) = 1.0f;
      }
    }
  }
  return labels;
}

TrainingPair make_pair(const SequenceDataset& seq, std::size_t exemplar_frame,
                       std::size_t search_frame, double shift_x, double shift_y,
                       const PairConfig& config) {
  const BBox& zb = seq.gt.at(exemplar_frame);
  const BBox& xb = seq.gt.at(search_frame);
  const double pad = config.context * (zb.w + zb.h);
  const double side_z = std::sqrt((zb.w + pad) * (zb.h + pad));
  const double side_x = side_z * static_cast<double>(config.search_size) /
                        static_cast<double>(config.exemplar_size);
  const double to_frame = side_x / static_cast<double>(config.search_size);

  TrainingPair p;
  const Image& zf = seq.frames[exemplar_frame];
  const Image& xf = seq.frames[search_frame];
  p.exemplar = crop_patch(zf, zb.cx(), zb.cy(), side_z, config.exemplar_size, mean_color(zf));
  const double sx = xb.cx() + shift_x * to_frame;
  const double sy = xb.cy() + shift_y * to_frame;
  p.search = crop_patch(xf, sx, sy, side_x, config.search_size, mean_color(xf));
  p.dx = (xb.cx() - sx) / to_frame;
  p.dy = (xb.cy() - sy) / to_frame;
  p.labels = pair_labels(config.response_size, config.stride, p.dx, p.dy, config.label_radius);
  p.exemplar_frame = exemplar_frame;
  p.search_frame = search_frame;
  return p;
}

std::vector<TrainingPair> training_pairs(const std::vector<SequenceDataset>& datasets,
                                         std::size_t pairs_per_seq, std::uint64_t seed,
                                         const PairConfig& config) {
  if (datasets.empty()) throw SceneError("training pairs: no sequences");
  for (const auto& d : datasets) {
    if (d.size() < 2) throw SceneError("training pairs: sequence " + d.id + " has fewer than 2 frames");
    if (config.min_search_occlusion > 0 &&
        std::none_of(d.occ_fraction.begin(), d.occ_fraction.end(),
                     [&](double f) { return f > config.min_search_occlusion; })) {
      throw SceneError("training pairs: sequence " + d.id + " has no frame above the search occlusion floor");
    }
  }
  std::vector<TrainingPair> out(datasets.size() * pairs_per_seq);
  const auto n = static_cast<long>(datasets.size());
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < n; ++s) {
    const auto& seq = datasets[static_cast<std::size_t>(s)];
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    std::vector<std::size_t> clean;
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const double occ = t < seq.occ_fraction.size() ? seq.occ_fraction[t] : 0.0;
      if (occ <= config.max_exemplar_occlusion) clean.push_back(t);
    }
    if (clean.empty()) {
      for (std::size_t t = 0; t < seq.size(); ++t) clean.push_back(t);
    }
    // Occlusion-focused sampling draws the search frame first from the
    // occluded frames, then a clean exemplar within reach of it.
    std::vector<std::size_t> occluded;
    if (config.min_search_occlusion > 0) {
      for (std::size_t t = 0; t < seq.occ_fraction.size(); ++t) {
        if (seq.occ_fraction[t] > config.min_search_occlusion) occluded.push_back(t);
      }
    }
    std::uniform_real_distribution<double> shift(-config.max_shift, config.max_shift);
    for (std::size_t k = 0; k < pairs_per_seq; ++k) {
      std::size_t i = 0, j = 0;
      if (occluded.empty()) {
        i = clean[std::uniform_int_distribution<std::size_t>(0, clean.size() - 1)(rng)];
        const std::size_t lo = i > config.max_gap ? i - config.max_gap : 0;
        const std::size_t hi = std::min(seq.size() - 1, i + config.max_gap);
        j = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
      } else {
        j = occluded[std::uniform_int_distribution<std::size_t>(0, occluded.size() - 1)(rng)];
        std::vector<std::size_t> near;
        for (std::size_t c : clean) {
          if (c + config.max_gap >= j && c <= j + config.max_gap) near.push_back(c);
        }
        i = near.empty() ? clean[std::uniform_int_distribution<std::size_t>(0, clean.size() - 1)(rng)]
                         : near[std::uniform_int_distribution<std::size_t>(0, near.size() - 1)(rng)];
      }
      const double ox = shift(rng);
      const double oy = shift(rng);
      TrainingPair p = make_pair(seq, i, j, ox, oy, config);
      p.sequence = static_cast<std::size_t>(s);
      out[static_cast<std::size_t>(s) * pairs_per_seq + k] = std::move(p);
    }
  }
  return out;
}

}  // namespace sdtrack
