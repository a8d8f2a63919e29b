// Copyright 2026 The mipmot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic synthetic scenarios: ground-truth trajectories plus
// corrupted detections (position noise, dropouts, clutter, scores and
// appearance features).
//
// All randomness comes from SplitMix64 so that a seed reproduces the same
// files on any platform:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// uniform() = (next() >> 11) * 2^-53 in [0, 1); normal() is Box-Muller
// using the cosine branch only, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), with two
// fresh uniforms per draw; poisson(lambda) is Knuth's product-of-uniforms
// method. Draw order is fixed by the generator below.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mipmot/detection.hpp"
#include "mipmot/error.hpp"
#include "mipmot/io.hpp"
#include "mipmot/keyvalue.hpp"

namespace mipmot {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::uint64_t state_;
};

enum class ScenarioLayout {
  Lanes,     // parallel lanes, alternating direction; paths never meet
  Crossing,  // pairs of look-alike objects whose paths cross mid-sequence
};

struct OcclusionWindow {
  int object = 0;
  int start = 0;
  int length = 0;
};

struct ScenarioConfig {
  std::string name = "0000";
  ScenarioLayout layout = ScenarioLayout::Lanes;
  int num_objects = 10;
  int num_frames = 100;
  double extent = 100.0;        // spread of start positions along x (m)
  double lane_spacing = 8.0;    // lateral spacing between lanes / pairs (m)
  double speed_min = 0.5;       // m / frame
  double speed_max = 1.5;
  double turn_rate = 0.0;       // rad / frame
  double crossing_gap = 0.0;    // longitudinal offset inside a crossing pair (m)
  double length = 4.0, width = 1.8, height = 1.6;

  std::vector<OcclusionWindow> occlusions;
  int random_occlusions = 0;    // extra random windows per object
  int occlusion_length = 3;
  double miss_prob = 0.0;       // independent per-detection dropout

  double fp_rate = 0.0;         // expected false positives per frame
  double fp_margin = 10.0;      // clutter region grows the GT bounds by this (m)
  double pos_noise = 0.0;       // sigma on x, y, z (m)
  double tp_score_mean = 1.0, tp_score_sd = 0.0;
  double fp_score_mean = 0.5, fp_score_sd = 0.1;

  int embedding_dim = 0;        // 0 disables appearance features
  double embedding_spread = 1.0;  // sigma of per-identity means
  double embedding_noise = 0.1;   // per-detection sigma

  std::uint64_t seed = 1;
};

inline void validate(const ScenarioConfig& c) {
  if (c.num_objects < 0 || c.num_frames < 0) throw InvalidInput("scenario: counts must be >= 0");
  if (c.speed_min < 0.0 || c.speed_max < c.speed_min) throw InvalidInput("scenario: need 0 <= speed_min <= speed_max");
  if (c.fp_rate < 0.0 || c.pos_noise < 0.0 || c.tp_score_sd < 0.0 || c.fp_score_sd < 0.0 ||
      c.embedding_noise < 0.0 || c.embedding_spread < 0.0 || c.fp_margin < 0.0) {
    throw InvalidInput("scenario: rates and spreads must be >= 0");
  }
  if (c.miss_prob < 0.0 || c.miss_prob > 1.0) throw InvalidInput("scenario: miss_prob must be in [0, 1]");
  if (c.random_occlusions < 0 || c.occlusion_length < 0 || c.embedding_dim < 0) {
    throw InvalidInput("scenario: occlusion and embedding sizes must be >= 0");
  }
  if (c.length <= 0.0 || c.width <= 0.0 || c.height <= 0.0) throw InvalidInput("scenario: object size must be > 0");
  for (const auto& o : c.occlusions) {
    if (o.object < 0 || o.object >= c.num_objects || o.start < 0 || o.length < 0) {
      throw InvalidInput("scenario: occlusion window out of range");
    }
  }
}

// Applies one "key = value" entry. Unknown keys raise ConfigError.
inline void apply_scenario_key(ScenarioConfig& c, const KeyValue& e) {
  const std::string& k = e.key;
  if (k == "name") c.name = e.value;
  else if (k == "layout") {
    if (e.value == "lanes") c.layout = ScenarioLayout::Lanes;
    else if (e.value == "crossing") c.layout = ScenarioLayout::Crossing;
    else throw ConfigError(k, "expected 'lanes' or 'crossing'");
  }
  else if (k == "num_objects") c.num_objects = kv::as_int(e);
  else if (k == "num_frames") c.num_frames = kv::as_int(e);
  else if (k == "extent") c.extent = kv::as_double(e);
  else if (k == "lane_spacing") c.lane_spacing = kv::as_double(e);
  else if (k == "speed_min") c.speed_min = kv::as_double(e);
  else if (k == "speed_max") c.speed_max = kv::as_double(e);
  else if (k == "turn_rate") c.turn_rate = kv::as_double(e);
  else if (k == "crossing_gap") c.crossing_gap = kv::as_double(e);
  else if (k == "size") {
    const auto v = kv::as_doubles(e, 3);
    c.length = v[0];
    c.width = v[1];
    c.height = v[2];
  }
  else if (k == "occlusions") {
    // object:start:length, comma separated
    c.occlusions.clear();
    for (const auto& item : kv::as_strings(e)) {
      const auto parts = detail::split(item, ":");
      std::optional<int> o, s, l;
      if (parts.size() == 3) {
        o = detail::parse_int(parts[0]);
        s = detail::parse_int(parts[1]);
        l = detail::parse_int(parts[2]);
      }
      if (!o || !s || !l) throw ConfigError(k, "expected object:start:length, got '" + item + "'");
      c.occlusions.push_back({*o, *s, *l});
    }
  }
  else if (k == "random_occlusions") c.random_occlusions = kv::as_int(e);
  else if (k == "occlusion_length") c.occlusion_length = kv::as_int(e);
  else if (k == "miss_prob") c.miss_prob = kv::as_double(e);
  else if (k == "fp_rate") c.fp_rate = kv::as_double(e);
  else if (k == "fp_margin") c.fp_margin = kv::as_double(e);
  else if (k == "pos_noise") c.pos_noise = kv::as_double(e);
  else if (k == "tp_score_mean") c.tp_score_mean = kv::as_double(e);
  else if (k == "tp_score_sd") c.tp_score_sd = kv::as_double(e);
  else if (k == "fp_score_mean") c.fp_score_mean = kv::as_double(e);
  else if (k == "fp_score_sd") c.fp_score_sd = kv::as_double(e);
  else if (k == "embedding_dim") c.embedding_dim = kv::as_int(e);
  else if (k == "embedding_spread") c.embedding_spread = kv::as_double(e);
  else if (k == "embedding_noise") c.embedding_noise = kv::as_double(e);
  else if (k == "seed") {
    const auto v = detail::parse_double(e.value);
    if (!v || *v < 0 || *v != std::floor(*v)) throw ConfigError(k, "expected a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  else throw ConfigError(k, "unknown scenario key");
}

inline ScenarioConfig load_scenario(std::istream& in, const std::string& source = "<scenario>") {
  ScenarioConfig c;
  for (const auto& e : parse_key_values(in, source)) apply_scenario_key(c, e);
  validate(c);
  return c;
}

struct Scenario {
  std::vector<LabelRecord> labels;
  std::vector<DetectionRecord> detections;
};

namespace detail {

struct ObjectMotion {
  double x, y, speed, heading, lateral;  // lateral: crossing drift per frame
};

inline double clip_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

inline Scenario generate(const ScenarioConfig& cfg) {
  validate(cfg);
  SplitMix64 rng(cfg.seed);
  const int n = cfg.num_objects;

  // Initial motion.
  std::vector<detail::ObjectMotion> objs;
  objs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    detail::ObjectMotion m{};
    m.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    if (cfg.layout == ScenarioLayout::Lanes) {
      m.x = rng.uniform(-0.5 * cfg.extent, 0.5 * cfg.extent);
      m.y = (i - 0.5 * (n - 1)) * cfg.lane_spacing;
      m.heading = (i % 2 == 0) ? 0.0 : std::numbers::pi;
    } else {
      const int pair = i / 2;
      const bool second = (i % 2) == 1;
      const bool solo = !second && i + 1 >= n;
      const double half = 0.25 * cfg.lane_spacing;
      m.y = pair * cfg.lane_spacing * 2.0 + (solo ? 0.0 : (second ? half : -half));
      if (second) {
        m.speed = objs.back().speed;
        m.x = objs.back().x - cfg.crossing_gap;
      } else {
        m.x = rng.uniform(-0.5 * cfg.extent, 0.5 * cfg.extent);
      }
      // Reach the pair's center line at the middle frame.
      const double frames_to_cross = std::max(1.0, 0.5 * (cfg.num_frames - 1));
      m.lateral = solo ? 0.0 : (second ? -half : half) / frames_to_cross;
      m.heading = 0.0;
    }
    objs.push_back(m);
  }

  // Occlusion windows.
  std::vector<std::vector<char>> hidden(static_cast<std::size_t>(n),
                                        std::vector<char>(static_cast<std::size_t>(cfg.num_frames), 0));
  auto hide = [&](int obj, int start, int len) {
    for (int f = start; f < start + len && f < cfg.num_frames; ++f) {
      hidden[static_cast<std::size_t>(obj)][static_cast<std::size_t>(f)] = 1;
    }
  };
  for (const auto& o : cfg.occlusions) hide(o.object, o.start, o.length);
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < cfg.random_occlusions; ++w) {
      const int last_start = std::max(1, cfg.num_frames - cfg.occlusion_length);
      const int start = 1 + static_cast<int>(rng.uniform() * (last_start - 1));
      hide(i, start, cfg.occlusion_length);
    }
  }

  // Appearance means.
  std::vector<Embedding> means;
  if (cfg.embedding_dim > 0) {
    for (int i = 0; i < n; ++i) {
      if (cfg.layout == ScenarioLayout::Crossing && i % 2 == 1) {
        means.push_back(means.back());  // look-alike pair
        continue;
      }
      Embedding e(static_cast<std::size_t>(cfg.embedding_dim));
      for (double& v : e) v = rng.normal(0.0, cfg.embedding_spread);
      means.push_back(std::move(e));
    }
  }
  auto sample_embedding = [&](const Embedding* mean) {
    Embedding e(static_cast<std::size_t>(cfg.embedding_dim));
    for (std::size_t j = 0; j < e.size(); ++j) {
      e[j] = mean ? rng.normal((*mean)[j], cfg.embedding_noise) : rng.normal(0.0, cfg.embedding_spread);
    }
    return e;
  };

  Scenario out;
  for (int f = 0; f < cfg.num_frames; ++f) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (int i = 0; i < n; ++i) {
      detail::ObjectMotion& m = objs[static_cast<std::size_t>(i)];
      if (f > 0) {
        m.heading = wrap_angle(m.heading + cfg.turn_rate);
        m.x += m.speed * std::cos(m.heading);
        m.y += m.speed * std::sin(m.heading) + m.lateral;
      }
      const double box_heading = wrap_angle(std::atan2(m.speed * std::sin(m.heading) + m.lateral,
                                                       m.speed * std::cos(m.heading)));
      const Box3D gt{m.x, m.y, 0.5 * cfg.height, cfg.length, cfg.width, cfg.height,
                     m.speed > 0.0 ? box_heading : m.heading};
      xmin = std::min(xmin, gt.x);
      xmax = std::max(xmax, gt.x);
      ymin = std::min(ymin, gt.y);
      ymax = std::max(ymax, gt.y);

      LabelRecord label;
      label.frame = f;
      label.track_id = i;
      label.box = gt;
      out.labels.push_back(label);

      // Per-detection draws happen for every object so that toggling one
      // corruption does not reshuffle the others.
      const bool dropped = rng.uniform() < cfg.miss_prob;
      Box3D det = gt;
      det.x += rng.normal(0.0, cfg.pos_noise);
      det.y += rng.normal(0.0, cfg.pos_noise);
      det.z += rng.normal(0.0, cfg.pos_noise);
      const double score = detail::clip_unit(rng.normal(cfg.tp_score_mean, cfg.tp_score_sd));
      std::optional<Embedding> emb;
      if (cfg.embedding_dim > 0) emb = sample_embedding(&means[static_cast<std::size_t>(i)]);
      if (dropped || hidden[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)]) continue;
      out.detections.push_back({f, Detection{det, score, std::move(emb), std::nullopt}});
    }

    const int clutter = rng.poisson(cfg.fp_rate);
    for (int c = 0; c < clutter; ++c) {
      Box3D b;
      const double lo_x = (n > 0 ? xmin : 0.0) - cfg.fp_margin, hi_x = (n > 0 ? xmax : 0.0) + cfg.fp_margin;
      const double lo_y = (n > 0 ? ymin : 0.0) - cfg.fp_margin, hi_y = (n > 0 ? ymax : 0.0) + cfg.fp_margin;
      b.x = rng.uniform(lo_x, hi_x);
      b.y = rng.uniform(lo_y, hi_y);
      b.z = 0.5 * cfg.height;
      b.l = cfg.length;
      b.w = cfg.width;
      b.h = cfg.height;
      b.a = wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
      const double score = detail::clip_unit(rng.normal(cfg.fp_score_mean, cfg.fp_score_sd));
      std::optional<Embedding> emb;
      if (cfg.embedding_dim > 0) emb = sample_embedding(nullptr);
      out.detections.push_back({f, Detection{b, score, std::move(emb), std::nullopt}});
    }
  }
  return out;
}

}  // namespace mipmot
