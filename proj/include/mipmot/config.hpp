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

// Run configuration: every tunable of the pipeline in one key-value file.
//
// Precedence, lowest first: built-in defaults, the config file, then
// command-line "--set key=value" overrides. Recognized keys:
//
//   kalman.p0                   10 diagonal entries of the initial covariance
//   kalman.r                    7 diagonal entries of the measurement covariance
//   kalman.q                    10 diagonal entries (or 1, broadcast) of the process covariance
//   affinity.beta_over_alpha    motion/appearance weight ratio (default 10)
//   affinity.use_appearance     bool, default true
//   affinity.use_distance       bool, default true (center-distance term)
//   affinity.use_iou            bool, default true (3D IoU term)
//   association.method          mip | hungarian
//   association.w_cls           default 100
//   association.w_aff           default 22
//   association.w_se            default 1
//   association.hungarian_gate  none | minimum affinity kept after matching
//   association.track_confidence  last | mean
//   tracker.theta_cls           detection confidence threshold, default 0.85
//   tracker.theta_hit           default 0
//   tracker.theta_miss          default 2
//   tracker.default_start_prob  default 0.5
//   tracker.default_end_prob    default 0.5
//   eval.iou_threshold          default 0.5 (strict)
//   eval.mostly_tracked         default 0.8
//   eval.mostly_lost            default 0.2
//   eval.max_occluded           none | integer
//   run.threads                 worker threads, 0 = hardware concurrency
//   run.object_type             type column written to results, default Car

#pragma once

#include <istream>
#include <optional>
#include <sstream>
#include <string>

#include "mipmot/eval.hpp"
#include "mipmot/keyvalue.hpp"
#include "mipmot/tracker.hpp"

namespace mipmot {

struct RunConfig {
  StateVector p0 = KalmanConfig::defaults().initial_cov.diagonal();
  MeasVector r = KalmanConfig::defaults().meas_cov.diagonal();
  StateVector q = KalmanConfig::defaults().process_cov.diagonal();

  double beta_over_alpha = 10.0;
  bool use_appearance = true;
  bool use_distance = true;
  bool use_iou = true;

  Associator associator = Associator::Mip;
  AssociationWeights weights;
  std::optional<double> hungarian_gate;
  TrackConfidence track_confidence = TrackConfidence::Last;

  double theta_cls = 0.85;
  int theta_hit = 0;
  int theta_miss = 2;
  double default_start_prob = 0.5;
  double default_end_prob = 0.5;

  EvalConfig eval;
  int threads = 0;
  std::string object_type = "Car";

  AffinityWeights affinity_weights() const {
    if (!use_appearance) return AffinityWeights::motion_only();
    if (!use_distance && !use_iou) return AffinityWeights::appearance_only();
    return AffinityWeights::from_ratio(beta_over_alpha);
  }

  TrackerConfig tracker_config() const {
    TrackerConfig t;
    t.kalman = KalmanConfig::from_diagonals(p0, r, q);
    t.affinity = affinity_weights();
    t.motion_terms = {use_distance, use_iou};
    t.association = weights;
    t.associator = associator;
    t.hungarian_gate = hungarian_gate;
    t.track_confidence = track_confidence;
    t.theta_cls = theta_cls;
    t.theta_hit = theta_hit;
    t.theta_miss = theta_miss;
    t.default_start_prob = default_start_prob;
    t.default_end_prob = default_end_prob;
    validate(t);
    return t;
  }
};

namespace detail {
template <typename Vec>
Vec diagonal_from(const KeyValue& e, bool allow_scalar) {
  const auto v = kv::as_doubles(e);
  Vec out;
  if (allow_scalar && v.size() == 1) {
    out.setConstant(v[0]);
  } else if (v.size() == static_cast<std::size_t>(out.size())) {
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  } else {
    throw ConfigError(e.key, "expected " + std::to_string(out.size()) + " values");
  }
  if (out.minCoeff() < 0.0) throw ConfigError(e.key, "covariance diagonal must be >= 0");
  return out;
}

inline double positive(const KeyValue& e) {
  const double v = kv::as_double(e);
  if (!(v > 0.0)) throw ConfigError(e.key, "must be > 0");
  return v;
}

inline double unit(const KeyValue& e) {
  const double v = kv::as_double(e);
  if (v < 0.0 || v > 1.0) throw ConfigError(e.key, "must be in [0, 1]");
  return v;
}
}  // namespace detail

// Applies one entry. Unknown keys and bad values raise ConfigError.
inline void apply_run_key(RunConfig& c, const KeyValue& e) {
  const std::string& k = e.key;
  if (k == "kalman.p0") c.p0 = detail::diagonal_from<StateVector>(e, false);
  else if (k == "kalman.r") c.r = detail::diagonal_from<MeasVector>(e, false);
  else if (k == "kalman.q") c.q = detail::diagonal_from<StateVector>(e, true);
  else if (k == "affinity.beta_over_alpha") {
    c.beta_over_alpha = kv::as_double(e);
    if (c.beta_over_alpha < 0.0) throw ConfigError(k, "must be >= 0");
  }
  else if (k == "affinity.use_appearance") c.use_appearance = kv::as_bool(e);
  else if (k == "affinity.use_distance") c.use_distance = kv::as_bool(e);
  else if (k == "affinity.use_iou") c.use_iou = kv::as_bool(e);
  else if (k == "association.method") {
    if (e.value == "mip") c.associator = Associator::Mip;
    else if (e.value == "hungarian") c.associator = Associator::Hungarian;
    else throw ConfigError(k, "expected 'mip' or 'hungarian'");
  }
  else if (k == "association.w_cls") c.weights.w_cls = detail::positive(e);
  else if (k == "association.w_aff") c.weights.w_aff = detail::positive(e);
  else if (k == "association.w_se") c.weights.w_se = detail::positive(e);
  else if (k == "association.hungarian_gate") {
    if (e.value == "none") c.hungarian_gate.reset();
    else c.hungarian_gate = kv::as_double(e);
  }
  else if (k == "association.track_confidence") {
    if (e.value == "last") c.track_confidence = TrackConfidence::Last;
    else if (e.value == "mean") c.track_confidence = TrackConfidence::Mean;
    else throw ConfigError(k, "expected 'last' or 'mean'");
  }
  else if (k == "tracker.theta_cls") c.theta_cls = detail::unit(e);
  else if (k == "tracker.theta_hit") c.theta_hit = kv::as_int(e);
  else if (k == "tracker.theta_miss") c.theta_miss = kv::as_int(e);
  else if (k == "tracker.default_start_prob") c.default_start_prob = detail::unit(e);
  else if (k == "tracker.default_end_prob") c.default_end_prob = detail::unit(e);
  else if (k == "eval.iou_threshold") c.eval.iou_threshold = detail::unit(e);
  else if (k == "eval.mostly_tracked") c.eval.mostly_tracked = detail::unit(e);
  else if (k == "eval.mostly_lost") c.eval.mostly_lost = detail::unit(e);
  else if (k == "eval.max_occluded") {
    if (e.value == "none") c.eval.max_occluded.reset();
    else c.eval.max_occluded = kv::as_int(e);
  }
  else if (k == "run.threads") c.threads = kv::as_int(e);
  else if (k == "run.object_type") c.object_type = e.value;
  else throw ConfigError(k, "unknown key");

  if (c.theta_hit < 0) throw ConfigError("tracker.theta_hit", "must be >= 0");
  if (c.theta_miss < 0) throw ConfigError("tracker.theta_miss", "must be >= 0");
  if (c.threads < 0) throw ConfigError("run.threads", "must be >= 0");
}

inline RunConfig load_run_config(std::istream& in, const std::string& source = "<config>") {
  RunConfig c;
  for (const auto& e : parse_key_values(in, source)) apply_run_key(c, e);
  return c;
}

}  // namespace mipmot
