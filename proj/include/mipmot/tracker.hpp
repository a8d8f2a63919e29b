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

// Online tracking pipeline for one sequence.

#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mipmot/affinity.hpp"
#include "mipmot/association.hpp"
#include "mipmot/detection.hpp"
#include "mipmot/error.hpp"
#include "mipmot/kalman.hpp"

namespace mipmot {

enum class TrackStatus { Tentative, Confirmed };
enum class Associator { Mip, Hungarian };
// How a track's classification confidence is derived from its detections.
enum class TrackConfidence { Last, Mean };

struct Track {
  int id = 0;
  KalmanState state;
  Box3D last_box;
  std::optional<Embedding> embedding;
  double confidence = 0.0;
  int hits = 0;
  int misses = 0;
  int associations = 0;  // detections absorbed over the lifetime
  TrackStatus status = TrackStatus::Tentative;
};

struct TrackerConfig {
  KalmanConfig kalman = KalmanConfig::defaults();
  AffinityWeights affinity = AffinityWeights::from_ratio(10.0);
  MotionTerms motion_terms;
  AssociationWeights association;
  Associator associator = Associator::Mip;
  std::optional<double> hungarian_gate;
  TrackConfidence track_confidence = TrackConfidence::Last;
  double theta_cls = 0.85;
  int theta_hit = 0;
  int theta_miss = 2;
  double default_start_prob = 0.5;
  double default_end_prob = 0.5;
};

inline void validate(const TrackerConfig& cfg) {
  validate(cfg.kalman);
  validate(cfg.affinity);
  const auto& w = cfg.association;
  if (!(w.w_cls > 0.0) || !(w.w_aff > 0.0) || !(w.w_se > 0.0)) {
    throw InvalidInput("tracker: association weights must be positive");
  }
  if (!(cfg.theta_cls >= 0.0 && cfg.theta_cls <= 1.0)) throw InvalidInput("tracker: theta_cls must be in [0, 1]");
  if (cfg.theta_hit < 0 || cfg.theta_miss < 0) throw InvalidInput("tracker: thresholds must be >= 0");
  for (double p : {cfg.default_start_prob, cfg.default_end_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("tracker: default start/end probability must be in [0, 1]");
  }
}

struct TrackOutput {
  int id = 0;
  Box3D box;
  double score = 0.0;
};

struct FrameResult {
  int frame = 0;
  std::vector<TrackOutput> tracks;  // ascending id
};

class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {}) : cfg_(std::move(cfg)) { validate(cfg_); }

  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Track>& tracks() const { return tracks_; }

  // Processes one frame. Frames must arrive in strictly increasing order.
  FrameResult step(int frame, std::span<const Detection> detections) {
    if (last_frame_ && frame <= *last_frame_) {
      throw InvalidInput("tracker: frame " + std::to_string(frame) + " does not follow frame " +
                         std::to_string(*last_frame_));
    }
    last_frame_ = frame;

    std::vector<Detection> dets;
    for (const Detection& d : detections) {
      validate(d);
      if (d.score >= cfg_.theta_cls) dets.push_back(d);
    }

    const std::vector<Box3D> predicted = predict();
    const AffinityMatrix affinity = affinities(dets, predicted);
    const AssociationResult assoc = associate(dets, affinity);

    FrameResult out = apply_lifecycle(assoc, dets);
    out.frame = frame;
    return out;
  }

  // Advances every track by one frame and returns the predicted boxes.
  std::vector<Box3D> predict() {
    std::vector<Box3D> boxes;
    boxes.reserve(tracks_.size());
    for (Track& t : tracks_) {
      Prediction p = kf_predict(t.state, cfg_.kalman);
      t.state = p.state;
      boxes.push_back(p.box);
    }
    return boxes;
  }

  AffinityMatrix affinities(std::span<const Detection> dets, std::span<const Box3D> predicted) const {
    std::vector<std::optional<Embedding>> embeddings;
    embeddings.reserve(tracks_.size());
    for (const Track& t : tracks_) embeddings.push_back(t.embedding);
    return compute_affinities(dets, predicted, embeddings, cfg_.affinity, cfg_.motion_terms);
  }

  AssociationProblem make_problem(std::span<const Detection> dets, const AffinityMatrix& affinity) const {
    const auto m = static_cast<Eigen::Index>(dets.size());
    const auto n = static_cast<Eigen::Index>(tracks_.size());
    AssociationProblem p;
    p.cls_det.resize(m);
    p.se_det.resize(m);
    for (Eigen::Index d = 0; d < m; ++d) {
      p.cls_det(d) = dets[static_cast<std::size_t>(d)].score;
      p.se_det(d) = dets[static_cast<std::size_t>(d)].start_prob.value_or(cfg_.default_start_prob);
    }
    p.cls_trk.resize(n);
    p.se_trk = Eigen::VectorXd::Constant(n, cfg_.default_end_prob);
    for (Eigen::Index k = 0; k < n; ++k) p.cls_trk(k) = tracks_[static_cast<std::size_t>(k)].confidence;
    p.aff = affinity.refined;
    p.weights = cfg_.association;
    return p;
  }

  // Hungarian decisions are expressed in the same variables: matched pairs
  // set y_aff, every leftover detection starts a track.
  AssociationResult associate(std::span<const Detection> dets, const AffinityMatrix& affinity) const {
    if (cfg_.associator == Associator::Mip) return solve_mip(make_problem(dets, affinity));

    const auto m = static_cast<Eigen::Index>(dets.size());
    const auto n = static_cast<Eigen::Index>(tracks_.size());
    AssociationResult r = AssociationResult::zeros(m, n);
    for (const auto& [d, k] : hungarian_baseline(affinity.refined, cfg_.hungarian_gate)) {
      r.aff(d, k) = 1;
      r.cls_det(d) = 1;
      r.cls_trk(k) = 1;
    }
    for (Eigen::Index d = 0; d < m; ++d) {
      if (r.cls_det(d) == 0) {
        r.se_det(d) = 1;
        r.cls_det(d) = 1;
      }
    }
    return r;
  }

  // Applies one frame's association to the (already predicted) tracks:
  //  - matched tracks are updated and confirmed once hits > theta_hit,
  //  - starting detections open confirmed tracks,
  //  - unselected detections open tentative tracks with one miss,
  //  - every other track accrues a miss and coasts,
  //  - tracks with more than theta_miss consecutive misses are dropped.
  // Returns the confirmed tracks that absorbed a detection this frame.
  FrameResult apply_lifecycle(const AssociationResult& assoc, std::span<const Detection> dets) {
    const auto m = static_cast<Eigen::Index>(dets.size());
    const auto n = static_cast<Eigen::Index>(tracks_.size());
    if (assoc.aff.rows() != m || assoc.aff.cols() != n) {
      throw InvalidInput("tracker: association result does not match frame dimensions");
    }
    FrameResult out;
    std::vector<char> matched(static_cast<std::size_t>(n), 0);

    for (Eigen::Index d = 0; d < m; ++d) {
      const Detection& det = dets[static_cast<std::size_t>(d)];
      if (const auto k = assoc.track_of(d)) {
        Track& t = tracks_[static_cast<std::size_t>(*k)];
        matched[static_cast<std::size_t>(*k)] = 1;
        t.state = kf_update(t.state, to_measurement(det.box), cfg_.kalman);
        t.last_box = normalized(det.box);
        if (det.embedding) t.embedding = det.embedding;
        absorb_confidence(t, det.score);
        t.hits += 1;
        t.misses = 0;
        if (t.hits > cfg_.theta_hit) t.status = TrackStatus::Confirmed;
        if (t.status == TrackStatus::Confirmed) out.tracks.push_back({t.id, t.state.box(), det.score});
      }
    }

    for (Eigen::Index k = 0; k < n; ++k) {
      if (matched[static_cast<std::size_t>(k)]) continue;
      Track& t = tracks_[static_cast<std::size_t>(k)];
      t.misses += 1;
      t.hits = 0;
    }

    for (Eigen::Index d = 0; d < m; ++d) {
      if (assoc.track_of(d)) continue;
      const Detection& det = dets[static_cast<std::size_t>(d)];
      Track t;
      t.id = next_id_++;
      t.state = kf_init(det.box, cfg_.kalman);
      t.last_box = normalized(det.box);
      t.embedding = det.embedding;
      absorb_confidence(t, det.score);
      if (assoc.se_det(d) == 1) {
        t.status = TrackStatus::Confirmed;
        t.hits = 1;
        t.misses = 0;
        out.tracks.push_back({t.id, t.state.box(), det.score});
      } else {
        t.status = TrackStatus::Tentative;
        t.hits = 0;
        t.misses = 1;
      }
      tracks_.push_back(std::move(t));
    }

    std::erase_if(tracks_, [&](const Track& t) { return t.misses > cfg_.theta_miss; });
    std::sort(out.tracks.begin(), out.tracks.end(),
              [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
    return out;
  }

 private:
  void absorb_confidence(Track& t, double score) const {
    t.associations += 1;
    if (cfg_.track_confidence == TrackConfidence::Last) {
      t.confidence = score;
    } else {
      t.confidence += (score - t.confidence) / t.associations;
    }
  }

  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  std::optional<int> last_frame_;
};

}  // namespace mipmot
