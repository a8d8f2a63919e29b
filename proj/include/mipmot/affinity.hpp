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

// Detection-to-track affinities: appearance ranking fused with 3D-DIoU.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mipmot/detection.hpp"
#include "mipmot/error.hpp"
#include "mipmot/geometry.hpp"

namespace mipmot {

// Fusion weights; alpha scales appearance, beta scales motion.
struct AffinityWeights {
  double alpha = 1.0 / 11.0;
  double beta = 10.0 / 11.0;

  // Weights with beta = ratio * alpha and alpha + beta = 1.
  static AffinityWeights from_ratio(double beta_over_alpha) {
    if (!std::isfinite(beta_over_alpha) || beta_over_alpha < 0.0) {
      throw InvalidInput("affinity: beta/alpha ratio must be finite and >= 0");
    }
    return {1.0 / (1.0 + beta_over_alpha), beta_over_alpha / (1.0 + beta_over_alpha)};
  }

  static AffinityWeights motion_only() { return {0.0, 1.0}; }
  static AffinityWeights appearance_only() { return {1.0, 0.0}; }
};

inline void validate(const AffinityWeights& w) {
  if (!(w.alpha >= 0.0) || !(w.beta >= 0.0) || std::abs(w.alpha + w.beta - 1.0) > 1e-9) {
    throw InvalidInput("affinity: weights must be nonnegative and sum to 1");
  }
}

// Which motion terms contribute. Both on gives the full 3D-DIoU.
struct MotionTerms {
  bool distance = true;
  bool iou = true;
};

struct AffinityMatrix {
  Eigen::MatrixXd appearance;  // ranked, in [0, 1]
  Eigen::MatrixXd motion;      // in [0, 2]
  Eigen::MatrixXd refined;     // alpha * appearance + beta * motion
  AffinityWeights weights;     // weights actually applied
  bool appearance_used = false;

  Eigen::Index rows() const { return refined.rows(); }
  Eigen::Index cols() const { return refined.cols(); }
};

// Negated mean absolute difference; 0 for identical embeddings.
inline double raw_appearance_score(std::span<const double> det, std::span<const double> trk) {
  if (det.size() != trk.size()) throw InvalidInput("appearance: embedding dimension mismatch");
  if (det.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < det.size(); ++i) acc += std::abs(det[i] - trk[i]);
  return -acc / static_cast<double>(det.size());
}

namespace detail {
// Softmax of each column (dim = 0) or each row (dim = 1), max-subtracted.
inline Eigen::MatrixXd softmax(const Eigen::MatrixXd& m, int dim) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  if (dim == 0) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Eigen::ArrayXd e = (m.col(c).array() - m.col(c).maxCoeff()).exp();
      out.col(c) = e / e.sum();
    }
  } else {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Eigen::ArrayXd e = (m.row(r).array() - m.row(r).maxCoeff()).exp().transpose();
      out.row(r) = (e / e.sum()).transpose();
    }
  }
  return out;
}
}  // namespace detail

// Average of the column-wise and row-wise softmax of `raw`.
inline Eigen::MatrixXd softmax_ranking(const Eigen::MatrixXd& raw) {
  if (raw.size() == 0) return Eigen::MatrixXd(raw.rows(), raw.cols());
  if (!raw.allFinite()) throw InvalidInput("softmax ranking: non-finite score");
  return 0.5 * (detail::softmax(raw, 0) + detail::softmax(raw, 1));
}

inline Eigen::MatrixXd motion_affinities(std::span<const Detection> dets, std::span<const Box3D> predicted,
                                         MotionTerms terms = {}) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dets.size()), static_cast<Eigen::Index>(predicted.size()));
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      double v = 0.0;
      if (terms.distance && terms.iou) {
        v = diou_affinity(dets[d].box, predicted[k]);
      } else if (terms.distance) {
        v = distance_term(dets[d].box, predicted[k]);
      } else if (terms.iou) {
        v = iou_3d(dets[d].box, predicted[k]);
      }
      m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return m;
}

// Fuses a precomputed raw appearance matrix (higher = more similar) with
// motion affinities. Pass std::nullopt to run motion-only.
inline AffinityMatrix compute_affinities(std::span<const Detection> dets, std::span<const Box3D> predicted,
                                         const std::optional<Eigen::MatrixXd>& raw_appearance,
                                         AffinityWeights weights, MotionTerms terms = {}) {
  validate(weights);
  const auto m = static_cast<Eigen::Index>(dets.size());
  const auto n = static_cast<Eigen::Index>(predicted.size());
  AffinityMatrix out;
  out.motion = motion_affinities(dets, predicted, terms);
  if (raw_appearance) {
    if (raw_appearance->rows() != m || raw_appearance->cols() != n) {
      throw InvalidInput("affinity: appearance matrix shape does not match detections x tracks");
    }
    out.appearance = softmax_ranking(*raw_appearance);
    out.appearance_used = true;
    out.weights = weights;
  } else {
    out.appearance = Eigen::MatrixXd::Zero(m, n);
    out.weights = AffinityWeights::motion_only();
  }
  out.refined = out.weights.alpha * out.appearance + out.weights.beta * out.motion;
  return out;
}

// Full affinity computation for one frame. `predicted` holds one Kalman
// prediction per track; `track_embeddings` the stored track features. If any
// detection or track lacks an embedding, appearance is dropped for the frame.
inline AffinityMatrix compute_affinities(std::span<const Detection> dets, std::span<const Box3D> predicted,
                                         std::span<const std::optional<Embedding>> track_embeddings,
                                         AffinityWeights weights, MotionTerms terms = {}) {
  if (track_embeddings.size() != predicted.size()) {
    throw InvalidInput("affinity: one embedding slot per track required");
  }
  bool have_all = true;
  for (const Detection& d : dets) have_all = have_all && d.embedding.has_value();
  for (const auto& e : track_embeddings) have_all = have_all && e.has_value();

  std::optional<Eigen::MatrixXd> raw;
  if (have_all) {
    raw.emplace(static_cast<Eigen::Index>(dets.size()), static_cast<Eigen::Index>(predicted.size()));
    for (std::size_t d = 0; d < dets.size(); ++d) {
      for (std::size_t k = 0; k < predicted.size(); ++k) {
        (*raw)(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) =
            raw_appearance_score(*dets[d].embedding, *track_embeddings[k]);
      }
    }
  }
  return compute_affinities(dets, predicted, raw, weights, terms);
}

}  // namespace mipmot
