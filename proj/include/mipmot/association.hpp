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

// Data association as a binary program over three variable families:
//   y_cls  - object (detection or track) is a true positive,
//   y_aff  - detection d and track k are the same object,
//   y_se   - detection starts a new identity / track ends its identity,
// subject to, for every detection d and track k,
//   y_cls_d = sum_k y_aff_dk + y_se_d,   y_cls_k = sum_d y_aff_dk + y_se_k,
// maximizing  sum c_cls*y_cls + sum c_aff*y_aff + sum c_se*y_se  with
//   c_cls = w_cls (x_cls - 1),  c_aff = w_aff x_aff,  c_se = w_se x_se.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mipmot/assignment.hpp"
#include "mipmot/error.hpp"

namespace mipmot {

struct AssociationWeights {
  double w_cls = 100.0;
  double w_aff = 22.0;
  double w_se = 1.0;
};

struct AssociationProblem {
  Eigen::VectorXd cls_det;  // detection confidences, [0, 1]
  Eigen::VectorXd cls_trk;  // track confidences, [0, 1]
  Eigen::MatrixXd aff;      // detections x tracks refined affinities
  Eigen::VectorXd se_det;   // start probabilities, [0, 1]
  Eigen::VectorXd se_trk;   // end probabilities, [0, 1]
  AssociationWeights weights;

  Eigen::Index num_dets() const { return cls_det.size(); }
  Eigen::Index num_tracks() const { return cls_trk.size(); }
};

inline void validate(const AssociationProblem& p) {
  const Eigen::Index m = p.num_dets();
  const Eigen::Index n = p.num_tracks();
  if (p.se_det.size() != m || p.se_trk.size() != n || p.aff.rows() != m || p.aff.cols() != n) {
    throw InvalidInput("association: inconsistent problem dimensions");
  }
  auto unit = [](const Eigen::VectorXd& v) {
    return v.size() == 0 || (v.allFinite() && v.minCoeff() >= 0.0 && v.maxCoeff() <= 1.0);
  };
  if (!unit(p.cls_det) || !unit(p.cls_trk) || !unit(p.se_det) || !unit(p.se_trk)) {
    throw InvalidInput("association: confidences must lie in [0, 1]");
  }
  if (!p.aff.allFinite()) throw InvalidInput("association: non-finite affinity");
  const auto& w = p.weights;
  if (!(w.w_cls > 0.0) || !(w.w_aff > 0.0) || !(w.w_se > 0.0)) {
    throw InvalidInput("association: weights must be positive");
  }
}

struct AssociationCosts {
  Eigen::VectorXd cls_det, cls_trk;
  Eigen::MatrixXd aff;
  Eigen::VectorXd se_det, se_trk;
};

inline AssociationCosts build_costs(const AssociationProblem& p) {
  validate(p);
  const auto& w = p.weights;
  AssociationCosts c;
  c.cls_det = w.w_cls * (p.cls_det.array() - 1.0).matrix();
  c.cls_trk = w.w_cls * (p.cls_trk.array() - 1.0).matrix();
  c.aff = w.w_aff * p.aff;
  c.se_det = w.w_se * p.se_det;
  c.se_trk = w.w_se * p.se_trk;
  return c;
}

struct AssociationResult {
  Eigen::VectorXi cls_det, cls_trk;
  Eigen::MatrixXi aff;
  Eigen::VectorXi se_det, se_trk;
  double objective = 0.0;

  static AssociationResult zeros(Eigen::Index m, Eigen::Index n) {
    AssociationResult r;
    r.cls_det = Eigen::VectorXi::Zero(m);
    r.cls_trk = Eigen::VectorXi::Zero(n);
    r.aff = Eigen::MatrixXi::Zero(m, n);
    r.se_det = Eigen::VectorXi::Zero(m);
    r.se_trk = Eigen::VectorXi::Zero(n);
    return r;
  }

  // Track matched to detection d, if any.
  std::optional<int> track_of(Eigen::Index d) const {
    for (Eigen::Index k = 0; k < aff.cols(); ++k) {
      if (aff(d, k) != 0) return static_cast<int>(k);
    }
    return std::nullopt;
  }

  std::vector<std::pair<int, int>> matches() const {
    std::vector<std::pair<int, int>> out;
    for (Eigen::Index d = 0; d < aff.rows(); ++d) {
      for (Eigen::Index k = 0; k < aff.cols(); ++k) {
        if (aff(d, k) != 0) out.emplace_back(static_cast<int>(d), static_cast<int>(k));
      }
    }
    return out;
  }
};

inline double objective_value(const AssociationCosts& c, const AssociationResult& r) {
  return c.cls_det.dot(r.cls_det.cast<double>()) + c.cls_trk.dot(r.cls_trk.cast<double>()) +
         (c.aff.array() * r.aff.cast<double>().array()).sum() + c.se_det.dot(r.se_det.cast<double>()) +
         c.se_trk.dot(r.se_trk.cast<double>());
}

// True if every variable is binary and both coupling constraints hold.
inline bool satisfies_constraints(const AssociationResult& r) {
  auto binary = [](const auto& m) { return m.size() == 0 || (m.minCoeff() >= 0 && m.maxCoeff() <= 1); };
  if (!binary(r.cls_det) || !binary(r.cls_trk) || !binary(r.aff) || !binary(r.se_det) || !binary(r.se_trk)) {
    return false;
  }
  for (Eigen::Index d = 0; d < r.aff.rows(); ++d) {
    if (r.cls_det(d) != r.aff.row(d).sum() + r.se_det(d)) return false;
  }
  for (Eigen::Index k = 0; k < r.aff.cols(); ++k) {
    if (r.cls_trk(k) != r.aff.col(k).sum() + r.se_trk(k)) return false;
  }
  return true;
}

namespace detail {

// Cost ordered first by value, then by a secondary count.
struct LexCost {
  double value = 0.0;
  std::int64_t count = 0;

  friend LexCost operator+(LexCost a, LexCost b) { return {a.value + b.value, a.count + b.count}; }
  friend LexCost operator-(LexCost a, LexCost b) { return {a.value - b.value, a.count - b.count}; }
  friend bool operator<(LexCost a, LexCost b) {
    if (a.value != b.value) return a.value < b.value;
    return a.count < b.count;
  }
};

}  // namespace detail

template <>
struct CostTraits<detail::LexCost> {
  static detail::LexCost infinity() { return {std::numeric_limits<double>::infinity(), 0}; }
  static detail::LexCost zero() { return {}; }
};

// Exact maximizer of the association program.
//
// y_cls is implied by the constraints, so each detection either stays
// unselected (value 0), starts (c_cls_d + c_se_d), or matches one track, and
// likewise for tracks. Giving every object its best outside option
// o = max(0, c_cls + c_se) turns the program into a maximum-weight bipartite
// matching with pair gains c_aff_dk + c_cls_d + c_cls_k - o_d - o_k, solved
// as a square assignment with dummy rows and columns. Among optimal
// solutions, more matches are preferred; an object whose outside options tie
// stays unselected.
inline AssociationResult solve_mip(const AssociationProblem& p) {
  const AssociationCosts c = build_costs(p);
  const auto m = static_cast<int>(p.num_dets());
  const auto n = static_cast<int>(p.num_tracks());
  AssociationResult r = AssociationResult::zeros(m, n);
  if (m == 0 && n == 0) return r;

  Eigen::VectorXd out_det(m), out_trk(n);
  for (int d = 0; d < m; ++d) out_det(d) = std::max(0.0, c.cls_det(d) + c.se_det(d));
  for (int k = 0; k < n; ++k) out_trk(k) = std::max(0.0, c.cls_trk(k) + c.se_trk(k));

  const int size = m + n;
  auto cost = [&](int row, int col) -> detail::LexCost {
    if (row < m && col < n) {
      const double gain = c.aff(row, col) + c.cls_det(row) + c.cls_trk(col) - out_det(row) - out_trk(col);
      return {-gain, -1};
    }
    return {};
  };
  const std::vector<int> assignment = solve_assignment<detail::LexCost>(size, size, cost);

  for (int d = 0; d < m; ++d) {
    const int k = assignment[static_cast<std::size_t>(d)];
    if (k < n) {
      r.aff(d, k) = 1;
      r.cls_det(d) = 1;
      r.cls_trk(k) = 1;
    }
  }
  for (int d = 0; d < m; ++d) {
    if (r.cls_det(d) == 0 && c.cls_det(d) + c.se_det(d) > 0.0) {
      r.se_det(d) = 1;
      r.cls_det(d) = 1;
    }
  }
  for (int k = 0; k < n; ++k) {
    if (r.cls_trk(k) == 0 && c.cls_trk(k) + c.se_trk(k) > 0.0) {
      r.se_trk(k) = 1;
      r.cls_trk(k) = 1;
    }
  }
  r.objective = objective_value(c, r);
  return r;
}

inline constexpr Eigen::Index kBruteForceLimit = 5;

// Exhaustive enumeration of every feasible assignment. Test oracle only.
// Ties go to the lexicographically smallest flattened y_aff (row-major),
// then smallest y_se_det, then smallest y_se_trk.
inline AssociationResult brute_force_oracle(const AssociationProblem& p) {
  const AssociationCosts c = build_costs(p);
  const auto m = static_cast<int>(p.num_dets());
  const auto n = static_cast<int>(p.num_tracks());
  if (m > kBruteForceLimit || n > kBruteForceLimit) {
    throw InvalidInput("brute force oracle: at most 5 detections and 5 tracks");
  }

  AssociationResult cur = AssociationResult::zeros(m, n);
  std::optional<AssociationResult> best;

  auto key = [&](const AssociationResult& r) {
    std::vector<int> k;
    for (int d = 0; d < m; ++d)
      for (int t = 0; t < n; ++t) k.push_back(r.aff(d, t));
    for (int d = 0; d < m; ++d) k.push_back(r.se_det(d));
    for (int t = 0; t < n; ++t) k.push_back(r.se_trk(t));
    return k;
  };

  auto consider = [&](double value) {
    if (!best || value > best->objective || (value == best->objective && key(cur) < key(*best))) {
      best = cur;
      best->objective = value;
    }
  };

  // Track-side choices once detections are fixed.
  auto tracks = [&](auto&& self, int k, double value) -> void {
    if (k == n) {
      consider(value);
      return;
    }
    if (cur.cls_trk(k) == 1 && cur.se_trk(k) == 0) {  // matched
      self(self, k + 1, value);
      return;
    }
    self(self, k + 1, value);  // unselected
    cur.se_trk(k) = 1;
    cur.cls_trk(k) = 1;
    self(self, k + 1, value + c.cls_trk(k) + c.se_trk(k));
    cur.se_trk(k) = 0;
    cur.cls_trk(k) = 0;
  };

  auto dets = [&](auto&& self, int d, double value) -> void {
    if (d == m) {
      tracks(tracks, 0, value);
      return;
    }
    self(self, d + 1, value);  // unselected
    cur.se_det(d) = 1;
    cur.cls_det(d) = 1;
    self(self, d + 1, value + c.cls_det(d) + c.se_det(d));
    cur.se_det(d) = 0;
    for (int k = 0; k < n; ++k) {
      if (cur.cls_trk(k) != 0) continue;
      cur.aff(d, k) = 1;
      cur.cls_trk(k) = 1;
      self(self, d + 1, value + c.cls_det(d) + c.cls_trk(k) + c.aff(d, k));
      cur.aff(d, k) = 0;
      cur.cls_trk(k) = 0;
    }
    cur.cls_det(d) = 0;
  };

  dets(dets, 0, 0.0);
  // Re-evaluate in canonical summation order.
  best->objective = objective_value(c, *best);
  return *best;
}

// Maximum-total-affinity one-to-one matching over min(M, N) pairs, treating
// every input as a true positive. Pairs below `gate` are dropped afterwards.
inline std::vector<std::pair<int, int>> hungarian_baseline(const Eigen::MatrixXd& aff,
                                                           std::optional<double> gate = std::nullopt) {
  if (!aff.allFinite()) throw InvalidInput("hungarian: non-finite affinity");
  const auto m = static_cast<int>(aff.rows());
  const auto n = static_cast<int>(aff.cols());
  std::vector<std::pair<int, int>> out;
  if (m == 0 || n == 0) return out;
  if (m <= n) {
    const auto a = solve_assignment<double>(m, n, [&](int i, int j) { return -aff(i, j); });
    for (int d = 0; d < m; ++d) out.emplace_back(d, a[static_cast<std::size_t>(d)]);
  } else {
    const auto a = solve_assignment<double>(n, m, [&](int i, int j) { return -aff(j, i); });
    for (int k = 0; k < n; ++k) out.emplace_back(a[static_cast<std::size_t>(k)], k);
    std::sort(out.begin(), out.end());
  }
  if (gate) {
    std::erase_if(out, [&](const auto& pr) { return aff(pr.first, pr.second) < *gate; });
  }
  return out;
}

}  // namespace mipmot
