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

// Constant-velocity Kalman filter over (x, y, z, l, w, h, a, vx, vy, vz).
// One time step is one frame; velocities are displacements per frame.

#pragma once

#include <Eigen/Dense>

#include "mipmot/error.hpp"
#include "mipmot/geometry.hpp"

namespace mipmot {

inline constexpr int kStateDim = 10;
inline constexpr int kMeasDim = 7;
inline constexpr int kHeadingIndex = 6;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasVector = Eigen::Matrix<double, kMeasDim, 1>;
using MeasMatrix = Eigen::Matrix<double, kMeasDim, kMeasDim>;
using MeasModel = Eigen::Matrix<double, kMeasDim, kStateDim>;

struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix cov = StateMatrix::Identity();

  Box3D box() const {
    return {mean(0), mean(1), mean(2), mean(3), mean(4), mean(5), mean(6)};
  }
};

inline MeasVector to_measurement(const Box3D& b) {
  MeasVector o;
  o << b.x, b.y, b.z, b.l, b.w, b.h, b.a;
  return o;
}

struct KalmanConfig {
  StateMatrix transition;   // A
  MeasModel measurement;    // H
  MeasMatrix meas_cov;      // R
  StateMatrix process_cov;  // Q
  StateMatrix initial_cov;  // P0

  static StateMatrix constant_velocity_transition() {
    StateMatrix a = StateMatrix::Identity();
    for (int i = 0; i < 3; ++i) a(i, 7 + i) = 1.0;
    return a;
  }

  static MeasModel pose_selection() {
    MeasModel h = MeasModel::Zero();
    for (int i = 0; i < kMeasDim; ++i) h(i, i) = 1.0;
    return h;
  }

  // Builds a config from diagonal covariances.
  static KalmanConfig from_diagonals(const StateVector& p0, const MeasVector& r, const StateVector& q) {
    KalmanConfig cfg;
    cfg.transition = constant_velocity_transition();
    cfg.measurement = pose_selection();
    cfg.meas_cov = r.asDiagonal();
    cfg.process_cov = q.asDiagonal();
    cfg.initial_cov = p0.asDiagonal();
    return cfg;
  }

  static KalmanConfig defaults() {
    StateVector p0;
    p0 << 1, 1, 1, 0.1, 0.1, 0.1, 0.1, 10, 10, 10;
    MeasVector r;
    r << 0.5, 0.5, 0.5, 0.05, 0.05, 0.05, 0.05;
    return from_diagonals(p0, r, StateVector::Constant(0.01));
  }
};

namespace detail {
template <typename M>
bool is_symmetric_psd(const M& m) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<M> es(m);
  return es.eigenvalues().minCoeff() >= -1e-9;
}
}  // namespace detail

// Throws InvalidInput if R, Q or P0 is not symmetric PSD.
inline void validate(const KalmanConfig& cfg) {
  if (!detail::is_symmetric_psd(cfg.meas_cov)) throw InvalidInput("kalman: R must be symmetric PSD");
  if (!detail::is_symmetric_psd(cfg.process_cov)) throw InvalidInput("kalman: Q must be symmetric PSD");
  if (!detail::is_symmetric_psd(cfg.initial_cov)) throw InvalidInput("kalman: P0 must be symmetric PSD");
}

inline KalmanState kf_init(const Box3D& box, const KalmanConfig& cfg) {
  validate(box);
  KalmanState s;
  s.mean.head<kMeasDim>() = to_measurement(box);
  s.mean(kHeadingIndex) = wrap_angle(box.a);
  s.cov = cfg.initial_cov;
  return s;
}

struct Prediction {
  KalmanState state;
  Box3D box;
};

inline Prediction kf_predict(const KalmanState& s, const KalmanConfig& cfg) {
  Prediction p;
  p.state.mean = cfg.transition * s.mean;
  p.state.mean(kHeadingIndex) = wrap_angle(p.state.mean(kHeadingIndex));
  p.state.cov = cfg.transition * s.cov * cfg.transition.transpose() + cfg.process_cov;
  p.box = p.state.box();
  return p;
}

// Measurement update of a predicted state. Throws NumericalError when the
// innovation covariance H P H^T + R is singular.
inline KalmanState kf_update(const KalmanState& predicted, const MeasVector& obs, const KalmanConfig& cfg) {
  const MeasModel& h = cfg.measurement;
  const MeasMatrix innov_cov = h * predicted.cov * h.transpose() + cfg.meas_cov;
  Eigen::FullPivLU<MeasMatrix> lu(innov_cov);
  if (!lu.isInvertible()) throw NumericalError("kalman: singular innovation covariance");

  MeasVector innovation = obs - h * predicted.mean;
  innovation(kHeadingIndex) = wrap_angle(innovation(kHeadingIndex));

  const Eigen::Matrix<double, kStateDim, kMeasDim> gain = predicted.cov * h.transpose() * lu.inverse();

  KalmanState out;
  out.mean = predicted.mean + gain * innovation;
  out.mean(kHeadingIndex) = wrap_angle(out.mean(kHeadingIndex));
  out.cov = (StateMatrix::Identity() - gain * h) * predicted.cov;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace mipmot
