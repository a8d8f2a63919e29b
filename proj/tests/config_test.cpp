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

#include <sstream>

#include <gtest/gtest.h>

#include "mipmot/config.hpp"

namespace mipmot {
namespace {

RunConfig load(const std::string& text) {
  std::istringstream in(text);
  return load_run_config(in, "test.cfg");
}

std::string failing_key(const std::string& text) {
  try {
    load(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return {};
}

TEST(RunConfig, DefaultsMatchTracker) {
  const TrackerConfig t = RunConfig{}.tracker_config();
  const TrackerConfig d;
  EXPECT_DOUBLE_EQ(t.affinity.alpha, d.affinity.alpha);
  EXPECT_DOUBLE_EQ(t.affinity.beta, d.affinity.beta);
  EXPECT_DOUBLE_EQ(t.theta_cls, 0.85);
  EXPECT_EQ(t.theta_miss, 2);
  EXPECT_TRUE(t.kalman.initial_cov.isApprox(KalmanConfig::defaults().initial_cov));
}

TEST(RunConfig, ParsesEveryGroup) {
  const RunConfig c = load(
      "# comment\n"
      "kalman.q = 0.02\n"
      "kalman.r = 1, 1, 1, 0.1, 0.1, 0.1, 0.1\n"
      "affinity.beta_over_alpha = 4\n"
      "association.method = hungarian\n"
      "association.w_cls = 50\n"
      "association.hungarian_gate = 0.3\n"
      "association.track_confidence = mean\n"
      "tracker.theta_cls = 0.9\n"
      "tracker.theta_miss = 3\n"
      "eval.max_occluded = 2\n"
      "run.threads = 2\n");
  EXPECT_DOUBLE_EQ(c.q(5), 0.02);
  EXPECT_DOUBLE_EQ(c.r(0), 1.0);
  EXPECT_EQ(c.associator, Associator::Hungarian);
  EXPECT_DOUBLE_EQ(c.weights.w_cls, 50);
  EXPECT_DOUBLE_EQ(*c.hungarian_gate, 0.3);
  EXPECT_EQ(c.track_confidence, TrackConfidence::Mean);
  EXPECT_DOUBLE_EQ(c.theta_cls, 0.9);
  EXPECT_EQ(c.theta_miss, 3);
  EXPECT_EQ(*c.eval.max_occluded, 2);
  EXPECT_EQ(c.threads, 2);
  const AffinityWeights w = c.affinity_weights();
  EXPECT_DOUBLE_EQ(w.alpha, 0.2);
  EXPECT_DOUBLE_EQ(w.beta, 0.8);
}

TEST(RunConfig, AblationWeights) {
  RunConfig c;
  c.use_appearance = false;
  EXPECT_DOUBLE_EQ(c.affinity_weights().alpha, 0.0);
  c.use_appearance = true;
  c.use_distance = c.use_iou = false;
  EXPECT_DOUBLE_EQ(c.affinity_weights().beta, 0.0);
}

TEST(RunConfig, LaterAssignmentsWin) {
  RunConfig c = load("tracker.theta_cls = 0.9\ntracker.theta_cls = 0.95\n");
  EXPECT_DOUBLE_EQ(c.theta_cls, 0.95);
  apply_run_key(c, parse_assignment("tracker.theta_cls=0.5"));
  EXPECT_DOUBLE_EQ(c.theta_cls, 0.5);
}

TEST(RunConfig, ErrorsNameTheKey) {
  EXPECT_EQ(failing_key("tracker.theta_clz = 0.9\n"), "tracker.theta_clz");
  EXPECT_EQ(failing_key("tracker.theta_cls = 1.5\n"), "tracker.theta_cls");
  EXPECT_EQ(failing_key("kalman.p0 = 1, 2\n"), "kalman.p0");
  EXPECT_EQ(failing_key("kalman.r = -1, 1, 1, 1, 1, 1, 1\n"), "kalman.r");
  EXPECT_EQ(failing_key("association.method = greedy\n"), "association.method");
  EXPECT_EQ(failing_key("association.w_aff = 0\n"), "association.w_aff");
  EXPECT_EQ(failing_key("affinity.use_iou = maybe\n"), "affinity.use_iou");
  EXPECT_EQ(failing_key("tracker.theta_miss = -1\n"), "tracker.theta_miss");
  EXPECT_THROW(load("no equals sign\n"), ParseError);
  EXPECT_THROW(parse_assignment("novalue"), InvalidInput);
}

}  // namespace
}  // namespace mipmot
