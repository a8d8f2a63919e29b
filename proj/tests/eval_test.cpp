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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "mipmot/eval.hpp"

namespace mipmot {
namespace {

Box3D car(double x, double y) { return {x, y, 0.8, 4.0, 2.0, 1.6, 0.0}; }

LabelRecord label(int frame, int id, Box3D box) {
  LabelRecord l;
  l.frame = frame;
  l.track_id = id;
  l.box = box;
  return l;
}

// Three objects on a line, 20 frames.
std::vector<LabelRecord> ground_truth() {
  std::vector<LabelRecord> gt;
  for (int f = 0; f < 20; ++f) {
    for (int id = 0; id < 3; ++id) gt.push_back(label(f, id, car(f * 1.0, id * 10.0)));
  }
  return gt;
}

std::vector<LabelRecord> relabel(std::vector<LabelRecord> v, int offset) {
  for (auto& l : v) l.track_id += offset;
  return v;
}

TEST(Evaluate, IdentityIsPerfect) {
  const auto gt = ground_truth();
  const MotReport r = evaluate_sequence(gt, gt);
  EXPECT_EQ(r.gt_total, 60);
  EXPECT_EQ(r.tp, 60);
  EXPECT_EQ(r.fp + r.fn + r.idsw + r.frag, 0);
  EXPECT_DOUBLE_EQ(r.mota(), 1.0);
  EXPECT_DOUBLE_EQ(r.motp(), 1.0);
  EXPECT_EQ(r.mt, 3);
  EXPECT_FALSE(r.mota_undefined());
}

TEST(Evaluate, EmptyHypothesesAreAllMisses) {
  const MotReport r = evaluate_sequence(ground_truth(), {});
  EXPECT_EQ(r.fn, 60);
  EXPECT_EQ(r.tp, 0);
  EXPECT_DOUBLE_EQ(r.mota(), 0.0);
  EXPECT_EQ(r.ml, 3);
}

TEST(Evaluate, EmptyGroundTruthFlagged) {
  const MotReport r = evaluate_sequence({}, {label(0, 1, car(0, 0))});
  EXPECT_TRUE(r.mota_undefined());
  EXPECT_DOUBLE_EQ(r.mota(), 1.0);
  EXPECT_EQ(r.fp, 1);
}

TEST(Evaluate, ThresholdIsStrict) {
  // 3 m boxes shifted by 1 m: overlap 4, union 8, IoU exactly 1/2.
  const Box3D g{0, 0, 0.8, 3.0, 2.0, 1.6, 0.0};
  const Box3D h{1, 0, 0.8, 3.0, 2.0, 1.6, 0.0};
  ASSERT_EQ(bev_iou(g, h), 0.5);
  const std::vector<LabeledBox> gt{{0, g}}, hyp{{0, h}};
  EXPECT_TRUE(match_frame(gt, hyp, {}, 0.5).pairs.empty());
  EXPECT_EQ(match_frame(gt, hyp, {}, 0.49).pairs.size(), 1u);
}

TEST(Evaluate, ContinuityKeepsPreviousPair) {
  // Two hypotheses overlap one GT. Last frame's pair (7) is kept even though
  // hypothesis 8 sits exactly on the object.
  const std::vector<LabeledBox> gt{{0, car(0, 0)}};
  const std::vector<LabeledBox> hyp{{7, car(0.5, 0)}, {8, car(0, 0)}};
  const FrameMatch kept = match_frame(gt, hyp, Correspondence{{0, 7}});
  ASSERT_EQ(kept.pairs.size(), 1u);
  EXPECT_EQ(kept.pairs[0].hyp, 7);
  const FrameMatch fresh = match_frame(gt, hyp, {});
  ASSERT_EQ(fresh.pairs.size(), 1u);
  EXPECT_EQ(fresh.pairs[0].hyp, 8);
}

TEST(Evaluate, HungarianMaximizesTotalIou) {
  // Greedy on the best single IoU would pair gt 0 with hyp 1 and leave gt 1
  // unmatched. The optimal assignment matches both.
  const std::vector<LabeledBox> gt{{0, car(0, 0)}, {1, car(1.6, 0)}};
  const std::vector<LabeledBox> hyp{{0, car(-0.9, 0)}, {1, car(0.5, 0)}};
  const FrameMatch m = match_frame(gt, hyp, {});
  ASSERT_EQ(m.pairs.size(), 2u);
}

TEST(Evaluate, SingleSwapCountsOneSwitch) {
  // Hypothesis ids of objects 0 and 1 swap at frame 10 and stay swapped.
  auto hyp = ground_truth();
  for (auto& l : hyp) {
    if (l.frame >= 10 && l.track_id < 2) l.track_id = 1 - l.track_id;
  }
  const MotReport r = evaluate_sequence(ground_truth(), hyp);
  EXPECT_EQ(r.idsw, 2);  // both objects change identity once
  EXPECT_EQ(r.frag, 0);
  EXPECT_NEAR(r.mota(), 1.0 - 2.0 / 60.0, 1e-12);

  // A single track taking over a lost object's id.
  auto hyp2 = ground_truth();
  for (auto& l : hyp2) {
    if (l.frame >= 10 && l.track_id == 2) l.track_id = 99;
  }
  EXPECT_EQ(evaluate_sequence(ground_truth(), hyp2).idsw, 1);
}

TEST(Evaluate, GapCountsFragmentation) {
  // Object 1 is missed at frames 5 and 12..13, and recovered after both.
  auto hyp = ground_truth();
  std::erase_if(hyp, [](const LabelRecord& l) {
    return l.track_id == 1 && (l.frame == 5 || l.frame == 12 || l.frame == 13);
  });
  const MotReport r = evaluate_sequence(ground_truth(), hyp);
  EXPECT_EQ(r.fn, 3);
  EXPECT_EQ(r.frag, 2);
  EXPECT_EQ(r.idsw, 0);
}

TEST(Evaluate, FragAtLeastInteriorGaps) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution drop(0.2);
  for (int trial = 0; trial < 50; ++trial) {
    auto hyp = ground_truth();
    std::erase_if(hyp, [&](const LabelRecord&) { return drop(rng); });
    // Count interior gaps per object: a missing run followed by a later hit.
    int gaps = 0;
    for (int id = 0; id < 3; ++id) {
      std::vector<char> seen(20, 0);
      for (const auto& l : hyp) if (l.track_id == id) seen[static_cast<std::size_t>(l.frame)] = 1;
      bool started = false, missing = false;
      for (char s : seen) {
        if (s) {
          if (started && missing) ++gaps;
          started = true;
          missing = false;
        } else {
          missing = true;
        }
      }
    }
    EXPECT_GE(evaluate_sequence(ground_truth(), hyp).frag, gaps);
  }
}

TEST(Evaluate, ExtraHypothesesOnlyLowerMota) {
  auto hyp = ground_truth();
  double last = evaluate_sequence(ground_truth(), hyp).mota();
  for (int k = 0; k < 10; ++k) {
    hyp.push_back(label(k, 100 + k, car(500.0 + k, 500.0)));
    const MotReport r = evaluate_sequence(ground_truth(), hyp);
    EXPECT_LT(r.mota(), last);
    EXPECT_EQ(r.fp, k + 1);
    last = r.mota();
  }
}

TEST(Evaluate, InvariantToHypothesisRelabeling) {
  auto hyp = ground_truth();
  std::erase_if(hyp, [](const LabelRecord& l) { return l.frame % 7 == 3 && l.track_id == 2; });
  for (auto& l : hyp) {
    if (l.frame >= 15 && l.track_id == 0) l.track_id = 50;
  }
  const MotReport a = evaluate_sequence(ground_truth(), hyp);
  const MotReport b = evaluate_sequence(ground_truth(), relabel(hyp, 1000));
  EXPECT_EQ(a.idsw, b.idsw);
  EXPECT_EQ(a.frag, b.frag);
  EXPECT_EQ(a.fp, b.fp);
  EXPECT_EQ(a.fn, b.fn);
  EXPECT_DOUBLE_EQ(a.mota(), b.mota());
}

TEST(Evaluate, TrajectoryClassesPartition) {
  auto hyp = ground_truth();
  // Object 0 tracked 19/20, object 1 10/20, object 2 4/20.
  std::erase_if(hyp, [](const LabelRecord& l) {
    return (l.track_id == 0 && l.frame == 0) || (l.track_id == 1 && l.frame >= 10) ||
           (l.track_id == 2 && l.frame >= 4);
  });
  const MotReport r = evaluate_sequence(ground_truth(), hyp);
  EXPECT_EQ(r.mt, 1);
  EXPECT_EQ(r.pt, 1);
  EXPECT_EQ(r.ml, 1);
  EXPECT_NEAR(r.mt_ratio() + r.pt_ratio() + r.ml_ratio(), 1.0, 1e-12);
}

TEST(Evaluate, DontCareAndOcclusionFilter) {
  auto gt = ground_truth();
  gt.push_back(label(0, -1, car(300, 300)));
  auto hidden = label(0, 7, car(200, 200));
  hidden.occluded = 3;
  gt.push_back(hidden);
  EvalConfig cfg;
  cfg.max_occluded = 2;
  const MotReport r = evaluate_sequence(gt, ground_truth(), cfg);
  EXPECT_EQ(r.gt_total, 60);
  EXPECT_EQ(r.fn, 0);
}

TEST(Report, JsonAndTable) {
  const MotReport r = evaluate_sequence(ground_truth(), ground_truth());
  const auto j = to_json(r);
  EXPECT_DOUBLE_EQ(j["MOTA"].get<double>(), 1.0);
  EXPECT_EQ(j["IDSW"].get<long long>(), 0);
  const std::string t = format_table({{"HA", r}, {"MIP", r}});
  EXPECT_NE(t.find("MOTA"), std::string::npos);
  EXPECT_NE(t.find("MIP"), std::string::npos);
  EXPECT_NE(t.find("100.00%"), std::string::npos);
}

TEST(Report, SumsAcrossSequences) {
  MotReport total;
  total += evaluate_sequence(ground_truth(), ground_truth());
  total += evaluate_sequence(ground_truth(), {});
  EXPECT_EQ(total.gt_total, 120);
  EXPECT_DOUBLE_EQ(total.mota(), 0.5);
  EXPECT_EQ(total.trajectories, 6);
}

}  // namespace
}  // namespace mipmot
