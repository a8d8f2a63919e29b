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
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "mipmot/association.hpp"

namespace mipmot {
namespace {

AssociationProblem make_problem(std::vector<double> cls_det, std::vector<double> cls_trk, Eigen::MatrixXd aff,
                                std::vector<double> se_det, std::vector<double> se_trk) {
  AssociationProblem p;
  p.cls_det = Eigen::Map<Eigen::VectorXd>(cls_det.data(), static_cast<Eigen::Index>(cls_det.size()));
  p.cls_trk = Eigen::Map<Eigen::VectorXd>(cls_trk.data(), static_cast<Eigen::Index>(cls_trk.size()));
  p.se_det = Eigen::Map<Eigen::VectorXd>(se_det.data(), static_cast<Eigen::Index>(se_det.size()));
  p.se_trk = Eigen::Map<Eigen::VectorXd>(se_trk.data(), static_cast<Eigen::Index>(se_trk.size()));
  p.aff = std::move(aff);
  return p;
}

AssociationProblem random_problem(std::mt19937_64& rng, int m, int n) {
  std::uniform_real_distribution<double> u01(0, 1), u02(0, 2);
  AssociationProblem p;
  p.cls_det = Eigen::VectorXd::NullaryExpr(m, [&] { return u01(rng); });
  p.cls_trk = Eigen::VectorXd::NullaryExpr(n, [&] { return u01(rng); });
  p.se_det = Eigen::VectorXd::NullaryExpr(m, [&] { return u01(rng); });
  p.se_trk = Eigen::VectorXd::NullaryExpr(n, [&] { return u01(rng); });
  p.aff = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u02(rng); });
  return p;
}

TEST(BuildCosts, Examples) {
  Eigen::MatrixXd aff(1, 1);
  aff << 21.0 / 11.0;  // coincident det/track affinity under beta = 10 alpha
  const AssociationCosts c = build_costs(make_problem({1.0}, {0.85}, aff, {0.3}, {0.7}));
  EXPECT_EQ(c.cls_det(0), 0.0);
  EXPECT_NEAR(c.cls_trk(0), -15.0, 1e-12);
  EXPECT_NEAR(c.aff(0, 0), 42.0, 1e-12);
  EXPECT_NEAR(c.se_det(0), 0.3, 1e-15);
  EXPECT_NEAR(c.se_trk(0), 0.7, 1e-15);
}

TEST(BuildCosts, Validation) {
  Eigen::MatrixXd aff(1, 1);
  aff << 1.0;
  EXPECT_THROW(build_costs(make_problem({1.2}, {0.5}, aff, {0.3}, {0.7})), InvalidInput);
  EXPECT_THROW(build_costs(make_problem({0.9}, {0.5}, Eigen::MatrixXd(2, 1), {0.3}, {0.7})), InvalidInput);
  auto p = make_problem({0.9}, {0.5}, aff, {0.3}, {0.7});
  p.weights.w_se = 0.0;
  EXPECT_THROW(build_costs(p), InvalidInput);
}

TEST(SolveMip, LoneDetectionStaysUnselected) {
  // start gain 100 * (0.9 - 1) + 0.5 = -9.5 < 0
  const auto p = make_problem({0.9}, {}, Eigen::MatrixXd(1, 0), {0.5}, {});
  for (const AssociationResult& r : {solve_mip(p), brute_force_oracle(p)}) {
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_EQ(r.cls_det(0), 0);
    EXPECT_EQ(r.se_det(0), 0);
  }
}

TEST(SolveMip, MatchBeatsStartEnd) {
  Eigen::MatrixXd aff(1, 1);
  aff << 1.5;
  const auto p = make_problem({0.95}, {0.9}, aff, {0.5}, {0.5});
  // Hand enumeration: match 18, start+end -14, start only -4.5, end only -9.5, none 0.
  const AssociationResult r = solve_mip(p);
  EXPECT_NEAR(r.objective, 18.0, 1e-12);
  EXPECT_EQ(r.aff(0, 0), 1);
  EXPECT_EQ(r.se_det(0), 0);
  EXPECT_EQ(r.se_trk(0), 0);
  EXPECT_TRUE(satisfies_constraints(r));
  EXPECT_NEAR(brute_force_oracle(p).objective, 18.0, 1e-12);
}

TEST(SolveMip, Empty) {
  const auto p = make_problem({}, {}, Eigen::MatrixXd(0, 0), {}, {});
  const AssociationResult r = solve_mip(p);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.aff.size(), 0);
}

TEST(SolveMip, CertainObjectsStartOrEnd) {
  const auto p = make_problem({1, 1, 1}, {1, 1}, Eigen::MatrixXd::Zero(3, 2), {1, 1, 1}, {1, 1});
  for (const AssociationResult& r : {solve_mip(p), brute_force_oracle(p)}) {
    EXPECT_EQ(r.aff.sum(), 0);
    EXPECT_EQ(r.se_det.sum(), 3);
    EXPECT_EQ(r.se_trk.sum(), 2);
    EXPECT_EQ(r.cls_det.sum(), 3);
    EXPECT_NEAR(r.objective, 5.0, 1e-12);
  }
}

TEST(SolveMip, AgreesWithBruteForce) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(0, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    const AssociationProblem p = random_problem(rng, dim(rng), dim(rng));
    const AssociationResult fast = solve_mip(p);
    const AssociationResult slow = brute_force_oracle(p);
    ASSERT_TRUE(satisfies_constraints(fast));
    ASSERT_TRUE(satisfies_constraints(slow));
    ASSERT_NEAR(fast.objective, slow.objective, 1e-9) << "trial " << trial;
    ASSERT_NEAR(fast.objective, objective_value(build_costs(p), fast), 1e-12);
  }
}

TEST(SolveMip, AgreesWithBruteForceAtFiveByFive) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const AssociationProblem p = random_problem(rng, 5, 5);
    EXPECT_NEAR(solve_mip(p).objective, brute_force_oracle(p).objective, 1e-9);
  }
}

TEST(SolveMip, LoweringConfidenceNeverHelps) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    AssociationProblem p = random_problem(rng, 3, 3);
    const double before = solve_mip(p).objective;
    if (trial % 2 == 0) {
      p.cls_det(trial % 3) *= u(rng);
    } else {
      p.cls_trk(trial % 3) *= u(rng);
    }
    EXPECT_LE(solve_mip(p).objective, before + 1e-12);
  }
}

TEST(SolveMip, WeightScalingKeepsAssignment) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 200; ++trial) {
    AssociationProblem p = random_problem(rng, 4, 3);
    const AssociationResult a = solve_mip(p);
    p.weights = {p.weights.w_cls * 3.5, p.weights.w_aff * 3.5, p.weights.w_se * 3.5};
    const AssociationResult b = solve_mip(p);
    EXPECT_EQ(a.aff, b.aff);
    EXPECT_EQ(a.se_det, b.se_det);
    EXPECT_EQ(a.se_trk, b.se_trk);
    EXPECT_NEAR(b.objective, 3.5 * a.objective, 1e-9);
  }
}

TEST(SolveMip, CertainLoneDetectionAlwaysStarts) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 100; ++trial) {
    AssociationProblem p = random_problem(rng, 3, 3);
    p.cls_det(1) = 1.0;
    p.se_det(1) = 1.0;
    p.aff.row(1).setZero();
    const AssociationResult r = solve_mip(p);
    EXPECT_EQ(r.se_det(1), 1);
    EXPECT_EQ(r.cls_det(1), 1);
  }
}

TEST(SolveMip, TiesPreferMatches) {
  // Match gain exactly equals the outside options: 22 * 1 + 0 + 0 = 22 vs start+end = 11 + 11.
  Eigen::MatrixXd aff(1, 1);
  aff << 1.0;
  auto p = make_problem({1.0}, {1.0}, aff, {1.0}, {1.0});
  p.weights.w_se = 11.0;
  const AssociationResult r = solve_mip(p);
  EXPECT_EQ(r.aff(0, 0), 1);
  EXPECT_NEAR(r.objective, 22.0, 1e-12);
}

TEST(BruteForce, SizeLimit) {
  std::mt19937_64 rng(47);
  EXPECT_THROW(brute_force_oracle(random_problem(rng, 6, 1)), InvalidInput);
}

TEST(HungarianBaseline, Examples) {
  Eigen::MatrixXd a(2, 2);
  a << 5, 1, 1, 5;
  const auto m = hungarian_baseline(a);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], std::make_pair(0, 0));
  EXPECT_EQ(m[1], std::make_pair(1, 1));

  Eigen::MatrixXd neg(1, 1);
  neg << -3;
  EXPECT_EQ(hungarian_baseline(neg).size(), 1u);
  EXPECT_TRUE(hungarian_baseline(neg, 0.0).empty());
  EXPECT_TRUE(hungarian_baseline(Eigen::MatrixXd(0, 4)).empty());
}

double best_by_permutation(const Eigen::MatrixXd& a) {
  // rows <= cols
  std::vector<int> cols(static_cast<std::size_t>(a.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = -INFINITY;
  do {
    double s = 0;
    for (Eigen::Index r = 0; r < a.rows(); ++r) s += a(r, cols[static_cast<std::size_t>(r)]);
    best = std::max(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

TEST(HungarianBaseline, MatchesPermutationSearch) {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 2 + trial % 4, cols = 5;
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return u(rng); });
    if (trial % 2) a.transposeInPlace();
    const auto m = hungarian_baseline(a);
    EXPECT_EQ(m.size(), static_cast<std::size_t>(std::min(a.rows(), a.cols())));
    double total = 0;
    std::vector<int> seen_d, seen_k;
    for (auto [d, k] : m) {
      total += a(d, k);
      seen_d.push_back(d);
      seen_k.push_back(k);
    }
    std::sort(seen_d.begin(), seen_d.end());
    std::sort(seen_k.begin(), seen_k.end());
    EXPECT_EQ(std::adjacent_find(seen_d.begin(), seen_d.end()), seen_d.end());
    EXPECT_EQ(std::adjacent_find(seen_k.begin(), seen_k.end()), seen_k.end());
    const double want = a.rows() <= a.cols() ? best_by_permutation(a) : best_by_permutation(a.transpose());
    EXPECT_NEAR(total, want, 1e-9);
  }
}

}  // namespace
}  // namespace mipmot
