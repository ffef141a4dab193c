// Copyright 2026 The zsbne Authors.
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

#include "zsbne/oracle.h"

#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "test_util.h"
#include "zsbne/error.h"

namespace zsbne {
namespace {

GameSpec UnitSeparableGame() {
  return SeparableQuadraticGame({1, 1}, {ActionBox{{0.0, 1.0}}, ActionBox{{0.0, 1.0}}},
                                {Interval{0.0, 1.0}, Interval{0.0, 1.0}});
}

TEST(SolveDbneOracle, SeparableGameRecoversTypePoints) {
  const GameSpec game = UnitSeparableGame();
  const DiscreteTypeModel model = DiscretizeTypes(game, 4, 4);
  const OracleResult r = SolveDbneOracle(model, game);
  EXPECT_LE(r.gap, 1e-6);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(r.first.block(i)[0], model.point(Side::kFirst, i), 1e-3);
    EXPECT_NEAR(r.second.block(i)[0], model.point(Side::kSecond, i), 1e-3);
  }
}

TEST(DbneGap, ExactSeparableEquilibriumHasNoGap) {
  const GameSpec game = UnitSeparableGame();
  const DiscreteTypeModel model = DiscretizeTypes(game, 4, 4);
  Eigen::VectorXd v(4);
  for (int i = 0; i < 4; ++i) v[i] = model.point(Side::kFirst, i);
  EXPECT_LE(
      DbneGap(model, game, BlockStrategy(Side::kFirst, 1, v), BlockStrategy(Side::kSecond, 1, v)),
      1e-8);
}

TEST(DbneGap, PerturbationCreatesGap) {
  const GameSpec game = UnitSeparableGame();
  const DiscreteTypeModel model = DiscretizeTypes(game, 4, 4);
  Eigen::VectorXd v(4);
  for (int i = 0; i < 4; ++i) v[i] = model.point(Side::kFirst, i);
  Eigen::VectorXd w = v;
  w[1] += 0.1;
  const double gap =
      DbneGap(model, game, BlockStrategy(Side::kFirst, 1, w), BlockStrategy(Side::kSecond, 1, v));
  // The gap is per type: own cost rises by 0.1^2 in block 1.
  EXPECT_NEAR(gap, 0.01, 1e-9);
  EXPECT_THROW(DbneGap(model, game, BlockStrategy(Side::kFirst, 1, w),
                       BlockStrategy(Side::kSecond, 1, v), 1),
               DomainError);
}

TEST(SolveDbneOracle, BilinearSaddleAtOrigin) {
  testing::ScalarGameSpec spec;
  spec.f1 = [](double x1, double x2, double, double) { return x1 * x2; };
  spec.df1_dx1 = [](double, double x2, double, double) { return x2; };
  spec.df1_dx2 = [](double x1, double, double, double) { return x1; };
  spec.box1 = spec.box2 = {-1.0, 1.0};
  const GameSpec game = testing::MakeScalarGame(spec);
  const DiscreteTypeModel model = DiscretizeTypes(game, 1, 1);
  const OracleResult r = SolveDbneOracle(model, game);
  EXPECT_NEAR(r.first.block(0)[0], 0.0, 1e-5);
  EXPECT_NEAR(r.second.block(0)[0], 0.0, 1e-5);
}

TEST(SolveDbneOracle, RentSeekingTwentyPoints) {
  const GameSpec game = RentSeekingGame();
  const DiscreteTypeModel model = DiscretizeTypes(game, 20, 20);
  const OracleResult r = SolveDbneOracle(model, game);
  EXPECT_LE(r.gap, 1e-6);
  // Independent check of the certificate with a finer grid.
  EXPECT_LE(DbneGap(model, game, r.first, r.second, 401), 1e-6);
  EXPECT_TRUE(r.first.IsFeasible(game.side(Side::kFirst).action_box));
  // Symmetric game, symmetric equilibrium; effort falls with the own type.
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(r.first.block(i)[0], r.second.block(i)[0], 1e-4);
    if (i > 0) {
      EXPECT_LT(r.first.block(i)[0], r.first.block(i - 1)[0]);
    }
  }
}

TEST(SolveDbneOracle, RequiresConstantSum) {
  testing::ScalarGameSpec spec;
  spec.f1 = [](double x1, double, double, double) { return x1 * x1; };
  spec.df1_dx1 = [](double x1, double, double, double) { return 2 * x1; };
  spec.df1_dx2 = [](double, double, double, double) { return 0.0; };
  GameSpec game = testing::MakeScalarGame(spec);
  game.side(Side::kSecond).agents[0].cost = [](ActionView, ActionView, double, double) {
    return 0.0;
  };
  const DiscreteTypeModel model = DiscretizeTypes(game, 2, 2);
  EXPECT_THROW(SolveDbneOracle(model, game), AssumptionViolation);
}

TEST(SolveDbneOracle, ReportsFinalGapOnBudgetExhaustion) {
  const GameSpec game = RentSeekingGame();
  const DiscreteTypeModel model = DiscretizeTypes(game, 10, 10);
  OracleOptions options;
  options.max_iters = 1;
  try {
    SolveDbneOracle(model, game, options);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_GT(e.final_gap(), 1e-6);
  }
}

TEST(SolveDbneOracle, RefinementDistancesShrink) {
  const GameSpec game = RentSeekingGame();
  std::vector<DiscreteTypeModel> models;
  std::vector<OracleResult> sols;
  for (int n : {10, 20, 40}) {
    models.push_back(DiscretizeTypes(game, n, n));
    sols.push_back(SolveDbneOracle(models.back(), game));
  }
  auto distance = [&](int a, int b) {
    double d = 0.0;
    for (double t : models[b].points[0]) {
      const double u = ExtendStrategy(models[a], game, sols[a].first, t)[0];
      const double v = ExtendStrategy(models[b], game, sols[b].first, t)[0];
      d = std::max(d, std::abs(u - v));
    }
    for (double t : models[a].points[0]) {
      const double u = ExtendStrategy(models[a], game, sols[a].first, t)[0];
      const double v = ExtendStrategy(models[b], game, sols[b].first, t)[0];
      d = std::max(d, std::abs(u - v));
    }
    return d;
  };
  EXPECT_GE(distance(0, 1), distance(1, 2));
}

TEST(WriteStrategyCsv, OneRowPerTypeAndDimension) {
  const GameSpec game = UnitSeparableGame();
  const DiscreteTypeModel model = DiscretizeTypes(game, 2, 4);
  Eigen::VectorXd a(2), b(4);
  a << 0.5, 1.0;
  b << 0.25, 0.5, 0.75, 0.125;
  std::ostringstream os;
  WriteStrategyCsv(os, model, BlockStrategy(Side::kFirst, 1, a),
                   BlockStrategy(Side::kSecond, 1, b));
  EXPECT_EQ(os.str(),
            "side,type_index,theta_point,action_dim,value\n"
            "1,1,0.5,1,0.5\n"
            "1,2,1,1,1\n"
            "2,1,0.25,1,0.25\n"
            "2,2,0.5,1,0.5\n"
            "2,3,0.75,1,0.75\n"
            "2,4,1,1,0.125\n");
}

}  // namespace
}  // namespace zsbne
