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

#include "zsbne/game.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "test_util.h"
#include "zsbne/error.h"

namespace zsbne {
namespace {

// Independent restatement of the rent-seeking costs for cross-checking.
double HandCost(int side, int agent, double x1, double x2, double t1, double t2) {
  const double own = side == 0 ? x1 : x2;
  const double rival = side == 0 ? x2 : x1;
  const double weights[3] = {1.0 / 6.0, 0.5, 1.0 / 3.0};
  const double effort = agent < 2 ? (own - rival) * (t1 + t2) / 2.0 : 0.0;
  return effort - own / (x1 + x2) * weights[agent];
}

TEST(SubnetworkCost, RentSeekingFirstSideAtMidpoint) {
  const GameSpec game = RentSeekingGame();
  const std::vector<double> x = {0.5};
  EXPECT_NEAR(SubnetworkCost(game, Side::kFirst, x, x, 0.5, 0.5), -1.0 / 6.0, 1e-15);
}

TEST(SubnetworkCost, RentSeekingSecondSideBySymmetry) {
  const GameSpec game = RentSeekingGame();
  const std::vector<double> x = {0.5};
  EXPECT_NEAR(SubnetworkCost(game, Side::kSecond, x, x, 0.5, 0.5), -1.0 / 6.0, 1e-15);
}

TEST(SubnetworkCost, ZeroCostGame) {
  GameSpec game = RentSeekingGame();
  for (Side s : kSides) {
    for (AgentModel& a : game.side(s).agents) {
      a.cost = [](ActionView, ActionView, double, double) { return 0.0; };
    }
  }
  const std::vector<double> x = {0.3};
  EXPECT_EQ(SubnetworkCost(game, Side::kFirst, x, x, 0.2, 0.7), 0.0);
}

TEST(SubnetworkCost, NonFiniteCostCarriesSideAndAgent) {
  GameSpec game = RentSeekingGame();
  game.side(Side::kSecond).agents[1].cost = [](ActionView, ActionView, double, double) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  const std::vector<double> x = {0.5};
  try {
    SubnetworkCost(game, Side::kSecond, x, x, 0.5, 0.5);
    FAIL() << "expected NonFiniteCostError";
  } catch (const NonFiniteCostError& e) {
    EXPECT_EQ(e.side(), 2);
    EXPECT_EQ(e.agent(), 1);
  }
}

TEST(ValidateSumStructure, RentSeekingIsConstantSum) {
  const SumStructureReport r = ValidateSumStructure(RentSeekingGame(), 1000, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.constant, -1.0 / 3.0, 1e-12);
  EXPECT_LE(r.max_deviation, 1e-10);
}

TEST(ValidateSumStructure, AntisymmetricPairIsZeroSum) {
  testing::ScalarGameSpec spec;
  spec.f1 = [](double x1, double x2, double, double) { return x1 - x2; };
  spec.df1_dx1 = [](double, double, double, double) { return 1.0; };
  spec.df1_dx2 = [](double, double, double, double) { return -1.0; };
  const SumStructureReport r = ValidateSumStructure(testing::MakeScalarGame(spec), 100, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.constant, 0.0);
}

TEST(ValidateSumStructure, DetectsVaryingSum) {
  testing::ScalarGameSpec spec;
  spec.f1 = [](double x1, double, double, double) { return x1 * x1; };
  spec.df1_dx1 = [](double x1, double, double, double) { return 2 * x1; };
  spec.df1_dx2 = [](double, double, double, double) { return 0.0; };
  GameSpec game = testing::MakeScalarGame(spec);
  game.side(Side::kSecond).agents[0].cost = [](ActionView, ActionView, double, double) {
    return 0.0;
  };
  const SumStructureReport r = ValidateSumStructure(game, 100, 1);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_deviation, kSumStructureTolerance);
}

TEST(ValidateSumStructure, RejectsTooFewSamples) {
  EXPECT_THROW(ValidateSumStructure(RentSeekingGame(), 1, 0), DomainError);
}

TEST(RentSeekingGame, BoxAndTypeInterval) {
  const GameSpec game = RentSeekingGame();
  for (Side s : kSides) {
    ASSERT_EQ(game.side(s).action_dim(), 1);
    EXPECT_EQ(game.side(s).action_box[0].lower, 0.1);
    EXPECT_EQ(game.side(s).action_box[0].upper, 1.0);
    EXPECT_EQ(game.side(s).type_interval.lower, 0.01);
    EXPECT_EQ(game.side(s).type_interval.upper, 1.01);
    EXPECT_EQ(game.side(s).agent_count(), 3);
  }
  EXPECT_NO_THROW(game.Validate());
}

TEST(RentSeekingGame, ThirdAgentGradientAtMidpoint) {
  const GameSpec game = RentSeekingGame();
  const std::vector<double> x = {0.5};
  double g = 0.0;
  AgentGradient(game, Side::kFirst, 2, x, x, 0.3, 0.9, {&g, 1});
  EXPECT_NEAR(g, -1.0 / 6.0, 1e-15);
}

TEST(RentSeekingGame, MatchesHandWrittenCostsAndSumsToMinusOneThird) {
  const GameSpec game = RentSeekingGame();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xs(0.1, 1.0), ts(0.01, 1.01);
  for (int n = 0; n < 10000; ++n) {
    const std::vector<double> x1 = {xs(rng)}, x2 = {xs(rng)};
    const double t1 = ts(rng), t2 = ts(rng);
    double hand = 0.0;
    for (int l = 0; l < 2; ++l) {
      for (int i = 0; i < 3; ++i) {
        const double h = HandCost(l, i, x1[0], x2[0], t1, t2);
        ASSERT_NEAR(AgentCost(game, kSides[l], i, x1, x2, t1, t2), h, 1e-14);
        hand += h / 3.0;
      }
    }
    ASSERT_NEAR(SubnetworkCost(game, Side::kFirst, x1, x2, t1, t2) +
                    SubnetworkCost(game, Side::kSecond, x1, x2, t1, t2),
                -1.0 / 3.0, 1e-10);
    ASSERT_NEAR(hand, -1.0 / 3.0, 1e-10);
  }
}

TEST(RentSeekingGame, GradientsMatchCentralDifferences) {
  const GameSpec game = RentSeekingGame();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(0.11, 0.99), ts(0.01, 1.01);
  constexpr double kStep = 1e-6;
  for (int n = 0; n < 1000; ++n) {
    std::vector<double> x1 = {xs(rng)}, x2 = {xs(rng)};
    const double t1 = ts(rng), t2 = ts(rng);
    for (Side s : kSides) {
      for (int i = 0; i < 3; ++i) {
        double g = 0.0;
        AgentGradient(game, s, i, x1, x2, t1, t2, {&g, 1});
        std::vector<double>& own = s == Side::kFirst ? x1 : x2;
        const double saved = own[0];
        own[0] = saved + kStep;
        const double up = AgentCost(game, s, i, x1, x2, t1, t2);
        own[0] = saved - kStep;
        const double down = AgentCost(game, s, i, x1, x2, t1, t2);
        own[0] = saved;
        const double fd = (up - down) / (2 * kStep);
        ASSERT_LE(std::abs(g - fd), 1e-5 * std::max(1.0, std::abs(g)));
      }
    }
  }
}

TEST(RentSeekingGame, JointDensityIntegratesToOne) {
  const GameSpec game = RentSeekingGame();
  constexpr int kNodes = 1000;
  const double lo = 0.01, h = 1.0 / (kNodes - 1);
  double total = 0.0;
  for (int a = 0; a < kNodes; ++a) {
    const double wa = (a == 0 || a == kNodes - 1) ? 0.5 * h : h;
    for (int b = 0; b < kNodes; ++b) {
      const double wb = (b == 0 || b == kNodes - 1) ? 0.5 * h : h;
      total += wa * wb * game.joint_density(lo + a * h, lo + b * h);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(FiniteDifferenceGradient, MatchesAnalyticGradient) {
  const GameSpec game = RentSeekingGame();
  const GradFn fd =
      FiniteDifferenceGradient(game.side(Side::kSecond).agents[0].cost, Side::kSecond, 1);
  const std::vector<double> x1 = {0.4}, x2 = {0.7};
  double analytic = 0.0, numeric = 0.0;
  game.side(Side::kSecond).agents[0].grad(x1, x2, 0.2, 0.6, {&analytic, 1});
  fd(x1, x2, 0.2, 0.6, {&numeric, 1});
  EXPECT_NEAR(numeric, analytic, 1e-8);
}

TEST(ProjectOntoActionSet, ClampsToBoxOrUsesCustomProjection) {
  GameSpec game = RentSeekingGame();
  std::vector<double> x = {1.7};
  ProjectOntoActionSet(game.side(Side::kFirst), x);
  EXPECT_EQ(x[0], 1.0);
  game.side(Side::kFirst).projection = [](std::span<double> v) { v[0] = 0.25; };
  ProjectOntoActionSet(game.side(Side::kFirst), x);
  EXPECT_EQ(x[0], 0.25);
}

TEST(GameSpec, ValidateRejectsEmptyBoxAndUnboundedTypes) {
  GameSpec game = RentSeekingGame();
  game.side(Side::kFirst).action_box[0] = {1.0, 0.5};
  EXPECT_THROW(game.Validate(), AssumptionViolation);
  game = RentSeekingGame();
  game.side(Side::kSecond).type_interval.upper = std::numeric_limits<double>::infinity();
  EXPECT_THROW(game.Validate(), AssumptionViolation);
}

TEST(BuildGame, DeclarativeRentSeekingUsesGivenBoxes) {
  DeclarativeGame spec;
  spec.costs = "rent_seeking";
  spec.density = "independent_uniform";
  spec.agents = {3, 3};
  spec.boxes = {ActionBox{{0.2, 0.8}}, ActionBox{{0.1, 1.0}}};
  spec.types = {Interval{0.0, 2.0}, Interval{0.01, 1.01}};
  const GameSpec game = BuildGame(spec);
  EXPECT_EQ(game.side(Side::kFirst).action_box[0].lower, 0.2);
  EXPECT_NEAR(game.joint_density(1.0, 0.5), 0.5, 1e-15);
  spec.costs = "unknown";
  EXPECT_THROW(BuildGame(spec), DomainError);
  EXPECT_THROW(BuiltinGame("nope"), DomainError);
}

}  // namespace
}  // namespace zsbne
