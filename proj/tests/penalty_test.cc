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

#include "zsbne/penalty.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zsbne/error.h"

namespace zsbne {
namespace {

SubnetworkSpec Box(ActionBox box) {
  SubnetworkSpec s;
  s.action_box = std::move(box);
  return s;
}

TEST(Penalty, Examples) {
  const SubnetworkSpec s = Box({{0.1, 1.0}});
  const std::vector<double> in = {0.5}, out = {1.5};
  EXPECT_EQ(Penalty(in, s, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(Penalty(out, s, 2.0), 1.0);
  const SubnetworkSpec sq = Box({{0.0, 1.0}, {0.0, 1.0}});
  const std::vector<double> corner = {2.0, 2.0};
  EXPECT_DOUBLE_EQ(Penalty(corner, sq, 1.0), std::sqrt(2.0));
  EXPECT_THROW(Penalty(in, s, 0.0), DomainError);
}

TEST(PenaltySubgradient, Examples) {
  const SubnetworkSpec s = Box({{0.1, 1.0}});
  std::vector<double> g(1);
  const std::vector<double> out = {1.5}, in = {0.5}, low = {-3.0};
  PenaltySubgradient(out, s, 2.0, g);
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  PenaltySubgradient(in, s, 2.0, g);
  EXPECT_EQ(g[0], 0.0);
  PenaltySubgradient(low, s, 2.0, g);
  EXPECT_DOUBLE_EQ(g[0], -2.0);
}

TEST(PenaltySubgradient, SubgradientInequality) {
  const SubnetworkSpec s = Box({{0.0, 1.0}, {-1.0, 2.0}, {0.5, 0.5}});
  const double E = 3.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 4.0);
  std::vector<double> x(3), y(3), g(3);
  for (int n = 0; n < 10000; ++n) {
    for (int k = 0; k < 3; ++k) {
      x[k] = u(rng);
      y[k] = u(rng);
    }
    PenaltySubgradient(x, s, E, g);
    double lin = Penalty(x, s, E);
    for (int k = 0; k < 3; ++k) lin += g[k] * (y[k] - x[k]);
    ASSERT_GE(Penalty(y, s, E), lin - 1e-10);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    ASSERT_LE(std::sqrt(norm), E + 1e-12);
  }
}

}  // namespace
}  // namespace zsbne
