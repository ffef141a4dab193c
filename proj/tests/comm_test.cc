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

#include "zsbne/comm.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "zsbne/error.h"

namespace zsbne {
namespace {

using ::testing::ElementsAre;

Frame CompleteFrame(int n1, int n2) {
  Frame f;
  const std::array<int, 2> n = {n1, n2};
  for (int l = 0; l < 2; ++l) {
    for (int i = 0; i < n[l]; ++i) {
      for (int j = 0; j < n[l]; ++j) {
        if (i != j) f.within[l].push_back({i, j});
      }
      for (int j = 0; j < n[1 - l]; ++j) f.cross[l].push_back({i, j});
    }
  }
  return f;
}

Population MakePopulation(int n1, int n2, int dim1, int dim2) {
  Population p;
  const std::array<int, 2> n = {n1, n2};
  const std::array<int, 2> dim = {dim1, dim2};
  for (int l = 0; l < 2; ++l) {
    for (int i = 0; i < n[l]; ++i) {
      AgentState a;
      a.sigma = Eigen::VectorXd::Zero(dim[l]);
      a.surplus = Eigen::VectorXd::Zero(dim[l]);
      a.sigma_hat = a.sigma;
      a.zeta_hat = Eigen::VectorXd::Zero(dim[1 - l]);
      p[l].push_back(a);
    }
  }
  return p;
}

TickPackets PacketsFor(const Population& p, std::int64_t t, std::array<int, 2> d, int R0) {
  TickPackets packets;
  for (Side s : kSides) {
    const int l = Index(s);
    for (int i = 0; i < static_cast<int>(p[l].size()); ++i) {
      packets[l].push_back(
          Sparsify({p[l][i].sigma.data(), static_cast<std::size_t>(p[l][i].sigma.size())}, t, d[l],
                   R0, s, i));
    }
  }
  return packets;
}

TEST(Sparsify, CyclicBlocks) {
  EXPECT_THAT(SparsifyIndices(4, 1, 2, 1), ElementsAre(1, 2));
  EXPECT_THAT(SparsifyIndices(4, 2, 2, 1), ElementsAre(3, 4));
  EXPECT_THAT(SparsifyIndices(4, 3, 2, 1), ElementsAre(1, 2));
  // Wrap around the end keeps exactly d entries.
  EXPECT_THAT(SparsifyIndices(5, 2, 3, 1), ElementsAre(1, 4, 5));
  // R0 ticks share a block.
  EXPECT_THAT(SparsifyIndices(4, 2, 2, 2), ElementsAre(1, 2));
  EXPECT_THAT(SparsifyIndices(4, 3, 2, 2), ElementsAre(3, 4));
}

TEST(Sparsify, FullBudgetSendsEverything) {
  const std::vector<double> x = {0.1, 0.2, 0.3};
  for (std::int64_t t = 1; t < 6; ++t) {
    const SparsePacket p = Sparsify(x, t, 3, 2);
    EXPECT_THAT(p.indices, ElementsAre(1, 2, 3));
    EXPECT_EQ(p.values, x);
    EXPECT_EQ(p.payload_bytes(), 36);
  }
}

TEST(Sparsify, TransmitsEntryMatchesIndexSet) {
  for (int dim = 1; dim <= 9; ++dim) {
    for (int d = 1; d <= dim; ++d) {
      for (int R0 = 1; R0 <= 3; ++R0) {
        for (std::int64_t t = 1; t <= 20; ++t) {
          const std::vector<int> idx = SparsifyIndices(dim, t, d, R0);
          ASSERT_EQ(static_cast<int>(idx.size()), d);
          for (int k = 1; k <= dim; ++k) {
            const bool in = std::find(idx.begin(), idx.end(), k) != idx.end();
            EXPECT_EQ(TransmitsEntry(dim, t - 1, d, R0, k - 1), in);
          }
        }
      }
    }
  }
}

TEST(EffectiveWindows, Examples) {
  Windows w = EffectiveWindows({1000, 1000}, {1, 1}, {500, 500}, 2, 2);
  EXPECT_EQ(w.R, 4);
  EXPECT_EQ(w.S, 8);
  w = EffectiveWindows({7, 9}, {1, 1}, {7, 9}, 2, 1);
  EXPECT_EQ(w.R, 2);
  EXPECT_EQ(w.S, 2);
  w = EffectiveWindows({10, 8}, {1, 1}, {3, 8}, 1, 1);
  EXPECT_EQ(w.R, 4);
  EXPECT_EQ(w.S, 4);
}

TEST(BuildMixing, TwoAgentAverage) {
  Frame f;
  f.within[0] = {{1, 0}};
  const MixingSlice m = BuildMixingFromSenders(f, {2, 1}, Side::kFirst, {true, true});
  EXPECT_DOUBLE_EQ(m.A(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(m.A(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.A(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.A(1, 0), 0.0);
}

TEST(BuildMixing, SilentNeighborGivesUnitRow) {
  Frame f;
  f.within[0] = {{1, 0}};
  const MixingSlice m = BuildMixingFromSenders(f, {2, 1}, Side::kFirst, {true, false});
  EXPECT_DOUBLE_EQ(m.A(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.A(0, 1), 0.0);
  EXPECT_TRUE(m.B.isIdentity());
}

TEST(BuildMixing, CompleteFrameIsColumnStochastic) {
  const Frame f = CompleteFrame(3, 2);
  const MixingSlice m = BuildMixingFromSenders(f, {3, 2}, Side::kFirst, {true, true, true});
  const Eigen::MatrixXd M = m.Stacked();
  ASSERT_EQ(M.rows(), 6);
  for (int c = 0; c < M.cols(); ++c) EXPECT_NEAR(M.col(c).sum(), 1.0, 1e-12);
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(m.A.row(r).sum(), 1.0, 1e-12);
  for (int r = 0; r < 2; ++r) EXPECT_NEAR(m.C.row(r).sum(), 1.0, 1e-12);
}

TEST(BuildMixing, LiteralToggleTransposesSurplusWeights) {
  Frame f;
  f.within[0] = {{0, 1}, {0, 2}, {1, 2}};
  const MixingSlice col = BuildMixingFromSenders(f, {3, 1}, Side::kFirst, {true, true, true});
  const MixingSlice lit = BuildMixingFromSenders(f, {3, 1}, Side::kFirst, {true, true, true},
                                                 SurplusOrientation::kLiteralRowStochastic);
  EXPECT_TRUE(lit.B.isApprox(col.B.transpose()));
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(col.B.col(c).sum(), 1.0, 1e-15);
}

TEST(BuildMixing, RandomFramesStayColumnStochastic) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 5), n2 = 1 + static_cast<int>(rng() % 5);
    Frame f;
    const std::array<int, 2> n = {n1, n2};
    for (int l = 0; l < 2; ++l) {
      for (int i = 0; i < n[l]; ++i) {
        for (int j = 0; j < n[l]; ++j) {
          if (i != j && rng() % 2) f.within[l].push_back({i, j});
        }
      }
    }
    std::vector<bool> sent(n1);
    for (int i = 0; i < n1; ++i) sent[i] = rng() % 3 != 0;
    const MixingSlice m = BuildMixingFromSenders(f, n, Side::kFirst, sent);
    const Eigen::MatrixXd M = m.Stacked();
    for (int c = 0; c < M.cols(); ++c) EXPECT_NEAR(M.col(c).sum(), 1.0, 1e-12);
    EXPECT_GE(m.A.minCoeff(), 0.0);
    EXPECT_GE(m.B.minCoeff(), 0.0);
  }
}

TEST(BuildMixing, RejectsMismatchedPackets) {
  const Frame f = CompleteFrame(2, 2);
  TickPackets packets;
  packets[0].resize(2);
  packets[1].resize(1);
  EXPECT_THROW(BuildMixing(f, {2, 2}, packets, Side::kFirst, 1), ProtocolError);
}

TEST(CommunicationRound, AveragesTransmittedEntries) {
  Population p = MakePopulation(2, 1, 1, 1);
  p[0][0].sigma[0] = 0.2;
  p[0][1].sigma[0] = 0.4;
  const Frame f = CompleteFrame(2, 1);
  const TickPackets packets = PacketsFor(p, 1, {1, 1}, 1);
  const RoundResult r = CommunicationRound(p, f, packets);
  EXPECT_DOUBLE_EQ(p[0][0].sigma_hat[0], 0.3);
  EXPECT_DOUBLE_EQ(p[0][1].sigma_hat[0], 0.3);
  EXPECT_DOUBLE_EQ(p[1][0].zeta_hat[0], 0.3);
  // Each side-1 agent has one within and one cross neighbor.
  EXPECT_EQ(r.messages[0], 4);
  EXPECT_EQ(r.bytes[0], 4 * 12);
  EXPECT_EQ(r.messages[1], 2);
}

TEST(CommunicationRound, HoldsEstimateWithoutCrossMessage) {
  Population p = MakePopulation(1, 1, 2, 2);
  p[1][0].sigma << 0.7, 0.9;
  p[0][0].zeta_hat << 0.1, 0.2;
  Frame f;
  f.cross[1] = {{0, 0}};
  // d = 1: only entry 1 crosses at t = 1.
  const TickPackets packets = PacketsFor(p, 1, {1, 1}, 1);
  CommunicationRound(p, f, packets);
  EXPECT_DOUBLE_EQ(p[0][0].zeta_hat[0], 0.7);
  EXPECT_DOUBLE_EQ(p[0][0].zeta_hat[1], 0.2);
}

TEST(CommunicationRound, ConsensusIsFixedPoint) {
  Population p = MakePopulation(3, 2, 4, 4);
  for (auto& side : p) {
    for (auto& a : side) a.sigma.setConstant(0.6);
  }
  const Frame f = CompleteFrame(3, 2);
  for (std::int64_t t = 1; t <= 4; ++t) {
    const RoundResult r = CommunicationRound(p, f, PacketsFor(p, t, {2, 2}, 1));
    ApplyMixing(p, r);
  }
  for (auto& side : p) {
    for (auto& a : side) {
      EXPECT_TRUE(a.sigma.isApproxToConstant(0.6, 1e-15));
      EXPECT_TRUE(a.sigma_hat.isApproxToConstant(0.6, 1e-15));
      EXPECT_TRUE(a.zeta_hat.isApproxToConstant(0.6, 1e-15));
    }
  }
}

TEST(CommunicationRound, MixingPreservesColumnMass) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Population p = MakePopulation(4, 3, 5, 6);
  for (auto& side : p) {
    for (auto& a : side) {
      for (auto* v : {&a.sigma, &a.surplus}) {
        for (auto& x : *v) x = u(rng);
      }
    }
  }
  auto mass = [&](int l) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(p[l][0].sigma.size());
    for (auto& a : p[l]) m += a.sigma + a.surplus;
    return m;
  };
  const Eigen::VectorXd m0 = mass(0), m1 = mass(1);
  Frame f;
  f.within[0] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {2, 0}};
  f.within[1] = {{0, 1}, {1, 2}};
  for (std::int64_t t = 1; t <= 10; ++t) {
    ApplyMixing(p, CommunicationRound(p, f, PacketsFor(p, t, {2, 3}, 1)));
  }
  EXPECT_TRUE(mass(0).isApprox(m0, 1e-12));
  EXPECT_TRUE(mass(1).isApprox(m1, 1e-12));
}

TEST(CommunicationRound, TraceLines) {
  Population p = MakePopulation(1, 1, 3, 3);
  Frame f;
  f.cross[0] = {{0, 0}};
  std::ostringstream os;
  TickPackets packets = PacketsFor(p, 2, {2, 2}, 1);
  CommunicationRound(p, f, packets, SurplusOrientation::kColumnStochastic, &os);
  EXPECT_EQ(os.str(), "2, 1, 1.1, 2.1, 2, 3\n");
}

TEST(VerifyEntryConnectivity, GeneratorWithSparsifier) {
  const NetworkSchedule s = GeneratedSchedule(3, 3, 1);
  for (int dim : {3, 4}) {
    for (int d = 1; d <= dim; ++d) {
      const Windows w = EffectiveWindows({dim, dim}, {1, 1}, {d, d}, s.R0, s.S0);
      for (Side side : kSides) {
        EXPECT_TRUE(VerifyEntryConnectivity(s, side, dim, d, w.R));
        EXPECT_TRUE(VerifyEntryCoverage(s, side, dim, d, w.S));
      }
    }
  }
  // Too short a window misses entries when d < dim.
  EXPECT_FALSE(VerifyEntryConnectivity(s, Side::kFirst, 4, 1, 1));
}

}  // namespace
}  // namespace zsbne
