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

#ifndef ZSBNE_COMM_H_
#define ZSBNE_COMM_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "zsbne/game.h"
#include "zsbne/network.h"

namespace zsbne {

// 8 bytes per value plus 4 bytes per index.
inline constexpr int kBytesPerEntry = 12;

// A sparsified message. Absent entries are implicit.
struct SparsePacket {
  Side side = Side::kFirst;
  int agent = 0;
  std::int64_t tick = 0;
  std::vector<int> indices;  // 1-based, strictly increasing
  std::vector<double> values;

  int size() const { return static_cast<int>(indices.size()); }
  std::int64_t payload_bytes() const { return static_cast<std::int64_t>(kBytesPerEntry) * size(); }
};

// Cyclic block selected at time t >= 1: with q = floor((t - 1) / R0), the
// 1-based indices ((q d + j - 1) mod dim) + 1 for j = 1..d, sorted.
std::vector<int> SparsifyIndices(int dim, std::int64_t t, int d, int R0);

// Whether the 0-based entry k is selected at engine tick t >= 0, which uses
// sparsifier time t + 1.
bool TransmitsEntry(int dim, std::int64_t t, int d, int R0, int k);

SparsePacket Sparsify(std::span<const double> x, std::int64_t t, int d, int R0,
                      Side side = Side::kFirst, int agent = 0);

struct Windows {
  int R = 1;
  int S = 1;
};

// R = max_l R0 ceil(N_l m_l / d_l), S = max_l S0 R0 ceil(N_l m_l / d_l).
Windows EffectiveWindows(std::array<int, 2> N, std::array<int, 2> m, std::array<int, 2> d, int R0,
                         int S0);

// Normalization of the surplus mixing matrix B. The column-stochastic form
// (each sender splits its surplus evenly over itself and its out-neighbors)
// keeps the stacked matrix column-stochastic; the literal form normalizes
// rows by the receiver's out-degree and is kept for comparison only.
enum class SurplusOrientation { kColumnStochastic, kLiteralRowStochastic };

struct AgentState {
  Eigen::VectorXd sigma;      // own strategy, N_l m_l
  Eigen::VectorXd surplus;    // N_l m_l
  Eigen::VectorXd sigma_hat;  // neighborhood estimate of the own side
  Eigen::VectorXd zeta_hat;   // estimate of the rival strategy, N_o m_o
};

using Population = std::array<std::vector<AgentState>, 2>;

// packets[l][j] is the packet of agent j of side l at this tick.
using TickPackets = std::array<std::vector<SparsePacket>, 2>;

// Mixing for one entry k of side l's vector.
struct MixingSlice {
  Eigen::MatrixXd A;  // n_l x n_l, row-stochastic over self + senders of k
  Eigen::MatrixXd B;  // n_l x n_l, surplus mixing
  // n_o x n_l: how the other side's agents average the entry k received
  // from side l. Rows are zero for receivers that got no entry k.
  Eigen::MatrixXd C;

  // [[A, 0], [I - A, B]].
  Eigen::MatrixXd Stacked() const;
};

// `sent[j]` tells whether agent j of `side` transmitted the entry.
MixingSlice BuildMixingFromSenders(
    const Frame& frame, std::array<int, 2> agents, Side side, const std::vector<bool>& sent,
    SurplusOrientation orientation = SurplusOrientation::kColumnStochastic);

// Slice for the 1-based entry k of side l. Throws ProtocolError when the
// packets do not match the agents of the schedule.
MixingSlice BuildMixing(const Frame& frame, std::array<int, 2> agents, const TickPackets& packets,
                        Side side, int k,
                        SurplusOrientation orientation = SurplusOrientation::kColumnStochastic);

// Entries of one side's vector sharing the same sender set.
struct EntryGroup {
  std::vector<int> entries;  // 0-based
  MixingSlice slice;
};

struct RoundResult {
  // groups[l] covers every entry of side l that someone transmitted; all
  // other entries have the identity mixing this tick.
  std::array<std::vector<EntryGroup>, 2> groups;
  std::array<std::int64_t, 2> messages{};  // by sender side
  std::array<std::int64_t, 2> bytes{};
};

// Steps 1-4 of the scheme: packets travel along the frame's edges; sigma_hat
// becomes the A-weighted average of received entries (own entry included),
// and zeta_hat entries are C-averaged where a cross message carried them and
// held otherwise. Strategies and surpluses are not touched. Optional trace
// lines read "t, side, sender, receiver, d, first_index" with agents written
// as side.index (1-based).
RoundResult CommunicationRound(
    Population& states, const Frame& frame, const TickPackets& packets,
    SurplusOrientation orientation = SurplusOrientation::kColumnStochastic,
    std::ostream* trace = nullptr);

// z <- Mbar z for every transmitted entry, with z = (sigma, surplus).
void ApplyMixing(Population& states, const RoundResult& round);

// Every per-entry graph of `side` (within edges whose sender transmits entry
// k under the cyclic sparsifier, tick t using time t + 1) is jointly strongly
// connected over every R consecutive ticks.
bool VerifyEntryConnectivity(const NetworkSchedule& sched, Side side, int dim, int d, int R);

// Every agent of `receiving` gets each entry of the rival vector (dimension
// `rival_dim`, d_o entries per packet) within every S consecutive ticks.
bool VerifyEntryCoverage(const NetworkSchedule& sched, Side receiving, int rival_dim, int rival_d,
                         int S);

}  // namespace zsbne

#endif  // ZSBNE_COMM_H_
