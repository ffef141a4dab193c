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

#ifndef ZSBNE_NETWORK_H_
#define ZSBNE_NETWORK_H_

#include <array>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "zsbne/game.h"

namespace zsbne {

// Directed edge; `sender` transmits to `receiver`. Indices are 0-based
// positions inside the respective subnetwork.
struct Edge {
  int sender = 0;
  int receiver = 0;

  auto operator<=>(const Edge&) const = default;
};

// One time step of the four graphs. Self-loops are implicit and never stored.
struct Frame {
  // within[l]: edges among the agents of side l.
  std::array<std::vector<Edge>, 2> within;
  // cross[l]: edges from agents of side l to agents of the other side.
  std::array<std::vector<Edge>, 2> cross;
};

// Periodic schedule of frames; frame t is frames[t mod period].
struct NetworkSchedule {
  std::array<int, 2> agents{};
  std::vector<Frame> frames;
  int R0 = 1;
  int S0 = 1;

  int period() const { return static_cast<int>(frames.size()); }
  const Frame& FrameAt(std::int64_t t) const {
    return frames[static_cast<std::size_t>(t % period())];
  }
  // Agent indices in range, no stored self-loops, positive windows.
  // Throws DomainError.
  void Validate() const;
};

// Strong connectivity of a digraph on n nodes (forward and backward search
// from node 0).
bool IsStronglyConnected(int n, const std::vector<Edge>& edges);

// For every start t in one period, the union of the side's within-graphs over
// frames t, ..., t + R0 - 1 is strongly connected.
bool VerifyJointConnectivity(const NetworkSchedule& sched, Side side, int R0);

// Every agent of `side` has an in-neighbor from the other side within every
// window of S0 consecutive frames.
bool CrossCoverage(const NetworkSchedule& sched, Side side, int S0);

// Period-2 schedule with R0 = S0 = 2. Within each side the two frames split a
// directed ring and add seeded reverse chords; the cross edges to receiver i
// come from sender (pi(i) + f) mod n in frame f for a seeded map pi.
NetworkSchedule GeneratedSchedule(int n1, int n2, std::uint64_t seed);

// {"agents": [n1, n2], "R0": r, "S0": s, "frames": [{"within1": [[j, i], ...],
//  "within2": ..., "cross12": ..., "cross21": ...}, ...]}
nlohmann::json ScheduleToJson(const NetworkSchedule& sched);
// Inverse of ScheduleToJson; throws ConfigError with the field path.
NetworkSchedule ScheduleFromJson(const nlohmann::json& j, const std::string& path = "schedule");

}  // namespace zsbne

#endif  // ZSBNE_NETWORK_H_
