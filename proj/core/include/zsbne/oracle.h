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

#ifndef ZSBNE_ORACLE_H_
#define ZSBNE_ORACLE_H_

#include <cstdint>
#include <iosfwd>

#include "zsbne/discretization.h"
#include "zsbne/game.h"

namespace zsbne {

struct OracleOptions {
  double tol = 1e-6;
  int max_iters = 200000;
  // Grid points per action axis used by the certifying gap evaluation.
  int gap_grid_res = 101;
  // Seed for the Lipschitz-constant sampling.
  std::uint64_t seed = 0;
};

struct OracleResult {
  BlockStrategy first;
  BlockStrategy second;
  double gap = 0.0;
  int iterations = 0;
  double step = 0.0;
};

// Centralized equilibrium of the discretized game by projected
// extragradient on the block saddle problem. Requires a constant-sum game.
// Throws NonConvergenceError when `max_iters` is exhausted.
OracleResult SolveDbneOracle(const DiscreteTypeModel& model, const GameSpec& game,
                             const OracleOptions& options = {});

// Largest unilateral improvement of the expected subnetwork cost over all
// sides and type points. Candidates are a `grid_res`-per-axis grid of the
// action box, refined by one projected-gradient step with backtracking.
// Zero at an exact equilibrium.
double DbneGap(const DiscreteTypeModel& model, const GameSpec& game, const BlockStrategy& s1,
               const BlockStrategy& s2, int grid_res = 101);

// CSV with columns side,type_index,theta_point,action_dim,value (1-based
// side, type and dimension indices).
void WriteStrategyCsv(std::ostream& os, const DiscreteTypeModel& model, const BlockStrategy& s1,
                      const BlockStrategy& s2);

}  // namespace zsbne

#endif  // ZSBNE_ORACLE_H_
