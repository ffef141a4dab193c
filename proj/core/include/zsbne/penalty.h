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

#ifndef ZSBNE_PENALTY_H_
#define ZSBNE_PENALTY_H_

#include <span>

#include "zsbne/game.h"

namespace zsbne {

// E * ||x - P(x)||, P the projection onto the side's action set.
double Penalty(std::span<const double> x, const SubnetworkSpec& side, double E);

// E (x - P(x)) / ||x - P(x)|| outside the set, zero inside or on its
// boundary. Writes x.size() values.
void PenaltySubgradient(std::span<const double> x, const SubnetworkSpec& side, double E,
                        std::span<double> out);

}  // namespace zsbne

#endif  // ZSBNE_PENALTY_H_
