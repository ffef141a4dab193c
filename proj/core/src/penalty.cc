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

#include <cmath>
#include <vector>

#include "zsbne/error.h"

namespace zsbne {

namespace {

// Writes x - P(x) into `diff` and returns its norm.
double Residual(std::span<const double> x, const SubnetworkSpec& side, std::vector<double>& diff) {
  diff.assign(x.begin(), x.end());
  ProjectOntoActionSet(side, diff);
  double norm = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    diff[k] = x[k] - diff[k];
    norm += diff[k] * diff[k];
  }
  return std::sqrt(norm);
}

}  // namespace

double Penalty(std::span<const double> x, const SubnetworkSpec& side, double E) {
  if (!(E > 0.0)) throw DomainError("penalty weight must be positive");
  thread_local std::vector<double> diff;
  return E * Residual(x, side, diff);
}

void PenaltySubgradient(std::span<const double> x, const SubnetworkSpec& side, double E,
                        std::span<double> out) {
  if (!(E > 0.0)) throw DomainError("penalty weight must be positive");
  thread_local std::vector<double> diff;
  const double dist = Residual(x, side, diff);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = dist > 0.0 ? E * diff[k] / dist : 0.0;
}

}  // namespace zsbne
