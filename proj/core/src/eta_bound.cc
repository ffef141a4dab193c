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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "zsbne/engine.h"

namespace zsbne {

namespace {

double ThirdModulus(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver failed");
  std::vector<double> mod;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    mod.push_back(std::abs(solver.eigenvalues()[i]));
  }
  std::sort(mod.rbegin(), mod.rend());
  return mod.size() >= 3 ? mod[2] : 0.0;
}

}  // namespace

double EtaUpperBound(const NetworkSchedule& sched, std::array<int, 2> dims, std::array<int, 2> d) {
  sched.Validate();
  const Windows w = EffectiveWindows(dims, {1, 1}, d, sched.R0, sched.S0);
  const int R = w.R;
  double bound = std::numeric_limits<double>::infinity();
  for (Side s : kSides) {
    const int l = Index(s);
    const int n = sched.agents[l];
    double lambda3 = 0.0;
    if (n > 1) {
      const std::int64_t cycle =
          static_cast<std::int64_t>(sched.R0) * (dims[l] / std::gcd(dims[l], d[l]));
      const std::int64_t ticks = std::lcm(
          std::lcm(static_cast<std::int64_t>(sched.period()), cycle), static_cast<std::int64_t>(R));
      const std::vector<bool> all(n, true);
      // Products only depend on the window start and the transmission
      // pattern inside the window.
      std::map<std::pair<std::int64_t, std::vector<bool>>, double> seen;
      for (std::int64_t q = 0; q < ticks / R; ++q) {
        for (int k = 0; k < dims[l]; ++k) {
          std::vector<bool> pattern(R);
          for (int r = 0; r < R; ++r) {
            pattern[r] = TransmitsEntry(dims[l], q * R + r, d[l], sched.R0, k);
          }
          const auto key = std::make_pair((q * R) % sched.period(), pattern);
          if (seen.count(key)) continue;
          Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(2 * n, 2 * n);
          for (int r = 0; r < R; ++r) {
            if (!pattern[r]) continue;
            const MixingSlice slice =
                BuildMixingFromSenders(sched.FrameAt(q * R + r), sched.agents, s, all);
            prod = slice.Stacked() * prod;
          }
          const double v = ThirdModulus(prod);
          seen.emplace(key, v);
          lambda3 = std::max(lambda3, v);
        }
      }
    }
    const double base = 1.0 / (20.0 + 8.0 * n);
    bound = std::min(bound, std::pow(base, n) * std::pow(std::max(0.0, 1.0 - lambda3), n));
  }
  return bound;
}

}  // namespace zsbne
