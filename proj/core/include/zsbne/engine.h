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

#ifndef ZSBNE_ENGINE_H_
#define ZSBNE_ENGINE_H_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "zsbne/comm.h"
#include "zsbne/discretization.h"
#include "zsbne/error.h"
#include "zsbne/game.h"
#include "zsbne/network.h"
#include "zsbne/oracle.h"

namespace zsbne {

struct StepsizePolicy {
  enum class Kind {
    kSquareSummable,  // a / (q + q0)^p
    kRateProbe,       // 1 / sqrt(q), with q = 0 treated as 1
  };
  Kind kind = Kind::kSquareSummable;
  double a = 1.0;
  double q0 = 1.0;
  double p = 0.75;

  double operator()(std::int64_t q) const;
  // a > 0, q0 > 0 and p in (0.5, 1] for the square-summable kind.
  void Validate() const;
};

enum class SurplusInit {
  kZero,
  kInitialAction,  // s(0) = x0
};

struct EngineConfig {
  std::array<int, 2> N{1, 1};
  std::array<int, 2> d{1, 1};
  std::array<double, 2> E{5.0, 5.0};
  double eta = 1e-2;
  StepsizePolicy stepsize;
  std::int64_t ticks = 0;
  // Common initial action per side; empty means the center of the box.
  std::array<std::vector<double>, 2> init;
  SurplusInit surplus_init = SurplusInit::kZero;
  SurplusOrientation orientation = SurplusOrientation::kColumnStochastic;
  // Metrics every R * stride ticks.
  int stride = 1;
  // Wall-clock budget in seconds; zero disables it.
  double wall_clock_s = 0.0;
  // Compare eta with EtaUpperBound and warn when it is not below it.
  bool validate_eta = true;
};

struct MetricRow {
  std::int64_t tick = 0;
  std::array<double, 2> consensus{};
  std::array<double, 2> surplus{};
  double oracle_dist = 0.0;  // NaN without an oracle
  double gap_proxy = 0.0;    // NaN without an oracle
  std::int64_t bytes_cum = 0;
};

struct RunResult {
  std::vector<MetricRow> rows;
  Population final_states;
  std::int64_t ticks = 0;
  Windows windows;
  std::array<int, 2> d{};
  std::array<std::int64_t, 2> messages{};
  std::array<std::int64_t, 2> bytes{};
  double eta_upper_bound = 0.0;  // NaN when not computed
  std::vector<std::string> warnings;
};

// Raised when the wall-clock budget runs out; carries the rows so far.
class PartialResultError : public Error {
 public:
  PartialResultError(const std::string& what, RunResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const RunResult& partial() const { return partial_; }

 private:
  RunResult partial_;
};

// Subgradient of agent i of `side`: block r is (w + h) / N_l, where w is the
// own-block gradient of the agent's discrete expected cost against zeta_hat
// at type point r and h the penalty subgradient of block r.
Eigen::VectorXd AgentSubgradient(const AgentState& state, Side side, int agent,
                                 const DiscreteTypeModel& model, const GameSpec& game, double E);

// Upper bound on eta from the third-largest eigenvalue modulus of the
// window products of the stacked mixing matrices at eta = 0, worst case over
// the windows of one joint period and over entries:
//   min_l (1 / (20 + 8 n_l))^{n_l} (1 - |lambda_3|)^{n_l}.
// dims[l] = N_l m_l. |lambda_3| is taken as 0 when n_l = 1.
double EtaUpperBound(const NetworkSchedule& sched, std::array<int, 2> dims, std::array<int, 2> d);

// The distributed algorithm, one tick at a time.
class Engine {
 public:
  Engine(const GameSpec& game, const DiscreteTypeModel& model, const NetworkSchedule& sched,
         EngineConfig config);

  // Advances by one tick; throws DivergenceError on runaway or non-finite
  // state.
  void Step();

  std::int64_t tick() const { return tick_; }
  const Windows& windows() const { return windows_; }
  const Population& states() const { return states_; }
  const std::array<std::int64_t, 2>& messages() const { return messages_; }
  const std::array<std::int64_t, 2>& bytes() const { return bytes_; }
  std::int64_t total_bytes() const { return bytes_[0] + bytes_[1]; }

  // (1 / n_l) sum_i (sigma_i + s_i).
  Eigen::VectorXd Average(Side side) const;

  // Metrics of the current state; oracle-based columns are NaN when
  // `oracle` is null.
  MetricRow Sample(const OracleResult* oracle) const;

  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  const GameSpec& game_;
  const DiscreteTypeModel& model_;
  const NetworkSchedule& sched_;
  EngineConfig config_;
  Windows windows_;
  std::array<int, 2> dims_{};
  Population states_;
  std::int64_t tick_ = 0;
  std::array<std::int64_t, 2> messages_{};
  std::array<std::int64_t, 2> bytes_{};
  // Window-start snapshots of surpluses and subgradients.
  std::array<std::vector<Eigen::VectorXd>, 2> surplus_snap_;
  std::array<std::vector<Eigen::VectorXd>, 2> grad_snap_;
  TickPackets packets_;
  std::ostream* trace_ = nullptr;
};

// Runs config.ticks ticks, sampling metrics at tick 0 and every
// R * stride ticks. Deterministic for fixed inputs.
RunResult Run(const GameSpec& game, const DiscreteTypeModel& model, const NetworkSchedule& sched,
              const EngineConfig& config, const OracleResult* oracle = nullptr,
              std::ostream* trace = nullptr);

}  // namespace zsbne

#endif  // ZSBNE_ENGINE_H_
