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

#ifndef ZSBNE_CONFIG_H_
#define ZSBNE_CONFIG_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zsbne/comm.h"
#include "zsbne/engine.h"
#include "zsbne/game.h"
#include "zsbne/network.h"

namespace zsbne {

struct ScheduleConfig {
  // GeneratedSchedule unless an explicit one is given.
  std::uint64_t seed = 0;
  std::optional<NetworkSchedule> explicit_schedule;
};

struct OracleConfig {
  bool enabled = true;
  double tol = 1e-6;
  int max_iters = 200000;
  int gap_grid_res = 101;
};

struct OutputConfig {
  std::string dir = "out";
  int stride = 1;
  bool packet_trace = false;
};

struct ExperimentConfig {
  // Builtin game name, or a declarative block when `game_spec` is set.
  std::string game_name = "rent_seeking";
  std::optional<DeclarativeGame> game_spec;
  std::array<int, 2> N{1, 1};
  std::array<double, 2> rho{1.0, 1.0};
  int quad_res = kMinQuadratureResolution;
  ScheduleConfig schedule;

  StepsizePolicy stepsize;
  double eta = 1e-2;
  std::array<double, 2> E{5.0, 5.0};
  // Exactly one of the two is set; windows are multiplied by R.
  std::optional<std::int64_t> ticks;
  std::optional<std::int64_t> windows;
  std::uint64_t seed = 0;
  SurplusInit surplus_init = SurplusInit::kZero;
  std::array<std::vector<double>, 2> init;
  SurplusOrientation orientation = SurplusOrientation::kColumnStochastic;
  double wall_clock_s = 0.0;

  OracleConfig oracle;
  OutputConfig outputs;
};

// Parses a JSON document, fills defaults and validates. Unknown and
// duplicate keys are rejected. Throws ConfigError naming the field.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig ConfigFromJson(const nlohmann::json& j);

// Canonical form with every default spelled out; ParseConfig inverts it.
nlohmann::json ConfigToJson(const ExperimentConfig& config);

// Lowercase hex SHA-256 of the canonical JSON text.
std::string ConfigDigest(const ExperimentConfig& config);

GameSpec MakeGame(const ExperimentConfig& config);

// d_l = round(rho_l N_l m_l) clamped to [1, N_l m_l].
std::array<int, 2> SparsityBudget(const ExperimentConfig& config, const GameSpec& game);

NetworkSchedule MakeSchedule(const ExperimentConfig& config, const GameSpec& game);

// Engine parameters with the tick count resolved against the windows.
EngineConfig MakeEngineConfig(const ExperimentConfig& config, const GameSpec& game,
                              const NetworkSchedule& sched);

}  // namespace zsbne

#endif  // ZSBNE_CONFIG_H_
