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

#ifndef ZSBNE_EXPERIMENT_H_
#define ZSBNE_EXPERIMENT_H_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zsbne/config.h"
#include "zsbne/discretization.h"
#include "zsbne/engine.h"
#include "zsbne/network.h"
#include "zsbne/oracle.h"
#include "zsbne/report.h"

namespace zsbne {

struct ValidationReport {
  SumStructureReport sum;
  std::array<bool, 2> joint_connectivity{};
  std::array<bool, 2> cross_coverage{};
  // Per-entry checks under the configured sparsifier; empty when the joint
  // period is too long to enumerate.
  std::array<std::optional<bool>, 2> entry_connectivity;
  std::array<std::optional<bool>, 2> entry_coverage;
  double eta_upper_bound = 0.0;
  bool eta_ok = false;  // advisory only
  std::vector<std::string> problems;

  bool pass() const { return problems.empty(); }
};

ValidationReport ValidateExperiment(const ExperimentConfig& config);
nlohmann::json ValidationJson(const ValidationReport& report);

struct ExperimentOutcome {
  ExperimentConfig config;
  std::string digest;
  DiscreteTypeModel model;
  NetworkSchedule schedule;
  std::optional<OracleResult> oracle;
  RunResult run;
  AccountingReport accounting;
};

// Discretizes, solves the oracle when enabled, checks the schedule and runs
// the engine. Throws AssumptionViolation when the schedule fails its own
// connectivity windows.
ExperimentOutcome Simulate(const ExperimentConfig& config, std::ostream* trace = nullptr,
                           const OracleResult* cached_oracle = nullptr);

// Simulate and write metrics.csv, summary.json, strategies.csv (final
// averaged strategies), oracle.csv and packet_trace.txt when enabled into
// `dir`. Throws Error with the path on filesystem failures.
ExperimentOutcome RunExperiment(const ExperimentConfig& config, const std::filesystem::path& dir,
                                const OracleResult* cached_oracle = nullptr);

nlohmann::json SummaryJson(const ExperimentOutcome& outcome);

// Oracle only: writes oracle.csv and oracle.json into `dir`.
OracleResult RunOracle(const ExperimentConfig& config, const std::filesystem::path& dir);

// Expands "N=10,20;rho=1,0.5" into the cartesian product of configs, in
// lexicographic order of the listed keys. Keys: N, rho, eta, seed.
std::vector<ExperimentConfig> ExpandSweep(const ExperimentConfig& base, std::string_view vary);

// Runs every expanded config into dir/run_<i> and writes dir/sweep.csv.
void RunSweep(const ExperimentConfig& base, std::string_view vary,
              const std::filesystem::path& dir);

}  // namespace zsbne

#endif  // ZSBNE_EXPERIMENT_H_
