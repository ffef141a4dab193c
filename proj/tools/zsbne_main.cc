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

// Command-line driver: run, oracle, sweep and validate subcommands.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "zsbne/config.h"
#include "zsbne/error.h"
#include "zsbne/experiment.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

zsbne::ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return zsbne::ParseConfig(text.str());
}

std::filesystem::path OutputDir(const zsbne::ExperimentConfig& config,
                                const std::string& override_dir) {
  return override_dir.empty() ? std::filesystem::path(config.outputs.dir)
                              : std::filesystem::path(override_dir);
}

void PrintWarnings(const zsbne::RunResult& run) {
  for (const std::string& w : run.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed equilibrium seeking for two-subnetwork Bayesian games"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::string vary;

  CLI::App* run = app.add_subcommand("run", "simulate the distributed algorithm");
  run->add_option("config", config_path, "JSON configuration")->required();
  run->add_option("--out", out_dir, "output directory (overrides outputs.dir)");

  CLI::App* oracle = app.add_subcommand("oracle", "solve the discretized game centrally");
  oracle->add_option("config", config_path, "JSON configuration")->required();
  oracle->add_option("--out", out_dir, "output directory (overrides outputs.dir)");

  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of configurations");
  sweep->add_option("config", config_path, "JSON configuration")->required();
  sweep->add_option("--vary", vary, "e.g. \"N=10,20;rho=1,0.5\"")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides outputs.dir)");

  CLI::App* validate = app.add_subcommand("validate", "check sum structure and connectivity");
  validate->add_option("config", config_path, "JSON configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const zsbne::ExperimentConfig config = LoadConfig(config_path);
    if (*run) {
      const auto dir = OutputDir(config, out_dir);
      const zsbne::ExperimentOutcome out = zsbne::RunExperiment(config, dir);
      PrintWarnings(out.run);
      std::cout << zsbne::SummaryJson(out).dump(2) << '\n';
    } else if (*oracle) {
      const auto dir = OutputDir(config, out_dir);
      const zsbne::OracleResult result = zsbne::RunOracle(config, dir);
      std::cout << "oracle gap " << result.gap << " after " << result.iterations
                << " iterations; wrote " << (dir / "oracle.csv").string() << '\n';
    } else if (*sweep) {
      const auto dir = OutputDir(config, out_dir);
      zsbne::RunSweep(config, vary, dir);
      std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
    } else if (*validate) {
      const zsbne::ValidationReport report = zsbne::ValidateExperiment(config);
      std::cout << zsbne::ValidationJson(report).dump(2) << '\n';
      if (!report.eta_ok) {
        std::cerr << "warning: eta " << config.eta << " is not below the bound "
                  << report.eta_upper_bound << '\n';
      }
      return report.pass() ? kExitOk : kExitValidation;
    }
  } catch (const zsbne::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const zsbne::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const zsbne::AssumptionViolation& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return kExitValidation;
  } catch (const zsbne::PartialResultError& e) {
    std::cerr << "partial result: " << e.what() << '\n';
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOk;
}
