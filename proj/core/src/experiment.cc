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

#include "zsbne/experiment.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "zsbne/comm.h"
#include "zsbne/error.h"

namespace zsbne {

namespace {

namespace fs = std::filesystem;

constexpr int kSumStructureSamples = 10000;
// Largest (entries x joint period x window) product enumerated by the
// per-entry validators.
constexpr double kEntryCheckBudget = 5e7;

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

void CheckWritten(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw Error("failed writing " + path.string());
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

std::array<int, 2> Dims(const ExperimentConfig& config, const GameSpec& game) {
  return {config.N[0] * game.side(Side::kFirst).action_dim(),
          config.N[1] * game.side(Side::kSecond).action_dim()};
}

OracleOptions MakeOracleOptions(const ExperimentConfig& config) {
  OracleOptions o;
  o.tol = config.oracle.tol;
  o.max_iters = config.oracle.max_iters;
  o.gap_grid_res = config.oracle.gap_grid_res;
  o.seed = config.seed;
  return o;
}

nlohmann::json RowJson(const MetricRow& row) {
  auto num = [](double v) -> nlohmann::json {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  return {{"tick", row.tick},
          {"consensus", {row.consensus[0], row.consensus[1]}},
          {"surplus", {row.surplus[0], row.surplus[1]}},
          {"oracle_dist", num(row.oracle_dist)},
          {"gap_proxy", num(row.gap_proxy)},
          {"bytes_cum", row.bytes_cum}};
}

}  // namespace

ValidationReport ValidateExperiment(const ExperimentConfig& config) {
  const GameSpec game = MakeGame(config);
  const NetworkSchedule sched = MakeSchedule(config, game);
  ValidationReport report;
  report.sum = ValidateSumStructure(game, kSumStructureSamples, config.seed);
  if (!report.sum.pass) report.problems.push_back("game is not constant-sum");
  sched.Validate();
  const std::array<int, 2> dims = Dims(config, game);
  const std::array<int, 2> d = SparsityBudget(config, game);
  const Windows w = EffectiveWindows(dims, {1, 1}, d, sched.R0, sched.S0);
  for (Side s : kSides) {
    const int l = Index(s);
    const std::string tag = "side " + std::to_string(Label(s));
    report.joint_connectivity[l] = VerifyJointConnectivity(sched, s, sched.R0);
    report.cross_coverage[l] = CrossCoverage(sched, s, sched.S0);
    if (!report.joint_connectivity[l]) {
      report.problems.push_back(tag + " is not R0-jointly strongly connected");
    }
    if (!report.cross_coverage[l]) {
      report.problems.push_back(tag + " lacks cross in-neighbors within S0");
    }
    const double period =
        std::lcm(static_cast<std::int64_t>(sched.period()),
                 static_cast<std::int64_t>(sched.R0) * (dims[l] / std::gcd(dims[l], d[l])));
    if (static_cast<double>(dims[l]) * period * w.S <= kEntryCheckBudget) {
      report.entry_connectivity[l] = VerifyEntryConnectivity(sched, s, dims[l], d[l], w.R);
      report.entry_coverage[l] = VerifyEntryCoverage(sched, s, dims[1 - l], d[1 - l], w.S);
      if (!*report.entry_connectivity[l]) {
        report.problems.push_back(tag + " has an entry graph not R-jointly connected");
      }
      if (!*report.entry_coverage[l]) {
        report.problems.push_back(tag + " misses a rival entry within S ticks");
      }
    }
  }
  report.eta_upper_bound = EtaUpperBound(sched, dims, d);
  report.eta_ok = config.eta < report.eta_upper_bound;
  return report;
}

nlohmann::json ValidationJson(const ValidationReport& r) {
  auto opt = [](const std::optional<bool>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"pass", r.pass()},
          {"sum_structure",
           {{"constant", r.sum.constant},
            {"max_deviation", r.sum.max_deviation},
            {"pass", r.sum.pass}}},
          {"joint_connectivity", {r.joint_connectivity[0], r.joint_connectivity[1]}},
          {"cross_coverage", {r.cross_coverage[0], r.cross_coverage[1]}},
          {"entry_connectivity", {opt(r.entry_connectivity[0]), opt(r.entry_connectivity[1])}},
          {"entry_coverage", {opt(r.entry_coverage[0]), opt(r.entry_coverage[1])}},
          {"eta_upper_bound", r.eta_upper_bound},
          {"eta_below_bound", r.eta_ok},
          {"problems", r.problems}};
}

ExperimentOutcome Simulate(const ExperimentConfig& config, std::ostream* trace,
                           const OracleResult* cached_oracle) {
  ExperimentOutcome out;
  out.config = config;
  out.digest = ConfigDigest(config);
  const GameSpec game = MakeGame(config);
  out.model = DiscretizeTypes(game, config.N[0], config.N[1], config.quad_res);
  out.schedule = MakeSchedule(config, game);
  out.schedule.Validate();
  for (Side s : kSides) {
    if (!VerifyJointConnectivity(out.schedule, s, out.schedule.R0) ||
        !CrossCoverage(out.schedule, s, out.schedule.S0)) {
      throw AssumptionViolation("schedule fails its declared R0/S0 windows on side " +
                                std::to_string(Label(s)));
    }
  }
  if (cached_oracle != nullptr) {
    out.oracle = *cached_oracle;
  } else if (config.oracle.enabled) {
    out.oracle = SolveDbneOracle(out.model, game, MakeOracleOptions(config));
  }
  const EngineConfig engine = MakeEngineConfig(config, game, out.schedule);
  out.run = Run(game, out.model, out.schedule, engine, out.oracle ? &*out.oracle : nullptr, trace);
  out.accounting = AccountBytes(out.run);
  return out;
}

nlohmann::json SummaryJson(const ExperimentOutcome& o) {
  nlohmann::json j;
  j["version"] = Version();
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  j["config"] = ConfigToJson(o.config);
  j["config_digest"] = o.digest;
  j["d"] = {o.run.d[0], o.run.d[1]};
  j["windows"] = {{"R", o.run.windows.R}, {"S", o.run.windows.S}};
  j["ticks"] = o.run.ticks;
  j["eta_upper_bound"] = std::isnan(o.run.eta_upper_bound) ? nlohmann::json(nullptr)
                                                           : nlohmann::json(o.run.eta_upper_bound);
  j["warnings"] = o.run.warnings;
  if (o.oracle) {
    j["oracle"] = {
        {"gap", o.oracle->gap}, {"iterations", o.oracle->iterations}, {"step", o.oracle->step}};
  } else {
    j["oracle"] = nullptr;
  }
  j["final"] = o.run.rows.empty() ? nlohmann::json(nullptr) : RowJson(o.run.rows.back());
  j["accounting"] = AccountingJson(o.accounting);
  return j;
}

namespace {

void WriteAveragedStrategies(std::ostream& os, const ExperimentOutcome& o) {
  std::array<BlockStrategy, 2> avg;
  for (Side s : kSides) {
    const auto& agents = o.run.final_states[Index(s)];
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(agents.front().sigma.size());
    for (const AgentState& a : agents) mean += a.sigma + a.surplus;
    mean /= static_cast<double>(agents.size());
    const int dim = static_cast<int>(mean.size()) / o.model.count(s);
    avg[Index(s)] = BlockStrategy(s, dim, mean);
  }
  WriteStrategyCsv(os, o.model, avg[0], avg[1]);
}

}  // namespace

ExperimentOutcome RunExperiment(const ExperimentConfig& config, const fs::path& dir,
                                const OracleResult* cached_oracle) {
  EnsureDirectory(dir);
  std::ofstream trace;
  const fs::path trace_path = dir / "packet_trace.txt";
  if (config.outputs.packet_trace) trace = OpenOutput(trace_path);
  ExperimentOutcome out =
      Simulate(config, config.outputs.packet_trace ? &trace : nullptr, cached_oracle);
  if (config.outputs.packet_trace) CheckWritten(trace, trace_path);

  const fs::path metrics = dir / "metrics.csv";
  std::ofstream m = OpenOutput(metrics);
  WriteMetricsCsv(m, out.run.rows);
  CheckWritten(m, metrics);

  const fs::path summary = dir / "summary.json";
  std::ofstream s = OpenOutput(summary);
  s << SummaryJson(out).dump(2) << '\n';
  CheckWritten(s, summary);

  const fs::path strategies = dir / "strategies.csv";
  std::ofstream st = OpenOutput(strategies);
  WriteAveragedStrategies(st, out);
  CheckWritten(st, strategies);

  if (out.oracle) {
    const fs::path oracle = dir / "oracle.csv";
    std::ofstream os = OpenOutput(oracle);
    WriteStrategyCsv(os, out.model, out.oracle->first, out.oracle->second);
    CheckWritten(os, oracle);
  }
  return out;
}

OracleResult RunOracle(const ExperimentConfig& config, const fs::path& dir) {
  EnsureDirectory(dir);
  const GameSpec game = MakeGame(config);
  const DiscreteTypeModel model = DiscretizeTypes(game, config.N[0], config.N[1], config.quad_res);
  OracleResult result = SolveDbneOracle(model, game, MakeOracleOptions(config));

  const fs::path csv = dir / "oracle.csv";
  std::ofstream os = OpenOutput(csv);
  WriteStrategyCsv(os, model, result.first, result.second);
  CheckWritten(os, csv);

  const fs::path summary = dir / "oracle.json";
  std::ofstream js = OpenOutput(summary);
  js << nlohmann::json{{"version", Version()},
                       {"config", ConfigToJson(config)},
                       {"config_digest", ConfigDigest(config)},
                       {"gap", result.gap},
                       {"iterations", result.iterations},
                       {"step", result.step}}
            .dump(2)
     << '\n';
  CheckWritten(js, summary);
  return result;
}

std::vector<ExperimentConfig> ExpandSweep(const ExperimentConfig& base, std::string_view vary) {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string text(vary);
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.empty()) continue;
    const auto eq = group.find('=');
    if (eq == std::string::npos) throw ConfigError("--vary", "expected key=v1,v2,...");
    const std::string key = group.substr(0, eq);
    if (key != "N" && key != "rho" && key != "eta" && key != "seed") {
      throw ConfigError("--vary." + key, "unknown sweep key (N, rho, eta, seed)");
    }
    std::vector<std::string> values;
    std::stringstream vs(group.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      if (!v.empty()) values.push_back(v);
    }
    if (values.empty()) throw ConfigError("--vary." + key, "no values");
    axes.emplace_back(key, std::move(values));
  }
  if (axes.empty()) throw ConfigError("--vary", "nothing to vary");

  std::vector<ExperimentConfig> out;
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    nlohmann::json j = ConfigToJson(base);
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string& key = axes[a].first;
      const std::string& value = axes[a].second[pos[a]];
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(value);
      } catch (const nlohmann::json::parse_error&) {
        throw ConfigError("--vary." + key, "cannot parse value '" + value + "'");
      }
      if (key == "N" || key == "rho") {
        j[key] = parsed;
      } else {
        j["engine"][key] = parsed;
      }
    }
    out.push_back(ConfigFromJson(j));
    bool advanced = false;
    for (std::size_t a = axes.size(); a-- > 0 && !advanced;) {
      if (++pos[a] < axes[a].second.size()) {
        advanced = true;
      } else {
        pos[a] = 0;
      }
    }
    if (!advanced) return out;
  }
}

void RunSweep(const ExperimentConfig& base, std::string_view vary, const fs::path& dir) {
  const std::vector<ExperimentConfig> configs = ExpandSweep(base, vary);
  EnsureDirectory(dir);
  const fs::path index = dir / "sweep.csv";
  std::ofstream os = OpenOutput(index);
  os << "run,N1,N2,rho1,rho2,eta,seed,config_digest,final_consensus,final_surplus,"
        "oracle_dist,total_bytes\n";
  // Oracles depend on the game, N and the oracle settings only.
  std::map<std::string, OracleResult> oracles;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const ExperimentConfig& c = configs[i];
    nlohmann::json key = ConfigToJson(c);
    key.erase("rho");
    key.erase("schedule");
    key.erase("outputs");
    key["engine"] = {{"seed", c.seed}};
    const std::string oracle_key = key.dump();
    const OracleResult* cached = nullptr;
    if (auto it = oracles.find(oracle_key); it != oracles.end()) cached = &it->second;

    const fs::path run_dir = dir / ("run_" + std::to_string(i));
    ExperimentConfig run_config = c;
    run_config.outputs.dir = run_dir.string();
    const ExperimentOutcome out = RunExperiment(run_config, run_dir, cached);
    if (out.oracle && cached == nullptr) oracles.emplace(oracle_key, *out.oracle);

    const MetricRow last = out.run.rows.empty() ? MetricRow{} : out.run.rows.back();
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.17g,%.17g,%.17g,%llu,%s,%.17g,%.17g,", i, c.N[0],
                  c.N[1], c.rho[0], c.rho[1], c.eta, static_cast<unsigned long long>(c.seed),
                  out.digest.c_str(), std::max(last.consensus[0], last.consensus[1]),
                  std::max(last.surplus[0], last.surplus[1]));
    os << buf;
    if (std::isnan(last.oracle_dist)) {
      os << "nan";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", last.oracle_dist);
      os << buf;
    }
    os << ',' << out.accounting.total_bytes << '\n';
  }
  CheckWritten(os, index);
}

}  // namespace zsbne
