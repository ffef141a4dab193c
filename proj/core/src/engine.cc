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

#include "zsbne/engine.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "zsbne/penalty.h"

namespace zsbne {

namespace {

constexpr double kDivergenceLimit = 1e9;

std::span<const double> AsSpan(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::VectorXd Repeat(const std::vector<double>& block, int count) {
  const int m = static_cast<int>(block.size());
  Eigen::VectorXd v(static_cast<Eigen::Index>(count) * m);
  for (int r = 0; r < count; ++r) {
    for (int k = 0; k < m; ++k) v[r * m + k] = block[k];
  }
  return v;
}

}  // namespace

double StepsizePolicy::operator()(std::int64_t q) const {
  if (kind == Kind::kRateProbe) {
    return 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(q, 1)));
  }
  return a / std::pow(static_cast<double>(q) + q0, p);
}

void StepsizePolicy::Validate() const {
  if (kind == Kind::kRateProbe) return;
  if (!(a > 0.0)) throw DomainError("stepsize a must be positive");
  if (!(q0 > 0.0)) throw DomainError("stepsize q0 must be positive");
  if (!(p > 0.5 && p <= 1.0)) throw DomainError("stepsize p must lie in (0.5, 1]");
}

Eigen::VectorXd AgentSubgradient(const AgentState& state, Side side, int agent,
                                 const DiscreteTypeModel& model, const GameSpec& game, double E) {
  const SubnetworkSpec& sub = game.side(side);
  const int m = sub.action_dim();
  const int blocks = model.count(side);
  Eigen::VectorXd g(state.sigma.size());
  std::vector<double> h(m);
  for (int r = 0; r < blocks; ++r) {
    std::span<const double> own(state.sigma.data() + static_cast<std::ptrdiff_t>(r) * m, m);
    std::span<double> out(g.data() + static_cast<std::ptrdiff_t>(r) * m, m);
    ExpectedGradientAt(model, game, side, agent, own, AsSpan(state.zeta_hat), r, out);
    PenaltySubgradient(own, sub, E, h);
    for (int k = 0; k < m; ++k) out[k] = (out[k] + h[k]) / blocks;
  }
  return g;
}

Engine::Engine(const GameSpec& game, const DiscreteTypeModel& model, const NetworkSchedule& sched,
               EngineConfig config)
    : game_(game), model_(model), sched_(sched), config_(std::move(config)) {
  sched_.Validate();
  config_.stepsize.Validate();
  if (config_.ticks < 0) throw DomainError("tick count must be non-negative");
  if (config_.stride < 1) throw DomainError("stride must be positive");
  if (!(config_.eta >= 0.0)) throw DomainError("eta must be non-negative");
  std::array<int, 2> m{};
  for (Side s : kSides) {
    const int l = Index(s);
    m[l] = game.side(s).action_dim();
    if (config_.N[l] != model.count(s)) throw DomainError("N does not match the type model");
    if (sched.agents[l] != game.side(s).agent_count()) {
      throw DomainError("schedule agent count does not match the game");
    }
    dims_[l] = config_.N[l] * m[l];
    if (config_.d[l] < 1 || config_.d[l] > dims_[l]) {
      throw DomainError("d must lie in [1, N m]");
    }
    if (!(config_.E[l] > 0.0)) throw DomainError("penalty weight E must be positive");
    if (game.lipschitz && !(config_.E[l] > game.lipschitz->action[l][l])) {
      throw AssumptionViolation("penalty weight E_" + std::to_string(Label(s)) + " must exceed L_" +
                                std::to_string(Label(s)) + std::to_string(Label(s)));
    }
    if (config_.init[l].empty()) {
      for (const Interval& iv : game.side(s).action_box) {
        config_.init[l].push_back(0.5 * (iv.lower + iv.upper));
      }
    }
    if (static_cast<int>(config_.init[l].size()) != m[l]) {
      throw DomainError("initial action has the wrong dimension");
    }
  }
  windows_ = EffectiveWindows(config_.N, m, config_.d, sched.R0, sched.S0);

  for (Side s : kSides) {
    const int l = Index(s);
    const int n = game.side(s).agent_count();
    const Eigen::VectorXd x0 = Repeat(config_.init[l], config_.N[l]);
    const Eigen::VectorXd rival0 = Repeat(config_.init[1 - l], config_.N[1 - l]);
    states_[l].resize(n);
    for (AgentState& a : states_[l]) {
      a.sigma = x0;
      a.surplus = config_.surplus_init == SurplusInit::kInitialAction
                      ? x0
                      : Eigen::VectorXd::Zero(x0.size());
      a.sigma_hat = x0;
      a.zeta_hat = rival0;
    }
    surplus_snap_[l].resize(n);
    grad_snap_[l].resize(n);
    packets_[l].resize(n);
  }
}

void Engine::Step() {
  const std::int64_t t = tick_;
  const int R = windows_.R;
  for (Side s : kSides) {
    const int l = Index(s);
    for (int j = 0; j < static_cast<int>(states_[l].size()); ++j) {
      packets_[l][j] = Sparsify(AsSpan(states_[l][j].sigma), t + 1, config_.d[l], sched_.R0, s, j);
    }
  }
  const RoundResult round =
      CommunicationRound(states_, sched_.FrameAt(t), packets_, config_.orientation, trace_);
  for (int l = 0; l < 2; ++l) {
    messages_[l] += round.messages[l];
    bytes_[l] += round.bytes[l];
  }

  if (t % R == 0) {
    for (Side s : kSides) {
      const int l = Index(s);
      for (int i = 0; i < static_cast<int>(states_[l].size()); ++i) {
        surplus_snap_[l][i] = states_[l][i].surplus;
        grad_snap_[l][i] = AgentSubgradient(states_[l][i], s, i, model_, game_, config_.E[l]);
      }
    }
  }

  ApplyMixing(states_, round);

  if (t % R == R - 1) {
    const double alpha = config_.stepsize(t / R);
    for (int l = 0; l < 2; ++l) {
      for (int i = 0; i < static_cast<int>(states_[l].size()); ++i) {
        AgentState& a = states_[l][i];
        a.sigma += config_.eta * surplus_snap_[l][i] - alpha * grad_snap_[l][i];
        a.surplus -= config_.eta * surplus_snap_[l][i];
      }
    }
  }

  for (const auto& side : states_) {
    for (const AgentState& a : side) {
      const double worst = std::max(a.sigma.cwiseAbs().maxCoeff(), a.surplus.cwiseAbs().maxCoeff());
      if (!(worst <= kDivergenceLimit)) {
        std::ostringstream os;
        os << "state magnitude " << worst << " exceeds " << kDivergenceLimit << " at tick " << t;
        throw DivergenceError(os.str(), t);
      }
    }
  }
  ++tick_;
}

Eigen::VectorXd Engine::Average(Side side) const {
  const auto& agents = states_[Index(side)];
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(dims_[Index(side)]);
  for (const AgentState& a : agents) avg += a.sigma + a.surplus;
  return avg / static_cast<double>(agents.size());
}

MetricRow Engine::Sample(const OracleResult* oracle) const {
  MetricRow row;
  row.tick = tick_;
  row.bytes_cum = total_bytes();
  std::array<Eigen::VectorXd, 2> avg;
  for (Side s : kSides) {
    const int l = Index(s);
    avg[l] = Average(s);
    double consensus = 0.0, surplus = 0.0;
    for (const AgentState& a : states_[l]) {
      consensus = std::max(consensus, (a.sigma - avg[l]).norm());
      surplus = std::max(surplus, a.surplus.norm());
    }
    row.consensus[l] = consensus;
    row.surplus[l] = surplus;
  }
  if (oracle == nullptr) {
    row.oracle_dist = std::numeric_limits<double>::quiet_NaN();
    row.gap_proxy = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  const std::array<const BlockStrategy*, 2> star = {&oracle->first, &oracle->second};
  row.oracle_dist = 0.0;
  row.gap_proxy = 0.0;
  for (Side s : kSides) {
    const int l = Index(s);
    row.oracle_dist =
        std::max(row.oracle_dist, (avg[l] - star[l]->values()).lpNorm<Eigen::Infinity>());
    const int m = game_.side(s).action_dim();
    const int blocks = model_.count(s);
    const auto rival = AsSpan(star[1 - l]->values());
    double deviation = 0.0;
    for (int r = 0; r < blocks; ++r) {
      std::span<const double> own(avg[l].data() + static_cast<std::ptrdiff_t>(r) * m, m);
      deviation += ExpectedCostAt(model_, game_, s, std::nullopt, own, rival, r) +
                   Penalty(own, game_.side(s), config_.E[l]) -
                   ExpectedCostAt(model_, game_, s, std::nullopt, star[l]->block(r), rival, r);
    }
    row.gap_proxy += deviation / blocks;
  }
  return row;
}

RunResult Run(const GameSpec& game, const DiscreteTypeModel& model, const NetworkSchedule& sched,
              const EngineConfig& config, const OracleResult* oracle, std::ostream* trace) {
  Engine engine(game, model, sched, config);
  engine.set_trace(trace);
  RunResult result;
  result.windows = engine.windows();
  result.d = config.d;
  result.eta_upper_bound = std::numeric_limits<double>::quiet_NaN();
  if (config.validate_eta) {
    std::array<int, 2> dims{};
    for (Side s : kSides) {
      dims[Index(s)] = config.N[Index(s)] * game.side(s).action_dim();
    }
    result.eta_upper_bound = EtaUpperBound(sched, dims, config.d);
    if (config.eta >= result.eta_upper_bound) {
      std::ostringstream os;
      os << "eta " << config.eta << " is not below the bound " << result.eta_upper_bound;
      result.warnings.push_back(os.str());
    }
  }

  const std::int64_t every = static_cast<std::int64_t>(engine.windows().R) * config.stride;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&]() {
    result.final_states = engine.states();
    result.ticks = engine.tick();
    result.messages = engine.messages();
    result.bytes = engine.bytes();
  };
  for (std::int64_t t = 0; t < config.ticks; ++t) {
    if (t % every == 0) result.rows.push_back(engine.Sample(oracle));
    engine.Step();
    if (config.wall_clock_s > 0.0 && (t & 255) == 255) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
      if (spent.count() > config.wall_clock_s) {
        finish();
        throw PartialResultError(
            "wall-clock budget exhausted after " + std::to_string(engine.tick()) + " ticks",
            std::move(result));
      }
    }
  }
  if (config.ticks % every == 0) result.rows.push_back(engine.Sample(oracle));
  finish();
  return result;
}

}  // namespace zsbne
