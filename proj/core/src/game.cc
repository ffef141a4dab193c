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

#include "zsbne/game.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "zsbne/error.h"

namespace zsbne {

namespace {

std::string DescribeInputs(ActionView x1, ActionView x2, double th1, double th2) {
  std::ostringstream os;
  os.precision(17);
  auto put = [&os](ActionView x) {
    os << '(';
    for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
    os << ')';
  };
  os << "x1=";
  put(x1);
  os << " x2=";
  put(x2);
  os << " th1=" << th1 << " th2=" << th2;
  return os.str();
}

void CheckInterval(const Interval& iv, const std::string& what, bool strictly_positive_width) {
  if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
    throw AssumptionViolation(what + " is unbounded");
  }
  if (iv.lower > iv.upper || (strictly_positive_width && !(iv.lower < iv.upper))) {
    throw AssumptionViolation(what + " is empty");
  }
}

}  // namespace

void GameSpec::Validate() const {
  for (Side s : kSides) {
    const SubnetworkSpec& sub = side(s);
    const std::string tag = "side " + std::to_string(Label(s));
    if (sub.agents.empty()) throw AssumptionViolation(tag + " has no agents");
    if (sub.action_box.empty()) {
      throw AssumptionViolation(tag + " has an empty action dimension");
    }
    for (std::size_t k = 0; k < sub.action_box.size(); ++k) {
      CheckInterval(sub.action_box[k], tag + " action interval " + std::to_string(k), false);
    }
    CheckInterval(sub.type_interval, tag + " type interval", true);
    for (std::size_t i = 0; i < sub.agents.size(); ++i) {
      if (!sub.agents[i].cost || !sub.agents[i].grad) {
        throw AssumptionViolation(tag + " agent " + std::to_string(i) +
                                  " lacks a cost or gradient evaluator");
      }
    }
    if (independent_types && !sub.marginal_density) {
      throw AssumptionViolation(tag +
                                " marginal density missing for an "
                                "independent-type game");
    }
  }
  if (!joint_density) throw AssumptionViolation("joint density missing");
}

double AgentCost(const GameSpec& game, Side side, int agent, ActionView x1, ActionView x2,
                 double th1, double th2) {
  const double v = game.side(side).agents[agent].cost(x1, x2, th1, th2);
  if (!std::isfinite(v)) {
    throw NonFiniteCostError("non-finite cost for side " + std::to_string(Label(side)) + " agent " +
                                 std::to_string(agent) + " at " + DescribeInputs(x1, x2, th1, th2),
                             Label(side), agent);
  }
  return v;
}

void AgentGradient(const GameSpec& game, Side side, int agent, ActionView x1, ActionView x2,
                   double th1, double th2, std::span<double> out) {
  game.side(side).agents[agent].grad(x1, x2, th1, th2, out);
  for (double v : out) {
    if (!std::isfinite(v)) {
      throw NonFiniteCostError("non-finite gradient for side " + std::to_string(Label(side)) +
                                   " agent " + std::to_string(agent) + " at " +
                                   DescribeInputs(x1, x2, th1, th2),
                               Label(side), agent);
    }
  }
}

double SubnetworkCost(const GameSpec& game, Side side, ActionView x1, ActionView x2, double th1,
                      double th2) {
  const int n = game.side(side).agent_count();
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += AgentCost(game, side, i, x1, x2, th1, th2);
  return total / n;
}

void ProjectOntoActionSet(const SubnetworkSpec& side, std::span<double> x) {
  if (side.projection) {
    side.projection(x);
    return;
  }
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = side.action_box[k].Clamp(x[k]);
}

SumStructureReport ValidateSumStructure(const GameSpec& game, int sample_count,
                                        std::uint64_t seed) {
  if (sample_count < 2) throw DomainError("sample_count must be at least 2");
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const Interval& iv) {
    return std::uniform_real_distribution<double>(iv.lower, iv.upper)(rng);
  };
  const SubnetworkSpec& s1 = game.side(Side::kFirst);
  const SubnetworkSpec& s2 = game.side(Side::kSecond);
  std::vector<double> x1(s1.action_dim()), x2(s2.action_dim());

  SumStructureReport report;
  for (int n = 0; n < sample_count; ++n) {
    for (int k = 0; k < s1.action_dim(); ++k) x1[k] = draw(s1.action_box[k]);
    for (int k = 0; k < s2.action_dim(); ++k) x2[k] = draw(s2.action_box[k]);
    const double th1 = draw(s1.type_interval);
    const double th2 = draw(s2.type_interval);
    const double sum = SubnetworkCost(game, Side::kFirst, x1, x2, th1, th2) +
                       SubnetworkCost(game, Side::kSecond, x1, x2, th1, th2);
    if (n == 0) {
      report.constant = sum;
    } else {
      report.max_deviation = std::max(report.max_deviation, std::abs(sum - report.constant));
    }
  }
  report.pass = report.max_deviation <= kSumStructureTolerance;
  return report;
}

GradFn FiniteDifferenceGradient(CostFn cost, Side side, int action_dim, double step) {
  return [cost = std::move(cost), side, action_dim, step](ActionView x1, ActionView x2, double th1,
                                                          double th2, std::span<double> out) {
    std::vector<double> own(side == Side::kFirst ? x1.begin() : x2.begin(),
                            side == Side::kFirst ? x1.end() : x2.end());
    for (int k = 0; k < action_dim; ++k) {
      const double saved = own[k];
      own[k] = saved + step;
      const double up = side == Side::kFirst ? cost(own, x2, th1, th2) : cost(x1, own, th1, th2);
      own[k] = saved - step;
      const double down = side == Side::kFirst ? cost(own, x2, th1, th2) : cost(x1, own, th1, th2);
      own[k] = saved;
      out[k] = (up - down) / (2.0 * step);
    }
  };
}

namespace {

// Costs of the rent-seeking family, written for the own action `xo` and the
// rival action `xr`. The share weight of agents 1..3 is 1/6, 1/2, 1/3.
constexpr std::array<double, 3> kShareWeight = {1.0 / 6.0, 1.0 / 2.0, 1.0 / 3.0};
constexpr std::array<bool, 3> kHasEffortTerm = {true, true, false};

AgentModel RentSeekingAgent(Side side, int agent) {
  const double w = kShareWeight[agent];
  const bool effort = kHasEffortTerm[agent];
  const bool first = side == Side::kFirst;
  AgentModel model;
  model.cost = [w, effort, first](ActionView x1, ActionView x2, double th1, double th2) {
    const double xo = first ? x1[0] : x2[0];
    const double xr = first ? x2[0] : x1[0];
    const double share = -w * xo / (xo + xr);
    return effort ? 0.5 * (xo - xr) * (th1 + th2) + share : share;
  };
  model.grad = [w, effort, first](ActionView x1, ActionView x2, double th1, double th2,
                                  std::span<double> out) {
    const double xo = first ? x1[0] : x2[0];
    const double xr = first ? x2[0] : x1[0];
    const double sum = xo + xr;
    const double share = -w * xr / (sum * sum);
    out[0] = effort ? 0.5 * (th1 + th2) + share : share;
  };
  return model;
}

void SetIndependentUniform(GameSpec& game) {
  const Interval t1 = game.side(Side::kFirst).type_interval;
  const Interval t2 = game.side(Side::kSecond).type_interval;
  const double d1 = 1.0 / t1.width();
  const double d2 = 1.0 / t2.width();
  game.side(Side::kFirst).marginal_density = [t1, d1](double t) {
    return t1.Contains(t) ? d1 : 0.0;
  };
  game.side(Side::kSecond).marginal_density = [t2, d2](double t) {
    return t2.Contains(t) ? d2 : 0.0;
  };
  game.joint_density = [t1, t2, d1, d2](double a, double b) {
    return t1.Contains(a) && t2.Contains(b) ? d1 * d2 : 0.0;
  };
  game.independent_types = true;
}

}  // namespace

GameSpec RentSeekingGame() {
  GameSpec game;
  game.name = "rent_seeking";
  for (Side s : kSides) {
    SubnetworkSpec& sub = game.side(s);
    sub.action_box = {Interval{0.1, 1.0}};
    sub.type_interval = Interval{0.01, 1.01};
    for (int i = 0; i < 3; ++i) sub.agents.push_back(RentSeekingAgent(s, i));
  }
  SetIndependentUniform(game);
  return game;
}

GameSpec SeparableQuadraticGame(std::array<int, 2> agents, std::array<ActionBox, 2> boxes,
                                std::array<Interval, 2> types) {
  GameSpec game;
  game.name = "separable_quadratic";
  for (Side s : kSides) {
    SubnetworkSpec& sub = game.side(s);
    sub.action_box = boxes[Index(s)];
    sub.type_interval = types[Index(s)];
    const bool first = s == Side::kFirst;
    AgentModel model;
    model.cost = [first](ActionView x1, ActionView x2, double th1, double th2) {
      double own = 0.0, rival = 0.0;
      for (double v : x1) own += (v - th1) * (v - th1);
      for (double v : x2) rival += (v - th2) * (v - th2);
      return first ? own - rival : rival - own;
    };
    model.grad = [first](ActionView x1, ActionView x2, double th1, double th2,
                         std::span<double> out) {
      const ActionView x = first ? x1 : x2;
      const double th = first ? th1 : th2;
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = 2.0 * (x[k] - th);
    };
    sub.agents.assign(agents[Index(s)], model);
  }
  SetIndependentUniform(game);
  return game;
}

GameSpec BuildGame(const DeclarativeGame& spec) {
  if (spec.density != "independent_uniform") {
    throw DomainError("unsupported density '" + spec.density + "'");
  }
  GameSpec game;
  if (spec.costs == "rent_seeking") {
    game = RentSeekingGame();
    for (Side s : kSides) {
      if (spec.boxes[Index(s)].size() != 1) {
        throw DomainError("rent_seeking costs need scalar actions");
      }
      if (spec.agents[Index(s)] != 3) {
        throw DomainError("rent_seeking costs define exactly 3 agents per side");
      }
      game.side(s).action_box = spec.boxes[Index(s)];
      game.side(s).type_interval = spec.types[Index(s)];
    }
    SetIndependentUniform(game);
  } else if (spec.costs == "separable_quadratic") {
    game = SeparableQuadraticGame(spec.agents, spec.boxes, spec.types);
  } else {
    throw DomainError("unknown cost family '" + spec.costs + "'");
  }
  game.Validate();
  return game;
}

GameSpec BuiltinGame(std::string_view name) {
  if (name == "rent_seeking") return RentSeekingGame();
  if (name == "separable_quadratic") {
    return SeparableQuadraticGame({1, 1}, {ActionBox{{0.0, 1.0}}, ActionBox{{0.0, 1.0}}},
                                  {Interval{0.0, 1.0}, Interval{0.0, 1.0}});
  }
  throw DomainError("unknown builtin game '" + std::string(name) + "'");
}

}  // namespace zsbne
