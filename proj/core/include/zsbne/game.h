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

#ifndef ZSBNE_GAME_H_
#define ZSBNE_GAME_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zsbne {

// The two competing subnetworks.
enum class Side : int { kFirst = 0, kSecond = 1 };

inline constexpr std::array<Side, 2> kSides = {Side::kFirst, Side::kSecond};

inline constexpr int Index(Side side) { return static_cast<int>(side); }
inline constexpr Side Other(Side side) {
  return side == Side::kFirst ? Side::kSecond : Side::kFirst;
}
// 1 or 2, for messages and files.
inline constexpr int Label(Side side) { return Index(side) + 1; }

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool Contains(double v) const { return v >= lower && v <= upper; }
  double Clamp(double v) const { return v < lower ? lower : (v > upper ? upper : v); }
};

// Axis-aligned action set; one interval per action dimension.
using ActionBox = std::vector<Interval>;

using ActionView = std::span<const double>;

// f_{l,i}(x1, x2, theta1, theta2).
using CostFn = std::function<double(ActionView x1, ActionView x2, double th1, double th2)>;
// Gradient of f_{l,i} with respect to the agent's own action block; writes
// m_l values into `out`.
using GradFn = std::function<void(ActionView x1, ActionView x2, double th1, double th2,
                                  std::span<double> out)>;
using DensityFn = std::function<double(double th1, double th2)>;
using MarginalDensityFn = std::function<double(double theta)>;
// In-place Euclidean projection onto a convex action set.
using ProjectionFn = std::function<void(std::span<double> x)>;

struct AgentModel {
  CostFn cost;
  GradFn grad;
};

// Regularity constants of the game. Optional; only used for bound reports.
struct LipschitzMeta {
  std::array<std::array<double, 2>, 2> action{};  // action[l][j] = L_{l,j}
  double type = 0.0;                              // L_theta
  double density = 0.0;                           // L_p
  double strong_convexity = 0.0;                  // mu
};

struct SubnetworkSpec {
  ActionBox action_box;
  Interval type_interval;
  std::vector<AgentModel> agents;
  // Marginal type density. Must be set on both sides when the game is
  // declared independent.
  MarginalDensityFn marginal_density;
  // Optional projection for non-box action sets. When empty the box is used.
  ProjectionFn projection;

  int agent_count() const { return static_cast<int>(agents.size()); }
  int action_dim() const { return static_cast<int>(action_box.size()); }
};

// A continuous-type Bayesian game between two subnetworks. Treated as
// immutable once built; evaluators must be pure.
struct GameSpec {
  std::string name;
  std::array<SubnetworkSpec, 2> sides;
  DensityFn joint_density;
  // joint_density(t1, t2) == marginal_1(t1) * marginal_2(t2).
  bool independent_types = false;
  std::optional<LipschitzMeta> lipschitz;

  const SubnetworkSpec& side(Side s) const { return sides[Index(s)]; }
  SubnetworkSpec& side(Side s) { return sides[Index(s)]; }

  // Throws AssumptionViolation when a structural invariant fails.
  void Validate() const;
};

// f_{l,i}; throws NonFiniteCostError for NaN/inf results.
double AgentCost(const GameSpec& game, Side side, int agent, ActionView x1, ActionView x2,
                 double th1, double th2);

void AgentGradient(const GameSpec& game, Side side, int agent, ActionView x1, ActionView x2,
                   double th1, double th2, std::span<double> out);

// f_l: the arithmetic mean of the side's agent costs.
double SubnetworkCost(const GameSpec& game, Side side, ActionView x1, ActionView x2, double th1,
                      double th2);

void ProjectOntoActionSet(const SubnetworkSpec& side, std::span<double> x);

struct SumStructureReport {
  double constant = 0.0;       // f1 + f2 at the first sample
  double max_deviation = 0.0;  // max |f1 + f2 - constant|
  bool pass = false;
};

inline constexpr double kSumStructureTolerance = 1e-10;

// Sampled check that f1 + f2 is constant over actions and types.
SumStructureReport ValidateSumStructure(const GameSpec& game, int sample_count, std::uint64_t seed);

// Central finite differences of `cost` in the own-action block of `side`.
GradFn FiniteDifferenceGradient(CostFn cost, Side side, int action_dim, double step = 1e-6);

// Symmetric rent-seeking game: three agents per side, scalar actions in
// [0.1, 1], independent uniform types on [0.01, 1.01].
GameSpec RentSeekingGame();

// f_{l,i} = |x_l - theta_l|^2 - |x_{3-l} - theta_{3-l}|^2 for every agent,
// independent uniform types. Equilibrium: x_l(theta) = clamp(theta).
GameSpec SeparableQuadraticGame(std::array<int, 2> agents, std::array<ActionBox, 2> boxes,
                                std::array<Interval, 2> types);

// Declarative description used by configuration files. Costs are selected
// by name from the builtin families above.
struct DeclarativeGame {
  std::string costs;    // "rent_seeking" | "separable_quadratic"
  std::string density;  // "independent_uniform"
  std::array<int, 2> agents{3, 3};
  std::array<ActionBox, 2> boxes;
  std::array<Interval, 2> types;
};

GameSpec BuildGame(const DeclarativeGame& spec);

// Builtin game by name; throws DomainError for unknown names.
GameSpec BuiltinGame(std::string_view name);

}  // namespace zsbne

#endif  // ZSBNE_GAME_H_
