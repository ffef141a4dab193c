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

#ifndef ZSBNE_DISCRETIZATION_H_
#define ZSBNE_DISCRETIZATION_H_

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "zsbne/game.h"

namespace zsbne {

// Type-discretized game: per side, N_l quantile points with equal marginal
// mass, plus the joint / marginal / conditional mass tables.
//
// Cell i of side l is (bounds[i], bounds[i+1]] and is represented by
// points[i] == bounds[i+1]. The lower type bound belongs to cell 0.
struct DiscreteTypeModel {
  std::array<std::vector<double>, 2> points;
  std::array<std::vector<double>, 2> cell_bounds;
  // N1 x N2, row-major: joint_mass[i * N2 + j].
  std::vector<double> joint_mass;
  std::array<std::vector<double>, 2> marginal_mass;
  // conditional_mass[l][r * N_{3-l} + j] = P(theta_{3-l} = j | theta_l = r).
  std::array<std::vector<double>, 2> conditional_mass;

  int count(Side s) const { return static_cast<int>(points[Index(s)].size()); }
  double joint(int i, int j) const {
    return joint_mass[static_cast<std::size_t>(i) * count(Side::kSecond) + j];
  }
  double conditional(Side s, int r, int j) const {
    return conditional_mass[Index(s)][static_cast<std::size_t>(r) * count(Other(s)) + j];
  }
  // Point of `s` with index i.
  double point(Side s, int i) const { return points[Index(s)][i]; }
};

// A discrete strategy: N blocks of dimension m, stacked into one vector.
class BlockStrategy {
 public:
  BlockStrategy() = default;
  BlockStrategy(Side side, int blocks, int dim);
  BlockStrategy(Side side, int dim, Eigen::VectorXd values);

  // Every block equal to `action`.
  static BlockStrategy Constant(Side side, int blocks, std::span<const double> action);

  Side side() const { return side_; }
  int blocks() const { return blocks_; }
  int dim() const { return dim_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  std::span<const double> block(int r) const {
    return {values_.data() + static_cast<std::ptrdiff_t>(r) * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> block(int r) {
    return {values_.data() + static_cast<std::ptrdiff_t>(r) * dim_, static_cast<std::size_t>(dim_)};
  }

  // Every block inside `box` up to `tol`.
  bool IsFeasible(const ActionBox& box, double tol = 1e-9) const;

 private:
  Side side_ = Side::kFirst;
  int blocks_ = 0;
  int dim_ = 0;
  Eigen::VectorXd values_;
};

inline constexpr int kMinQuadratureResolution = 64;

// Quantile discretization. Points solve P_l(cell i) = 1/N_l by bisection on
// the numerically integrated marginal CDF; joint masses are product
// trapezoid integrals over the cells with `quad_res` nodes per axis.
DiscreteTypeModel DiscretizeTypes(const GameSpec& game, int n1, int n2,
                                  int quad_res = kMinQuadratureResolution);

// Expected cost of side `side` at its own type index r:
//   sum_j f(own block r, rival block j, theta^r, theta^j) P(j | r).
// `agent` selects f_{l,i}; std::nullopt selects the subnetwork mean f_l.
double DiscreteExpectedCost(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                            std::optional<int> agent, const BlockStrategy& s1,
                            const BlockStrategy& s2, int r);

// Same quantity with the own block and the rival strategy given explicitly.
// `rival` holds N_{3-l} stacked blocks of dimension m_{3-l}.
double ExpectedCostAt(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                      std::optional<int> agent, std::span<const double> own_block,
                      std::span<const double> rival, int r);

// Gradient of ExpectedCostAt with respect to the own block; writes m_l values.
void ExpectedGradientAt(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                        std::optional<int> agent, std::span<const double> own_block,
                        std::span<const double> rival, int r, std::span<double> out);

// Index of the cell containing theta; throws DomainError outside Theta_l.
int CellIndex(const DiscreteTypeModel& model, const GameSpec& game, Side side, double theta);

// Piecewise-constant extension of a discrete strategy to any type.
Eigen::VectorXd ExtendStrategy(const DiscreteTypeModel& model, const GameSpec& game,
                               const BlockStrategy& s, double theta);

}  // namespace zsbne

#endif  // ZSBNE_DISCRETIZATION_H_
