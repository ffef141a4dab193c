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

#include "zsbne/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "zsbne/error.h"

namespace zsbne {

namespace {

using Vec = Eigen::VectorXd;

std::span<const double> AsSpan(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Joint strategy profile x = (x1, x2) with the game's pseudo-gradient.
class SaddleOperator {
 public:
  SaddleOperator(const DiscreteTypeModel& model, const GameSpec& game)
      : model_(model), game_(game) {
    for (Side s : kSides) {
      dims_[Index(s)] = game.side(s).action_dim();
      counts_[Index(s)] = model.count(s);
    }
  }

  int size(Side s) const { return dims_[Index(s)] * counts_[Index(s)]; }

  // Block r of side l gets P_l(theta^r) * grad of the expected subnetwork
  // cost. Using each side's own gradient is the descent-ascent direction of
  // the saddle function E U_1 because f_2 = c - f_1.
  void Evaluate(const Vec& x1, const Vec& x2, Vec& g1, Vec& g2) const {
    g1.resize(x1.size());
    g2.resize(x2.size());
    EvaluateSide(Side::kFirst, x1, x2, g1);
    EvaluateSide(Side::kSecond, x2, x1, g2);
  }

  void Project(Side s, Vec& x) const {
    const int m = dims_[Index(s)];
    for (int r = 0; r < counts_[Index(s)]; ++r) {
      ProjectOntoActionSet(game_.side(s), {x.data() + static_cast<std::ptrdiff_t>(r) * m,
                                           static_cast<std::size_t>(m)});
    }
  }

 private:
  void EvaluateSide(Side s, const Vec& own, const Vec& rival, Vec& out) const {
    const int m = dims_[Index(s)];
    for (int r = 0; r < counts_[Index(s)]; ++r) {
      std::span<double> o(out.data() + static_cast<std::ptrdiff_t>(r) * m, m);
      ExpectedGradientAt(
          model_, game_, s, std::nullopt,
          {own.data() + static_cast<std::ptrdiff_t>(r) * m, static_cast<std::size_t>(m)},
          AsSpan(rival), r, o);
      const double w = model_.marginal_mass[Index(s)][r];
      for (double& v : o) v *= w;
    }
  }

  const DiscreteTypeModel& model_;
  const GameSpec& game_;
  std::array<int, 2> dims_{};
  std::array<int, 2> counts_{};
};

Vec RandomProfile(const GameSpec& game, Side s, int blocks, std::mt19937_64& rng) {
  const int m = game.side(s).action_dim();
  Vec x(static_cast<Eigen::Index>(blocks) * m);
  for (int r = 0; r < blocks; ++r) {
    for (int k = 0; k < m; ++k) {
      const Interval iv = game.side(s).action_box[k];
      x[r * m + k] = std::uniform_real_distribution<double>(iv.lower, iv.upper)(rng);
    }
  }
  return x;
}

double EstimateLipschitz(const SaddleOperator& op, const DiscreteTypeModel& model,
                         const GameSpec& game, std::uint64_t seed) {
  constexpr int kPairs = 24;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double widest = 0.0;
  for (Side s : kSides) {
    for (const Interval& iv : game.side(s).action_box) widest = std::max(widest, iv.width());
  }
  double lipschitz = 0.0;
  Vec g1a, g2a, g1b, g2b;
  for (int p = 0; p < kPairs; ++p) {
    Vec a1 = RandomProfile(game, Side::kFirst, model.count(Side::kFirst), rng);
    Vec a2 = RandomProfile(game, Side::kSecond, model.count(Side::kSecond), rng);
    Vec b1, b2;
    if (p % 2 == 0) {
      b1 = RandomProfile(game, Side::kFirst, model.count(Side::kFirst), rng);
      b2 = RandomProfile(game, Side::kSecond, model.count(Side::kSecond), rng);
    } else {
      // Nearby pair, still inside the box.
      const double radius = 1e-2 * std::max(widest, 1e-12);
      b1 = a1;
      b2 = a2;
      for (Eigen::Index k = 0; k < b1.size(); ++k) b1[k] += radius * normal(rng);
      for (Eigen::Index k = 0; k < b2.size(); ++k) b2[k] += radius * normal(rng);
      op.Project(Side::kFirst, b1);
      op.Project(Side::kSecond, b2);
    }
    op.Evaluate(a1, a2, g1a, g2a);
    op.Evaluate(b1, b2, g1b, g2b);
    const double dx = std::sqrt((a1 - b1).squaredNorm() + (a2 - b2).squaredNorm());
    if (dx <= 0.0) continue;
    const double dg = std::sqrt((g1a - g1b).squaredNorm() + (g2a - g2b).squaredNorm());
    lipschitz = std::max(lipschitz, dg / dx);
  }
  return lipschitz;
}

}  // namespace

OracleResult SolveDbneOracle(const DiscreteTypeModel& model, const GameSpec& game,
                             const OracleOptions& options) {
  if (!(options.tol > 0.0) || options.max_iters <= 0) {
    throw DomainError("oracle tolerance and iteration budget must be positive");
  }
  const SumStructureReport sum = ValidateSumStructure(game, 64, options.seed);
  if (!sum.pass) {
    throw AssumptionViolation("game is not constant-sum (max deviation " +
                              std::to_string(sum.max_deviation) + ")");
  }

  const SaddleOperator op(model, game);
  const double lipschitz = EstimateLipschitz(op, model, game, options.seed);
  double step = lipschitz > 0.0 ? 0.9 / lipschitz : 1.0;

  // Start from the box centers.
  std::array<Vec, 2> x;
  for (Side s : kSides) {
    const int m = game.side(s).action_dim();
    x[Index(s)].resize(op.size(s));
    for (int r = 0; r < model.count(s); ++r) {
      for (int k = 0; k < m; ++k) {
        const Interval iv = game.side(s).action_box[k];
        x[Index(s)][r * m + k] = 0.5 * (iv.lower + iv.upper);
      }
    }
    op.Project(s, x[Index(s)]);
  }

  auto make_result = [&](double gap, int iterations) {
    OracleResult result;
    result.first = BlockStrategy(Side::kFirst, game.side(Side::kFirst).action_dim(), x[0]);
    result.second = BlockStrategy(Side::kSecond, game.side(Side::kSecond).action_dim(), x[1]);
    result.gap = gap;
    result.iterations = iterations;
    result.step = step;
    return result;
  };

  double check_threshold = 1e-3;
  Vec g1, g2, y1, y2, h1, h2;
  for (int it = 1; it <= options.max_iters; ++it) {
    op.Evaluate(x[0], x[1], g1, g2);
    // Halve the step until the local Lipschitz condition
    // step * |F(x) - F(y)| <= 0.9 |x - y| holds; the sampled estimate can
    // miss steep corners of the box.
    double moved = 0.0;
    for (int attempt = 0;; ++attempt) {
      y1 = x[0] - step * g1;
      y2 = x[1] - step * g2;
      op.Project(Side::kFirst, y1);
      op.Project(Side::kSecond, y2);
      op.Evaluate(y1, y2, h1, h2);
      moved = std::sqrt((x[0] - y1).squaredNorm() + (x[1] - y2).squaredNorm());
      const double change = std::sqrt((g1 - h1).squaredNorm() + (g2 - h2).squaredNorm());
      if (step * change <= 0.9 * moved || attempt >= 60) break;
      step *= 0.5;
    }
    const double residual =
        std::max((x[0] - y1).lpNorm<Eigen::Infinity>(), (x[1] - y2).lpNorm<Eigen::Infinity>()) /
        step;
    if (!std::isfinite(residual) || !std::isfinite(moved)) {
      throw NumericError("oracle iterate became non-finite");
    }
    if (residual <= check_threshold) {
      const OracleResult current = make_result(0.0, it);
      const double gap = DbneGap(model, game, current.first, current.second, options.gap_grid_res);
      if (gap <= options.tol) return make_result(gap, it);
      check_threshold *= 0.1;
    }

    x[0] -= step * h1;
    x[1] -= step * h2;
    op.Project(Side::kFirst, x[0]);
    op.Project(Side::kSecond, x[1]);
  }
  const OracleResult last = make_result(0, options.max_iters);
  const double gap = DbneGap(model, game, last.first, last.second, options.gap_grid_res);
  if (gap <= options.tol) return make_result(gap, options.max_iters);
  throw NonConvergenceError("oracle did not reach gap " + std::to_string(options.tol) + " within " +
                                std::to_string(options.max_iters) + " iterations (final gap " +
                                std::to_string(gap) + ")",
                            gap);
}

namespace {

// Minimizes the expected cost of one side at one type point over the action
// set, starting from a grid and polishing with one projected-gradient step.
class BlockImprover {
 public:
  BlockImprover(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                std::span<const double> rival, int grid_res)
      : model_(model), game_(game), side_(side), rival_(rival), grid_res_(grid_res) {
    const int m = game.side(side).action_dim();
    double count = 1.0;
    for (int k = 0; k < m; ++k) count *= grid_res;
    if (count > 4e6) throw DomainError("gap grid too large for this action dimension");
    grid_points_ = static_cast<long>(count);
  }

  double Cost(std::span<const double> block, int r) const {
    return ExpectedCostAt(model_, game_, side_, std::nullopt, block, rival_, r);
  }

  // Best cost found for type index r, starting from the current block.
  double Best(std::span<const double> current, int r) const {
    const ActionBox& box = game_.side(side_).action_box;
    const int m = static_cast<int>(box.size());
    std::vector<double> cand(m), best_point(m);
    double best = std::numeric_limits<double>::infinity();
    for (long g = 0; g < grid_points_; ++g) {
      long rest = g;
      for (int k = 0; k < m; ++k) {
        const int idx = static_cast<int>(rest % grid_res_);
        rest /= grid_res_;
        const Interval iv = box[k];
        cand[k] = grid_res_ == 1 ? 0.5 * (iv.lower + iv.upper)
                                 : iv.lower + iv.width() * idx / (grid_res_ - 1);
      }
      ProjectOntoActionSet(game_.side(side_), cand);
      const double c = Cost(cand, r);
      if (c < best) {
        best = c;
        best_point = cand;
      }
    }
    best = std::min(best, Polish(best_point, best, r));
    std::vector<double> cur(current.begin(), current.end());
    ProjectOntoActionSet(game_.side(side_), cur);
    best = std::min(best, Polish(cur, Cost(cur, r), r));
    return best;
  }

 private:
  // One projected-gradient step with Armijo backtracking.
  double Polish(const std::vector<double>& start, double start_cost, int r) const {
    const ActionBox& box = game_.side(side_).action_box;
    const int m = static_cast<int>(start.size());
    std::vector<double> grad(m), trial(m);
    ExpectedGradientAt(model_, game_, side_, std::nullopt, start, rival_, r, grad);
    double gnorm = 0.0, diameter = 0.0;
    for (int k = 0; k < m; ++k) {
      gnorm += grad[k] * grad[k];
      diameter += box[k].width() * box[k].width();
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) return start_cost;
    double step = std::max(std::sqrt(diameter), 1e-12) / gnorm;
    for (int attempt = 0; attempt < 60; ++attempt, step *= 0.5) {
      double decrease = 0.0;
      for (int k = 0; k < m; ++k) trial[k] = start[k] - step * grad[k];
      ProjectOntoActionSet(game_.side(side_), trial);
      for (int k = 0; k < m; ++k) decrease += grad[k] * (start[k] - trial[k]);
      if (decrease <= 0.0) break;
      const double c = Cost(trial, r);
      if (c <= start_cost - 1e-4 * decrease) return c;
    }
    return start_cost;
  }

  const DiscreteTypeModel& model_;
  const GameSpec& game_;
  Side side_;
  std::span<const double> rival_;
  int grid_res_;
  long grid_points_ = 0;
};

}  // namespace

double DbneGap(const DiscreteTypeModel& model, const GameSpec& game, const BlockStrategy& s1,
               const BlockStrategy& s2, int grid_res) {
  if (grid_res < 2) throw DomainError("grid_res must be at least 2");
  double gap = 0.0;
  for (Side s : kSides) {
    const BlockStrategy& own = s == Side::kFirst ? s1 : s2;
    const BlockStrategy& rival = s == Side::kFirst ? s2 : s1;
    const BlockImprover improver(model, game, s, AsSpan(rival.values()), grid_res);
    for (int r = 0; r < model.count(s); ++r) {
      const double current = improver.Cost(own.block(r), r);
      gap = std::max(gap, current - improver.Best(own.block(r), r));
    }
  }
  return gap;
}

void WriteStrategyCsv(std::ostream& os, const DiscreteTypeModel& model, const BlockStrategy& s1,
                      const BlockStrategy& s2) {
  os << "side,type_index,theta_point,action_dim,value\n";
  char buf[128];
  for (const BlockStrategy* s : {&s1, &s2}) {
    for (int r = 0; r < s->blocks(); ++r) {
      const auto b = s->block(r);
      for (int k = 0; k < s->dim(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%d,%.17g\n", Label(s->side()), r + 1,
                      model.point(s->side(), r), k + 1, b[k]);
        os << buf;
      }
    }
  }
}

}  // namespace zsbne
