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

#include "zsbne/discretization.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsbne/error.h"

namespace zsbne {

BlockStrategy::BlockStrategy(Side side, int blocks, int dim)
    : side_(side),
      blocks_(blocks),
      dim_(dim),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(blocks) * dim)) {}

BlockStrategy::BlockStrategy(Side side, int dim, Eigen::VectorXd values)
    : side_(side), dim_(dim), values_(std::move(values)) {
  if (dim <= 0 || values_.size() % dim != 0) {
    throw DomainError("strategy length is not a multiple of the action dimension");
  }
  blocks_ = static_cast<int>(values_.size() / dim);
}

BlockStrategy BlockStrategy::Constant(Side side, int blocks, std::span<const double> action) {
  BlockStrategy s(side, blocks, static_cast<int>(action.size()));
  for (int r = 0; r < blocks; ++r) std::copy(action.begin(), action.end(), s.block(r).begin());
  return s;
}

bool BlockStrategy::IsFeasible(const ActionBox& box, double tol) const {
  for (int r = 0; r < blocks_; ++r) {
    auto b = block(r);
    for (int k = 0; k < dim_; ++k) {
      if (b[k] < box[k].lower - tol || b[k] > box[k].upper + tol) return false;
    }
  }
  return true;
}

namespace {

constexpr int kCdfPanels = 4096;
constexpr int kMarginalNodes = 1025;
constexpr int kMaxBisections = 200;
constexpr double kNormalizationTolerance = 1e-6;

// Trapezoid weights for `nodes` equally spaced points over [a, b].
double TrapezoidWeight(int node, int nodes, double a, double b) {
  const double h = (b - a) / (nodes - 1);
  return (node == 0 || node == nodes - 1) ? 0.5 * h : h;
}

double NodeAt(int node, int nodes, double a, double b) {
  if (node == nodes - 1) return b;
  return a + (b - a) * node / (nodes - 1);
}

// Tabulated marginal density and its cumulative trapezoid integral.
class MarginalCdf {
 public:
  MarginalCdf(const GameSpec& game, Side side) : interval_(game.side(side).type_interval) {
    const Interval other = game.side(Other(side)).type_interval;
    h_ = interval_.width() / kCdfPanels;
    density_.resize(kCdfPanels + 1);
    for (int g = 0; g <= kCdfPanels; ++g) {
      const double theta = NodeAt(g, kCdfPanels + 1, interval_.lower, interval_.upper);
      double p;
      if (game.independent_types) {
        p = game.side(side).marginal_density(theta);
      } else {
        p = 0.0;
        for (int k = 0; k < kMarginalNodes; ++k) {
          const double u = NodeAt(k, kMarginalNodes, other.lower, other.upper);
          const double w = TrapezoidWeight(k, kMarginalNodes, other.lower, other.upper);
          p += w *
               (side == Side::kFirst ? game.joint_density(theta, u) : game.joint_density(u, theta));
        }
      }
      if (!(p > 0.0) || !std::isfinite(p)) {
        throw AssumptionViolation("marginal density of side " + std::to_string(Label(side)) +
                                  " is not positive at theta=" + std::to_string(theta));
      }
      density_[g] = p;
    }
    cumulative_.assign(kCdfPanels + 1, 0.0);
    for (int g = 0; g < kCdfPanels; ++g) {
      cumulative_[g + 1] = cumulative_[g] + 0.5 * h_ * (density_[g] + density_[g + 1]);
    }
    total_ = cumulative_.back();
    if (std::abs(total_ - 1.0) > kNormalizationTolerance) {
      throw AssumptionViolation("marginal density of side " + std::to_string(Label(side)) +
                                " integrates to " + std::to_string(total_) + ", not 1");
    }
  }

  double operator()(double theta) const {
    if (theta <= interval_.lower) return 0.0;
    if (theta >= interval_.upper) return 1.0;
    const double s = (theta - interval_.lower) / h_;
    const int g = std::min(static_cast<int>(s), kCdfPanels - 1);
    const double dx = theta - (interval_.lower + g * h_);
    const double slope = (density_[g + 1] - density_[g]) / h_;
    const double partial = dx * (density_[g] + 0.5 * slope * dx);
    return (cumulative_[g] + partial) / total_;
  }

 private:
  Interval interval_;
  double h_ = 0.0;
  double total_ = 0.0;
  std::vector<double> density_;
  std::vector<double> cumulative_;
};

std::vector<double> QuantilePoints(const GameSpec& game, Side side, int count) {
  const Interval iv = game.side(side).type_interval;
  const MarginalCdf cdf(game, side);
  std::vector<double> points(count);
  for (int i = 1; i < count; ++i) {
    const double target = static_cast<double>(i) / count;
    double lo = iv.lower, hi = iv.upper;
    if (cdf(lo) > target || cdf(hi) < target) {
      throw QuadratureError("quantile " + std::to_string(target) + " of side " +
                            std::to_string(Label(side)) + " is not bracketed");
    }
    // Bisect to machine precision.
    for (int it = 0; it < kMaxBisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (cdf(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    points[i - 1] = 0.5 * (lo + hi);
  }
  points[count - 1] = iv.upper;
  for (int i = 0; i < count; ++i) {
    const double prev = i == 0 ? iv.lower : points[i - 1];
    if (!(points[i] > prev)) {
      throw QuadratureError("quantile points of side " + std::to_string(Label(side)) +
                            " are not strictly increasing; increase the resolution");
    }
  }
  return points;
}

// Trapezoid integral of a univariate function over [a, b].
template <typename F>
double Integrate1d(F&& f, double a, double b, int nodes) {
  double total = 0.0;
  for (int k = 0; k < nodes; ++k)
    total += TrapezoidWeight(k, nodes, a, b) * f(NodeAt(k, nodes, a, b));
  return total;
}

}  // namespace

DiscreteTypeModel DiscretizeTypes(const GameSpec& game, int n1, int n2, int quad_res) {
  if (n1 < 1 || n2 < 1) throw DomainError("discrete point counts must be positive");
  if (quad_res < kMinQuadratureResolution) {
    throw DomainError("quad_res must be at least " + std::to_string(kMinQuadratureResolution));
  }
  game.Validate();

  DiscreteTypeModel model;
  const std::array<int, 2> counts = {n1, n2};
  for (Side s : kSides) {
    const int l = Index(s);
    model.points[l] = QuantilePoints(game, s, counts[l]);
    model.cell_bounds[l].resize(counts[l] + 1);
    model.cell_bounds[l][0] = game.side(s).type_interval.lower;
    std::copy(model.points[l].begin(), model.points[l].end(), model.cell_bounds[l].begin() + 1);
  }

  const auto& b1 = model.cell_bounds[0];
  const auto& b2 = model.cell_bounds[1];
  model.joint_mass.assign(static_cast<std::size_t>(n1) * n2, 0.0);
  if (game.independent_types) {
    std::array<std::vector<double>, 2> cell({std::vector<double>(n1), std::vector<double>(n2)});
    for (Side s : kSides) {
      const int l = Index(s);
      const auto& pdf = game.side(s).marginal_density;
      for (int i = 0; i < counts[l]; ++i) {
        cell[l][i] =
            Integrate1d(pdf, model.cell_bounds[l][i], model.cell_bounds[l][i + 1], quad_res);
      }
    }
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j)
        model.joint_mass[static_cast<std::size_t>(i) * n2 + j] = cell[0][i] * cell[1][j];
    }
  } else {
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        double mass = 0.0;
        for (int a = 0; a < quad_res; ++a) {
          const double u = NodeAt(a, quad_res, b1[i], b1[i + 1]);
          const double wu = TrapezoidWeight(a, quad_res, b1[i], b1[i + 1]);
          for (int b = 0; b < quad_res; ++b) {
            const double v = NodeAt(b, quad_res, b2[j], b2[j + 1]);
            mass += wu * TrapezoidWeight(b, quad_res, b2[j], b2[j + 1]) * game.joint_density(u, v);
          }
        }
        model.joint_mass[static_cast<std::size_t>(i) * n2 + j] = mass;
      }
    }
  }

  model.marginal_mass[0].assign(n1, 0.0);
  model.marginal_mass[1].assign(n2, 0.0);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const double p = model.joint(i, j);
      if (p < 0.0) throw AssumptionViolation("negative joint density mass");
      model.marginal_mass[0][i] += p;
      model.marginal_mass[1][j] += p;
    }
  }
  for (Side s : kSides) {
    const int l = Index(s);
    const int own = counts[l];
    const int rival = counts[1 - l];
    model.conditional_mass[l].resize(static_cast<std::size_t>(own) * rival);
    for (int r = 0; r < own; ++r) {
      const double marginal = model.marginal_mass[l][r];
      if (!(marginal > 0.0)) {
        throw AssumptionViolation("zero marginal mass in cell " + std::to_string(r) + " of side " +
                                  std::to_string(Label(s)));
      }
      for (int j = 0; j < rival; ++j) {
        const double p = s == Side::kFirst ? model.joint(r, j) : model.joint(j, r);
        model.conditional_mass[l][static_cast<std::size_t>(r) * rival + j] = p / marginal;
      }
    }
  }
  return model;
}

namespace {

void CheckTypeIndex(const DiscreteTypeModel& model, Side side, int r) {
  if (r < 0 || r >= model.count(side)) {
    throw DomainError("type index " + std::to_string(r) + " out of range for side " +
                      std::to_string(Label(side)));
  }
}

void CheckAgent(const GameSpec& game, Side side, std::optional<int> agent) {
  if (agent && (*agent < 0 || *agent >= game.side(side).agent_count())) {
    throw DomainError("agent index " + std::to_string(*agent) + " out of range");
  }
}

}  // namespace

double ExpectedCostAt(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                      std::optional<int> agent, std::span<const double> own_block,
                      std::span<const double> rival, int r) {
  CheckTypeIndex(model, side, r);
  CheckAgent(game, side, agent);
  const Side other = Other(side);
  const int rival_count = model.count(other);
  const std::size_t rival_dim = static_cast<std::size_t>(game.side(other).action_dim());
  const double th_own = model.point(side, r);
  double total = 0.0;
  for (int j = 0; j < rival_count; ++j) {
    const double w = model.conditional(side, r, j);
    if (w == 0.0) continue;
    const auto rival_block = rival.subspan(j * rival_dim, rival_dim);
    const double th_rival = model.point(other, j);
    const bool first = side == Side::kFirst;
    const ActionView x1 = first ? own_block : rival_block;
    const ActionView x2 = first ? rival_block : own_block;
    const double th1 = first ? th_own : th_rival;
    const double th2 = first ? th_rival : th_own;
    const double f = agent ? AgentCost(game, side, *agent, x1, x2, th1, th2)
                           : SubnetworkCost(game, side, x1, x2, th1, th2);
    total += w * f;
  }
  return total;
}

void ExpectedGradientAt(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                        std::optional<int> agent, std::span<const double> own_block,
                        std::span<const double> rival, int r, std::span<double> out) {
  CheckTypeIndex(model, side, r);
  CheckAgent(game, side, agent);
  const Side other = Other(side);
  const int rival_count = model.count(other);
  const std::size_t rival_dim = static_cast<std::size_t>(game.side(other).action_dim());
  const std::size_t m = own_block.size();
  thread_local std::vector<double> scratch;
  scratch.resize(m);
  std::fill(out.begin(), out.end(), 0.0);

  const double th_own = model.point(side, r);
  const int first_agent = agent ? *agent : 0;
  const int last_agent = agent ? *agent + 1 : game.side(side).agent_count();
  const double agent_weight = agent ? 1.0 : 1.0 / game.side(side).agent_count();
  const bool first = side == Side::kFirst;
  for (int j = 0; j < rival_count; ++j) {
    const double w = model.conditional(side, r, j);
    if (w == 0.0) continue;
    const auto rival_block = rival.subspan(j * rival_dim, rival_dim);
    const double th_rival = model.point(other, j);
    const ActionView x1 = first ? own_block : rival_block;
    const ActionView x2 = first ? rival_block : own_block;
    const double th1 = first ? th_own : th_rival;
    const double th2 = first ? th_rival : th_own;
    for (int i = first_agent; i < last_agent; ++i) {
      AgentGradient(game, side, i, x1, x2, th1, th2, scratch);
      for (std::size_t k = 0; k < m; ++k) out[k] += w * agent_weight * scratch[k];
    }
  }
}

double DiscreteExpectedCost(const DiscreteTypeModel& model, const GameSpec& game, Side side,
                            std::optional<int> agent, const BlockStrategy& s1,
                            const BlockStrategy& s2, int r) {
  const BlockStrategy& own = side == Side::kFirst ? s1 : s2;
  const BlockStrategy& rival = side == Side::kFirst ? s2 : s1;
  if (own.blocks() != model.count(side) || rival.blocks() != model.count(Other(side)) ||
      own.dim() != game.side(side).action_dim() ||
      rival.dim() != game.side(Other(side)).action_dim()) {
    throw DomainError("strategy shape does not match the discretized game");
  }
  CheckTypeIndex(model, side, r);
  return ExpectedCostAt(model, game, side, agent, own.block(r),
                        {rival.values().data(), static_cast<std::size_t>(rival.values().size())},
                        r);
}

int CellIndex(const DiscreteTypeModel& model, const GameSpec& game, Side side, double theta) {
  const Interval iv = game.side(side).type_interval;
  if (!iv.Contains(theta)) {
    throw DomainError("type " + std::to_string(theta) + " outside the type interval of side " +
                      std::to_string(Label(side)));
  }
  const auto& pts = model.points[Index(side)];
  const auto it = std::lower_bound(pts.begin(), pts.end(), theta);
  if (it == pts.end()) return static_cast<int>(pts.size()) - 1;
  return static_cast<int>(it - pts.begin());
}

Eigen::VectorXd ExtendStrategy(const DiscreteTypeModel& model, const GameSpec& game,
                               const BlockStrategy& s, double theta) {
  const int r = CellIndex(model, game, s.side(), theta);
  const auto b = s.block(r);
  return Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
}

}  // namespace zsbne
