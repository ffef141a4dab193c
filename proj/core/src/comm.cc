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

#include "zsbne/comm.h"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include "zsbne/error.h"

namespace zsbne {

std::vector<int> SparsifyIndices(int dim, std::int64_t t, int d, int R0) {
  if (dim < 1 || d < 1 || d > dim || R0 < 1 || t < 1) {
    throw DomainError("sparsify needs 1 <= d <= dim, R0 >= 1 and t >= 1");
  }
  const std::int64_t q = (t - 1) / R0;
  const std::int64_t start = (q % dim) * d % dim;
  std::vector<int> idx(d);
  for (int j = 0; j < d; ++j) idx[j] = static_cast<int>((start + j) % dim) + 1;
  std::sort(idx.begin(), idx.end());
  return idx;
}

bool TransmitsEntry(int dim, std::int64_t t, int d, int R0, int k) {
  const std::int64_t q = t / R0;
  const std::int64_t start = (q % dim) * d % dim;
  return (k - start + dim) % dim < d;
}

SparsePacket Sparsify(std::span<const double> x, std::int64_t t, int d, int R0, Side side,
                      int agent) {
  SparsePacket p;
  p.side = side;
  p.agent = agent;
  p.tick = t;
  p.indices = SparsifyIndices(static_cast<int>(x.size()), t, d, R0);
  p.values.reserve(p.indices.size());
  for (int k : p.indices) p.values.push_back(x[k - 1]);
  return p;
}

Windows EffectiveWindows(std::array<int, 2> N, std::array<int, 2> m, std::array<int, 2> d, int R0,
                         int S0) {
  Windows w{0, 0};
  for (int l = 0; l < 2; ++l) {
    if (N[l] < 1 || m[l] < 1 || d[l] < 1 || R0 < 1 || S0 < 1) {
      throw DomainError("window parameters must be positive");
    }
    const int dim = N[l] * m[l];
    const int blocks = (dim + d[l] - 1) / d[l];
    w.R = std::max(w.R, R0 * blocks);
    w.S = std::max(w.S, S0 * R0 * blocks);
  }
  return w;
}

Eigen::MatrixXd MixingSlice::Stacked() const {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = A;
  M.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) - A;
  M.bottomRightCorner(n, n) = B;
  return M;
}

MixingSlice BuildMixingFromSenders(const Frame& frame, std::array<int, 2> agents, Side side,
                                   const std::vector<bool>& sent, SurplusOrientation orientation) {
  const int l = Index(side);
  const int n = agents[l];
  const int no = agents[1 - l];
  if (static_cast<int>(sent.size()) != n) throw ProtocolError("sender mask size mismatch");

  // In- and out-sets restricted to edges whose sender transmitted the entry.
  std::vector<std::vector<int>> in(n), out(n);
  for (int i = 0; i < n; ++i) {
    in[i].push_back(i);
    out[i].push_back(i);
  }
  for (const Edge& e : frame.within[l]) {
    if (!sent[e.sender]) continue;
    in[e.receiver].push_back(e.sender);
    out[e.sender].push_back(e.receiver);
  }

  MixingSlice slice;
  slice.A = Eigen::MatrixXd::Zero(n, n);
  slice.B = Eigen::MatrixXd::Zero(n, n);
  slice.C = Eigen::MatrixXd::Zero(no, n);
  for (int i = 0; i < n; ++i) {
    for (int j : in[i]) slice.A(i, j) = 1.0 / static_cast<double>(in[i].size());
  }
  for (int j = 0; j < n; ++j) {
    for (int i : out[j]) {
      if (orientation == SurplusOrientation::kColumnStochastic) {
        slice.B(i, j) = 1.0 / static_cast<double>(out[j].size());
      } else {
        slice.B(j, i) = 1.0 / static_cast<double>(out[j].size());
      }
    }
  }
  std::vector<std::vector<int>> cross_in(no);
  for (const Edge& e : frame.cross[l]) {
    if (sent[e.sender]) cross_in[e.receiver].push_back(e.sender);
  }
  for (int i = 0; i < no; ++i) {
    for (int j : cross_in[i]) slice.C(i, j) = 1.0 / static_cast<double>(cross_in[i].size());
  }
  return slice;
}

namespace {

// First index of a cyclic block given its sorted members: the entry after
// the wrap-around gap, or the smallest index when there is no gap.
int BlockStart(const std::vector<int>& sorted) {
  for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
    if (sorted[j + 1] != sorted[j] + 1) return sorted[j + 1];
  }
  return sorted.front();
}

void CheckPackets(const std::array<int, 2>& agents, const TickPackets& packets,
                  const Population* states) {
  for (Side s : kSides) {
    const int l = Index(s);
    if (static_cast<int>(packets[l].size()) != agents[l]) {
      throw ProtocolError("side " + std::to_string(Label(s)) + " has " +
                          std::to_string(packets[l].size()) + " packets for " +
                          std::to_string(agents[l]) + " agents");
    }
    for (int j = 0; j < agents[l]; ++j) {
      const SparsePacket& p = packets[l][j];
      if (p.side != s || p.agent != j) {
        throw ProtocolError("packet origin does not match its slot");
      }
      if (p.values.size() != p.indices.size()) {
        throw ProtocolError("packet index/value counts differ");
      }
      const int dim =
          states ? static_cast<int>((*states)[l][j].sigma.size()) : std::numeric_limits<int>::max();
      for (std::size_t e = 0; e < p.indices.size(); ++e) {
        if (p.indices[e] < 1 || p.indices[e] > dim || (e > 0 && p.indices[e] <= p.indices[e - 1])) {
          throw ProtocolError("packet indices must be strictly increasing and in range");
        }
      }
    }
  }
}

}  // namespace

MixingSlice BuildMixing(const Frame& frame, std::array<int, 2> agents, const TickPackets& packets,
                        Side side, int k, SurplusOrientation orientation) {
  CheckPackets(agents, packets, nullptr);
  const int l = Index(side);
  std::vector<bool> sent(agents[l], false);
  for (int j = 0; j < agents[l]; ++j) {
    const auto& idx = packets[l][j].indices;
    sent[j] = std::binary_search(idx.begin(), idx.end(), k);
  }
  return BuildMixingFromSenders(frame, agents, side, sent, orientation);
}

RoundResult CommunicationRound(Population& states, const Frame& frame, const TickPackets& packets,
                               SurplusOrientation orientation, std::ostream* trace) {
  const std::array<int, 2> agents = {static_cast<int>(states[0].size()),
                                     static_cast<int>(states[1].size())};
  CheckPackets(agents, packets, &states);
  RoundResult round;

  for (Side s : kSides) {
    const int l = Index(s);
    const int n = agents[l];
    const int dim = n > 0 ? static_cast<int>(states[l][0].sigma.size()) : 0;

    // Group entries by the set of agents that transmitted them.
    std::vector<std::vector<bool>> sent_by(dim, std::vector<bool>(n, false));
    for (int j = 0; j < n; ++j) {
      for (int k : packets[l][j].indices) sent_by[k - 1][j] = true;
    }
    std::map<std::vector<bool>, std::size_t> group_of;
    for (int k = 0; k < dim; ++k) {
      if (std::none_of(sent_by[k].begin(), sent_by[k].end(), [](bool v) { return v; })) {
        continue;
      }
      auto [it, inserted] = group_of.emplace(sent_by[k], round.groups[l].size());
      if (inserted) {
        round.groups[l].push_back(
            {{}, BuildMixingFromSenders(frame, agents, s, sent_by[k], orientation)});
      }
      round.groups[l][it->second].entries.push_back(k);
    }

    for (int j = 0; j < n; ++j) {
      const std::int64_t degree =
          static_cast<std::int64_t>(std::count_if(frame.within[l].begin(), frame.within[l].end(),
                                                  [j](const Edge& e) { return e.sender == j; }) +
                                    std::count_if(frame.cross[l].begin(), frame.cross[l].end(),
                                                  [j](const Edge& e) { return e.sender == j; }));
      if (packets[l][j].size() == 0) continue;
      round.messages[l] += degree;
      round.bytes[l] += degree * packets[l][j].payload_bytes();
    }
  }

  // Estimates. sigma_hat defaults to the own strategy (identity mixing).
  for (Side s : kSides) {
    const int l = Index(s);
    const int o = 1 - l;
    for (AgentState& a : states[l]) a.sigma_hat = a.sigma;
    for (const EntryGroup& g : round.groups[l]) {
      const Eigen::MatrixXd& A = g.slice.A;
      const Eigen::MatrixXd& C = g.slice.C;
      for (int k : g.entries) {
        for (int i = 0; i < agents[l]; ++i) {
          double v = 0.0;
          for (int j = 0; j < agents[l]; ++j) {
            if (A(i, j) != 0.0) v += A(i, j) * states[l][j].sigma[k];
          }
          states[l][i].sigma_hat[k] = v;
        }
        for (int i = 0; i < agents[o]; ++i) {
          double v = 0.0, w = 0.0;
          for (int j = 0; j < agents[l]; ++j) {
            if (C(i, j) != 0.0) {
              v += C(i, j) * states[l][j].sigma[k];
              w += C(i, j);
            }
          }
          if (w > 0.0) states[o][i].zeta_hat[k] = v;
        }
      }
    }
  }

  if (trace != nullptr) {
    for (Side s : kSides) {
      const int l = Index(s);
      auto emit = [&](const Edge& e, Side to) {
        const SparsePacket& p = packets[l][e.sender];
        if (p.size() == 0) return;
        *trace << p.tick << ", " << Label(s) << ", " << Label(s) << '.' << e.sender + 1 << ", "
               << Label(to) << '.' << e.receiver + 1 << ", " << p.size() << ", "
               << BlockStart(p.indices) << '\n';
      };
      for (const Edge& e : frame.within[l]) emit(e, s);
      for (const Edge& e : frame.cross[l]) emit(e, Other(s));
    }
  }
  return round;
}

void ApplyMixing(Population& states, const RoundResult& round) {
  std::vector<double> sig, sur;
  for (Side s : kSides) {
    const int l = Index(s);
    const int n = static_cast<int>(states[l].size());
    sig.resize(n);
    sur.resize(n);
    for (const EntryGroup& g : round.groups[l]) {
      const Eigen::MatrixXd& A = g.slice.A;
      const Eigen::MatrixXd& B = g.slice.B;
      for (int k : g.entries) {
        for (int j = 0; j < n; ++j) {
          sig[j] = states[l][j].sigma[k];
          sur[j] = states[l][j].surplus[k];
        }
        for (int i = 0; i < n; ++i) {
          double a = 0.0, b = 0.0;
          for (int j = 0; j < n; ++j) {
            a += A(i, j) * sig[j];
            b += B(i, j) * sur[j];
          }
          states[l][i].sigma[k] = a;
          states[l][i].surplus[k] = sig[i] - a + b;
        }
      }
    }
  }
}

namespace {

std::int64_t JointPeriod(const NetworkSchedule& sched, int dim, int d) {
  const std::int64_t cycle = static_cast<std::int64_t>(sched.R0) * (dim / std::gcd(dim, d));
  return std::lcm(static_cast<std::int64_t>(sched.period()), cycle);
}

}  // namespace

bool VerifyEntryConnectivity(const NetworkSchedule& sched, Side side, int dim, int d, int R) {
  const int l = Index(side);
  const int n = sched.agents[l];
  if (n <= 1) return true;
  const std::int64_t period = JointPeriod(sched, dim, d);
  for (int k = 0; k < dim; ++k) {
    for (std::int64_t t = 0; t < period; ++t) {
      std::vector<Edge> edges;
      for (int r = 0; r < R; ++r) {
        if (!TransmitsEntry(dim, t + r, d, sched.R0, k)) continue;
        const auto& w = sched.FrameAt(t + r).within[l];
        edges.insert(edges.end(), w.begin(), w.end());
      }
      if (!IsStronglyConnected(n, edges)) return false;
    }
  }
  return true;
}

bool VerifyEntryCoverage(const NetworkSchedule& sched, Side receiving, int rival_dim, int rival_d,
                         int S) {
  const int l = Index(receiving);
  const int o = 1 - l;
  const int n = sched.agents[l];
  const std::int64_t period = JointPeriod(sched, rival_dim, rival_d);
  for (int k = 0; k < rival_dim; ++k) {
    for (std::int64_t t = 0; t < period; ++t) {
      std::vector<bool> covered(n, false);
      for (int r = 0; r < S; ++r) {
        if (!TransmitsEntry(rival_dim, t + r, rival_d, sched.R0, k)) continue;
        for (const Edge& e : sched.FrameAt(t + r).cross[o]) covered[e.receiver] = true;
      }
      if (!std::all_of(covered.begin(), covered.end(), [](bool v) { return v; })) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace zsbne
