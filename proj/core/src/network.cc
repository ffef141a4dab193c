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

#include "zsbne/network.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "zsbne/error.h"

namespace zsbne {

namespace {

constexpr std::array<const char*, 2> kWithinKeys = {"within1", "within2"};
constexpr std::array<const char*, 2> kCrossKeys = {"cross12", "cross21"};

void CheckEdges(const std::vector<Edge>& edges, int senders, int receivers, bool within,
                const std::string& what) {
  for (const Edge& e : edges) {
    if (e.sender < 0 || e.sender >= senders || e.receiver < 0 || e.receiver >= receivers) {
      throw DomainError(what + " references agent outside range");
    }
    if (within && e.sender == e.receiver) {
      throw DomainError(what + " stores a self-loop");
    }
  }
}

std::vector<bool> Reach(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<bool> seen(n, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

void NetworkSchedule::Validate() const {
  if (agents[0] < 1 || agents[1] < 1) throw DomainError("agent counts must be positive");
  if (frames.empty()) throw DomainError("schedule has no frames");
  if (R0 < 1 || S0 < 1) throw DomainError("R0 and S0 must be positive");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string tag = "frame " + std::to_string(f);
    for (Side s : kSides) {
      const int l = Index(s);
      CheckEdges(frames[f].within[l], agents[l], agents[l], true, tag + " " + kWithinKeys[l]);
      CheckEdges(frames[f].cross[l], agents[l], agents[1 - l], false, tag + " " + kCrossKeys[l]);
    }
  }
}

bool IsStronglyConnected(int n, const std::vector<Edge>& edges) {
  if (n <= 1) return true;
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (const Edge& e : edges) {
    fwd[e.sender].push_back(e.receiver);
    bwd[e.receiver].push_back(e.sender);
  }
  const auto a = Reach(n, fwd);
  const auto b = Reach(n, bwd);
  return std::all_of(a.begin(), a.end(), [](bool v) { return v; }) &&
         std::all_of(b.begin(), b.end(), [](bool v) { return v; });
}

bool VerifyJointConnectivity(const NetworkSchedule& sched, Side side, int R0) {
  const int n = sched.agents[Index(side)];
  if (n <= 1) return true;
  if (R0 < 1 || sched.frames.empty()) return false;
  for (int t = 0; t < sched.period(); ++t) {
    std::vector<Edge> edges;
    for (int r = 0; r < R0; ++r) {
      const auto& w = sched.FrameAt(t + r).within[Index(side)];
      edges.insert(edges.end(), w.begin(), w.end());
    }
    if (!IsStronglyConnected(n, edges)) return false;
  }
  return true;
}

bool CrossCoverage(const NetworkSchedule& sched, Side side, int S0) {
  const int n = sched.agents[Index(side)];
  if (S0 < 1 || sched.frames.empty()) return false;
  for (int t = 0; t < sched.period(); ++t) {
    std::vector<bool> covered(n, false);
    for (int r = 0; r < S0; ++r) {
      for (const Edge& e : sched.FrameAt(t + r).cross[Index(Other(side))]) {
        covered[e.receiver] = true;
      }
    }
    if (!std::all_of(covered.begin(), covered.end(), [](bool v) { return v; })) {
      return false;
    }
  }
  return true;
}

NetworkSchedule GeneratedSchedule(int n1, int n2, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1) throw DomainError("agent counts must be positive");
  NetworkSchedule sched;
  sched.agents = {n1, n2};
  sched.frames.resize(2);
  sched.R0 = 2;
  sched.S0 = 2;
  std::mt19937_64 rng(seed);
  for (Side s : kSides) {
    const int l = Index(s);
    const int n = sched.agents[l];
    if (n >= 2) {
      for (int i = 0; i < n; ++i) {
        sched.frames[i % 2].within[l].push_back({i, (i + 1) % n});
      }
      // Reverse chords i+1 -> i, each kept with probability 1/2.
      for (int i = 0; n >= 3 && i < n; ++i) {
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) continue;
        const Edge chord{(i + 1) % n, i};
        const int frame = std::uniform_int_distribution<int>(0, 1)(rng);
        sched.frames[frame].within[l].push_back(chord);
      }
      for (Frame& f : sched.frames) std::sort(f.within[l].begin(), f.within[l].end());
    }
  }
  for (Side s : kSides) {
    const int l = Index(s);
    const int senders = sched.agents[l];
    const int receivers = sched.agents[1 - l];
    std::uniform_int_distribution<int> pick(0, senders - 1);
    std::vector<int> pi(receivers);
    for (int& v : pi) v = pick(rng);
    for (int f = 0; f < 2; ++f) {
      for (int i = 0; i < receivers; ++i) {
        sched.frames[f].cross[l].push_back({(pi[i] + f) % senders, i});
      }
      std::sort(sched.frames[f].cross[l].begin(), sched.frames[f].cross[l].end());
    }
  }
  return sched;
}

nlohmann::json ScheduleToJson(const NetworkSchedule& sched) {
  nlohmann::json frames = nlohmann::json::array();
  auto edges_json = [](const std::vector<Edge>& edges) {
    nlohmann::json a = nlohmann::json::array();
    for (const Edge& e : edges) a.push_back({e.sender, e.receiver});
    return a;
  };
  for (const Frame& f : sched.frames) {
    nlohmann::json jf = nlohmann::json::object();
    for (int l = 0; l < 2; ++l) {
      jf[kWithinKeys[l]] = edges_json(f.within[l]);
      jf[kCrossKeys[l]] = edges_json(f.cross[l]);
    }
    frames.push_back(std::move(jf));
  }
  return {{"agents", {sched.agents[0], sched.agents[1]}},
          {"R0", sched.R0},
          {"S0", sched.S0},
          {"frames", std::move(frames)}};
}

namespace {

int ReadInt(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

const nlohmann::json& Require(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "missing");
  return j.at(key);
}

}  // namespace

NetworkSchedule ScheduleFromJson(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "agents" && key != "R0" && key != "S0" && key != "frames") {
      throw ConfigError(path + "." + key, "unknown key");
    }
  }
  NetworkSchedule sched;
  const auto& agents = Require(j, "agents", path);
  if (!agents.is_array() || agents.size() != 2) {
    throw ConfigError(path + ".agents", "expected two integers");
  }
  for (int l = 0; l < 2; ++l) {
    sched.agents[l] = ReadInt(agents[l], path + ".agents[" + std::to_string(l) + "]");
  }
  sched.R0 = ReadInt(Require(j, "R0", path), path + ".R0");
  sched.S0 = ReadInt(Require(j, "S0", path), path + ".S0");
  const auto& frames = Require(j, "frames", path);
  if (!frames.is_array()) throw ConfigError(path + ".frames", "expected an array");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string fpath = path + ".frames[" + std::to_string(f) + "]";
    if (!frames[f].is_object()) throw ConfigError(fpath, "expected an object");
    Frame frame;
    for (const auto& [key, value] : frames[f].items()) {
      std::vector<Edge>* target = nullptr;
      for (int l = 0; l < 2; ++l) {
        if (key == kWithinKeys[l]) target = &frame.within[l];
        if (key == kCrossKeys[l]) target = &frame.cross[l];
      }
      const std::string epath = fpath + "." + key;
      if (target == nullptr) throw ConfigError(epath, "unknown key");
      if (!value.is_array()) throw ConfigError(epath, "expected an array of pairs");
      for (std::size_t e = 0; e < value.size(); ++e) {
        const std::string ipath = epath + "[" + std::to_string(e) + "]";
        if (!value[e].is_array() || value[e].size() != 2) {
          throw ConfigError(ipath, "expected [sender, receiver]");
        }
        target->push_back({ReadInt(value[e][0], ipath), ReadInt(value[e][1], ipath)});
      }
    }
    sched.frames.push_back(std::move(frame));
  }
  try {
    sched.Validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return sched;
}

}  // namespace zsbne
