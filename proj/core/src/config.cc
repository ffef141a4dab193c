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

#include "zsbne/config.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include "zsbne/error.h"

namespace zsbne {

namespace {

using nlohmann::json;

void CheckKeys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; })) {
      throw ConfigError(path + "." + key, "unknown key");
    }
  }
}

double ReadDouble(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

std::int64_t ReadInt(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t ReadSeed(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a non-negative integer");
}

bool ReadBool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string ReadString(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

// A scalar applies to both sides; otherwise a two-element array.
template <typename T, typename Reader>
std::array<T, 2> ReadPair(const json& j, const std::string& path, Reader read) {
  if (!j.is_array()) {
    const T v = read(j, path);
    return {v, v};
  }
  if (j.size() != 2) throw ConfigError(path, "expected two values");
  return {read(j[0], path + "[0]"), read(j[1], path + "[1]")};
}

Interval ReadInterval(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [lower, upper]");
  Interval iv{ReadDouble(j[0], path + "[0]"), ReadDouble(j[1], path + "[1]")};
  if (iv.lower > iv.upper) throw ConfigError(path, "lower exceeds upper");
  return iv;
}

DeclarativeGame ReadDeclarativeGame(const json& j, const std::string& path) {
  CheckKeys(j, path, {"costs", "density", "agents", "boxes", "types"});
  DeclarativeGame g;
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing");
    return j.at(key);
  };
  g.costs = ReadString(need("costs"), path + ".costs");
  g.density = j.contains("density") ? ReadString(j.at("density"), path + ".density")
                                    : "independent_uniform";
  if (j.contains("agents")) {
    const auto a = ReadPair<std::int64_t>(j.at("agents"), path + ".agents", ReadInt);
    for (int l = 0; l < 2; ++l) {
      if (a[l] < 1) throw ConfigError(path + ".agents", "must be positive");
      g.agents[l] = static_cast<int>(a[l]);
    }
  }
  const json& boxes = need("boxes");
  if (!boxes.is_array() || boxes.size() != 2) {
    throw ConfigError(path + ".boxes", "expected one box per side");
  }
  for (int l = 0; l < 2; ++l) {
    const std::string bpath = path + ".boxes[" + std::to_string(l) + "]";
    if (!boxes[l].is_array() || boxes[l].empty()) {
      throw ConfigError(bpath, "expected a list of intervals");
    }
    for (std::size_t k = 0; k < boxes[l].size(); ++k) {
      g.boxes[l].push_back(ReadInterval(boxes[l][k], bpath + "[" + std::to_string(k) + "]"));
    }
  }
  const json& types = need("types");
  if (!types.is_array() || types.size() != 2) {
    throw ConfigError(path + ".types", "expected one interval per side");
  }
  for (int l = 0; l < 2; ++l) {
    g.types[l] = ReadInterval(types[l], path + ".types[" + std::to_string(l) + "]");
  }
  return g;
}

json IntervalJson(const Interval& iv) { return json::array({iv.lower, iv.upper}); }

const char* StepsizeName(StepsizePolicy::Kind k) {
  return k == StepsizePolicy::Kind::kRateProbe ? "rate_probe" : "square_summable";
}

// Parser callback state: one key set per open object.
struct DuplicateKeyGuard {
  struct Level {
    bool object = false;
    std::set<std::string> keys;
    std::string last;
  };
  std::vector<Level> stack;

  std::string Path() const {
    std::string p = "$";
    for (const Level& level : stack) p += level.object ? "." + level.last : "[]";
    return p;
  }

  bool operator()(int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        stack.push_back({true, {}, {}});
        break;
      case json::parse_event_t::array_start:
        stack.push_back({false, {}, {}});
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        if (!stack.empty()) stack.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string key = parsed.get<std::string>();
        Level& level = stack.back();
        level.last = key;
        if (!level.keys.insert(key).second) throw ConfigError(Path(), "duplicate key");
        break;
      }
      case json::parse_event_t::value:
        break;
    }
    return true;
  }
};

}  // namespace

ExperimentConfig ParseConfig(std::string_view text) {
  json j;
  DuplicateKeyGuard guard;
  try {
    j = json::parse(text.begin(), text.end(),
                    [&guard](int depth, json::parse_event_t event, json& parsed) {
                      return guard(depth, event, parsed);
                    });
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return ConfigFromJson(j);
}

ExperimentConfig ConfigFromJson(const json& j) {
  CheckKeys(j, "$", {"game", "N", "rho", "quad_res", "schedule", "engine", "oracle", "outputs"});
  ExperimentConfig c;

  if (!j.contains("game")) throw ConfigError("$.game", "missing");
  const json& game = j.at("game");
  if (game.is_string()) {
    c.game_name = game.get<std::string>();
    try {
      BuiltinGame(c.game_name);
    } catch (const DomainError& e) {
      throw ConfigError("$.game", e.what());
    }
  } else {
    c.game_name.clear();
    c.game_spec = ReadDeclarativeGame(game, "$.game");
  }
  GameSpec spec;
  try {
    spec = MakeGame(c);
  } catch (const Error& e) {
    throw ConfigError("$.game", e.what());
  }

  if (!j.contains("N")) throw ConfigError("$.N", "missing");
  const auto n = ReadPair<std::int64_t>(j.at("N"), "$.N", ReadInt);
  for (int l = 0; l < 2; ++l) {
    if (n[l] < 1 || n[l] > 1000000) throw ConfigError("$.N", "must lie in [1, 1e6]");
    c.N[l] = static_cast<int>(n[l]);
  }
  if (j.contains("rho")) c.rho = ReadPair<double>(j.at("rho"), "$.rho", ReadDouble);
  for (int l = 0; l < 2; ++l) {
    if (!(c.rho[l] > 0.0 && c.rho[l] <= 1.0)) {
      throw ConfigError("$.rho", "must lie in (0, 1] so that d >= 1");
    }
  }
  if (j.contains("quad_res")) {
    const auto q = ReadInt(j.at("quad_res"), "$.quad_res");
    if (q < kMinQuadratureResolution || q > 100000) {
      throw ConfigError("$.quad_res", "must lie in [64, 100000]");
    }
    c.quad_res = static_cast<int>(q);
  }

  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    if (!s.is_object()) throw ConfigError("$.schedule", "expected an object");
    const std::string kind =
        s.contains("kind") ? ReadString(s.at("kind"), "$.schedule.kind") : "generated";
    if (kind == "generated") {
      CheckKeys(s, "$.schedule", {"kind", "seed"});
      if (s.contains("seed")) c.schedule.seed = ReadSeed(s.at("seed"), "$.schedule.seed");
    } else if (kind == "explicit") {
      json body = s;
      body.erase("kind");
      c.schedule.explicit_schedule = ScheduleFromJson(body, "$.schedule");
    } else {
      throw ConfigError("$.schedule.kind", "expected \"generated\" or \"explicit\"");
    }
  }

  if (j.contains("engine")) {
    const json& e = j.at("engine");
    CheckKeys(e, "$.engine",
              {"stepsize", "eta", "E", "ticks", "windows", "seed", "surplus_init", "init",
               "orientation", "wall_clock_s"});
    if (e.contains("stepsize")) {
      const json& st = e.at("stepsize");
      CheckKeys(st, "$.engine.stepsize", {"kind", "a", "q0", "p"});
      if (st.contains("kind")) {
        const std::string kind = ReadString(st.at("kind"), "$.engine.stepsize.kind");
        if (kind == "square_summable") {
          c.stepsize.kind = StepsizePolicy::Kind::kSquareSummable;
        } else if (kind == "rate_probe") {
          c.stepsize.kind = StepsizePolicy::Kind::kRateProbe;
        } else {
          throw ConfigError("$.engine.stepsize.kind",
                            "expected \"square_summable\" or \"rate_probe\"");
        }
      }
      if (st.contains("a")) c.stepsize.a = ReadDouble(st.at("a"), "$.engine.stepsize.a");
      if (st.contains("q0")) c.stepsize.q0 = ReadDouble(st.at("q0"), "$.engine.stepsize.q0");
      if (st.contains("p")) c.stepsize.p = ReadDouble(st.at("p"), "$.engine.stepsize.p");
      try {
        c.stepsize.Validate();
      } catch (const DomainError& err) {
        throw ConfigError("$.engine.stepsize", err.what());
      }
    }
    if (e.contains("eta")) c.eta = ReadDouble(e.at("eta"), "$.engine.eta");
    if (c.eta < 0.0) throw ConfigError("$.engine.eta", "must be non-negative");
    if (e.contains("E")) c.E = ReadPair<double>(e.at("E"), "$.engine.E", ReadDouble);
    for (int l = 0; l < 2; ++l) {
      if (!(c.E[l] > 0.0)) throw ConfigError("$.engine.E", "must be positive");
    }
    if (e.contains("ticks") && e.contains("windows")) {
      throw ConfigError("$.engine", "give either ticks or windows, not both");
    }
    if (e.contains("ticks")) c.ticks = ReadInt(e.at("ticks"), "$.engine.ticks");
    if (e.contains("windows")) c.windows = ReadInt(e.at("windows"), "$.engine.windows");
    if ((c.ticks && *c.ticks < 0) || (c.windows && *c.windows < 0)) {
      throw ConfigError("$.engine", "run length must be non-negative");
    }
    if (e.contains("seed")) c.seed = ReadSeed(e.at("seed"), "$.engine.seed");
    if (e.contains("surplus_init")) {
      const std::string v = ReadString(e.at("surplus_init"), "$.engine.surplus_init");
      if (v == "zero") {
        c.surplus_init = SurplusInit::kZero;
      } else if (v == "initial_action") {
        c.surplus_init = SurplusInit::kInitialAction;
      } else {
        throw ConfigError("$.engine.surplus_init", "expected \"zero\" or \"initial_action\"");
      }
    }
    if (e.contains("init")) {
      const json& init = e.at("init");
      if (!init.is_array() || init.size() != 2) {
        throw ConfigError("$.engine.init", "expected one action per side");
      }
      for (Side s : kSides) {
        const int l = Index(s);
        const std::string ipath = "$.engine.init[" + std::to_string(l) + "]";
        if (!init[l].is_array()) throw ConfigError(ipath, "expected an array");
        for (std::size_t k = 0; k < init[l].size(); ++k) {
          c.init[l].push_back(ReadDouble(init[l][k], ipath + "[" + std::to_string(k) + "]"));
        }
        if (!c.init[l].empty() && static_cast<int>(c.init[l].size()) != spec.side(s).action_dim()) {
          throw ConfigError(ipath, "dimension does not match the action box");
        }
      }
    }
    if (e.contains("orientation")) {
      const std::string v = ReadString(e.at("orientation"), "$.engine.orientation");
      if (v == "column_stochastic") {
        c.orientation = SurplusOrientation::kColumnStochastic;
      } else if (v == "literal_row_stochastic") {
        c.orientation = SurplusOrientation::kLiteralRowStochastic;
      } else {
        throw ConfigError("$.engine.orientation",
                          "expected \"column_stochastic\" or \"literal_row_stochastic\"");
      }
    }
    if (e.contains("wall_clock_s")) {
      c.wall_clock_s = ReadDouble(e.at("wall_clock_s"), "$.engine.wall_clock_s");
      if (c.wall_clock_s < 0.0) throw ConfigError("$.engine.wall_clock_s", "must be >= 0");
    }
  }
  if (!c.ticks && !c.windows) c.ticks = 0;

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    CheckKeys(o, "$.oracle", {"enabled", "tol", "max_iters", "gap_grid_res"});
    if (o.contains("enabled")) c.oracle.enabled = ReadBool(o.at("enabled"), "$.oracle.enabled");
    if (o.contains("tol")) c.oracle.tol = ReadDouble(o.at("tol"), "$.oracle.tol");
    if (!(c.oracle.tol > 0.0)) throw ConfigError("$.oracle.tol", "must be positive");
    if (o.contains("max_iters")) {
      const auto v = ReadInt(o.at("max_iters"), "$.oracle.max_iters");
      if (v < 1 || v > 100000000) throw ConfigError("$.oracle.max_iters", "out of range");
      c.oracle.max_iters = static_cast<int>(v);
    }
    if (o.contains("gap_grid_res")) {
      const auto v = ReadInt(o.at("gap_grid_res"), "$.oracle.gap_grid_res");
      if (v < 2 || v > 100000) throw ConfigError("$.oracle.gap_grid_res", "out of range");
      c.oracle.gap_grid_res = static_cast<int>(v);
    }
  }

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    CheckKeys(o, "$.outputs", {"dir", "stride", "packet_trace"});
    if (o.contains("dir")) c.outputs.dir = ReadString(o.at("dir"), "$.outputs.dir");
    if (c.outputs.dir.empty()) throw ConfigError("$.outputs.dir", "must not be empty");
    if (o.contains("stride")) {
      const auto v = ReadInt(o.at("stride"), "$.outputs.stride");
      if (v < 1 || v > 1000000000) throw ConfigError("$.outputs.stride", "must be positive");
      c.outputs.stride = static_cast<int>(v);
    }
    if (o.contains("packet_trace")) {
      c.outputs.packet_trace = ReadBool(o.at("packet_trace"), "$.outputs.packet_trace");
    }
  }

  if (c.schedule.explicit_schedule) {
    for (Side s : kSides) {
      if (c.schedule.explicit_schedule->agents[Index(s)] != spec.side(s).agent_count()) {
        throw ConfigError("$.schedule.agents", "does not match the game's agent counts");
      }
    }
  }
  return c;
}

json ConfigToJson(const ExperimentConfig& c) {
  json j = json::object();
  if (c.game_spec) {
    const DeclarativeGame& g = *c.game_spec;
    json boxes = json::array();
    for (int l = 0; l < 2; ++l) {
      json box = json::array();
      for (const Interval& iv : g.boxes[l]) box.push_back(IntervalJson(iv));
      boxes.push_back(std::move(box));
    }
    j["game"] = {{"costs", g.costs},
                 {"density", g.density},
                 {"agents", {g.agents[0], g.agents[1]}},
                 {"boxes", std::move(boxes)},
                 {"types", {IntervalJson(g.types[0]), IntervalJson(g.types[1])}}};
  } else {
    j["game"] = c.game_name;
  }
  j["N"] = {c.N[0], c.N[1]};
  j["rho"] = {c.rho[0], c.rho[1]};
  j["quad_res"] = c.quad_res;
  if (c.schedule.explicit_schedule) {
    json s = ScheduleToJson(*c.schedule.explicit_schedule);
    s["kind"] = "explicit";
    j["schedule"] = std::move(s);
  } else {
    j["schedule"] = {{"kind", "generated"}, {"seed", c.schedule.seed}};
  }
  json engine = {{"stepsize",
                  {{"kind", StepsizeName(c.stepsize.kind)},
                   {"a", c.stepsize.a},
                   {"q0", c.stepsize.q0},
                   {"p", c.stepsize.p}}},
                 {"eta", c.eta},
                 {"E", {c.E[0], c.E[1]}},
                 {"seed", c.seed},
                 {"surplus_init", c.surplus_init == SurplusInit::kZero ? "zero" : "initial_action"},
                 {"orientation", c.orientation == SurplusOrientation::kColumnStochastic
                                     ? "column_stochastic"
                                     : "literal_row_stochastic"},
                 {"wall_clock_s", c.wall_clock_s}};
  if (c.windows) {
    engine["windows"] = *c.windows;
  } else {
    engine["ticks"] = c.ticks.value_or(0);
  }
  if (!c.init[0].empty() || !c.init[1].empty()) engine["init"] = {c.init[0], c.init[1]};
  j["engine"] = std::move(engine);
  j["oracle"] = {{"enabled", c.oracle.enabled},
                 {"tol", c.oracle.tol},
                 {"max_iters", c.oracle.max_iters},
                 {"gap_grid_res", c.oracle.gap_grid_res}};
  j["outputs"] = {{"dir", c.outputs.dir},
                  {"stride", c.outputs.stride},
                  {"packet_trace", c.outputs.packet_trace}};
  return j;
}

std::string ConfigDigest(const ExperimentConfig& config) {
  const std::string text = ConfigToJson(config).dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

GameSpec MakeGame(const ExperimentConfig& config) {
  return config.game_spec ? BuildGame(*config.game_spec) : BuiltinGame(config.game_name);
}

std::array<int, 2> SparsityBudget(const ExperimentConfig& config, const GameSpec& game) {
  std::array<int, 2> d{};
  for (Side s : kSides) {
    const int l = Index(s);
    const int dim = config.N[l] * game.side(s).action_dim();
    const long v = std::lround(config.rho[l] * dim);
    d[l] = static_cast<int>(std::clamp<long>(v, 1, dim));
  }
  return d;
}

NetworkSchedule MakeSchedule(const ExperimentConfig& config, const GameSpec& game) {
  if (config.schedule.explicit_schedule) return *config.schedule.explicit_schedule;
  return GeneratedSchedule(game.side(Side::kFirst).agent_count(),
                           game.side(Side::kSecond).agent_count(), config.schedule.seed);
}

EngineConfig MakeEngineConfig(const ExperimentConfig& config, const GameSpec& game,
                              const NetworkSchedule& sched) {
  EngineConfig e;
  e.N = config.N;
  e.d = SparsityBudget(config, game);
  e.E = config.E;
  e.eta = config.eta;
  e.stepsize = config.stepsize;
  e.init = config.init;
  e.surplus_init = config.surplus_init;
  e.orientation = config.orientation;
  e.stride = config.outputs.stride;
  e.wall_clock_s = config.wall_clock_s;
  if (config.windows) {
    const Windows w = EffectiveWindows(
        config.N, {game.side(Side::kFirst).action_dim(), game.side(Side::kSecond).action_dim()},
        e.d, sched.R0, sched.S0);
    e.ticks = *config.windows * w.R;
  } else {
    e.ticks = config.ticks.value_or(0);
  }
  return e;
}

}  // namespace zsbne
