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

#ifndef ZSBNE_ERROR_H_
#define ZSBNE_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zsbne {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cost or gradient evaluator returned a non-finite value.
class NonFiniteCostError : public Error {
 public:
  NonFiniteCostError(const std::string& what, int side, int agent)
      : Error(what), side_(side), agent_(agent) {}
  int side() const { return side_; }
  int agent() const { return agent_; }

 private:
  int side_;
  int agent_;
};

// A modelling assumption does not hold (empty box, non-positive marginal
// density, a game that is not constant-sum, ...).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (type outside its interval,
// index out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double final_gap)
      : Error(what), final_gap_(final_gap) {}
  double final_gap() const { return final_gap_; }

 private:
  double final_gap_;
};

// Packets and schedule edges disagree.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t tick) : Error(what), tick_(tick) {}
  std::int64_t tick() const { return tick_; }

 private:
  std::int64_t tick_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Configuration schema violation; path() names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class AccountingError : public Error {
 public:
  using Error::Error;
};

}  // namespace zsbne

#endif  // ZSBNE_ERROR_H_
