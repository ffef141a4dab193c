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

#ifndef ZSBNE_REPORT_H_
#define ZSBNE_REPORT_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "zsbne/engine.h"

namespace zsbne {

inline constexpr const char* kMetricsHeader =
    "tick,side1_consensus,side2_consensus,side1_surplus,side2_surplus,"
    "oracle_dist,gap_proxy,bytes_cum";

struct AccountingReport {
  std::array<std::int64_t, 2> messages{};  // by sender side
  std::array<std::int64_t, 2> bytes{};
  std::int64_t total_messages = 0;
  std::int64_t total_bytes = 0;
  std::int64_t ticks = 0;
  // total_bytes / ticks; zero for a zero-tick run.
  double avg_bytes_per_tick = 0.0;
};

// Message and byte totals of a run. Throws AccountingError unless every
// side's bytes equal 12 * d_l * messages_l exactly.
AccountingReport AccountBytes(const RunResult& result);

nlohmann::json AccountingJson(const AccountingReport& report);

// Fixed header, %.17g values, "nan" for missing oracle columns.
void WriteMetricsCsv(std::ostream& os, const std::vector<MetricRow>& rows);

// Library version string.
const char* Version();

}  // namespace zsbne

#endif  // ZSBNE_REPORT_H_
