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

#include "zsbne/report.h"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "zsbne/comm.h"
#include "zsbne/error.h"

#ifndef ZSBNE_VERSION_STRING
#define ZSBNE_VERSION_STRING "unknown"
#endif

namespace zsbne {

namespace {

void PutDouble(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

AccountingReport AccountBytes(const RunResult& result) {
  AccountingReport report;
  report.messages = result.messages;
  report.bytes = result.bytes;
  report.ticks = result.ticks;
  for (int l = 0; l < 2; ++l) {
    const std::int64_t expected =
        static_cast<std::int64_t>(kBytesPerEntry) * result.d[l] * result.messages[l];
    if (result.bytes[l] != expected) {
      throw AccountingError("side " + std::to_string(l + 1) + " sent " +
                            std::to_string(result.bytes[l]) + " bytes, expected 12 * " +
                            std::to_string(result.d[l]) + " * " +
                            std::to_string(result.messages[l]));
    }
    report.total_messages += result.messages[l];
    report.total_bytes += result.bytes[l];
  }
  if (report.ticks > 0) {
    report.avg_bytes_per_tick =
        static_cast<double>(report.total_bytes) / static_cast<double>(report.ticks);
  }
  return report;
}

nlohmann::json AccountingJson(const AccountingReport& r) {
  return {{"messages", {r.messages[0], r.messages[1]}},
          {"bytes", {r.bytes[0], r.bytes[1]}},
          {"total_messages", r.total_messages},
          {"total_bytes", r.total_bytes},
          {"ticks", r.ticks},
          {"avg_bytes_per_tick", r.avg_bytes_per_tick}};
}

void WriteMetricsCsv(std::ostream& os, const std::vector<MetricRow>& rows) {
  os << kMetricsHeader << '\n';
  for (const MetricRow& row : rows) {
    os << row.tick;
    for (double v : {row.consensus[0], row.consensus[1], row.surplus[0], row.surplus[1],
                     row.oracle_dist, row.gap_proxy}) {
      os << ',';
      PutDouble(os, v);
    }
    os << ',' << row.bytes_cum << '\n';
  }
}

const char* Version() { return ZSBNE_VERSION_STRING; }

}  // namespace zsbne
