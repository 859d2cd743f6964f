/*
 * Copyright 2026 The secagg-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "secagg/report.h"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <sstream>

#include "secagg/bytes.h"
#include "secagg/crypto.h"

namespace secagg {
namespace {

std::uint64_t max_client_value(
    const std::map<std::uint32_t, std::uint64_t>& per_client) {
  std::uint64_t best = 0;
  for (const auto& [id, v] : per_client) best = std::max(best, v);
  return best;
}

}  // namespace

std::string csv_header() {
  return "axis,axis_value,dropout_frac,seed,status,abort_reason,survivors,"
         "aggregate_checksum,client_bytes,server_bytes,prg_elements_client,"
         "prg_elements_server,reconstructions,server_time_s,client_time_s";
}

std::string aggregate_checksum(const RealVector& aggregate) {
  HashAccumulator hash;
  ByteWriter w;
  for (double v : aggregate) w.u64le(std::bit_cast<std::uint64_t>(v));
  const auto bytes = w.take();
  hash.update(bytes);
  const auto digest = hash.finish();
  std::ostringstream oss;
  for (int i = 0; i < 8; ++i) {
    oss << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return oss.str();
}

std::string csv_row(std::string_view axis, std::uint64_t axis_value,
                    double dropout_frac, std::uint64_t seed,
                    const RoundOutcome& outcome) {
  const ByteCounts bytes = byte_counts(outcome.meter);
  const OpCounts ops = op_counts(outcome.meter);

  double max_client_seconds = 0;
  for (const auto& [id, s] : outcome.meter.client_seconds) {
    max_client_seconds = std::max(max_client_seconds, s);
  }

  std::ostringstream oss;
  oss << axis << ',' << axis_value << ',' << dropout_frac << ',' << seed
      << ',';
  if (outcome.result.has_value()) {
    oss << "ok,," << outcome.result->survivor_count << ','
        << aggregate_checksum(outcome.result->aggregate);
  } else if (outcome.abort.has_value()) {
    oss << "abort," << to_string(outcome.abort->reason) << ",0,";
  } else {
    oss << "error,,0,";
  }
  oss << ',' << max_client_value(bytes.per_client) << ',' << bytes.server
      << ',' << max_client_value(ops.client_prg_elements) << ','
      << ops.server_prg_elements << ',' << outcome.meter.reconstructions()
      << ',' << std::setprecision(6) << outcome.meter.server_seconds << ','
      << max_client_seconds;
  return oss.str();
}

std::string csv_error_row(std::string_view axis, std::uint64_t axis_value,
                          double dropout_frac, std::uint64_t seed,
                          std::string_view reason) {
  std::ostringstream oss;
  oss << axis << ',' << axis_value << ',' << dropout_frac << ',' << seed
      << ",error," << reason << ",0,,0,0,0,0,0,0,0";
  return oss.str();
}

std::string strip_time_columns(std::string_view row) {
  // Two trailing columns are wall clock.
  auto cut = row.rfind(',');
  if (cut == std::string_view::npos) return std::string(row);
  cut = row.substr(0, cut).rfind(',');
  if (cut == std::string_view::npos) return std::string(row);
  return std::string(row.substr(0, cut));
}

std::string text_report(const RoundOutcome& outcome) {
  std::ostringstream oss;
  const auto& cfg = outcome.config;
  oss << "round: n=" << cfg.n << " l=" << cfg.l << " k=" << cfg.share_num
      << " t=" << cfg.threshold << " min_clients=" << cfg.min_clients
      << " mod_range=" << cfg.mod_range << '\n';
  for (const auto& w : cfg.warnings) oss << "warning: " << w << '\n';

  if (outcome.result.has_value()) {
    oss << "status: ok, survivors=" << outcome.result->survivor_count
        << ", aggregate_checksum="
        << aggregate_checksum(outcome.result->aggregate) << '\n';
  } else if (outcome.abort.has_value()) {
    oss << "status: abort at stage " << outcome.abort->stage << " ("
        << to_string(outcome.abort->reason) << "): "
        << outcome.abort->message << '\n';
  }

  oss << "survivor sets:";
  for (int s = 0; s <= 4; ++s) {
    oss << " |U" << s << "|=" << outcome.survivors[s].size();
  }
  oss << '\n';

  static const char* kStageNames[] = {"setup",   "ask_keys", "share_keys",
                                      "vectors", "unmask",   "abort"};
  oss << "per stage (server sent/received bytes, seconds):\n";
  for (int s = 0; s < TrafficMeter::kStageSlots; ++s) {
    const auto& flow = outcome.meter.server_bytes[s];
    if (flow.sent == 0 && flow.received == 0) continue;
    oss << "  " << kStageNames[s] << ": " << flow.sent << '/' << flow.received
        << ", " << std::setprecision(4) << outcome.meter.stage_seconds[s]
        << " s\n";
  }

  const ByteCounts bytes = byte_counts(outcome.meter);
  std::uint64_t max_client = 0;
  for (const auto& [id, total] : bytes.per_client) {
    max_client = std::max(max_client, total);
  }
  const OpCounts ops = op_counts(outcome.meter);
  oss << "per-client bytes (max): " << max_client << '\n'
      << "server bytes total: " << bytes.server << '\n'
      << "prg elements: server=" << ops.server_prg_elements
      << " client(max)=" << max_client_value(ops.client_prg_elements) << '\n'
      << "reconstructions: seed=" << ops.self_seed_reconstructions
      << " mask_key=" << ops.mask_key_reconstructions << '\n'
      << "field ops: " << ops.field_ops << '\n';
  double max_client_seconds = 0;
  for (const auto& [id, s] : outcome.meter.client_seconds) {
    max_client_seconds = std::max(max_client_seconds, s);
  }
  oss << "server time: " << outcome.meter.server_seconds
      << " s, client time (max): " << max_client_seconds << " s\n";
  return oss.str();
}

}  // namespace secagg
