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

// Byte and operation counters. Wall-clock fields are reported but never
// asserted on; the deterministic counters are what realize the complexity
// claims in a hardware-independent way.

#ifndef SECAGG_METRICS_H_
#define SECAGG_METRICS_H_

#include <array>
#include <cstdint>
#include <map>
#include <utility>

namespace secagg {

struct TrafficMeter {
  static constexpr int kStageSlots = 6;  // stages 0..4 plus abort traffic

  struct Flow {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
  };

  // Framed message bytes, per client and for the server, per stage.
  std::map<std::uint32_t, std::array<Flow, kStageSlots>> client_bytes;
  std::array<Flow, kStageSlots> server_bytes{};

  // Field elements produced by mask expansion.
  std::map<std::uint32_t, std::uint64_t> client_prg_elements;
  std::uint64_t server_prg_elements = 0;

  // Secret reconstructions performed by the server in stage 4.
  std::uint64_t self_seed_reconstructions = 0;
  std::uint64_t mask_key_reconstructions = 0;

  // Elementwise modular add/sub operations at aggregation sites.
  std::uint64_t field_ops = 0;

  // Per origin client: how many (b-share, key-share) pieces reached the
  // server. Security hygiene asserts that never both reach the threshold.
  std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>>
      shares_received;

  // Wall clock, seconds. Excluded from determinism comparisons.
  double server_seconds = 0;
  std::map<std::uint32_t, double> client_seconds;
  std::array<double, kStageSlots> stage_seconds{};  // whole-stage wall time

  void record_client(std::uint32_t id, int stage, std::uint64_t sent,
                     std::uint64_t received) {
    auto& flow = client_bytes[id][stage];
    flow.sent += sent;
    flow.received += received;
  }

  void record_server(int stage, std::uint64_t sent, std::uint64_t received) {
    server_bytes[stage].sent += sent;
    server_bytes[stage].received += received;
  }

  std::uint64_t client_total_bytes(std::uint32_t id) const {
    auto it = client_bytes.find(id);
    if (it == client_bytes.end()) return 0;
    std::uint64_t total = 0;
    for (const auto& flow : it->second) total += flow.sent + flow.received;
    return total;
  }

  std::uint64_t server_total_bytes() const {
    std::uint64_t total = 0;
    for (const auto& flow : server_bytes) total += flow.sent + flow.received;
    return total;
  }

  std::uint64_t reconstructions() const {
    return self_seed_reconstructions + mask_key_reconstructions;
  }
};

struct ByteCounts {
  std::map<std::uint32_t, std::uint64_t> per_client;
  std::uint64_t server = 0;
};

struct OpCounts {
  std::map<std::uint32_t, std::uint64_t> client_prg_elements;
  std::uint64_t server_prg_elements = 0;
  std::uint64_t self_seed_reconstructions = 0;
  std::uint64_t mask_key_reconstructions = 0;
  std::uint64_t field_ops = 0;
};

ByteCounts byte_counts(const TrafficMeter& meter);
OpCounts op_counts(const TrafficMeter& meter);

}  // namespace secagg

#endif  // SECAGG_METRICS_H_
