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

#include "secagg/metrics.h"

namespace secagg {

ByteCounts byte_counts(const TrafficMeter& meter) {
  ByteCounts out;
  for (const auto& [id, flows] : meter.client_bytes) {
    std::uint64_t total = 0;
    for (const auto& flow : flows) total += flow.sent + flow.received;
    out.per_client[id] = total;
  }
  out.server = meter.server_total_bytes();
  return out;
}

OpCounts op_counts(const TrafficMeter& meter) {
  OpCounts out;
  out.client_prg_elements = meter.client_prg_elements;
  out.server_prg_elements = meter.server_prg_elements;
  out.self_seed_reconstructions = meter.self_seed_reconstructions;
  out.mask_key_reconstructions = meter.mask_key_reconstructions;
  out.field_ops = meter.field_ops;
  return out;
}

}  // namespace secagg
