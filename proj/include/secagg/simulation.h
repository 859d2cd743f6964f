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

// In-process message router with dropout injection, byte accounting and
// operation counters. Dropouts are modeled as silent disappearance detected
// at the stage barrier; communication latency is ignored. Every frame
// crosses the real wire codec, so a round exercises the bit-exact format
// end to end.

#ifndef SECAGG_SIMULATION_H_
#define SECAGG_SIMULATION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secagg/config.h"
#include "secagg/crypto.h"
#include "secagg/errors.h"
#include "secagg/messages.h"
#include "secagg/metrics.h"
#include "secagg/server.h"

namespace secagg {

// A client that stops responding after the given protocol stage (0..3).
// It never sends a message in any later stage.
struct DropoutEvent {
  std::uint32_t client_id = 0;
  int after_stage = 0;
};

struct DropoutSchedule {
  std::vector<DropoutEvent> events;

  // Throws std::invalid_argument on duplicate ids, out-of-range ids or
  // stages outside 0..3.
  void validate(std::uint32_t n) const;
};

struct ClientInput {
  RealVector values;
  std::uint64_t weight = 1;
};

struct AbortInfo {
  AbortReason reason{};
  int stage = 0;
  std::string message;
};

struct TranscriptEntry {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  StageTag tag{};
  std::vector<std::uint8_t> frame;
};

struct RoundSpec {
  SecAggParams params;
  std::vector<ClientInput> inputs;  // one per sampled client
  DropoutSchedule schedule;
  std::uint64_t master_seed = 0;
  // Perturbs only the order in which replies reach the server; client
  // randomness is untouched. Round outcomes must not depend on it.
  std::uint64_t arrival_salt = 0;
  bool keep_transcript = false;  // store every frame, not just the hash
};

struct RoundOutcome {
  SecAggConfig config;
  std::optional<RoundResult> result;
  std::optional<AbortInfo> abort;
  TrafficMeter meter;
  std::array<std::vector<std::uint32_t>, 5> survivors;  // U0..U4
  std::array<std::uint8_t, 32> transcript_hash{};
  bool dual_secret_breach = false;
  std::vector<TranscriptEntry> transcript;  // empty unless requested
};

// Executes stages 0-4 with barriers. Deterministic: identical
// (params, inputs, schedule, master_seed) produce a bit-identical transcript
// and metrics. Replies within a stage are fed to the server in an order
// shuffled from the master seed; outcomes are order-insensitive.
RoundOutcome run_round(const RoundSpec& spec);

// Uniform random inputs: values in [-amplitude, amplitude], integer weights
// in [1, max_weight].
std::vector<ClientInput> random_inputs(std::uint32_t n, std::uint64_t l,
                                       double amplitude,
                                       std::uint64_t max_weight,
                                       RandomSource& rng);

// floor(frac * n) distinct clients dropping after `stage`.
DropoutSchedule random_dropouts(std::uint32_t n, double frac, int stage,
                                RandomSource& rng);

}  // namespace secagg

#endif  // SECAGG_SIMULATION_H_
