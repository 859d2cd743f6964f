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

#ifndef SECAGG_SERVER_H_
#define SECAGG_SERVER_H_

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "secagg/config.h"
#include "secagg/errors.h"
#include "secagg/masking.h"
#include "secagg/messages.h"
#include "secagg/metrics.h"
#include "secagg/modfield.h"

namespace secagg {

// Produced only when every threshold check passed.
struct RoundResult {
  RealVector aggregate;  // weighted average over the survivors' vectors
  std::uint32_t survivor_count = 0;  // clients whose vectors were summed
};

// Per-round server state machine. A stage advances only when the transport
// has collected every live client's reply; replies within a stage may arrive
// in any order. Mutated by the round orchestrator only.
class SecAggServer {
 public:
  explicit SecAggServer(SecAggConfig config, TrafficMeter* meter = nullptr);

  // Stage 0: broadcast parameters. Fixes U0 = all sampled clients.
  std::vector<std::pair<std::uint32_t, SetupPayload>> setup();

  void receive_ask_keys(std::uint32_t id, const AskKeysReply& reply);

  // Stage 1 -> 2 barrier: fixes U1, aborts below the limit, and hands every
  // survivor the public keys of its surviving graph neighbors.
  std::vector<std::pair<std::uint32_t, NeighborKeysPayload>> broadcast_keys();

  void receive_share_keys(std::uint32_t id, const ShareKeysReply& reply);

  // Stage 2 -> 3 barrier: fixes U2 and relays ciphertexts verbatim. A
  // ciphertext addressed to a dropped client is discarded.
  std::vector<std::pair<std::uint32_t, RoutedSharesPayload>> route_shares();

  void receive_masked_vector(std::uint32_t id, const MaskedVectorReply& reply);

  // Stage 3 -> 4 barrier: fixes U3 and builds per-survivor share requests:
  // seed shares for surviving neighbors, mask-key shares for neighbors that
  // dropped after Share Keys. The two lists are disjoint by construction.
  std::vector<std::pair<std::uint32_t, UnmaskRequestPayload>> unmask_request();

  void receive_unmask_reply(std::uint32_t id, const UnmaskReply& reply);

  // Fixes U4, reconstructs the needed secrets, removes all masks and returns
  // the weighted average. Throws AbortError when any secret cannot be
  // reconstructed from >= threshold shares or the weight sum is zero.
  RoundResult finalize();

  // U0..U4 as fixed so far; later sets are empty until their barrier runs.
  const std::vector<std::uint32_t>& survivors(int stage) const;

  // True if stage-4 replies ever gave the server threshold-many shares of
  // both secrets of one client. Must stay false in every round.
  bool dual_secret_breach() const { return dual_secret_breach_; }

  const SecAggConfig& config() const { return config_; }
  const NeighborGraph& graph() const { return graph_; }

 private:
  enum class Phase {
    kSetup,
    kCollectKeys,
    kCollectShares,
    kCollectVectors,
    kCollectUnmask,
    kDone,
    kAborted,
  };

  void require_phase(Phase expected, const char* method) const;
  void check_limit(std::size_t alive, int stage);
  [[noreturn]] void abort_round(AbortReason reason, int stage,
                                const std::string& message);

  SecAggConfig config_;
  TrafficMeter* meter_;
  NeighborGraph graph_;
  Phase phase_ = Phase::kSetup;

  std::array<std::vector<std::uint32_t>, 5> survivors_;
  std::map<std::uint32_t, AskKeysReply> public_keys_;
  std::map<std::uint32_t, ShareKeysReply> share_uploads_;
  std::map<std::uint32_t, FieldVector> masked_vectors_;
  std::map<std::uint32_t, std::vector<SecretShare>> b_share_pool_;
  std::map<std::uint32_t, std::vector<SecretShare>> key_share_pool_;
  std::vector<std::uint32_t> unmask_responders_;
  bool dual_secret_breach_ = false;
};

}  // namespace secagg

#endif  // SECAGG_SERVER_H_
