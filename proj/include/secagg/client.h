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

#ifndef SECAGG_CLIENT_H_
#define SECAGG_CLIENT_H_

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "secagg/crypto.h"
#include "secagg/masking.h"
#include "secagg/messages.h"
#include "secagg/metrics.h"
#include "secagg/modfield.h"

namespace secagg {

// Per-round client state machine. One handler per server message; handlers
// must be invoked in stage order exactly once each. The instance is confined
// to one logical task.
class SecAggClient {
 public:
  enum class Stage {
    kAwaitSetup,
    kAwaitNeighborKeys,
    kAwaitRoutedShares,
    kAwaitUnmaskRequest,
    kDone,
    kAborted,
  };

  SecAggClient(RealVector input, std::uint64_t weight,
               std::unique_ptr<RandomSource> rng,
               TrafficMeter* meter = nullptr);

  // Stage 0 -> 1: store parameters, generate both key pairs, reply with the
  // public halves.
  AskKeysReply handle_setup(const SetupPayload& setup);

  // Stage 2: draw the self-mask seed, split (mask secret key, seed) into
  // share_num shares each, and encrypt one pair per listed neighbor under
  // the mutual encryption key. The client's own pair stays local.
  ShareKeysReply handle_neighbor_keys(const NeighborKeysPayload& keys);

  // Stage 3: decrypt and store the routed share pairs, then quantize,
  // weight-extend and mask the local vector. The pairwise mask set is
  // exactly the origins of the routed ciphertexts.
  MaskedVectorReply handle_routed_shares(const RoutedSharesPayload& routed);

  // Stage 4: return the held share per requested origin. Refuses any request
  // naming one origin in both lists; a client must never reveal both the
  // seed share and the key share of the same peer.
  UnmaskReply handle_unmask_request(const UnmaskRequestPayload& request);

  // Terminal: wipe all secret material.
  void handle_abort(const AbortPayload& abort);

  Stage stage() const { return stage_; }
  std::uint32_t id() const { return id_; }

  // White-box hooks for mask-ledger verification in tests.
  const Seed& self_mask_seed() const { return self_seed_; }
  const std::map<std::uint32_t, Seed>& active_pairwise_seeds() const {
    return active_pairwise_seeds_;
  }
  const PublicKey& mask_public_key() const { return mask_keys_.public_key; }

 private:
  void require_stage(Stage expected, const char* handler) const;
  void wipe_secrets();

  Stage stage_ = Stage::kAwaitSetup;
  RealVector input_;
  std::uint64_t weight_;
  std::unique_ptr<RandomSource> rng_;
  TrafficMeter* meter_;

  std::uint32_t id_ = 0;
  SetupPayload params_;
  NeighborGraph graph_;

  KeyPair mask_keys_{};
  KeyPair encryption_keys_{};
  Seed self_seed_{};
  bool self_seed_drawn_ = false;

  std::map<std::uint32_t, NeighborKeyEntry> neighbor_keys_;
  // Own shares of (mask secret key, self-mask seed), contributed in stage 4.
  SecretShare own_key_share_;
  SecretShare own_b_share_;
  // origin -> (mask-key share, seed share) received via the server.
  std::map<std::uint32_t, std::pair<SecretShare, SecretShare>>
      received_shares_;
  std::map<std::uint32_t, Seed> active_pairwise_seeds_;
};

}  // namespace secagg

#endif  // SECAGG_CLIENT_H_
