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

#include "secagg/server.h"

#include <sodium.h>

#include <algorithm>
#include <string>

#include "secagg/errors.h"

namespace secagg {
namespace {

bool contains(const std::vector<std::uint32_t>& sorted, std::uint32_t id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

template <typename Map>
std::vector<std::uint32_t> sorted_keys(const Map& map) {
  std::vector<std::uint32_t> keys;
  keys.reserve(map.size());
  for (const auto& [id, value] : map) keys.push_back(id);
  return keys;  // std::map iterates in key order
}

}  // namespace

SecAggServer::SecAggServer(SecAggConfig config, TrafficMeter* meter)
    : config_(std::move(config)), meter_(meter),
      graph_(build_neighbor_graph(config_.n, config_.share_num)) {}

void SecAggServer::require_phase(Phase expected, const char* method) const {
  if (phase_ != expected) {
    throw StateError(std::string(method) +
                     " invoked out of order (server phase mismatch)");
  }
}

void SecAggServer::abort_round(AbortReason reason, int stage,
                               const std::string& message) {
  phase_ = Phase::kAborted;
  throw AbortError(reason, stage, message);
}

void SecAggServer::check_limit(std::size_t alive, int stage) {
  if (alive < config_.min_clients) {
    abort_round(AbortReason::kTooFewClients, stage,
                "only " + std::to_string(alive) + " clients alive after stage " +
                    std::to_string(stage) + ", limit is " +
                    std::to_string(config_.min_clients));
  }
}

std::vector<std::pair<std::uint32_t, SetupPayload>> SecAggServer::setup() {
  require_phase(Phase::kSetup, "setup");
  SetupPayload base;
  base.n = config_.n;
  base.l = config_.l;
  base.share_num = config_.share_num;
  base.threshold = config_.threshold;
  base.min_clients = config_.min_clients;
  base.clipping_range = config_.clipping_range;
  base.target_range = config_.target_range;
  base.max_weights_factor = config_.max_weights_factor;
  base.mod_range = config_.mod_range;

  std::vector<std::pair<std::uint32_t, SetupPayload>> out;
  out.reserve(config_.n);
  survivors_[0].reserve(config_.n);
  for (std::uint32_t id = 0; id < config_.n; ++id) {
    survivors_[0].push_back(id);
    SetupPayload p = base;
    p.client_id = id;
    out.emplace_back(id, p);
  }
  phase_ = Phase::kCollectKeys;
  return out;
}

void SecAggServer::receive_ask_keys(std::uint32_t id,
                                    const AskKeysReply& reply) {
  require_phase(Phase::kCollectKeys, "receive_ask_keys");
  if (id >= config_.n) {
    throw ProtocolError("ASK_KEYS from unknown sender " + std::to_string(id));
  }
  if (!public_keys_.emplace(id, reply).second) {
    throw ProtocolError("duplicate ASK_KEYS reply from " + std::to_string(id));
  }
}

std::vector<std::pair<std::uint32_t, NeighborKeysPayload>>
SecAggServer::broadcast_keys() {
  require_phase(Phase::kCollectKeys, "broadcast_keys");
  survivors_[1] = sorted_keys(public_keys_);
  check_limit(survivors_[1].size(), 1);

  std::vector<std::pair<std::uint32_t, NeighborKeysPayload>> out;
  out.reserve(survivors_[1].size());
  for (std::uint32_t id : survivors_[1]) {
    NeighborKeysPayload payload;
    for (std::uint32_t j : graph_.neighbors_of(id)) {
      if (j == id || !contains(survivors_[1], j)) continue;
      const auto& keys = public_keys_.at(j);
      payload.neighbors.push_back(
          {j, keys.mask_public, keys.encryption_public});
    }
    out.emplace_back(id, std::move(payload));
  }
  phase_ = Phase::kCollectShares;
  return out;
}

void SecAggServer::receive_share_keys(std::uint32_t id,
                                      const ShareKeysReply& reply) {
  require_phase(Phase::kCollectShares, "receive_share_keys");
  if (!contains(survivors_[1], id)) {
    throw ProtocolError("SHARE_KEYS from a client outside U1");
  }
  for (const auto& entry : reply.shares) {
    if (entry.id == id || !graph_.are_neighbors(id, entry.id)) {
      throw ProtocolError("share ciphertext addressed to a non-neighbor");
    }
  }
  if (!share_uploads_.emplace(id, reply).second) {
    throw ProtocolError("duplicate SHARE_KEYS reply from " +
                        std::to_string(id));
  }
}

std::vector<std::pair<std::uint32_t, RoutedSharesPayload>>
SecAggServer::route_shares() {
  require_phase(Phase::kCollectShares, "route_shares");
  survivors_[2] = sorted_keys(share_uploads_);
  check_limit(survivors_[2].size(), 2);

  // The server is a relay: ciphertext bytes are moved, never inspected.
  std::map<std::uint32_t, RoutedSharesPayload> bundles;
  for (std::uint32_t id : survivors_[2]) bundles[id];
  for (const auto& [origin, upload] : share_uploads_) {
    for (const auto& entry : upload.shares) {
      auto it = bundles.find(entry.id);
      if (it == bundles.end()) continue;  // addressee dropped, discard
      it->second.shares.push_back({origin, entry.ciphertext});
    }
  }

  std::vector<std::pair<std::uint32_t, RoutedSharesPayload>> out;
  out.reserve(bundles.size());
  for (auto& [id, payload] : bundles) {
    out.emplace_back(id, std::move(payload));
  }
  phase_ = Phase::kCollectVectors;
  return out;
}

void SecAggServer::receive_masked_vector(std::uint32_t id,
                                         const MaskedVectorReply& reply) {
  require_phase(Phase::kCollectVectors, "receive_masked_vector");
  if (!contains(survivors_[2], id)) {
    throw ProtocolError("ASK_VECTORS reply from a client outside U2");
  }
  if (reply.values.size() != config_.l + 1) {
    throw ProtocolError("masked vector has wrong length");
  }
  if (masked_vectors_.contains(id)) {
    throw ProtocolError("duplicate masked vector from " + std::to_string(id));
  }
  // Validates all elements against the modulus.
  masked_vectors_.emplace(id, FieldVector(reply.values, config_.mod_range));
}

std::vector<std::pair<std::uint32_t, UnmaskRequestPayload>>
SecAggServer::unmask_request() {
  require_phase(Phase::kCollectVectors, "unmask_request");
  survivors_[3] = sorted_keys(masked_vectors_);
  check_limit(survivors_[3].size(), 3);

  std::vector<std::pair<std::uint32_t, UnmaskRequestPayload>> out;
  out.reserve(survivors_[3].size());
  for (std::uint32_t id : survivors_[3]) {
    UnmaskRequestPayload req;
    for (std::uint32_t j : graph_.neighbors_of(id)) {
      if (contains(survivors_[3], j)) {
        req.b_ids.push_back(j);  // survivor: ask for its seed share
      } else if (contains(survivors_[2], j)) {
        req.key_ids.push_back(j);  // dropped after Share Keys: mask key share
      }
    }
    out.emplace_back(id, std::move(req));
  }
  phase_ = Phase::kCollectUnmask;
  return out;
}

void SecAggServer::receive_unmask_reply(std::uint32_t id,
                                        const UnmaskReply& reply) {
  require_phase(Phase::kCollectUnmask, "receive_unmask_reply");
  if (!contains(survivors_[3], id)) {
    throw ProtocolError("UNMASK reply from a client outside U3");
  }
  if (std::find(unmask_responders_.begin(), unmask_responders_.end(), id) !=
      unmask_responders_.end()) {
    throw ProtocolError("duplicate UNMASK reply from " + std::to_string(id));
  }
  unmask_responders_.push_back(id);

  for (const auto& entry : reply.b_shares) {
    if (!contains(survivors_[3], entry.origin) ||
        !graph_.are_neighbors(id, entry.origin)) {
      throw ProtocolError("seed share for an unexpected origin");
    }
    b_share_pool_[entry.origin].push_back(entry.share);
    if (meter_ != nullptr) meter_->shares_received[entry.origin].first++;
  }
  for (const auto& entry : reply.key_shares) {
    if (contains(survivors_[3], entry.origin) ||
        !contains(survivors_[2], entry.origin) ||
        !graph_.are_neighbors(id, entry.origin)) {
      throw ProtocolError("mask key share for an unexpected origin");
    }
    key_share_pool_[entry.origin].push_back(entry.share);
    if (meter_ != nullptr) meter_->shares_received[entry.origin].second++;
  }
}

RoundResult SecAggServer::finalize() {
  require_phase(Phase::kCollectUnmask, "finalize");
  survivors_[4] = unmask_responders_;
  std::sort(survivors_[4].begin(), survivors_[4].end());
  check_limit(survivors_[4].size(), 4);

  const auto t = static_cast<std::size_t>(config_.threshold);
  for (std::uint32_t j : survivors_[2]) {
    const auto b = b_share_pool_.count(j) ? b_share_pool_.at(j).size() : 0;
    const auto k = key_share_pool_.count(j) ? key_share_pool_.at(j).size() : 0;
    if (b >= t && k >= t) dual_secret_breach_ = true;
  }

  const std::uint64_t m = config_.mod_range;
  const std::size_t len = config_.l + 1;

  // Reconstruct self-mask seeds of every client whose vector is in the sum.
  std::map<std::uint32_t, Seed> self_seeds;
  for (std::uint32_t j : survivors_[3]) {
    const auto it = b_share_pool_.find(j);
    if (it == b_share_pool_.end() || it->second.size() < t) {
      abort_round(AbortReason::kShareReconstructionFailed, 4,
                  "fewer than threshold seed shares for client " +
                      std::to_string(j));
    }
    std::vector<std::uint8_t> secret;
    try {
      secret = shamir_reconstruct(it->second,
                                  static_cast<int>(config_.threshold));
    } catch (const std::invalid_argument& e) {
      abort_round(AbortReason::kShareReconstructionFailed, 4, e.what());
    }
    if (meter_ != nullptr) meter_->self_seed_reconstructions++;
    if (secret.size() != kSeedBytes) {
      abort_round(AbortReason::kShareReconstructionFailed, 4,
                  "reconstructed seed has wrong length");
    }
    Seed seed{};
    std::copy(secret.begin(), secret.end(), seed.begin());
    self_seeds.emplace(j, seed);
  }

  // Reconstruct mask secret keys of clients dropped after Share Keys and
  // check them against the public keys collected in stage 1.
  std::map<std::uint32_t, SecretKey> dropped_secrets;
  for (std::uint32_t j : survivors_[2]) {
    if (contains(survivors_[3], j)) continue;
    const auto it = key_share_pool_.find(j);
    if (it == key_share_pool_.end() || it->second.size() < t) {
      abort_round(AbortReason::kShareReconstructionFailed, 4,
                  "fewer than threshold mask key shares for client " +
                      std::to_string(j));
    }
    std::vector<std::uint8_t> secret;
    try {
      secret = shamir_reconstruct(it->second,
                                  static_cast<int>(config_.threshold));
    } catch (const std::invalid_argument& e) {
      abort_round(AbortReason::kShareReconstructionFailed, 4, e.what());
    }
    if (meter_ != nullptr) meter_->mask_key_reconstructions++;
    if (secret.size() != kKeyBytes) {
      abort_round(AbortReason::kKeyReconstructionMismatch, 4,
                  "reconstructed mask key has wrong length");
    }
    SecretKey sk{};
    std::copy(secret.begin(), secret.end(), sk.begin());
    PublicKey derived{};
    crypto_scalarmult_base(derived.data(), sk.data());
    if (derived != public_keys_.at(j).mask_public) {
      abort_round(AbortReason::kKeyReconstructionMismatch, 4,
                  "reconstructed mask key does not match the public key of "
                  "client " + std::to_string(j));
    }
    dropped_secrets.emplace(j, sk);
  }

  FieldVector acc = FieldVector::zeros(len, m);
  for (std::uint32_t i : survivors_[3]) {
    add_in_place(acc, masked_vectors_.at(i));
    if (meter_ != nullptr) meter_->field_ops += len;
  }
  for (const auto& [j, seed] : self_seeds) {
    sub_in_place(acc, prg_expand(seed, len, m));
    if (meter_ != nullptr) {
      meter_->server_prg_elements += len;
      meter_->field_ops += len;
    }
  }
  for (const auto& [j, sk] : dropped_secrets) {
    std::map<std::uint32_t, PublicKey> survivor_publics;
    for (std::uint32_t v : graph_.neighbors_of(j)) {
      if (v != j && contains(survivors_[3], v)) {
        survivor_publics.emplace(v, public_keys_.at(v).mask_public);
      }
    }
    sub_in_place(acc, dropout_pairwise_mask_total(j, sk, survivor_publics,
                                                  len, m));
    if (meter_ != nullptr) {
      meter_->server_prg_elements += survivor_publics.size() * len;
      meter_->field_ops += len;
    }
  }

  if (acc[0] == 0) {
    abort_round(AbortReason::kZeroWeightSum, 4,
                "aggregate weight sum is zero");
  }
  const RealVector quotients = pop_weight_and_divide(acc);
  RoundResult result;
  result.aggregate =
      dequantize(quotients, config_.clipping_range, config_.target_range);
  result.survivor_count = static_cast<std::uint32_t>(survivors_[3].size());
  phase_ = Phase::kDone;
  return result;
}

const std::vector<std::uint32_t>& SecAggServer::survivors(int stage) const {
  if (stage < 0 || stage > 4) {
    throw std::invalid_argument("survivor sets are indexed 0..4");
  }
  return survivors_[stage];
}

}  // namespace secagg
