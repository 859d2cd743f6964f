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

#include "secagg/client.h"

#include <sodium.h>

#include <algorithm>
#include <string>

#include "secagg/bytes.h"
#include "secagg/errors.h"

namespace secagg {
namespace {

// Plaintext carried inside each stage-2 ciphertext. Binding the pair of ids
// into the encrypted body lets the receiver detect misrouted shares.
std::vector<std::uint8_t> encode_share_pair(std::uint32_t origin,
                                            std::uint32_t dest,
                                            const SecretShare& key_share,
                                            const SecretShare& b_share) {
  ByteWriter w;
  w.u32be(origin);
  w.u32be(dest);
  ByteWriter key_inner;
  key_inner.u8(key_share.index);
  key_inner.raw(key_share.payload);
  w.var_bytes(key_inner.take());
  ByteWriter b_inner;
  b_inner.u8(b_share.index);
  b_inner.raw(b_share.payload);
  w.var_bytes(b_inner.take());
  return w.take();
}

struct SharePair {
  std::uint32_t origin;
  std::uint32_t dest;
  SecretShare key_share;
  SecretShare b_share;
};

SharePair decode_share_pair(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  SharePair pair;
  pair.origin = r.u32be();
  pair.dest = r.u32be();
  auto read = [&r] {
    const auto raw = r.var_bytes();
    if (raw.empty()) throw ProtocolError("empty share in share pair");
    SecretShare share;
    share.index = raw[0];
    share.payload.assign(raw.begin() + 1, raw.end());
    return share;
  };
  pair.key_share = read();
  pair.b_share = read();
  r.expect_end();
  return pair;
}

void wipe(std::vector<std::uint8_t>& v) {
  if (!v.empty()) sodium_memzero(v.data(), v.size());
  v.clear();
}

}  // namespace

SecAggClient::SecAggClient(RealVector input, std::uint64_t weight,
                           std::unique_ptr<RandomSource> rng,
                           TrafficMeter* meter)
    : input_(std::move(input)), weight_(weight), rng_(std::move(rng)),
      meter_(meter) {
  if (weight_ < 1) {
    throw std::invalid_argument("client weight must be >= 1");
  }
  if (!rng_) {
    throw std::invalid_argument("client needs a randomness source");
  }
}

void SecAggClient::require_stage(Stage expected, const char* handler) const {
  if (stage_ != expected) {
    throw StateError(std::string(handler) +
                     " invoked out of order (stage cursor mismatch)");
  }
}

AskKeysReply SecAggClient::handle_setup(const SetupPayload& setup) {
  require_stage(Stage::kAwaitSetup, "handle_setup");
  if (setup.n < 1 || setup.client_id >= setup.n) {
    throw ProtocolError("setup names an invalid client id");
  }
  if (setup.l != input_.size()) {
    throw ProtocolError("setup vector length disagrees with local vector");
  }
  if (setup.share_num < 1 || setup.share_num > setup.n ||
      setup.threshold < 1 || setup.threshold > setup.share_num) {
    throw ProtocolError("setup carries inconsistent sharing parameters");
  }
  params_ = setup;
  id_ = setup.client_id;
  graph_ = build_neighbor_graph(setup.n, setup.share_num);

  mask_keys_ = generate_keypair(*rng_);
  encryption_keys_ = generate_keypair(*rng_);

  stage_ = Stage::kAwaitNeighborKeys;
  return AskKeysReply{mask_keys_.public_key, encryption_keys_.public_key};
}

ShareKeysReply SecAggClient::handle_neighbor_keys(
    const NeighborKeysPayload& keys) {
  require_stage(Stage::kAwaitNeighborKeys, "handle_neighbor_keys");
  for (const auto& entry : keys.neighbors) {
    if (entry.id == id_ || !graph_.are_neighbors(id_, entry.id)) {
      throw ProtocolError("neighbor key list names a non-neighbor");
    }
    if (!neighbor_keys_.emplace(entry.id, entry).second) {
      throw ProtocolError("duplicate neighbor key entry");
    }
  }

  self_seed_ = secure_random_seed(*rng_);
  self_seed_drawn_ = true;

  const int k = static_cast<int>(params_.share_num);
  const int t = static_cast<int>(params_.threshold);
  const auto key_shares = shamir_split(mask_keys_.secret, k, t, *rng_);
  const auto b_shares = shamir_split(self_seed_, k, t, *rng_);

  // Share index = 1 + position in the sorted neighbor list (self included),
  // so every neighbor of one origin holds a distinct index.
  const auto& neighborhood = graph_.neighbors_of(id_);
  ShareKeysReply reply;
  for (std::size_t pos = 0; pos < neighborhood.size(); ++pos) {
    const std::uint32_t j = neighborhood[pos];
    if (j == id_) {
      own_key_share_ = key_shares[pos];
      own_b_share_ = b_shares[pos];
      continue;
    }
    const auto it = neighbor_keys_.find(j);
    if (it == neighbor_keys_.end()) continue;  // dropped before key exchange
    const SymmetricKey mutual =
        key_agree(encryption_keys_.secret, it->second.encryption_public,
                  kShareEncryptionContext);
    const auto plaintext =
        encode_share_pair(id_, j, key_shares[pos], b_shares[pos]);
    reply.shares.push_back({j, aead_encrypt(mutual, plaintext, *rng_)});
  }

  stage_ = Stage::kAwaitRoutedShares;
  return reply;
}

MaskedVectorReply SecAggClient::handle_routed_shares(
    const RoutedSharesPayload& routed) {
  require_stage(Stage::kAwaitRoutedShares, "handle_routed_shares");
  for (const auto& entry : routed.shares) {
    const auto it = neighbor_keys_.find(entry.id);
    if (it == neighbor_keys_.end()) {
      throw ProtocolError("routed share from a neighbor absent from the key "
                          "list (id " + std::to_string(entry.id) + ")");
    }
    const SymmetricKey mutual =
        key_agree(encryption_keys_.secret, it->second.encryption_public,
                  kShareEncryptionContext);
    const auto pair = decode_share_pair(aead_decrypt(mutual, entry.ciphertext));
    if (pair.origin != entry.id || pair.dest != id_) {
      throw ProtocolError("share pair ids disagree with routing");
    }
    if (!received_shares_
             .emplace(entry.id, std::make_pair(pair.key_share, pair.b_share))
             .second) {
      throw ProtocolError("duplicate routed share");
    }
  }

  // Pairwise masks cover exactly the neighbors whose shares arrived; only
  // their mask keys can be reconstructed if they drop later.
  for (const auto& [j, shares] : received_shares_) {
    active_pairwise_seeds_.emplace(
        j, derive_pairwise_seed(mask_keys_.secret,
                                neighbor_keys_.at(j).mask_public));
  }

  const auto quantized =
      quantize(input_, params_.clipping_range, params_.target_range);
  const FieldVector extended =
      extend_with_weight(quantized, weight_, params_.max_weights_factor,
                         params_.mod_range);
  FieldVector masked = compute_masked_vector(extended, self_seed_,
                                             active_pairwise_seeds_, id_);
  if (meter_ != nullptr) {
    meter_->client_prg_elements[id_] +=
        (1 + active_pairwise_seeds_.size()) * extended.size();
  }

  stage_ = Stage::kAwaitUnmaskRequest;
  return MaskedVectorReply{masked.values()};
}

UnmaskReply SecAggClient::handle_unmask_request(
    const UnmaskRequestPayload& request) {
  require_stage(Stage::kAwaitUnmaskRequest, "handle_unmask_request");
  for (std::uint32_t id : request.b_ids) {
    if (std::find(request.key_ids.begin(), request.key_ids.end(), id) !=
        request.key_ids.end()) {
      throw ProtocolError(
          "refusing unmask request: both share kinds asked for client " +
          std::to_string(id));
    }
  }

  UnmaskReply reply;
  for (std::uint32_t id : request.b_ids) {
    if (id == id_) {
      reply.b_shares.push_back({id_, own_b_share_});
    } else if (auto it = received_shares_.find(id);
               it != received_shares_.end()) {
      reply.b_shares.push_back({id, it->second.second});
    }
    // Unknown origins are omitted, not errors.
  }
  for (std::uint32_t id : request.key_ids) {
    if (id == id_) {
      reply.key_shares.push_back({id_, own_key_share_});
    } else if (auto it = received_shares_.find(id);
               it != received_shares_.end()) {
      reply.key_shares.push_back({id, it->second.first});
    }
  }

  stage_ = Stage::kDone;
  return reply;
}

void SecAggClient::handle_abort(const AbortPayload&) {
  wipe_secrets();
  stage_ = Stage::kAborted;
}

void SecAggClient::wipe_secrets() {
  sodium_memzero(mask_keys_.secret.data(), mask_keys_.secret.size());
  sodium_memzero(encryption_keys_.secret.data(),
                 encryption_keys_.secret.size());
  sodium_memzero(self_seed_.data(), self_seed_.size());
  wipe(own_key_share_.payload);
  wipe(own_b_share_.payload);
  for (auto& [id, pair] : received_shares_) {
    wipe(pair.first.payload);
    wipe(pair.second.payload);
  }
  received_shares_.clear();
  for (auto& [id, seed] : active_pairwise_seeds_) {
    sodium_memzero(seed.data(), seed.size());
  }
  active_pairwise_seeds_.clear();
}

}  // namespace secagg
