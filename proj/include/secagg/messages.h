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

// Tagged wire messages for protocol stages 0-4 plus ABORT.
//
// Frame layout (bit-exact; any future socket backend must match):
//   [1 byte stage tag][4 bytes big-endian sender id][8 bytes big-endian
//   payload length][payload]
// Payload conventions: public keys and ciphertexts are 2-byte-length-prefixed
// byte strings; FieldVector elements are 8-byte little-endian integers; lists
// carry a 4-byte big-endian count. The server sends as id 0xffffffff.

#ifndef SECAGG_MESSAGES_H_
#define SECAGG_MESSAGES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "secagg/crypto.h"

namespace secagg {

enum class StageTag : std::uint8_t {
  kSetup = 0,
  kAskKeys = 1,
  kShareKeys = 2,
  kAskVectors = 3,
  kUnmask = 4,
  kAbort = 5,
};

const char* to_string(StageTag tag);

inline constexpr std::uint32_t kServerId = 0xffffffff;
inline constexpr std::size_t kFrameHeaderBytes = 13;

struct Frame {
  StageTag tag{};
  std::uint32_t sender = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
Frame decode_frame(std::span<const std::uint8_t> bytes);

// Stage 0, server -> client: the full parameter set plus the client's id.
struct SetupPayload {
  std::uint32_t client_id = 0;
  std::uint32_t n = 0;
  std::uint64_t l = 0;
  std::uint32_t share_num = 0;
  std::uint32_t threshold = 0;
  std::uint32_t min_clients = 0;
  double clipping_range = 0;
  std::uint64_t target_range = 0;
  std::uint64_t max_weights_factor = 0;
  std::uint64_t mod_range = 0;

  std::vector<std::uint8_t> encode() const;
  static SetupPayload decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const SetupPayload&, const SetupPayload&) = default;
};

// Stage 1, client -> server: both fresh public keys.
struct AskKeysReply {
  PublicKey mask_public{};
  PublicKey encryption_public{};

  std::vector<std::uint8_t> encode() const;
  static AskKeysReply decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const AskKeysReply&, const AskKeysReply&) = default;
};

struct NeighborKeyEntry {
  std::uint32_t id = 0;
  PublicKey mask_public{};
  PublicKey encryption_public{};

  friend bool operator==(const NeighborKeyEntry&,
                         const NeighborKeyEntry&) = default;
};

// Stage 2, server -> client: public keys of the client's surviving
// graph neighbors (self excluded).
struct NeighborKeysPayload {
  std::vector<NeighborKeyEntry> neighbors;

  std::vector<std::uint8_t> encode() const;
  static NeighborKeysPayload decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const NeighborKeysPayload&,
                         const NeighborKeysPayload&) = default;
};

// One AEAD ciphertext addressed by client id: the destination in a
// SHARE_KEYS reply, the origin in a routed bundle.
struct AddressedCiphertext {
  std::uint32_t id = 0;
  std::vector<std::uint8_t> ciphertext;

  friend bool operator==(const AddressedCiphertext&,
                         const AddressedCiphertext&) = default;
};

// Stage 2, client -> server: encrypted share pairs for each neighbor.
struct ShareKeysReply {
  std::vector<AddressedCiphertext> shares;

  std::vector<std::uint8_t> encode() const;
  static ShareKeysReply decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const ShareKeysReply&,
                         const ShareKeysReply&) = default;
};

// Stage 3, server -> client: ciphertexts relayed verbatim from neighbors.
struct RoutedSharesPayload {
  std::vector<AddressedCiphertext> shares;

  std::vector<std::uint8_t> encode() const;
  static RoutedSharesPayload decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const RoutedSharesPayload&,
                         const RoutedSharesPayload&) = default;
};

// Stage 3, client -> server: the masked extended vector (l + 1 elements).
struct MaskedVectorReply {
  std::vector<std::uint64_t> values;

  std::vector<std::uint8_t> encode() const;
  static MaskedVectorReply decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const MaskedVectorReply&,
                         const MaskedVectorReply&) = default;
};

// Stage 4, server -> client: disjoint id lists. b_ids name survivors whose
// self-mask seed shares are requested; key_ids name dropped clients whose
// mask-key shares are requested. One id must never appear in both.
struct UnmaskRequestPayload {
  std::vector<std::uint32_t> b_ids;
  std::vector<std::uint32_t> key_ids;

  std::vector<std::uint8_t> encode() const;
  static UnmaskRequestPayload decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const UnmaskRequestPayload&,
                         const UnmaskRequestPayload&) = default;
};

struct ShareEntry {
  std::uint32_t origin = 0;
  SecretShare share;

  friend bool operator==(const ShareEntry&, const ShareEntry&) = default;
};

// Stage 4, client -> server: the held shares for the requested origins.
struct UnmaskReply {
  std::vector<ShareEntry> b_shares;
  std::vector<ShareEntry> key_shares;

  std::vector<std::uint8_t> encode() const;
  static UnmaskReply decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const UnmaskReply&, const UnmaskReply&) = default;
};

struct AbortPayload {
  std::uint8_t reason = 0;  // AbortReason
  std::uint8_t stage = 0;
  std::string message;

  std::vector<std::uint8_t> encode() const;
  static AbortPayload decode(std::span<const std::uint8_t> bytes);
  friend bool operator==(const AbortPayload&, const AbortPayload&) = default;
};

}  // namespace secagg

#endif  // SECAGG_MESSAGES_H_
