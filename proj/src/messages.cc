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

#include "secagg/messages.h"

#include "secagg/bytes.h"
#include "secagg/errors.h"

namespace secagg {
namespace {

void write_public_key(ByteWriter& w, const PublicKey& key) {
  w.var_bytes(key);
}

PublicKey read_public_key(ByteReader& r) {
  const auto bytes = r.var_bytes();
  if (bytes.size() != kKeyBytes) {
    throw ProtocolError("public key must be 32 bytes");
  }
  PublicKey key{};
  std::copy(bytes.begin(), bytes.end(), key.begin());
  return key;
}

void write_share(ByteWriter& w, const SecretShare& share) {
  ByteWriter inner;
  inner.u8(share.index);
  inner.raw(share.payload);
  const auto bytes = inner.take();
  w.var_bytes(bytes);
}

SecretShare read_share(ByteReader& r) {
  const auto bytes = r.var_bytes();
  if (bytes.empty()) {
    throw ProtocolError("share encoding must carry an index byte");
  }
  SecretShare share;
  share.index = bytes[0];
  share.payload.assign(bytes.begin() + 1, bytes.end());
  return share;
}

void write_ciphertext_list(ByteWriter& w,
                           const std::vector<AddressedCiphertext>& list) {
  w.u32be(static_cast<std::uint32_t>(list.size()));
  for (const auto& entry : list) {
    w.u32be(entry.id);
    w.var_bytes(entry.ciphertext);
  }
}

std::vector<AddressedCiphertext> read_ciphertext_list(ByteReader& r) {
  const std::uint32_t count = r.u32be();
  std::vector<AddressedCiphertext> list;
  list.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    AddressedCiphertext entry;
    entry.id = r.u32be();
    entry.ciphertext = r.var_bytes();
    list.push_back(std::move(entry));
  }
  return list;
}

void write_id_list(ByteWriter& w, const std::vector<std::uint32_t>& ids) {
  w.u32be(static_cast<std::uint32_t>(ids.size()));
  for (std::uint32_t id : ids) w.u32be(id);
}

std::vector<std::uint32_t> read_id_list(ByteReader& r) {
  const std::uint32_t count = r.u32be();
  std::vector<std::uint32_t> ids;
  ids.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) ids.push_back(r.u32be());
  return ids;
}

void write_share_entries(ByteWriter& w, const std::vector<ShareEntry>& list) {
  w.u32be(static_cast<std::uint32_t>(list.size()));
  for (const auto& entry : list) {
    w.u32be(entry.origin);
    write_share(w, entry.share);
  }
}

std::vector<ShareEntry> read_share_entries(ByteReader& r) {
  const std::uint32_t count = r.u32be();
  std::vector<ShareEntry> list;
  list.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ShareEntry entry;
    entry.origin = r.u32be();
    entry.share = read_share(r);
    list.push_back(std::move(entry));
  }
  return list;
}

}  // namespace

const char* to_string(StageTag tag) {
  switch (tag) {
    case StageTag::kSetup: return "SETUP";
    case StageTag::kAskKeys: return "ASK_KEYS";
    case StageTag::kShareKeys: return "SHARE_KEYS";
    case StageTag::kAskVectors: return "ASK_VECTORS";
    case StageTag::kUnmask: return "UNMASK";
    case StageTag::kAbort: return "ABORT";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(frame.tag));
  w.u32be(frame.sender);
  w.u64be(frame.payload.size());
  w.raw(frame.payload);
  return w.take();
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Frame frame;
  const std::uint8_t tag = r.u8();
  if (tag > static_cast<std::uint8_t>(StageTag::kAbort)) {
    throw ProtocolError("unknown stage tag " + std::to_string(tag));
  }
  frame.tag = static_cast<StageTag>(tag);
  frame.sender = r.u32be();
  const std::uint64_t len = r.u64be();
  if (len != r.remaining()) {
    throw ProtocolError("frame payload length mismatch");
  }
  const auto payload = r.raw(len);
  frame.payload.assign(payload.begin(), payload.end());
  return frame;
}

std::vector<std::uint8_t> SetupPayload::encode() const {
  ByteWriter w;
  w.u32be(client_id);
  w.u32be(n);
  w.u64be(l);
  w.u32be(share_num);
  w.u32be(threshold);
  w.u32be(min_clients);
  w.f64(clipping_range);
  w.u64be(target_range);
  w.u64be(max_weights_factor);
  w.u64be(mod_range);
  return w.take();
}

SetupPayload SetupPayload::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  SetupPayload p;
  p.client_id = r.u32be();
  p.n = r.u32be();
  p.l = r.u64be();
  p.share_num = r.u32be();
  p.threshold = r.u32be();
  p.min_clients = r.u32be();
  p.clipping_range = r.f64();
  p.target_range = r.u64be();
  p.max_weights_factor = r.u64be();
  p.mod_range = r.u64be();
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> AskKeysReply::encode() const {
  ByteWriter w;
  write_public_key(w, mask_public);
  write_public_key(w, encryption_public);
  return w.take();
}

AskKeysReply AskKeysReply::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  AskKeysReply p;
  p.mask_public = read_public_key(r);
  p.encryption_public = read_public_key(r);
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> NeighborKeysPayload::encode() const {
  ByteWriter w;
  w.u32be(static_cast<std::uint32_t>(neighbors.size()));
  for (const auto& entry : neighbors) {
    w.u32be(entry.id);
    write_public_key(w, entry.mask_public);
    write_public_key(w, entry.encryption_public);
  }
  return w.take();
}

NeighborKeysPayload NeighborKeysPayload::decode(
    std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  NeighborKeysPayload p;
  const std::uint32_t count = r.u32be();
  p.neighbors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NeighborKeyEntry entry;
    entry.id = r.u32be();
    entry.mask_public = read_public_key(r);
    entry.encryption_public = read_public_key(r);
    p.neighbors.push_back(entry);
  }
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> ShareKeysReply::encode() const {
  ByteWriter w;
  write_ciphertext_list(w, shares);
  return w.take();
}

ShareKeysReply ShareKeysReply::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ShareKeysReply p;
  p.shares = read_ciphertext_list(r);
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> RoutedSharesPayload::encode() const {
  ByteWriter w;
  write_ciphertext_list(w, shares);
  return w.take();
}

RoutedSharesPayload RoutedSharesPayload::decode(
    std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  RoutedSharesPayload p;
  p.shares = read_ciphertext_list(r);
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> MaskedVectorReply::encode() const {
  ByteWriter w;
  for (std::uint64_t v : values) w.u64le(v);
  return w.take();
}

MaskedVectorReply MaskedVectorReply::decode(
    std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 8 != 0) {
    throw ProtocolError("masked vector payload must be 8-byte aligned");
  }
  ByteReader r(bytes);
  MaskedVectorReply p;
  p.values.reserve(bytes.size() / 8);
  while (r.remaining() > 0) p.values.push_back(r.u64le());
  return p;
}

std::vector<std::uint8_t> UnmaskRequestPayload::encode() const {
  ByteWriter w;
  write_id_list(w, b_ids);
  write_id_list(w, key_ids);
  return w.take();
}

UnmaskRequestPayload UnmaskRequestPayload::decode(
    std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  UnmaskRequestPayload p;
  p.b_ids = read_id_list(r);
  p.key_ids = read_id_list(r);
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> UnmaskReply::encode() const {
  ByteWriter w;
  write_share_entries(w, b_shares);
  write_share_entries(w, key_shares);
  return w.take();
}

UnmaskReply UnmaskReply::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  UnmaskReply p;
  p.b_shares = read_share_entries(r);
  p.key_shares = read_share_entries(r);
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> AbortPayload::encode() const {
  ByteWriter w;
  w.u8(reason);
  w.u8(stage);
  w.var_bytes({reinterpret_cast<const std::uint8_t*>(message.data()),
               message.size()});
  return w.take();
}

AbortPayload AbortPayload::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  AbortPayload p;
  p.reason = r.u8();
  p.stage = r.u8();
  const auto msg = r.var_bytes();
  p.message.assign(msg.begin(), msg.end());
  r.expect_end();
  return p;
}

}  // namespace secagg
