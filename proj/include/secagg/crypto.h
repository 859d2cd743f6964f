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

// Cryptographic primitives: X25519 key agreement, XChaCha20-Poly1305
// authenticated encryption, bytewise Shamir sharing over GF(256), seeded
// counter-mode mask expansion, and randomness handles. The curve and AEAD
// come from libsodium; only the secret-sharing scheme is built here.

#ifndef SECAGG_CRYPTO_H_
#define SECAGG_CRYPTO_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "secagg/modfield.h"

namespace secagg {

inline constexpr std::size_t kSeedBytes = 16;
inline constexpr std::size_t kKeyBytes = 32;

// 16-byte seed for self masks and mask expansion.
using Seed = std::array<std::uint8_t, kSeedBytes>;
// 32-byte symmetric key derived via key agreement.
using SymmetricKey = std::array<std::uint8_t, kKeyBytes>;
// Raw 32-byte X25519 scalars / points.
using SecretKey = std::array<std::uint8_t, kKeyBytes>;
using PublicKey = std::array<std::uint8_t, kKeyBytes>;

// Source of random bytes. Implementations are NOT safe to share across
// concurrent tasks without external ordering; the deterministic variant's
// output depends on call order.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint8_t byte();
  std::uint64_t u64();
  // Unbiased draw in [0, bound) via rejection sampling. bound >= 1.
  std::uint64_t uniform(std::uint64_t bound);
};

// OS entropy (libsodium randombytes). Entropy failure is fatal by design.
class SystemRandom : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// Keyed counter-mode stream (ChaCha20). Identical construction sequences
// yield identical byte sequences, which is what simulation replay relies on.
class DeterministicRandom : public RandomSource {
 public:
  explicit DeterministicRandom(const SymmetricKey& key);
  DeterministicRandom(std::uint64_t seed, std::string_view label);

  void fill(std::span<std::uint8_t> out) override;

 private:
  SymmetricKey key_;
  std::uint64_t counter_ = 0;
};

// Derives an independent subkey from (key, label, index); used to give every
// simulated party its own randomness stream from one master seed.
SymmetricKey derive_subkey(const SymmetricKey& key, std::string_view label,
                           std::uint64_t index = 0);

struct KeyPair {
  SecretKey secret;      // never serialized into protocol messages
  PublicKey public_key;  // shared via the server
};

// Fresh X25519 key pair from the given randomness handle.
KeyPair generate_keypair(RandomSource& rng);

// Deterministic key pair expanded from a 16-byte seed (simulation replay).
KeyPair generate_keypair(const Seed& seed);

// Diffie-Hellman agreement followed by a keyed derivation over `context`.
// Symmetric in the pair; distinct contexts yield unrelated keys. Throws
// std::invalid_argument on a malformed or degenerate public key.
SymmetricKey key_agree(const SecretKey& my_secret,
                       std::span<const std::uint8_t> their_public,
                       std::string_view context);

// AEAD with a fresh random nonce per call; output layout nonce || body || tag.
std::vector<std::uint8_t> aead_encrypt(const SymmetricKey& key,
                                       std::span<const std::uint8_t> plaintext,
                                       RandomSource& rng);

// Throws AuthenticationError on a wrong key or any ciphertext mutation.
std::vector<std::uint8_t> aead_decrypt(
    const SymmetricKey& key, std::span<const std::uint8_t> ciphertext);

// One share of a t-out-of-n split. Serialized as 1 index byte followed by
// the payload (same length as the secret).
struct SecretShare {
  std::uint8_t index = 0;  // in [1, share_num]
  std::vector<std::uint8_t> payload;

  friend bool operator==(const SecretShare&, const SecretShare&) = default;
};

// Bytewise Shamir split over GF(256): one random degree-(t-1) polynomial per
// secret byte, evaluated at x = 1..n. share_num <= 255 because share indices
// are field elements.
std::vector<SecretShare> shamir_split(std::span<const std::uint8_t> secret,
                                      int share_num, int threshold,
                                      RandomSource& rng);

// Lagrange interpolation at 0 over any >= threshold shares with distinct
// indices and equal payload lengths. Shares from different splits are not
// detectable here; callers verify the reconstructed value where possible.
std::vector<std::uint8_t> shamir_reconstruct(
    std::span<const SecretShare> shares, int threshold);

// Deterministically expands a seed into `length` field elements: a keyed
// counter-mode stream, 8 bytes consumed per element, reduced mod `modulus`.
FieldVector prg_expand(const Seed& seed, std::size_t length,
                       std::uint64_t modulus);

// 16 fresh seed bytes from the handle (OS entropy or simulation stream).
Seed secure_random_seed(RandomSource& rng);

// Streaming hash used for transcript fingerprints (BLAKE2b-256).
class HashAccumulator {
 public:
  HashAccumulator();
  ~HashAccumulator();
  HashAccumulator(const HashAccumulator&) = delete;
  HashAccumulator& operator=(const HashAccumulator&) = delete;

  void update(std::span<const std::uint8_t> bytes);
  std::array<std::uint8_t, 32> finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace secagg

#endif  // SECAGG_CRYPTO_H_
