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

#include "secagg/crypto.h"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "secagg/errors.h"

namespace secagg {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialization failed");
    }
  });
}

std::array<std::uint8_t, 8> le64(std::uint64_t v) {
  std::array<std::uint8_t, 8> out{};
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return out;
}

// BLAKE2b with an explicit keying, used for every derivation below.
SymmetricKey hash32(std::span<const std::uint8_t> message,
                    std::span<const std::uint8_t> key) {
  ensure_sodium();
  SymmetricKey out{};
  crypto_generichash(out.data(), out.size(), message.data(), message.size(),
                     key.empty() ? nullptr : key.data(), key.size());
  return out;
}

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// GF(2^8) with the AES reduction polynomial x^8 + x^4 + x^3 + x + 1,
// generator 0x03. log/exp tables are built at compile time; exp is doubled
// so products of logs never need an explicit mod 255.
struct Gf256 {
  std::array<std::uint8_t, 256> log{};
  std::array<std::uint8_t, 510> exp{};
};

constexpr Gf256 build_gf256() {
  Gf256 t{};
  int x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.exp[i + 255] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    int doubled = x << 1;
    if (doubled & 0x100) doubled ^= 0x11b;
    x = (doubled ^ x) & 0xff;  // multiply by the generator 0x03
  }
  return t;
}

constexpr Gf256 kGf = build_gf256();

inline std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return kGf.exp[kGf.log[a] + kGf.log[b]];
}

inline std::uint8_t gf_div(std::uint8_t a, std::uint8_t b) {
  if (a == 0) return 0;
  return kGf.exp[kGf.log[a] + 255 - kGf.log[b]];
}

}  // namespace

std::uint8_t RandomSource::byte() {
  std::uint8_t b;
  fill({&b, 1});
  return b;
}

std::uint64_t RandomSource::u64() {
  std::array<std::uint8_t, 8> buf;
  fill(buf);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("uniform bound must be >= 1");
  }
  // Rejection sampling over the largest multiple of bound below 2^64.
  const std::uint64_t limit = bound == 1 ? 0 : UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t v = u64();
    if (bound == 1) return 0;
    if (v < limit) return v % bound;
  }
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

DeterministicRandom::DeterministicRandom(const SymmetricKey& key)
    : key_(key) {
  ensure_sodium();
}

DeterministicRandom::DeterministicRandom(std::uint64_t seed,
                                         std::string_view label)
    : DeterministicRandom([&] {
        auto seed_bytes = le64(seed);
        return hash32(as_bytes(label), seed_bytes);
      }()) {}

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
  auto nonce = le64(counter_++);
  crypto_stream_chacha20(out.data(), out.size(), nonce.data(), key_.data());
}

SymmetricKey derive_subkey(const SymmetricKey& key, std::string_view label,
                           std::uint64_t index) {
  std::vector<std::uint8_t> msg(label.begin(), label.end());
  auto idx = le64(index);
  msg.insert(msg.end(), idx.begin(), idx.end());
  return hash32(msg, key);
}

KeyPair generate_keypair(RandomSource& rng) {
  ensure_sodium();
  KeyPair kp{};
  rng.fill(kp.secret);
  crypto_scalarmult_base(kp.public_key.data(), kp.secret.data());
  return kp;
}

KeyPair generate_keypair(const Seed& seed) {
  ensure_sodium();
  KeyPair kp{};
  kp.secret = hash32(as_bytes("secagg keypair v1"), seed);
  crypto_scalarmult_base(kp.public_key.data(), kp.secret.data());
  return kp;
}

SymmetricKey key_agree(const SecretKey& my_secret,
                       std::span<const std::uint8_t> their_public,
                       std::string_view context) {
  ensure_sodium();
  if (their_public.size() != kKeyBytes) {
    throw std::invalid_argument("malformed public key encoding");
  }
  SymmetricKey shared{};
  if (crypto_scalarmult(shared.data(), my_secret.data(),
                        their_public.data()) != 0) {
    throw std::invalid_argument("degenerate public key (low-order point)");
  }
  auto derived = hash32(as_bytes(context), shared);
  sodium_memzero(shared.data(), shared.size());
  return derived;
}

std::vector<std::uint8_t> aead_encrypt(const SymmetricKey& key,
                                       std::span<const std::uint8_t> plaintext,
                                       RandomSource& rng) {
  ensure_sodium();
  const std::size_t nonce_len = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  const std::size_t tag_len = crypto_aead_xchacha20poly1305_ietf_ABYTES;
  std::vector<std::uint8_t> out(nonce_len + plaintext.size() + tag_len);
  rng.fill({out.data(), nonce_len});
  unsigned long long clen = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(
      out.data() + nonce_len, &clen, plaintext.data(), plaintext.size(),
      nullptr, 0, nullptr, out.data(), key.data());
  out.resize(nonce_len + clen);
  return out;
}

std::vector<std::uint8_t> aead_decrypt(
    const SymmetricKey& key, std::span<const std::uint8_t> ciphertext) {
  ensure_sodium();
  const std::size_t nonce_len = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  const std::size_t tag_len = crypto_aead_xchacha20poly1305_ietf_ABYTES;
  if (ciphertext.size() < nonce_len + tag_len) {
    throw AuthenticationError("ciphertext too short");
  }
  std::vector<std::uint8_t> out(ciphertext.size() - nonce_len - tag_len);
  unsigned long long mlen = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(
          out.data(), &mlen, nullptr, ciphertext.data() + nonce_len,
          ciphertext.size() - nonce_len, nullptr, 0, ciphertext.data(),
          key.data()) != 0) {
    throw AuthenticationError("ciphertext authentication failed");
  }
  out.resize(mlen);
  return out;
}

std::vector<SecretShare> shamir_split(std::span<const std::uint8_t> secret,
                                      int share_num, int threshold,
                                      RandomSource& rng) {
  if (share_num < 1 || share_num > 255) {
    throw ConfigError(ConfigField::kShareNumBound,
                      "share_num must be in [1, 255]");
  }
  if (threshold < 1 || threshold > share_num) {
    throw ConfigError(ConfigField::kThreshold,
                      "threshold must be in [1, share_num]");
  }
  if (secret.empty()) {
    throw std::invalid_argument("cannot split an empty secret");
  }

  // coeffs[j] holds coefficient a_{j+1} for every byte position; a_0 is the
  // secret byte itself.
  std::vector<std::vector<std::uint8_t>> coeffs(
      threshold - 1, std::vector<std::uint8_t>(secret.size()));
  for (auto& row : coeffs) rng.fill(row);

  std::vector<SecretShare> shares(share_num);
  for (int s = 0; s < share_num; ++s) {
    const auto x = static_cast<std::uint8_t>(s + 1);
    shares[s].index = x;
    shares[s].payload.resize(secret.size());
    for (std::size_t p = 0; p < secret.size(); ++p) {
      std::uint8_t y = 0;
      for (int j = threshold - 2; j >= 0; --j) {
        y = gf_mul(y, x) ^ coeffs[j][p];
      }
      shares[s].payload[p] = gf_mul(y, x) ^ secret[p];
    }
  }
  return shares;
}

std::vector<std::uint8_t> shamir_reconstruct(
    std::span<const SecretShare> shares, int threshold) {
  if (threshold < 1) {
    throw ConfigError(ConfigField::kThreshold, "threshold must be >= 1");
  }
  if (std::cmp_less(shares.size(), threshold)) {
    throw std::invalid_argument("not enough shares to reconstruct");
  }

  std::vector<SecretShare> picked(shares.begin(), shares.end());
  std::sort(picked.begin(), picked.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  const std::size_t len = picked.front().payload.size();
  for (std::size_t i = 0; i < picked.size(); ++i) {
    if (picked[i].index == 0) {
      throw std::invalid_argument("share index must be >= 1");
    }
    if (i > 0 && picked[i].index == picked[i - 1].index) {
      throw std::invalid_argument("duplicate share indices");
    }
    if (picked[i].payload.size() != len) {
      throw std::invalid_argument("share payload length mismatch");
    }
  }
  picked.resize(threshold);

  // Lagrange basis at 0: lambda_i = prod_{j != i} x_j / (x_j ^ x_i).
  std::vector<std::uint8_t> lambda(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    std::uint8_t num = 1;
    std::uint8_t den = 1;
    for (std::size_t j = 0; j < picked.size(); ++j) {
      if (j == i) continue;
      num = gf_mul(num, picked[j].index);
      den = gf_mul(den, picked[j].index ^ picked[i].index);
    }
    lambda[i] = gf_div(num, den);
  }

  std::vector<std::uint8_t> secret(len, 0);
  for (std::size_t p = 0; p < len; ++p) {
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
      acc ^= gf_mul(lambda[i], picked[i].payload[p]);
    }
    secret[p] = acc;
  }
  return secret;
}

FieldVector prg_expand(const Seed& seed, std::size_t length,
                       std::uint64_t modulus) {
  ensure_sodium();
  if (length < 1) {
    throw std::invalid_argument("prg_expand length must be >= 1");
  }
  if (modulus < 2 || modulus > kFieldModulusCap) {
    throw std::invalid_argument("prg_expand modulus must be in [2, 2^62]");
  }
  const SymmetricKey key = hash32(as_bytes("secagg mask expansion v1"), seed);
  static constexpr std::uint8_t kZeroNonce[8] = {};

  std::vector<std::uint8_t> stream(length * 8);
  crypto_stream_chacha20(stream.data(), stream.size(), kZeroNonce, key.data());

  std::vector<std::uint64_t> values(length);
  for (std::size_t i = 0; i < length; ++i) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = v << 8 | stream[i * 8 + b];
    values[i] = v % modulus;
  }
  return FieldVector::from_reduced(std::move(values), modulus);
}

Seed secure_random_seed(RandomSource& rng) {
  Seed seed{};
  rng.fill(seed);
  return seed;
}

struct HashAccumulator::Impl {
  crypto_generichash_state state;
};

HashAccumulator::HashAccumulator() : impl_(std::make_unique<Impl>()) {
  ensure_sodium();
  crypto_generichash_init(&impl_->state, nullptr, 0, 32);
}

HashAccumulator::~HashAccumulator() = default;

void HashAccumulator::update(std::span<const std::uint8_t> bytes) {
  crypto_generichash_update(&impl_->state, bytes.data(), bytes.size());
}

std::array<std::uint8_t, 32> HashAccumulator::finish() {
  std::array<std::uint8_t, 32> out{};
  crypto_generichash_final(&impl_->state, out.data(), out.size());
  return out;
}

}  // namespace secagg
