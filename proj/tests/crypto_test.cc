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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "secagg/crypto.h"
#include "secagg/errors.h"

using namespace secagg;

namespace {

// Independent GF(2^8) multiplication (shift-and-add over 0x11b), used as the
// oracle against the table-driven arithmetic inside the Shamir code.
std::uint8_t gf_mul_oracle(std::uint8_t a, std::uint8_t b) {
  std::uint8_t result = 0;
  while (b != 0) {
    if (b & 1) result ^= a;
    const bool carry = a & 0x80;
    a <<= 1;
    if (carry) a ^= 0x1b;
    b >>= 1;
  }
  return result;
}

Seed make_seed(std::uint8_t fill) {
  Seed seed{};
  seed.fill(fill);
  return seed;
}

std::vector<std::uint8_t> make_secret(std::size_t len, std::uint8_t start) {
  std::vector<std::uint8_t> secret(len);
  std::iota(secret.begin(), secret.end(), start);
  return secret;
}

}  // namespace

TEST_CASE("keypair generation is deterministic from a seed") {
  const auto a = generate_keypair(make_seed(7));
  const auto b = generate_keypair(make_seed(7));
  const auto c = generate_keypair(make_seed(8));
  CHECK(a.secret == b.secret);
  CHECK(a.public_key == b.public_key);
  CHECK(a.public_key != c.public_key);
}

TEST_CASE("fresh keypairs are distinct") {
  SystemRandom rng;
  const auto a = generate_keypair(rng);
  const auto b = generate_keypair(rng);
  CHECK(a.public_key != b.public_key);
}

TEST_CASE("key agreement is symmetric in the pair") {
  DeterministicRandom rng(21, "crypto dh");
  for (int i = 0; i < 20; ++i) {
    const auto a = generate_keypair(rng);
    const auto b = generate_keypair(rng);
    const auto ab = key_agree(a.secret, b.public_key, "ctx");
    const auto ba = key_agree(b.secret, a.public_key, "ctx");
    CHECK(ab == ba);
  }
}

TEST_CASE("distinct contexts derive unrelated keys") {
  const auto a = generate_keypair(make_seed(1));
  const auto b = generate_keypair(make_seed(2));
  CHECK(key_agree(a.secret, b.public_key, "mask-seed") !=
        key_agree(a.secret, b.public_key, "share-enc"));
}

TEST_CASE("malformed public keys are rejected") {
  const auto a = generate_keypair(make_seed(3));
  std::vector<std::uint8_t> truncated(a.public_key.begin(),
                                      a.public_key.end() - 1);
  CHECK_THROWS_AS(key_agree(a.secret, truncated, "ctx"),
                  std::invalid_argument);
  const std::vector<std::uint8_t> zeros(32, 0);  // low-order point
  CHECK_THROWS_AS(key_agree(a.secret, zeros, "ctx"), std::invalid_argument);
}

TEST_CASE("aead round trip and integrity") {
  DeterministicRandom rng(22, "crypto aead");
  SymmetricKey key{};
  rng.fill(key);
  const std::vector<std::uint8_t> plaintext = {0, 1, 2, 255, 42};

  auto ciphertext = aead_encrypt(key, plaintext, rng);
  CHECK(aead_decrypt(key, ciphertext) == plaintext);

  // Any single-bit mutation anywhere (nonce, body, tag) must be rejected.
  for (std::size_t i = 0; i < ciphertext.size(); ++i) {
    auto tampered = ciphertext;
    tampered[i] ^= 0x01;
    CHECK_THROWS_AS(aead_decrypt(key, tampered), AuthenticationError);
  }

  SymmetricKey other = key;
  other[0] ^= 1;
  CHECK_THROWS_AS(aead_decrypt(other, ciphertext), AuthenticationError);
  CHECK_THROWS_AS(aead_decrypt(key, std::vector<std::uint8_t>(10, 0)),
                  AuthenticationError);

  // Empty plaintext round-trips too.
  const auto empty = aead_encrypt(key, {}, rng);
  CHECK(aead_decrypt(key, empty).empty());
}

TEST_CASE("shamir split/reconstruct with the evaluated configuration") {
  DeterministicRandom rng(23, "crypto shamir");
  const auto secret = make_secret(32, 1);
  const auto shares = shamir_split(secret, 51, 26, rng);
  REQUIRE(shares.size() == 51);

  std::vector<SecretShare> exactly_t(shares.begin(), shares.begin() + 26);
  CHECK(shamir_reconstruct(exactly_t, 26) == secret);

  // A different 26-subset reconstructs the same secret.
  std::vector<SecretShare> other(shares.end() - 26, shares.end());
  CHECK(shamir_reconstruct(other, 26) == secret);

  std::vector<SecretShare> below(shares.begin(), shares.begin() + 25);
  CHECK_THROWS_AS(shamir_reconstruct(below, 26), std::invalid_argument);
}

TEST_CASE("all t-subsets of a 5/3 split agree") {
  DeterministicRandom rng(24, "crypto shamir subsets");
  const auto secret = make_secret(16, 100);
  const auto shares = shamir_split(secret, 5, 3, rng);
  int subsets = 0;
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      for (int c = b + 1; c < 5; ++c) {
        const std::vector<SecretShare> subset{shares[a], shares[b], shares[c]};
        CHECK(shamir_reconstruct(subset, 3) == secret);
        ++subsets;
      }
    }
  }
  CHECK(subsets == 10);
}

TEST_CASE("degenerate and invalid shamir cases") {
  DeterministicRandom rng(25, "crypto shamir edges");

  // t = 1, n = 1: degree-0 polynomial, the share is the secret.
  const auto secret = make_secret(16, 0);
  const auto single = shamir_split(secret, 1, 1, rng);
  REQUIRE(single.size() == 1);
  CHECK(single[0].payload == secret);

  // Zero secret, shares {1, 3} of a 3/2 split.
  const std::vector<std::uint8_t> zeros(16, 0);
  const auto shares = shamir_split(zeros, 3, 2, rng);
  const std::vector<SecretShare> subset{shares[0], shares[2]};
  CHECK(shamir_reconstruct(subset, 2) == zeros);

  CHECK_THROWS_AS(shamir_split(secret, 0, 1, rng), ConfigError);
  CHECK_THROWS_AS(shamir_split(secret, 256, 26, rng), ConfigError);
  CHECK_THROWS_AS(shamir_split(secret, 5, 6, rng), ConfigError);
  CHECK_THROWS_AS(shamir_split({}, 3, 2, rng), std::invalid_argument);

  const std::vector<SecretShare> duplicate{shares[0], shares[0]};
  CHECK_THROWS_AS(shamir_reconstruct(duplicate, 2), std::invalid_argument);

  std::vector<SecretShare> mismatched{shares[0], shares[1]};
  mismatched[1].payload.pop_back();
  CHECK_THROWS_AS(shamir_reconstruct(mismatched, 2), std::invalid_argument);
}

TEST_CASE("shamir shares lie on the polynomial the oracle predicts") {
  // For a 3/2 split each byte is a degree-1 polynomial. Recover its slope
  // from shares 1 and 2 with independent GF arithmetic and predict share 3.
  DeterministicRandom rng(26, "crypto shamir oracle");
  const auto secret = make_secret(24, 50);
  const auto shares = shamir_split(secret, 3, 2, rng);
  for (std::size_t p = 0; p < secret.size(); ++p) {
    const std::uint8_t y1 = shares[0].payload[p];
    const std::uint8_t y2 = shares[1].payload[p];
    // slope = (y1 ^ y2) / (x1 ^ x2); x1=1, x2=2 so x1 ^ x2 = 3.
    std::uint8_t slope = 0;
    for (int g = 0; g < 256; ++g) {
      if (gf_mul_oracle(static_cast<std::uint8_t>(g), 3) == (y1 ^ y2)) {
        slope = static_cast<std::uint8_t>(g);
        break;
      }
    }
    const std::uint8_t a0 = y1 ^ gf_mul_oracle(slope, 1);
    CHECK(a0 == secret[p]);
    CHECK((a0 ^ gf_mul_oracle(slope, 3)) == shares[2].payload[p]);
  }
}

TEST_CASE("prg expansion is deterministic and in range") {
  const Seed seed = make_seed(9);
  const std::uint64_t m = (std::uint64_t{1} << 24) - 3;
  const auto a = prg_expand(seed, 10000, m);
  const auto b = prg_expand(seed, 10000, m);
  CHECK(a == b);
  CHECK(std::all_of(a.values().begin(), a.values().end(),
                    [&](std::uint64_t v) { return v < m; }));
  CHECK(prg_expand(make_seed(10), 10000, m) != a);
  CHECK_THROWS_AS(prg_expand(seed, 0, m), std::invalid_argument);
}

TEST_CASE("prg output mean is unbiased to within 1%") {
  const std::uint64_t m = std::uint64_t{1} << 24;
  const auto v = prg_expand(make_seed(11), 1000000, m);
  long double sum = 0;
  for (std::uint64_t x : v.values()) sum += static_cast<long double>(x);
  const double mean = static_cast<double>(sum / 1000000.0L);
  const double expected = static_cast<double>(m - 1) / 2.0;
  CHECK(std::fabs(mean - expected) < 0.01 * expected);
}

TEST_CASE("seeds: length, freshness, reproducibility") {
  SystemRandom sys;
  const Seed a = secure_random_seed(sys);
  const Seed b = secure_random_seed(sys);
  CHECK(a.size() == 16);
  CHECK(a != b);

  DeterministicRandom d1(31, "seed stream");
  DeterministicRandom d2(31, "seed stream");
  CHECK(secure_random_seed(d1) == secure_random_seed(d2));
  CHECK(secure_random_seed(d1) == secure_random_seed(d2));
}

TEST_CASE("deterministic random streams and uniform draws") {
  DeterministicRandom a(5, "stream");
  DeterministicRandom b(5, "stream");
  DeterministicRandom c(6, "stream");
  std::vector<std::uint8_t> buf_a(64), buf_b(64), buf_c(64);
  a.fill(buf_a);
  b.fill(buf_b);
  c.fill(buf_c);
  CHECK(buf_a == buf_b);
  CHECK(buf_a != buf_c);

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i) {
    const auto v = a.uniform(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(a.uniform(1) == 0);
  CHECK_THROWS_AS(a.uniform(0), std::invalid_argument);
}

TEST_CASE("subkey derivation separates labels and indices") {
  SymmetricKey key{};
  key.fill(42);
  CHECK(derive_subkey(key, "a") != derive_subkey(key, "b"));
  CHECK(derive_subkey(key, "a", 0) != derive_subkey(key, "a", 1));
  CHECK(derive_subkey(key, "a", 1) == derive_subkey(key, "a", 1));
}
