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

#include "secagg/masking.h"

#include <algorithm>
#include <stdexcept>

#include "secagg/errors.h"

namespace secagg {

const std::vector<std::uint32_t>& NeighborGraph::neighbors_of(
    std::uint32_t id) const {
  if (id >= n) {
    throw std::invalid_argument("client id out of range");
  }
  return adjacency[id];
}

bool NeighborGraph::are_neighbors(std::uint32_t a, std::uint32_t b) const {
  const auto& nbrs = neighbors_of(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

NeighborGraph build_neighbor_graph(std::uint32_t n, std::uint32_t k) {
  if (n < 1) {
    throw ConfigError(ConfigField::kClientCount, "need at least one client");
  }
  if (k < 1 || k > n) {
    throw ConfigError(ConfigField::kShareNum,
                      "neighborhood size k must be in [1, n]");
  }
  if (k < n && k % 2 == 0) {
    throw ConfigError(ConfigField::kShareNum,
                      "k must be odd when k < n (ring topology)");
  }

  NeighborGraph g{n, k, {}};
  g.adjacency.resize(n);
  if (k == n) {
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    for (std::uint32_t i = 0; i < n; ++i) g.adjacency[i] = all;
    return g;
  }
  const std::uint32_t half = (k - 1) / 2;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto& nbrs = g.adjacency[i];
    nbrs.reserve(k);
    nbrs.push_back(i);
    for (std::uint32_t d = 1; d <= half; ++d) {
      nbrs.push_back((i + d) % n);
      nbrs.push_back((i + n - d) % n);
    }
    std::sort(nbrs.begin(), nbrs.end());
  }
  return g;
}

int pairwise_sign(std::uint32_t i, std::uint32_t j) {
  if (i == j) {
    throw std::invalid_argument("pairwise sign undefined for i == j");
  }
  return i < j ? 1 : -1;
}

Seed derive_pairwise_seed(const SecretKey& my_mask_secret,
                          std::span<const std::uint8_t> their_mask_public) {
  const SymmetricKey derived =
      key_agree(my_mask_secret, their_mask_public, kPairwiseMaskContext);
  Seed seed{};
  std::copy_n(derived.begin(), seed.size(), seed.begin());
  return seed;
}

FieldVector compute_masked_vector(
    const FieldVector& extended, const Seed& self_seed,
    const std::map<std::uint32_t, Seed>& pairwise_seeds, std::uint32_t my_id) {
  if (pairwise_seeds.contains(my_id)) {
    throw ProtocolError("pairwise seed map must not contain the client itself");
  }
  FieldVector y = vec_add_mod(
      extended, prg_expand(self_seed, extended.size(), extended.modulus()));
  for (const auto& [j, seed] : pairwise_seeds) {
    FieldVector mask = prg_expand(seed, extended.size(), extended.modulus());
    if (pairwise_sign(my_id, j) > 0) {
      add_in_place(y, mask);
    } else {
      sub_in_place(y, mask);
    }
  }
  return y;
}

FieldVector dropout_pairwise_mask_total(
    std::uint32_t dropped_id, const SecretKey& dropped_mask_secret,
    const std::map<std::uint32_t, PublicKey>& surviving_neighbor_publics,
    std::size_t length, std::uint64_t modulus) {
  FieldVector total = FieldVector::zeros(length, modulus);
  for (const auto& [v, pub] : surviving_neighbor_publics) {
    if (v == dropped_id) {
      throw ProtocolError("dropped client listed among its own survivors");
    }
    const Seed seed = derive_pairwise_seed(dropped_mask_secret, pub);
    FieldVector mask = prg_expand(seed, length, modulus);
    // The survivor v added sign(v, dropped_id) * mask to its own vector.
    if (pairwise_sign(v, dropped_id) > 0) {
      add_in_place(total, mask);
    } else {
      sub_in_place(total, mask);
    }
  }
  return total;
}

}  // namespace secagg
