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

// Neighbor-graph construction and the pairwise/self mask algebra. The sign
// convention (lower id adds the positive mask) is what makes pairwise masks
// cancel in the aggregate.

#ifndef SECAGG_MASKING_H_
#define SECAGG_MASKING_H_

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "secagg/crypto.h"
#include "secagg/modfield.h"

namespace secagg {

// Domain-separation labels for the two key-agreement uses.
inline constexpr std::string_view kPairwiseMaskContext = "secagg mask-seed v1";
inline constexpr std::string_view kShareEncryptionContext =
    "secagg share-enc v1";

// Symmetric k-neighborhood over n clients, self included. k = n is the
// complete graph; k < n is a ring with offsets +-1..(k-1)/2, which is
// deterministic, symmetric and (k-1)-connected.
struct NeighborGraph {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::vector<std::vector<std::uint32_t>> adjacency;  // sorted, includes self

  const std::vector<std::uint32_t>& neighbors_of(std::uint32_t id) const;
  bool are_neighbors(std::uint32_t a, std::uint32_t b) const;
};

// Requires 1 <= k <= n, and odd k whenever k < n (the config validator bumps
// even values before they get here).
NeighborGraph build_neighbor_graph(std::uint32_t n, std::uint32_t k);

// +1 if i < j, -1 if i > j; i == j is an error. Antisymmetric by
// construction, which forces pairwise masks to cancel.
int pairwise_sign(std::uint32_t i, std::uint32_t j);

// Pairwise mask seed shared by clients i and j: DH agreement on the mask key
// pair, domain-separated, truncated to seed width. Symmetric in the pair.
Seed derive_pairwise_seed(const SecretKey& my_mask_secret,
                          std::span<const std::uint8_t> their_mask_public);

// y = extended + expand(self_seed) + sum_j sign(my_id, j) * expand(s_ij),
// all mod m. `pairwise_seeds` defines the active neighbor set (graph
// neighbors still alive this round); it must not contain my_id.
FieldVector compute_masked_vector(
    const FieldVector& extended, const Seed& self_seed,
    const std::map<std::uint32_t, Seed>& pairwise_seeds, std::uint32_t my_id);

// Net pairwise-mask contribution tied to a dropped client that is still
// present in the survivors' sum: sum over surviving neighbors v of
// sign(v, dropped_id) * expand(s_{dropped,v}). The server subtracts this
// from the aggregate. Zero surviving neighbors yields the zero vector.
FieldVector dropout_pairwise_mask_total(
    std::uint32_t dropped_id, const SecretKey& dropped_mask_secret,
    const std::map<std::uint32_t, PublicKey>& surviving_neighbor_publics,
    std::size_t length, std::uint64_t modulus);

}  // namespace secagg

#endif  // SECAGG_MASKING_H_
