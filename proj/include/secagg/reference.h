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

// Reference computations and self-check suites. The plaintext average here
// is double-precision arithmetic over clipped inputs and deliberately shares
// no code with the masked aggregation path it is used to check.

#ifndef SECAGG_REFERENCE_H_
#define SECAGG_REFERENCE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "secagg/simulation.h"

namespace secagg {

// Weighted average of the survivors' clipped vectors, with weights capped at
// max_weights_factor. This is what a round's aggregate must approximate.
RealVector plaintext_weighted_average(const std::vector<ClientInput>& inputs,
                                      const std::vector<std::uint32_t>& ids,
                                      double clipping_range,
                                      std::uint64_t max_weights_factor);

// Worst-case per-element deviation introduced by quantization: 2c / (T - 1).
double quantization_tolerance(double clipping_range,
                              std::uint64_t target_range);

struct VerifyFailure {
  std::string check;
  std::string detail;
  std::uint64_t seed = 0;
};

struct VerifyReport {
  int cases = 0;
  std::vector<VerifyFailure> failures;

  bool ok() const { return failures.empty(); }
  void merge(const VerifyReport& other);
};

// Exhaustive small-n suite: every dropout subset at every stage 0..3 for
// n = 2..max_n (complete graph). Rounds keeping >= limit survivors must match
// the survivor-set oracle within the quantization tolerance; the rest must
// abort with no output. Also checks survivor-set nesting and share hygiene.
VerifyReport verify_dropout_equivalence(std::uint32_t max_n,
                                        std::uint64_t master_seed);

// Random (seed, n <= 8, k) instances: the signed sum of all pairwise mask
// contributions over the complete survivor set must vanish mod m. With
// inject_sign_flip the ledger is computed with one deliberately wrong sign
// and the check must fail; that proves the harness detects sign bugs.
VerifyReport verify_mask_cancellation(int instances, std::uint64_t master_seed,
                                      bool inject_sign_flip = false);

// A single-client round must return that client's clipped vector.
VerifyReport verify_single_client(std::uint64_t master_seed);

}  // namespace secagg

#endif  // SECAGG_REFERENCE_H_
