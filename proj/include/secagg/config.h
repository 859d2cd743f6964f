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

// Protocol parameter ingestion: default filling, validation, and the
// resolved per-round configuration shared by server and clients.

#ifndef SECAGG_CONFIG_H_
#define SECAGG_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace secagg {

// mod_range cap. With 8 stream bytes reduced per element, a modulus up to
// 2^40 keeps the per-element modulo bias below 2^-24.
inline constexpr std::uint64_t kModRangeBiasCap = std::uint64_t{1} << 40;

// Raw user input; every field optional. fill_defaults() resolves the gaps.
struct SecAggParams {
  std::optional<std::uint32_t> min_num;
  std::optional<double> min_frac;  // in (0, 1]
  std::optional<std::uint32_t> share_num;
  std::optional<std::uint32_t> threshold;
  std::optional<double> clipping_range;
  std::optional<std::uint64_t> target_range;
  std::optional<std::uint64_t> max_weights_factor;
  std::optional<std::uint64_t> mod_range;
};

// Fully resolved and validated round parameters. Immutable after validate();
// freely shareable across tasks.
struct SecAggConfig {
  std::uint32_t n = 0;   // sampled clients
  std::uint64_t l = 0;   // model vector length
  std::uint32_t share_num = 0;  // also the neighborhood size k
  std::uint32_t threshold = 0;
  double clipping_range = 0;
  std::uint64_t target_range = 0;
  std::uint64_t max_weights_factor = 0;
  std::uint64_t mod_range = 0;
  std::optional<std::uint32_t> min_num;
  std::optional<double> min_frac;
  std::uint32_t min_clients = 0;  // resolved limit, floored at threshold
  std::vector<std::string> warnings;  // e.g. even share_num bumped
};

// Replaces missing fields with defaults; provided fields are untouched.
// Defaults: share_num = min(n, 51), threshold = ceil(share_num/2)+1 capped
// at share_num, clipping_range = 3, target_range = 2^16,
// max_weights_factor = 1, mod_range = next power of two >=
// max_weights_factor * target_range * n, min_frac = 0.9.
SecAggParams fill_defaults(SecAggParams params, std::uint32_t n,
                           std::uint64_t l);

// Checks every invariant and resolves the minimum-clients limit. Throws
// ConfigError naming the violated constraint. Bumps an even share_num < n to
// the next odd value (ring topology needs odd k) and records a warning.
SecAggConfig validate(const SecAggParams& params, std::uint32_t n,
                      std::uint64_t l);

// The minimum number of clients that must stay alive for a round to produce
// output: min(min_num, ceil(min_frac * n)) when both are given, the provided
// one otherwise, and never below the reconstruction threshold.
std::uint32_t min_clients_limit(const SecAggConfig& config);

// Flat key=value text, one parameter per line; '#' starts a comment.
// Unknown keys and unparsable values are config errors.
SecAggParams parse_params_stream(std::istream& in);
SecAggParams parse_params_file(const std::string& path);

}  // namespace secagg

#endif  // SECAGG_CONFIG_H_
