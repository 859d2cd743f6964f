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

#include <sstream>

#include "secagg/config.h"
#include "secagg/errors.h"
#include "secagg/simulation.h"

using namespace secagg;

namespace {

ConfigField violated(const SecAggParams& params, std::uint32_t n,
                     std::uint64_t l) {
  try {
    validate(params, n, l);
  } catch (const ConfigError& e) {
    return e.field();
  }
  FAIL("expected a config error");
  return ConfigField::kParse;
}

}  // namespace

TEST_CASE("empty params resolve to a full configuration") {
  const auto params = fill_defaults({}, 100, 1000);
  CHECK(params.share_num == 51);
  CHECK(params.threshold == 27);  // ceil(51/2) + 1
  CHECK(params.clipping_range == 3.0);
  CHECK(params.target_range == 65536);
  CHECK(params.max_weights_factor == 1);
  // Smallest power of two >= 1 * 65536 * 100.
  CHECK(params.mod_range == std::uint64_t{1} << 23);
  CHECK(params.min_frac == 0.9);
  CHECK(!params.min_num.has_value());

  const auto cfg = validate(params, 100, 1000);
  CHECK(cfg.n == 100);
  CHECK(cfg.l == 1000);
  CHECK(cfg.min_clients == 90);
}

TEST_CASE("threshold default follows a given share_num") {
  auto params = SecAggParams{};
  params.share_num = 10;
  const auto filled = fill_defaults(params, 100, 10);
  CHECK(filled.threshold == 6);

  params.share_num = 1;
  CHECK(fill_defaults(params, 100, 10).threshold == 1);  // capped
}

TEST_CASE("provided fields pass through untouched") {
  SecAggParams params;
  params.min_num = 7;
  params.min_frac = 0.5;
  params.share_num = 9;
  params.threshold = 5;
  params.clipping_range = 1.5;
  params.target_range = 1 << 10;
  params.max_weights_factor = 8;
  params.mod_range = std::uint64_t{1} << 30;
  const auto filled = fill_defaults(params, 50, 10);
  CHECK(filled.min_num == 7);
  CHECK(filled.min_frac == 0.5);
  CHECK(filled.share_num == 9);
  CHECK(filled.threshold == 5);
  CHECK(filled.clipping_range == 1.5);
  CHECK(filled.target_range == 1 << 10);
  CHECK(filled.max_weights_factor == 8);
  CHECK(filled.mod_range == std::uint64_t{1} << 30);
}

TEST_CASE("capacity check: mod_range one below the product fails") {
  SecAggParams params;
  params.share_num = 51;
  params.threshold = 26;
  params.max_weights_factor = 16;
  params.target_range = 65536;
  params.mod_range = 104857599;  // 16 * 65536 * 100 - 1
  params.clipping_range = 3.0;
  CHECK(violated(params, 100, 10) == ConfigField::kModRangeCapacity);

  params.mod_range = 104857600;
  CHECK(validate(params, 100, 10).mod_range == 104857600);
}

TEST_CASE("constraint violations carry distinct fields") {
  SecAggParams base = fill_defaults({}, 100, 10);

  auto params = base;
  params.threshold = 26;
  params.share_num = 25;
  CHECK(violated(params, 100, 10) == ConfigField::kThreshold);

  params = base;
  params.share_num = 101;
  CHECK(violated(params, 100, 10) == ConfigField::kShareNum);

  params = base;
  params.mod_range = (std::uint64_t{1} << 40) + 1;
  CHECK(violated(params, 100, 10) == ConfigField::kModRangeBias);

  params = base;
  params.target_range = 1;
  CHECK(violated(params, 100, 10) == ConfigField::kTargetRange);

  params = base;
  params.clipping_range = -2.0;
  CHECK(violated(params, 100, 10) == ConfigField::kClippingRange);

  params = base;
  params.max_weights_factor = 0;
  CHECK(violated(params, 100, 10) == ConfigField::kMaxWeightsFactor);

  params = base;
  params.min_frac = 1.5;
  CHECK(violated(params, 100, 10) == ConfigField::kMinFrac);

  params = base;
  params.min_num = 0;
  CHECK(violated(params, 100, 10) == ConfigField::kMinNum);

  // share_num above the GF(256) index bound.
  SecAggParams big = fill_defaults({}, 300, 10);
  big.share_num = 256;
  big.threshold = 100;
  big.mod_range.reset();
  big = fill_defaults(big, 300, 10);
  CHECK(violated(big, 300, 10) == ConfigField::kShareNumBound);
}

TEST_CASE("paper configuration validates") {
  SecAggParams params;
  params.share_num = 51;
  params.threshold = 26;
  const auto cfg = validate(fill_defaults(params, 100, 10), 100, 10);
  CHECK(cfg.share_num == 51);
  CHECK(cfg.threshold == 26);
}

TEST_CASE("even share_num below n is bumped with a warning") {
  SecAggParams params;
  params.share_num = 4;
  params.threshold = 3;
  const auto cfg = validate(fill_defaults(params, 10, 10), 10, 10);
  CHECK(cfg.share_num == 5);
  REQUIRE(cfg.warnings.size() == 1);

  // k == n needs no parity fix.
  SecAggParams complete;
  complete.share_num = 4;
  complete.threshold = 3;
  const auto cfg2 = validate(fill_defaults(complete, 4, 10), 4, 10);
  CHECK(cfg2.share_num == 4);
  CHECK(cfg2.warnings.empty());
}

TEST_CASE("minimum clients limit resolution") {
  SecAggParams params;
  params.share_num = 5;
  params.threshold = 3;
  params.min_num = 5;
  params.min_frac = 0.1;
  auto cfg = validate(fill_defaults(params, 100, 10), 100, 10);
  CHECK(min_clients_limit(cfg) == 5);  // min(5, ceil(0.1*100)) = 5

  params.min_frac.reset();
  params.min_num = 5;
  cfg = validate(fill_defaults(params, 100, 10), 100, 10);
  CHECK(min_clients_limit(cfg) == 5);

  // Floored at the threshold: an output below it could not be reconstructed.
  SecAggParams strict;
  strict.share_num = 51;
  strict.threshold = 26;
  strict.min_num = 2;
  cfg = validate(fill_defaults(strict, 100, 10), 100, 10);
  CHECK(min_clients_limit(cfg) == 26);
}

TEST_CASE("validate after fill_defaults is idempotent") {
  SecAggParams params;
  params.share_num = 4;  // gets bumped to 5
  const auto cfg = validate(fill_defaults(params, 10, 10), 10, 10);

  SecAggParams resolved;
  resolved.share_num = cfg.share_num;
  resolved.threshold = cfg.threshold;
  resolved.clipping_range = cfg.clipping_range;
  resolved.target_range = cfg.target_range;
  resolved.max_weights_factor = cfg.max_weights_factor;
  resolved.mod_range = cfg.mod_range;
  resolved.min_num = cfg.min_num;
  resolved.min_frac = cfg.min_frac;

  const auto cfg2 = validate(fill_defaults(resolved, 10, 10), 10, 10);
  CHECK(cfg2.share_num == cfg.share_num);
  CHECK(cfg2.threshold == cfg.threshold);
  CHECK(cfg2.mod_range == cfg.mod_range);
  CHECK(cfg2.min_clients == cfg.min_clients);
  CHECK(cfg2.warnings.empty());
}

TEST_CASE("every accepted config admits a zero-dropout round at the limit") {
  // n = threshold forces share_num = threshold = n.
  for (std::uint32_t n : {1u, 3u, 5u}) {
    SecAggParams params;
    params.share_num = n;
    params.threshold = n;
    DeterministicRandom rng(n, "config smoke");
    RoundSpec spec;
    spec.params = params;
    spec.inputs = random_inputs(n, 4, 2.0, 1, rng);
    spec.master_seed = 77 + n;
    const auto outcome = run_round(spec);
    CHECK(outcome.result.has_value());
  }
}

TEST_CASE("params file parsing") {
  std::istringstream good(
      "# round parameters\n"
      "share_num = 51\n"
      "threshold=26\n"
      "clipping_range = 4.5\n"
      "\n"
      "max_weights_factor = 16   # capped weights\n");
  const auto params = parse_params_stream(good);
  CHECK(params.share_num == 51);
  CHECK(params.threshold == 26);
  CHECK(params.clipping_range == 4.5);
  CHECK(params.max_weights_factor == 16);
  CHECK(!params.mod_range.has_value());

  std::istringstream unknown("wibble = 3\n");
  CHECK_THROWS_AS(parse_params_stream(unknown), ConfigError);

  std::istringstream bad_value("share_num = many\n");
  CHECK_THROWS_AS(parse_params_stream(bad_value), ConfigError);

  std::istringstream no_eq("share_num 51\n");
  CHECK_THROWS_AS(parse_params_stream(no_eq), ConfigError);

  CHECK_THROWS_AS(parse_params_file("/nonexistent/params.conf"), ConfigError);
}
