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

#include "secagg/reference.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secagg/masking.h"

namespace secagg {
namespace {

std::string format_ids(const std::vector<std::uint32_t>& ids) {
  std::ostringstream oss;
  oss << "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) oss << ",";
    oss << ids[i];
  }
  oss << "}";
  return oss.str();
}

bool nested(const std::vector<std::uint32_t>& outer,
            const std::vector<std::uint32_t>& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

}  // namespace

RealVector plaintext_weighted_average(const std::vector<ClientInput>& inputs,
                                      const std::vector<std::uint32_t>& ids,
                                      double clipping_range,
                                      std::uint64_t max_weights_factor) {
  if (ids.empty()) {
    throw std::invalid_argument("survivor set must not be empty");
  }
  const std::size_t l = inputs.front().values.size();
  RealVector sum(l, 0.0);
  double weight_sum = 0.0;
  for (std::uint32_t id : ids) {
    const auto& input = inputs.at(id);
    const double w = static_cast<double>(
        std::min<std::uint64_t>(input.weight, max_weights_factor));
    weight_sum += w;
    for (std::size_t i = 0; i < l; ++i) {
      const double clipped = std::fmin(
          std::fmax(input.values[i], -clipping_range), clipping_range);
      sum[i] += w * clipped;
    }
  }
  for (double& v : sum) v /= weight_sum;
  return sum;
}

double quantization_tolerance(double clipping_range,
                              std::uint64_t target_range) {
  return 2.0 * clipping_range / static_cast<double>(target_range - 1);
}

void VerifyReport::merge(const VerifyReport& other) {
  cases += other.cases;
  failures.insert(failures.end(), other.failures.begin(),
                  other.failures.end());
}

VerifyReport verify_dropout_equivalence(std::uint32_t max_n,
                                        std::uint64_t master_seed) {
  VerifyReport report;
  DeterministicRandom rng(master_seed, "verify dropout equivalence");

  for (std::uint32_t n = 2; n <= max_n; ++n) {
    SecAggParams params;
    params.max_weights_factor = 4;
    params.target_range = std::uint64_t{1} << 14;
    params.clipping_range = 3.0;
    params.min_frac = 0.01;  // limit collapses to the threshold
    const std::uint64_t l = 6;
    const auto inputs = random_inputs(n, l, 3.5, 4, rng);

    const SecAggConfig probe = validate(fill_defaults(params, n, l), n, l);
    const double tol =
        quantization_tolerance(probe.clipping_range, probe.target_range);

    for (int stage = 0; stage <= 3; ++stage) {
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        RoundSpec spec;
        spec.params = params;
        spec.inputs = inputs;
        spec.master_seed = master_seed ^ (std::uint64_t{mask} << 8) ^
                           static_cast<std::uint64_t>(stage);
        std::vector<std::uint32_t> dropped;
        for (std::uint32_t i = 0; i < n; ++i) {
          if (mask & (1u << i)) {
            spec.schedule.events.push_back({i, stage});
            dropped.push_back(i);
          }
        }

        const RoundOutcome outcome = run_round(spec);
        ++report.cases;
        auto fail = [&](const std::string& detail) {
          std::ostringstream oss;
          oss << "n=" << n << " stage=" << stage << " dropped="
              << format_ids(dropped) << ": " << detail;
          report.failures.push_back(
              {"dropout_equivalence", oss.str(), spec.master_seed});
        };

        for (int s = 1; s <= 4; ++s) {
          if (!nested(outcome.survivors[s - 1], outcome.survivors[s])) {
            fail("survivor sets not nested at stage " + std::to_string(s));
          }
        }
        if (outcome.dual_secret_breach) {
          fail("server collected threshold shares of both secrets");
        }

        const std::uint32_t alive = n - static_cast<std::uint32_t>(
                                            dropped.size());
        const bool expect_abort = alive < outcome.config.min_clients;
        if (expect_abort) {
          if (outcome.result.has_value() || !outcome.abort.has_value()) {
            fail("expected abort with no output");
          }
          continue;
        }
        if (!outcome.result.has_value()) {
          fail("expected completion but round aborted: " +
               (outcome.abort ? outcome.abort->message : "no abort info"));
          continue;
        }

        // The oracle runs over the clients whose vectors entered the sum.
        const auto& u3 = outcome.survivors[3];
        const RealVector expected = plaintext_weighted_average(
            spec.inputs, u3, outcome.config.clipping_range,
            outcome.config.max_weights_factor);
        const RealVector& got = outcome.result->aggregate;
        if (got.size() != expected.size()) {
          fail("aggregate length mismatch");
          continue;
        }
        for (std::size_t i = 0; i < got.size(); ++i) {
          if (std::fabs(got[i] - expected[i]) > tol) {
            std::ostringstream oss;
            oss << "element " << i << ": got " << got[i] << ", oracle "
                << expected[i] << ", tolerance " << tol;
            fail(oss.str());
            break;
          }
        }
      }
    }
  }
  return report;
}

VerifyReport verify_mask_cancellation(int instances, std::uint64_t master_seed,
                                      bool inject_sign_flip) {
  VerifyReport report;
  DeterministicRandom rng(master_seed, "verify mask cancellation");
  const std::uint64_t modulus = std::uint64_t{1} << 24;
  const std::size_t length = 16;

  for (int inst = 0; inst < instances; ++inst) {
    const auto n = static_cast<std::uint32_t>(2 + rng.uniform(7));  // 2..8
    std::uint32_t k = n;
    if (n >= 3 && rng.uniform(2) == 1) {
      // Random odd k < n.
      const std::uint32_t odd_choices = (n - 1) / 2;  // 1, 3, ..., < n
      k = 1 + 2 * static_cast<std::uint32_t>(rng.uniform(odd_choices));
    }
    const NeighborGraph graph = build_neighbor_graph(n, k);

    std::vector<KeyPair> mask_keys(n);
    for (auto& kp : mask_keys) kp = generate_keypair(rng);

    FieldVector ledger = FieldVector::zeros(length, modulus);
    bool flipped = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j : graph.neighbors_of(i)) {
        if (j == i) continue;
        const Seed seed = derive_pairwise_seed(mask_keys[i].secret,
                                               mask_keys[j].public_key);
        int sign = pairwise_sign(i, j);
        if (inject_sign_flip && !flipped) {
          sign = -sign;
          flipped = true;
        }
        const FieldVector mask = prg_expand(seed, length, modulus);
        if (sign > 0) {
          add_in_place(ledger, mask);
        } else {
          sub_in_place(ledger, mask);
        }
      }
    }

    ++report.cases;
    const bool is_zero = std::all_of(ledger.values().begin(),
                                     ledger.values().end(),
                                     [](std::uint64_t v) { return v == 0; });
    if (!is_zero) {
      std::ostringstream oss;
      oss << "instance " << inst << " (n=" << n << ", k=" << k
          << "): nonzero residue, element 0 = " << ledger[0];
      report.failures.push_back(
          {"mask_cancellation", oss.str(), master_seed});
    }
  }
  return report;
}

VerifyReport verify_single_client(std::uint64_t master_seed) {
  VerifyReport report;
  DeterministicRandom rng(master_seed, "verify single client");

  RoundSpec spec;
  spec.params.clipping_range = 2.0;
  spec.params.target_range = std::uint64_t{1} << 16;
  spec.inputs = random_inputs(1, 32, 2.5, 1, rng);
  spec.master_seed = master_seed;

  const RoundOutcome outcome = run_round(spec);
  ++report.cases;
  if (!outcome.result.has_value()) {
    report.failures.push_back(
        {"single_client", "single-client round aborted", master_seed});
    return report;
  }
  const double tol = quantization_tolerance(outcome.config.clipping_range,
                                            outcome.config.target_range);
  const auto& got = outcome.result->aggregate;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double clipped =
        std::fmin(std::fmax(spec.inputs[0].values[i],
                            -outcome.config.clipping_range),
                  outcome.config.clipping_range);
    if (std::fabs(got[i] - clipped) > tol) {
      std::ostringstream oss;
      oss << "element " << i << ": got " << got[i] << ", clipped input "
          << clipped;
      report.failures.push_back({"single_client", oss.str(), master_seed});
      return report;
    }
  }
  return report;
}

}  // namespace secagg
