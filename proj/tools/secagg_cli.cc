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

// Command-line harness: run single rounds, parameter sweeps over client
// count or vector size, and the verification suites. Exit codes: 0 success,
// 2 configuration error, 3 protocol abort, 4 verification failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "secagg/reference.h"
#include "secagg/report.h"
#include "secagg/simulation.h"

namespace {

using namespace secagg;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitAbort = 3;
constexpr int kExitVerifyFailed = 4;

struct CommonFlags {
  std::uint32_t clients = 20;
  std::uint64_t vector_size = 1000;
  std::optional<std::uint32_t> share_num;
  std::optional<std::uint32_t> threshold;
  std::optional<double> clipping_range;
  std::optional<std::uint64_t> target_range;
  std::optional<std::uint64_t> max_weights_factor;
  std::optional<std::uint64_t> mod_range;
  std::optional<std::uint32_t> min_num;
  std::optional<double> min_frac;
  double dropout_frac = 0.0;
  int dropout_stage = 2;
  std::uint64_t seed = 1;
  std::string csv_path;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--clients", flags->clients, "Sampled clients per round");
  cmd->add_option("--vector-size", flags->vector_size,
                  "Model vector length l");
  cmd->add_option("--share-num", flags->share_num,
                  "Shares per secret; also the neighborhood size k");
  cmd->add_option("--threshold", flags->threshold,
                  "Shares needed to reconstruct a secret");
  cmd->add_option("--clipping-range", flags->clipping_range,
                  "Inputs are clipped to [-c, c] before quantization");
  cmd->add_option("--target-range", flags->target_range,
                  "Quantized values land in [0, T-1]");
  cmd->add_option("--max-weights-factor", flags->max_weights_factor,
                  "Cap on per-client aggregation weights");
  cmd->add_option("--mod-range", flags->mod_range,
                  "Modulus of the masked arithmetic");
  cmd->add_option("--min-num", flags->min_num,
                  "Minimum surviving clients (absolute)");
  cmd->add_option("--min-frac", flags->min_frac,
                  "Minimum surviving clients (fraction of sampled)");
  cmd->add_option("--dropout-frac", flags->dropout_frac,
                  "Fraction of clients that drop out");
  cmd->add_option("--dropout-stage", flags->dropout_stage,
                  "Stage (0-3) after which dropouts go silent")
      ->check(CLI::Range(0, 3));
  cmd->add_option("--seed", flags->seed, "Master seed for the round");
  cmd->add_option("--csv", flags->csv_path, "Append CSV rows to this file");
  cmd->add_option("--config", flags->config_path,
                  "key=value parameter file; flags override it");
}

SecAggParams params_from_flags(const CommonFlags& flags) {
  SecAggParams params;
  if (!flags.config_path.empty()) {
    params = parse_params_file(flags.config_path);
  }
  if (flags.share_num) params.share_num = flags.share_num;
  if (flags.threshold) params.threshold = flags.threshold;
  if (flags.clipping_range) params.clipping_range = flags.clipping_range;
  if (flags.target_range) params.target_range = flags.target_range;
  if (flags.max_weights_factor) {
    params.max_weights_factor = flags.max_weights_factor;
  }
  if (flags.mod_range) params.mod_range = flags.mod_range;
  if (flags.min_num) params.min_num = flags.min_num;
  if (flags.min_frac) params.min_frac = flags.min_frac;
  return params;
}

RoundSpec build_spec(const SecAggParams& params, std::uint32_t n,
                     std::uint64_t l, double dropout_frac, int dropout_stage,
                     std::uint64_t seed) {
  // Resolve defaults first so the inputs land in the configured range.
  const SecAggParams filled = fill_defaults(params, n, l);
  RoundSpec spec;
  spec.params = params;
  spec.master_seed = seed;
  DeterministicRandom input_rng(seed, "cli inputs");
  spec.inputs = random_inputs(n, l, 1.1 * *filled.clipping_range,
                              *filled.max_weights_factor, input_rng);
  DeterministicRandom dropout_rng(seed, "cli dropouts");
  spec.schedule = random_dropouts(n, dropout_frac, dropout_stage,
                                  dropout_rng);
  return spec;
}

// Appends a row, writing the header first when the file is new or empty.
void append_csv(const std::string& path, const std::string& row) {
  const bool fresh =
      !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw ConfigError(ConfigField::kParse, "cannot open CSV file: " + path);
  }
  if (fresh) out << csv_header() << '\n';
  out << row << '\n';
}

int cmd_simulate(const CommonFlags& flags) {
  const SecAggParams params = params_from_flags(flags);
  const RoundSpec spec =
      build_spec(params, flags.clients, flags.vector_size, flags.dropout_frac,
                 flags.dropout_stage, flags.seed);

  if (!spec.schedule.events.empty()) {
    std::cout << "dropouts after stage " << flags.dropout_stage << ":";
    for (const auto& event : spec.schedule.events) {
      std::cout << ' ' << event.client_id;
    }
    std::cout << '\n';
  }

  const RoundOutcome outcome = run_round(spec);
  std::cout << text_report(outcome);

  if (!flags.csv_path.empty()) {
    append_csv(flags.csv_path, csv_row("clients", flags.clients,
                                       flags.dropout_frac, flags.seed,
                                       outcome));
  }
  return outcome.result.has_value() ? kExitOk : kExitAbort;
}

int cmd_sweep(const CommonFlags& flags, const std::string& axis,
              const std::vector<std::uint64_t>& values,
              std::uint32_t repetitions) {
  const SecAggParams params = params_from_flags(flags);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!flags.csv_path.empty()) {
    file.open(flags.csv_path, std::ios::app);
    if (!file) {
      throw ConfigError(ConfigField::kParse,
                        "cannot open CSV file: " + flags.csv_path);
    }
    out = &file;
  }
  *out << csv_header() << '\n';

  std::uint64_t row_index = 0;
  for (const std::uint64_t value : values) {
    for (std::uint32_t rep = 0; rep < repetitions; ++rep, ++row_index) {
      const std::uint64_t seed = flags.seed + row_index;
      const std::uint32_t n =
          axis == "clients" ? static_cast<std::uint32_t>(value)
                            : flags.clients;
      const std::uint64_t l =
          axis == "vector_size" ? value : flags.vector_size;
      try {
        const RoundSpec spec = build_spec(params, n, l, flags.dropout_frac,
                                          flags.dropout_stage, seed);
        const RoundOutcome outcome = run_round(spec);
        *out << csv_row(axis, value, flags.dropout_frac, seed, outcome)
             << '\n';
      } catch (const ConfigError& e) {
        *out << csv_error_row(axis, value, flags.dropout_frac, seed,
                              std::string("config_error:") +
                                  to_string(e.field()))
             << '\n';
      }
      out->flush();
    }
  }
  return kExitOk;
}

int cmd_verify(std::uint32_t max_n, int instances, std::uint64_t seed,
               bool inject_sign_flip) {
  VerifyReport report;
  report.merge(verify_dropout_equivalence(max_n, seed));
  std::cout << "dropout equivalence: " << report.cases << " cases\n";

  const auto cancellation =
      verify_mask_cancellation(instances, seed, inject_sign_flip);
  std::cout << "mask cancellation: " << cancellation.cases << " instances\n";
  report.merge(cancellation);

  report.merge(verify_single_client(seed));
  std::cout << "single-client round: checked\n";

  if (!report.ok()) {
    const auto& first = report.failures.front();
    std::cout << "FAIL " << first.check << ": " << first.detail
              << " (reproduce with seed " << first.seed << ")\n"
              << report.failures.size() << " of " << report.cases
              << " checks failed\n";
    return kExitVerifyFailed;
  }
  std::cout << "all " << report.cases << " checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SecAgg(+) secure-aggregation simulator and benchmarks"};
  app.require_subcommand(1);

  CommonFlags simulate_flags;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a single round");
  add_common_flags(simulate, &simulate_flags);

  CommonFlags sweep_flags;
  std::string axis = "clients";
  std::vector<std::uint64_t> values;
  std::uint32_t repetitions = 1;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run rounds along an axis, emitting CSV");
  add_common_flags(sweep, &sweep_flags);
  sweep->add_option("--axis", axis, "Sweep axis")
      ->check(CLI::IsMember({"clients", "vector_size"}));
  sweep->add_option("--values", values, "Axis values, increasing")
      ->required()
      ->delimiter(',');
  sweep->add_option("--repetitions", repetitions, "Rounds per axis value")
      ->check(CLI::PositiveNumber);

  std::uint32_t verify_max_n = 6;
  int verify_instances = 200;
  std::uint64_t verify_seed = 1;
  bool inject_sign_flip = false;
  CLI::App* verify =
      app.add_subcommand("verify", "Run the oracle verification suites");
  verify->add_option("--max-n", verify_max_n,
                     "Exhaustive dropout suite up to this client count")
      ->check(CLI::Range(2, 8));
  verify->add_option("--instances", verify_instances,
                     "Mask cancellation instances")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "Master seed for the suites");
  verify
      ->add_flag("--inject-mask-sign-flip", inject_sign_flip,
                 "Deliberately flip one pairwise sign; the suite must fail")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(simulate_flags);
    if (sweep->parsed()) {
      for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] <= values[i - 1]) {
          throw ConfigError(ConfigField::kParse,
                            "sweep values must be positive and increasing");
        }
      }
      return cmd_sweep(sweep_flags, axis, values, repetitions);
    }
    return cmd_verify(verify_max_n, verify_instances, verify_seed,
                      inject_sign_flip);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << to_string(e.field()) << ": " << e.what()
              << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
