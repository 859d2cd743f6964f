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

#include "secagg/config.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "secagg/errors.h"

namespace secagg {
namespace {

std::uint64_t next_power_of_two(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

std::uint32_t ceil_frac(double frac, std::uint32_t n) {
  return static_cast<std::uint32_t>(
      std::ceil(frac * static_cast<double>(n) - 1e-9));
}

}  // namespace

SecAggParams fill_defaults(SecAggParams params, std::uint32_t n,
                           std::uint64_t l) {
  if (n < 1) {
    throw ConfigError(ConfigField::kClientCount, "need at least one client");
  }
  if (l < 1) {
    throw ConfigError(ConfigField::kVectorLength,
                      "vector length must be >= 1");
  }
  if (!params.share_num) {
    params.share_num = std::min<std::uint32_t>(n, 51);
  }
  if (!params.threshold) {
    const std::uint32_t k = *params.share_num;
    params.threshold = std::min(k, k / 2 + k % 2 + 1);  // ceil(k/2)+1, <= k
  }
  if (!params.clipping_range) params.clipping_range = 3.0;
  if (!params.target_range) params.target_range = std::uint64_t{1} << 16;
  if (!params.max_weights_factor) params.max_weights_factor = 1;
  if (!params.mod_range) {
    const auto needed = static_cast<unsigned __int128>(*params.target_range) *
                        *params.max_weights_factor * n;
    if (needed > std::numeric_limits<std::uint64_t>::max()) {
      throw ConfigError(ConfigField::kModRangeCapacity,
                        "required modulus exceeds 64 bits");
    }
    params.mod_range = next_power_of_two(static_cast<std::uint64_t>(needed));
  }
  if (!params.min_num && !params.min_frac) params.min_frac = 0.9;
  return params;
}

SecAggConfig validate(const SecAggParams& params, std::uint32_t n,
                      std::uint64_t l) {
  if (n < 1) {
    throw ConfigError(ConfigField::kClientCount, "need at least one client");
  }
  if (l < 1) {
    throw ConfigError(ConfigField::kVectorLength,
                      "vector length must be >= 1");
  }

  SecAggConfig cfg;
  cfg.n = n;
  cfg.l = l;
  cfg.share_num = params.share_num.value_or(0);
  cfg.threshold = params.threshold.value_or(0);
  cfg.clipping_range = params.clipping_range.value_or(0);
  cfg.target_range = params.target_range.value_or(0);
  cfg.max_weights_factor = params.max_weights_factor.value_or(0);
  cfg.mod_range = params.mod_range.value_or(0);
  cfg.min_num = params.min_num;
  cfg.min_frac = params.min_frac;

  if (cfg.share_num < 1 || cfg.share_num > n) {
    throw ConfigError(
        ConfigField::kShareNum,
        "share_num must satisfy 1 <= share_num <= sampled clients (" +
            std::to_string(cfg.share_num) + " vs n=" + std::to_string(n) +
            ")");
  }
  if (cfg.share_num > 255) {
    throw ConfigError(ConfigField::kShareNumBound,
                      "share_num must be <= 255 (GF(256) share indices)");
  }
  if (cfg.share_num < n && cfg.share_num % 2 == 0) {
    cfg.share_num += 1;
    cfg.warnings.push_back(
        "share_num bumped to " + std::to_string(cfg.share_num) +
        " (ring topology needs odd k when k < n)");
  }
  if (cfg.threshold < 1 || cfg.threshold > cfg.share_num) {
    throw ConfigError(ConfigField::kThreshold,
                      "threshold must satisfy 1 <= threshold <= share_num (" +
                          std::to_string(cfg.threshold) + " vs share_num=" +
                          std::to_string(cfg.share_num) + ")");
  }
  if (!(cfg.clipping_range > 0) || !std::isfinite(cfg.clipping_range)) {
    throw ConfigError(ConfigField::kClippingRange,
                      "clipping_range must be a positive finite real");
  }
  if (cfg.target_range < 2) {
    throw ConfigError(ConfigField::kTargetRange, "target_range must be >= 2");
  }
  if (cfg.max_weights_factor < 1) {
    throw ConfigError(ConfigField::kMaxWeightsFactor,
                      "max_weights_factor must be >= 1");
  }
  const auto capacity = static_cast<unsigned __int128>(cfg.target_range) *
                        cfg.max_weights_factor * n;
  if (static_cast<unsigned __int128>(cfg.mod_range) < capacity) {
    std::ostringstream oss;
    oss << "mod_range " << cfg.mod_range
        << " below max_weights_factor*target_range*n = "
        << static_cast<std::uint64_t>(capacity);
    throw ConfigError(ConfigField::kModRangeCapacity, oss.str());
  }
  if (cfg.mod_range > kModRangeBiasCap) {
    throw ConfigError(ConfigField::kModRangeBias,
                      "mod_range must be <= 2^40 (PRG modulo-bias bound)");
  }
  if (cfg.min_num && *cfg.min_num < 1) {
    throw ConfigError(ConfigField::kMinNum, "min_num must be >= 1");
  }
  if (cfg.min_frac && !(*cfg.min_frac > 0 && *cfg.min_frac <= 1)) {
    throw ConfigError(ConfigField::kMinFrac, "min_frac must be in (0, 1]");
  }

  // Least restrictive of the two limits, then floored at the threshold so an
  // accepted round is always reconstructible.
  std::uint32_t limit;
  if (cfg.min_num && cfg.min_frac) {
    limit = std::min(*cfg.min_num, ceil_frac(*cfg.min_frac, n));
  } else if (cfg.min_num) {
    limit = *cfg.min_num;
  } else if (cfg.min_frac) {
    limit = ceil_frac(*cfg.min_frac, n);
  } else {
    limit = cfg.threshold;
  }
  cfg.min_clients = std::max(limit, cfg.threshold);
  return cfg;
}

std::uint32_t min_clients_limit(const SecAggConfig& config) {
  return config.min_clients;
}

SecAggParams parse_params_stream(std::istream& in) {
  SecAggParams params;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ConfigField::kParse,
                        "line " + std::to_string(lineno) +
                            ": expected key=value, got '" + line + "'");
    }
    auto trim = [](const std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{}
                                    : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    try {
      if (key == "min_num") {
        params.min_num = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "min_frac") {
        params.min_frac = std::stod(value);
      } else if (key == "share_num") {
        params.share_num = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "threshold") {
        params.threshold = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "clipping_range") {
        params.clipping_range = std::stod(value);
      } else if (key == "target_range") {
        params.target_range = std::stoull(value);
      } else if (key == "max_weights_factor") {
        params.max_weights_factor = std::stoull(value);
      } else if (key == "mod_range") {
        params.mod_range = std::stoull(value);
      } else {
        throw ConfigError(ConfigField::kParse,
                          "line " + std::to_string(lineno) +
                              ": unknown parameter '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError(ConfigField::kParse,
                        "line " + std::to_string(lineno) +
                            ": cannot parse value '" + value + "' for '" +
                            key + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError(ConfigField::kParse,
                        "line " + std::to_string(lineno) +
                            ": value out of range for '" + key + "'");
    }
  }
  return params;
}

SecAggParams parse_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ConfigField::kParse,
                      "cannot open config file: " + path);
  }
  return parse_params_stream(in);
}

}  // namespace secagg
