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

#include "secagg/modfield.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "secagg/errors.h"

namespace secagg {
namespace {

void check_modulus(std::uint64_t modulus) {
  if (modulus < 2 || modulus > kFieldModulusCap) {
    throw std::invalid_argument("field modulus must be in [2, 2^62]");
  }
}

void check_ranges(double clipping_range, std::uint64_t target_range) {
  if (!(clipping_range > 0) || !std::isfinite(clipping_range)) {
    throw ConfigError(ConfigField::kClippingRange,
                      "clipping_range must be a positive finite real");
  }
  if (target_range < 2) {
    throw ConfigError(ConfigField::kTargetRange, "target_range must be >= 2");
  }
}

void check_compatible(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("field vector length mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
  if (a.modulus() != b.modulus()) {
    throw std::invalid_argument("field vector modulus mismatch");
  }
}

}  // namespace

FieldVector::FieldVector(std::vector<std::uint64_t> values,
                         std::uint64_t modulus)
    : values_(std::move(values)), modulus_(modulus) {
  check_modulus(modulus_);
  for (std::uint64_t v : values_) {
    if (v >= modulus_) {
      throw std::invalid_argument("field vector element >= modulus");
    }
  }
}

FieldVector FieldVector::zeros(std::size_t size, std::uint64_t modulus) {
  check_modulus(modulus);
  return from_reduced(std::vector<std::uint64_t>(size, 0), modulus);
}

FieldVector FieldVector::from_reduced(std::vector<std::uint64_t> values,
                                      std::uint64_t modulus) {
  check_modulus(modulus);
  FieldVector out;
  out.values_ = std::move(values);
  out.modulus_ = modulus;
  return out;
}

std::vector<std::uint64_t> quantize(const RealVector& x, double clipping_range,
                                    std::uint64_t target_range) {
  check_ranges(clipping_range, target_range);
  const double c = clipping_range;
  const double scale = static_cast<double>(target_range - 1) / (2.0 * c);
  std::vector<std::uint64_t> out;
  out.reserve(x.size());
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("quantize: non-finite input element");
    }
    const double clipped = std::fmin(std::fmax(v, -c), c);
    const double mapped = std::floor((clipped + c) * scale + 0.5);
    // Clamp guards against FP edge effects at the top of the range.
    const double top = static_cast<double>(target_range - 1);
    out.push_back(static_cast<std::uint64_t>(std::fmin(mapped, top)));
  }
  return out;
}

RealVector dequantize(const std::vector<std::uint64_t>& q,
                      double clipping_range, std::uint64_t target_range) {
  check_ranges(clipping_range, target_range);
  RealVector out;
  out.reserve(q.size());
  const double c = clipping_range;
  const double step = 2.0 * c / static_cast<double>(target_range - 1);
  for (std::uint64_t v : q) {
    if (v > target_range - 1) {
      throw std::invalid_argument("dequantize: element out of range");
    }
    out.push_back(static_cast<double>(v) * step - c);
  }
  return out;
}

RealVector dequantize(const RealVector& q, double clipping_range,
                      std::uint64_t target_range) {
  check_ranges(clipping_range, target_range);
  RealVector out;
  out.reserve(q.size());
  const double c = clipping_range;
  const double step = 2.0 * c / static_cast<double>(target_range - 1);
  for (double v : q) {
    out.push_back(v * step - c);
  }
  return out;
}

void add_in_place(FieldVector& a, const FieldVector& b) {
  check_compatible(a, b);
  const std::uint64_t m = a.modulus_;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    std::uint64_t s = a.values_[i] + b.values_[i];  // < 2^63, no overflow
    a.values_[i] = s >= m ? s - m : s;
  }
}

void sub_in_place(FieldVector& a, const FieldVector& b) {
  check_compatible(a, b);
  const std::uint64_t m = a.modulus_;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const std::uint64_t x = a.values_[i];
    const std::uint64_t y = b.values_[i];
    a.values_[i] = x >= y ? x - y : x + m - y;
  }
}

FieldVector vec_add_mod(const FieldVector& a, const FieldVector& b) {
  FieldVector out = a;
  add_in_place(out, b);
  return out;
}

FieldVector vec_sub_mod(const FieldVector& a, const FieldVector& b) {
  FieldVector out = a;
  sub_in_place(out, b);
  return out;
}

FieldVector extend_with_weight(const std::vector<std::uint64_t>& q,
                               std::uint64_t weight,
                               std::uint64_t max_weights_factor,
                               std::uint64_t modulus) {
  check_modulus(modulus);
  if (weight < 1) {
    throw std::invalid_argument("weight must be >= 1");
  }
  if (max_weights_factor < 1) {
    throw ConfigError(ConfigField::kMaxWeightsFactor,
                      "max_weights_factor must be >= 1");
  }
  const std::uint64_t w = std::min(weight, max_weights_factor);
  std::vector<std::uint64_t> out;
  out.reserve(q.size() + 1);
  out.push_back(w % modulus);
  for (std::uint64_t v : q) {
    const auto prod = static_cast<unsigned __int128>(w) * v;
    out.push_back(static_cast<std::uint64_t>(prod % modulus));
  }
  return FieldVector::from_reduced(std::move(out), modulus);
}

RealVector pop_weight_and_divide(const FieldVector& agg) {
  if (agg.size() < 2) {
    throw std::invalid_argument(
        "aggregate must carry a weight slot plus at least one element");
  }
  const std::uint64_t weight_sum = agg[0];
  if (weight_sum == 0) {
    throw std::invalid_argument("aggregate weight sum is zero");
  }
  RealVector out;
  out.reserve(agg.size() - 1);
  for (std::size_t i = 1; i < agg.size(); ++i) {
    out.push_back(static_cast<double>(agg[i]) /
                  static_cast<double>(weight_sum));
  }
  return out;
}

}  // namespace secagg
