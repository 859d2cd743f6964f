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

// Real <-> quantized conversions and modular vector arithmetic. These are the
// primitives masking and aggregation are built from; all functions here are
// pure and safe to call concurrently.

#ifndef SECAGG_MODFIELD_H_
#define SECAGG_MODFIELD_H_

#include <cstdint>
#include <vector>

namespace secagg {

using RealVector = std::vector<double>;

// Elements are stored as 64-bit unsigned integers. Capping the modulus at
// 2^62 leaves headroom for one addition before reduction.
inline constexpr std::uint64_t kFieldModulusCap = std::uint64_t{1} << 62;

// Vector of integers modulo a fixed modulus. Every element is < modulus.
class FieldVector {
 public:
  FieldVector() = default;

  // Validates every element against the modulus.
  FieldVector(std::vector<std::uint64_t> values, std::uint64_t modulus);

  static FieldVector zeros(std::size_t size, std::uint64_t modulus);

  // Skips the per-element check; caller guarantees values are reduced.
  static FieldVector from_reduced(std::vector<std::uint64_t> values,
                                  std::uint64_t modulus);

  std::size_t size() const { return values_.size(); }
  std::uint64_t modulus() const { return modulus_; }
  const std::vector<std::uint64_t>& values() const { return values_; }
  std::uint64_t operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const FieldVector&, const FieldVector&) = default;

 private:
  std::vector<std::uint64_t> values_;
  std::uint64_t modulus_ = 2;

  friend void add_in_place(FieldVector&, const FieldVector&);
  friend void sub_in_place(FieldVector&, const FieldVector&);
};

// Clips each entry to [-clipping_range, clipping_range], then maps it
// affinely onto [0, target_range - 1] with deterministic round-half-up:
//   q = floor((clip(x) + c) * (T - 1) / (2c) + 0.5)
// Throws std::invalid_argument on non-finite input, ConfigError on invalid
// ranges.
std::vector<std::uint64_t> quantize(const RealVector& x, double clipping_range,
                                    std::uint64_t target_range);

// Inverse affine map: x = q * 2c / (T - 1) - c. Elements must lie in
// [0, target_range - 1].
RealVector dequantize(const std::vector<std::uint64_t>& q,
                      double clipping_range, std::uint64_t target_range);

// Same affine inverse applied to already-averaged (real-valued) quantities,
// e.g. the output of pop_weight_and_divide.
RealVector dequantize(const RealVector& q, double clipping_range,
                      std::uint64_t target_range);

// Elementwise (a + b) mod m and (a - b) mod m. Lengths and moduli must match.
FieldVector vec_add_mod(const FieldVector& a, const FieldVector& b);
FieldVector vec_sub_mod(const FieldVector& a, const FieldVector& b);
void add_in_place(FieldVector& a, const FieldVector& b);
void sub_in_place(FieldVector& a, const FieldVector& b);

// Caps the weight at max_weights_factor, multiplies every quantized entry by
// it, and prepends the capped weight: [w', w'*q0, ..., w'*q(l-1)] mod m.
FieldVector extend_with_weight(const std::vector<std::uint64_t>& q,
                               std::uint64_t weight,
                               std::uint64_t max_weights_factor,
                               std::uint64_t modulus);

// Pops the leading weight-sum slot and divides the rest by it (exact real
// division; the caller dequantizes the quotients). Throws on a zero weight
// sum or a vector too short to carry one.
RealVector pop_weight_and_divide(const FieldVector& agg);

}  // namespace secagg

#endif  // SECAGG_MODFIELD_H_
