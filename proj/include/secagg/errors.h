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

#ifndef SECAGG_ERRORS_H_
#define SECAGG_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace secagg {

// One code per validated configuration constraint, so callers can report the
// exact violation instead of a generic "bad config".
enum class ConfigField {
  kClientCount,
  kVectorLength,
  kShareNum,
  kShareNumBound,  // GF(256) share indices: share_num <= 255
  kThreshold,
  kClippingRange,
  kTargetRange,
  kMaxWeightsFactor,
  kModRangeCapacity,  // mod_range >= max_weights_factor * target_range * n
  kModRangeBias,      // mod_range <= 2^40 keeps PRG modulo bias negligible
  kMinNum,
  kMinFrac,
  kParse,  // config file/flag could not be parsed at all
};

const char* to_string(ConfigField field);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigField field, const std::string& message)
      : std::runtime_error(message), field_(field) {}

  ConfigField field() const { return field_; }

 private:
  ConfigField field_;
};

// A state machine was driven out of order (e.g. a stage handler invoked
// twice). Programming or harness error, not a peer failure.
class StateError : public std::logic_error {
  using std::logic_error::logic_error;
};

// A peer sent something that violates the protocol contract (unknown sender,
// malformed payload, conflicting share request, ...).
class ProtocolError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// AEAD decryption failed: wrong key or tampered ciphertext. Kept distinct
// from ProtocolError so transport bugs and integrity failures never blur.
class AuthenticationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AbortReason : std::uint8_t {
  kTooFewClients = 1,
  kShareReconstructionFailed = 2,
  kKeyReconstructionMismatch = 3,
  kZeroWeightSum = 4,
};

const char* to_string(AbortReason reason);

// Raised by the server when a round cannot continue. The transport turns it
// into ABORT broadcasts; no aggregate is ever produced past this point.
class AbortError : public std::runtime_error {
 public:
  AbortError(AbortReason reason, int stage, const std::string& message)
      : std::runtime_error(message), reason_(reason), stage_(stage) {}

  AbortReason reason() const { return reason_; }
  int stage() const { return stage_; }

 private:
  AbortReason reason_;
  int stage_;
};

}  // namespace secagg

#endif  // SECAGG_ERRORS_H_
