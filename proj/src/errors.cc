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

#include "secagg/errors.h"

namespace secagg {

const char* to_string(ConfigField field) {
  switch (field) {
    case ConfigField::kClientCount: return "client_count";
    case ConfigField::kVectorLength: return "vector_length";
    case ConfigField::kShareNum: return "share_num";
    case ConfigField::kShareNumBound: return "share_num_bound";
    case ConfigField::kThreshold: return "threshold";
    case ConfigField::kClippingRange: return "clipping_range";
    case ConfigField::kTargetRange: return "target_range";
    case ConfigField::kMaxWeightsFactor: return "max_weights_factor";
    case ConfigField::kModRangeCapacity: return "mod_range_capacity";
    case ConfigField::kModRangeBias: return "mod_range_bias";
    case ConfigField::kMinNum: return "min_num";
    case ConfigField::kMinFrac: return "min_frac";
    case ConfigField::kParse: return "parse";
  }
  return "unknown";
}

const char* to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::kTooFewClients: return "too_few_clients";
    case AbortReason::kShareReconstructionFailed:
      return "share_reconstruction_failed";
    case AbortReason::kKeyReconstructionMismatch:
      return "key_reconstruction_mismatch";
    case AbortReason::kZeroWeightSum: return "zero_weight_sum";
  }
  return "unknown";
}

}  // namespace secagg
