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

// CSV rows and the human-readable round report. The two wall-clock columns
// sit at the end of each row; everything before them is deterministic for a
// fixed seed.

#ifndef SECAGG_REPORT_H_
#define SECAGG_REPORT_H_

#include <string>
#include <string_view>

#include "secagg/simulation.h"

namespace secagg {

// axis,axis_value,dropout_frac,seed,status,abort_reason,survivors,
// aggregate_checksum,client_bytes,server_bytes,prg_elements_client,
// prg_elements_server,reconstructions,server_time_s,client_time_s
std::string csv_header();

std::string csv_row(std::string_view axis, std::uint64_t axis_value,
                    double dropout_frac, std::uint64_t seed,
                    const RoundOutcome& outcome);

// Row for a run that never produced an outcome (e.g. an invalid
// configuration); the reason lands in the abort_reason column.
std::string csv_error_row(std::string_view axis, std::uint64_t axis_value,
                          double dropout_frac, std::uint64_t seed,
                          std::string_view reason);

// Drops the trailing wall-clock columns, for determinism comparisons.
std::string strip_time_columns(std::string_view row);

// 16 hex digits over the aggregate's IEEE-754 bits; stable across runs.
std::string aggregate_checksum(const RealVector& aggregate);

std::string text_report(const RoundOutcome& outcome);

}  // namespace secagg

#endif  // SECAGG_REPORT_H_
