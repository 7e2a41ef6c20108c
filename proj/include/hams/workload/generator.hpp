/*
 * Copyright 2026 The hams-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hams/workload/trace.hpp"

namespace hams::workload {

/// coldRd visits distinct `stride_bytes` regions of the footprint in random
/// order, so every access is a first touch.
enum class WorkloadKind : std::uint8_t { kSeqRd, kRndRd, kSeqWr, kRndWr, kMixed, kColdRd };

std::string to_string(WorkloadKind kind);
std::optional<WorkloadKind> parse_workload_kind(const std::string& name);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kRndRd;
  std::uint64_t footprint_bytes = 64 * 1024 * 1024;
  std::uint64_t count = 10'000;
  std::uint32_t access_bytes = 4096;
  std::uint64_t seed = 1;
  /// Spacing between record ticks. 0 issues everything at tick 0 and leaves
  /// pacing to the closed-loop driver.
  std::uint64_t interarrival_ps = 0;
  /// Share of stores in the mixed kind.
  double store_fraction = 0.5;
  /// Distance between consecutive coldRd accesses.
  std::uint64_t stride_bytes = 128 * 1024;
};

/// Deterministic for a given spec. Random kinds draw uniform addresses
/// aligned to access_bytes; sequential kinds stride by access_bytes and wrap
/// at the footprint.
std::vector<TraceRecord> generate(const WorkloadSpec& spec);

}  // namespace hams::workload
