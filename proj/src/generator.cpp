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

#include "hams/workload/generator.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "hams/error.hpp"

namespace hams::workload {

std::string to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kSeqRd: return "seqRd";
    case WorkloadKind::kRndRd: return "rndRd";
    case WorkloadKind::kSeqWr: return "seqWr";
    case WorkloadKind::kRndWr: return "rndWr";
    case WorkloadKind::kMixed: return "mixed";
    case WorkloadKind::kColdRd: return "coldRd";
  }
  return "?";
}

std::optional<WorkloadKind> parse_workload_kind(const std::string& name) {
  for (auto k : {WorkloadKind::kSeqRd, WorkloadKind::kRndRd, WorkloadKind::kSeqWr,
                 WorkloadKind::kRndWr, WorkloadKind::kMixed, WorkloadKind::kColdRd}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<TraceRecord> generate(const WorkloadSpec& spec) {
  if (spec.access_bytes == 0 || spec.footprint_bytes < spec.access_bytes) {
    raise(ErrorCode::kInvalidConfig, "footprint must hold at least one access");
  }
  if (!(spec.store_fraction >= 0.0 && spec.store_fraction <= 1.0)) {
    raise(ErrorCode::kInvalidConfig, "store_fraction must be within [0, 1]");
  }
  const std::uint64_t slots = spec.footprint_bytes / spec.access_bytes;
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, slots - 1);
  std::bernoulli_distribution store(spec.store_fraction);

  // coldRd: distinct stride slots (Floyd's sampling) in a shuffled order.
  std::vector<std::uint64_t> cold;
  if (spec.kind == WorkloadKind::kColdRd) {
    if (spec.stride_bytes < spec.access_bytes) {
      raise(ErrorCode::kInvalidConfig, "coldRd stride must cover one access");
    }
    const std::uint64_t n = spec.footprint_bytes / spec.stride_bytes;
    if (n < spec.count) {
      raise(ErrorCode::kInvalidConfig, "coldRd footprint too small for count");
    }
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = n - spec.count; j < n; ++j) {
      const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
      const std::uint64_t v = chosen.contains(t) ? j : t;
      chosen.insert(v);
      cold.push_back(v);
    }
    std::shuffle(cold.begin(), cold.end(), rng);
  }

  std::vector<TraceRecord> out;
  out.reserve(spec.count);
  for (std::uint64_t i = 0; i < spec.count; ++i) {
    TraceRecord r;
    r.tick = sim::SimTime{i * spec.interarrival_ps};
    r.size = spec.access_bytes;
    switch (spec.kind) {
      case WorkloadKind::kSeqRd:
      case WorkloadKind::kSeqWr:
        r.addr = (i % slots) * spec.access_bytes;
        break;
      case WorkloadKind::kColdRd:
        r.addr = cold[i] * spec.stride_bytes;
        break;
      default:
        r.addr = pick(rng) * spec.access_bytes;
        break;
    }
    switch (spec.kind) {
      case WorkloadKind::kSeqWr:
      case WorkloadKind::kRndWr:
        r.op = controller::AccessKind::kStore;
        break;
      case WorkloadKind::kMixed:
        r.op = store(rng) ? controller::AccessKind::kStore : controller::AccessKind::kLoad;
        break;
      default:
        r.op = controller::AccessKind::kLoad;
        break;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace hams::workload
