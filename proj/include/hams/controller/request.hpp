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

#include "hams/mos/address.hpp"
#include "hams/sim/sim_time.hpp"

namespace hams::controller {

enum class AccessKind : std::uint8_t { kLoad, kStore };

/// One MMU access. Never spans a page boundary; the trace reader splits.
struct MemoryRequest {
  sim::SimTime issue_time;
  AccessKind kind = AccessKind::kLoad;
  mos::MosAddress addr;
  std::uint32_t size_bytes = 0;
  std::uint64_t req_id = 0;

  bool operator==(const MemoryRequest&) const = default;
};

}  // namespace hams::controller
