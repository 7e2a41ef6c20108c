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
#include <random>
#include <vector>

#include "hams/controller/system.hpp"

namespace hams::testing {

/// A MoS space whose cache holds `sets` pages.
inline controller::SystemConfig small_system(std::uint64_t sets,
                                             controller::Datapath dp,
                                             nvme::Mode mode) {
  controller::SystemConfig cfg;
  cfg.mos.nvdimm_bytes = cfg.mos.pinned_bytes + sets * cfg.mos.page_size_bytes;
  cfg.datapath = dp;
  cfg.mode = mode;
  return cfg;
}

inline controller::MemoryRequest request(std::uint64_t id, controller::AccessKind kind,
                                         std::uint64_t addr, std::uint32_t size,
                                         sim::SimTime at = {}) {
  controller::MemoryRequest r;
  r.req_id = id;
  r.kind = kind;
  r.addr = mos::MosAddress{addr};
  r.size_bytes = size;
  r.issue_time = at;
  return r;
}

/// Random 64-byte loads and stores over `pages` MoS pages.
inline std::vector<controller::MemoryRequest> mixed_trace(
    const mos::MosConfig& mos, std::size_t count, std::uint64_t pages,
    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<controller::MemoryRequest> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto kind =
        rng() % 2 ? controller::AccessKind::kStore : controller::AccessKind::kLoad;
    const std::uint64_t page = rng() % pages;
    const std::uint64_t off = (rng() % (mos.page_size_bytes / 64)) * 64;
    out.push_back(request(i + 1, kind, page * mos.page_size_bytes + off, 64));
  }
  return out;
}

}  // namespace hams::testing
