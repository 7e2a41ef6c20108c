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

#include "hams/mos/config.hpp"

namespace hams::mos {

/// A byte address in the MoS space.
struct MosAddress {
  std::uint64_t value = 0;

  constexpr auto operator<=>(const MosAddress&) const = default;
};

struct AddressParts {
  std::uint64_t tag = 0;
  std::uint64_t index = 0;
  std::uint64_t offset = 0;

  bool operator==(const AddressParts&) const = default;
};

/// Splits an address into (tag, index, offset). The set count need not be a
/// power of two, so index and tag come from division rather than bit slices.
AddressParts decompose(MosAddress addr, const MosConfig& cfg);

/// Exact inverse of decompose().
MosAddress recompose(const AddressParts& parts, const MosConfig& cfg);

inline std::uint64_t page_number(MosAddress addr, const MosConfig& cfg) {
  return addr.value / cfg.page_size_bytes;
}

inline std::uint64_t set_of_page(std::uint64_t page, const MosConfig& cfg) {
  return page % cfg.num_sets();
}

inline std::uint64_t tag_of_page(std::uint64_t page, const MosConfig& cfg) {
  return page / cfg.num_sets();
}

inline std::uint64_t page_of(std::uint64_t tag, std::uint64_t set,
                             const MosConfig& cfg) {
  return tag * cfg.num_sets() + set;
}

}  // namespace hams::mos
