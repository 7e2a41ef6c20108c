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

namespace hams::mos {

inline constexpr std::uint64_t kKiB = 1024ULL;
inline constexpr std::uint64_t kMiB = 1024ULL * kKiB;
inline constexpr std::uint64_t kGiB = 1024ULL * kMiB;

/// Geometry of the memory-over-storage space. The NVDIMM minus its pinned
/// region is a direct-mapped cache of `num_sets()` pages over the flash
/// capacity.
struct MosConfig {
  std::uint64_t page_size_bytes = 128 * kKiB;
  std::uint64_t nvdimm_bytes = 8 * kGiB;
  std::uint64_t pinned_bytes = 512 * kMiB;
  std::uint64_t flash_bytes = 800'000'000'000ULL;

  std::uint64_t cache_bytes() const { return nvdimm_bytes - pinned_bytes; }
  std::uint64_t num_sets() const { return cache_bytes() / page_size_bytes; }
  std::uint64_t flash_pages() const { return flash_bytes / page_size_bytes; }
  /// First NVDIMM byte of the pinned region (the upper part of the DIMM).
  std::uint64_t pinned_base() const { return nvdimm_bytes - pinned_bytes; }

  /// Throws SimError(kInvalidConfig) when an invariant does not hold.
  void validate() const;

  bool operator==(const MosConfig&) const = default;
};

}  // namespace hams::mos
