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
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "hams/controller/request.hpp"
#include "hams/mos/config.hpp"
#include "hams/mos/page_content.hpp"
#include "hams/nvme/command.hpp"
#include "hams/sim/sim_time.hpp"

namespace hams::nvdimm {

/// One row of the in-line MoS tag-array.
struct TagEntry {
  std::uint64_t tag = 0;
  bool valid = false;
  bool dirty = false;
  bool busy = false;

  bool operator==(const TagEntry&) const = default;
};

struct Ddr4Timing {
  std::uint64_t tcl_ps = 14'000;
  std::uint64_t tburst_ps = 3'330;  // per 64-byte beat group
  double peak_bw_bytes_per_s = 20e9;

  /// tCL + ceil(bytes/64) * tBURST, never faster than the peak bandwidth.
  sim::SimTime transfer(std::uint64_t bytes) const;
  void validate() const;
};

struct MsiVector {
  std::uint64_t address = 0;
  std::uint32_t data = 0;
  bool masked = false;

  bool operator==(const MsiVector&) const = default;
};

/// Byte offsets inside the pinned region. The order is fixed: SQ ring, CQ
/// ring, PRP pool (page aligned), MSI table, wait queue.
struct PinnedLayout {
  std::uint64_t sq_offset = 0;
  std::uint64_t cq_offset = 0;
  std::uint64_t prp_offset = 0;
  std::uint64_t msi_offset = 0;
  std::uint64_t wait_offset = 0;
  std::uint64_t total_bytes = 0;

  static constexpr std::uint64_t kWaitRecordBytes = 32;
  static constexpr std::uint64_t kMsiRecordBytes = 16;

  static PinnedLayout compute(std::uint32_t queue_depth,
                              std::uint32_t prp_slots,
                              std::uint64_t page_size,
                              std::uint32_t msi_vectors,
                              std::uint32_t wait_capacity);
};

/// NVMe bookkeeping that lives in the MMU-invisible part of the NVDIMM and
/// therefore survives power loss.
struct PinnedRegion {
  std::vector<nvme::NvmeCommand> sq;
  std::vector<nvme::CompletionEntry> cq;
  std::uint32_t sq_head = 0;
  std::uint32_t sq_tail = 0;
  std::uint32_t cq_head = 0;
  std::uint32_t cq_tail = 0;
  std::vector<mos::PageContent> prp_slots;
  std::vector<bool> prp_free;
  std::vector<MsiVector> msi_table;
  std::deque<controller::MemoryRequest> wait_queue;

  bool operator==(const PinnedRegion&) const = default;
};

/// Everything the DIMM holds. Copying it is the persist/restore operation.
struct NvdimmState {
  std::vector<TagEntry> tags;
  std::map<std::uint64_t, mos::PageContent> frames;  // sparse; absent = zero
  PinnedRegion pinned;

  bool operator==(const NvdimmState&) const = default;
};

struct NvdimmParams {
  std::uint32_t queue_depth = 16;
  std::uint32_t prp_slots = 32;
  std::uint32_t msi_vectors = 1;
  std::uint32_t wait_capacity = 1024;
  mos::ContentMode content_mode = mos::ContentMode::kExact;
};

class Nvdimm {
 public:
  Nvdimm(const mos::MosConfig& cfg, const Ddr4Timing& timing,
         const NvdimmParams& params);

  struct LineRead {
    TagEntry entry;
    const mos::PageContent* page;
    sim::SimTime latency;
  };

  /// Fetches the tag-array entry and the frame of `set`. The tag rides in
  /// the ECC bits of the line, so its cost is part of the data fetch.
  LineRead read_line(std::uint64_t set, std::uint64_t fetch_bytes) const;

  /// Replaces tag and frame of `set` in one step.
  sim::SimTime write_line(std::uint64_t set, const TagEntry& entry,
                          const mos::PageContent& page,
                          std::uint64_t write_bytes);

  const TagEntry& tag(std::uint64_t set) const;
  void set_tag(std::uint64_t set, const TagEntry& entry);

  const mos::PageContent& frame(std::uint64_t set) const;
  mos::PageContent& mutable_frame(std::uint64_t set);
  void write_frame(std::uint64_t set, const mos::PageContent& page);

  /// NVDIMM byte addresses used as PRP values.
  std::uint64_t frame_address(std::uint64_t set) const;
  std::uint64_t prp_slot_address(std::uint32_t slot) const;
  std::optional<std::uint64_t> set_of_address(std::uint64_t addr) const;
  std::optional<std::uint32_t> slot_of_address(std::uint64_t addr) const;

  /// Reads whatever a PRP points at (a frame or a pool slot).
  const mos::PageContent& content_at(std::uint64_t prp) const;
  void write_at(std::uint64_t prp, const mos::PageContent& page);

  std::optional<std::uint32_t> allocate_prp_slot();
  void free_prp_slot(std::uint32_t slot);
  std::uint32_t free_prp_slots() const;

  PinnedRegion& pinned() { return state_.pinned; }
  const PinnedRegion& pinned() const { return state_.pinned; }
  const PinnedLayout& layout() const { return layout_; }
  const Ddr4Timing& timing() const { return timing_; }
  const mos::MosConfig& config() const { return cfg_; }
  const NvdimmParams& params() const { return params_; }
  std::uint64_t num_sets() const { return state_.tags.size(); }

  NvdimmState persist_snapshot() const { return state_; }
  void restore_snapshot(NvdimmState state);
  const NvdimmState& state() const { return state_; }

 private:
  void check_set(std::uint64_t set) const;

  mos::MosConfig cfg_;
  Ddr4Timing timing_;
  NvdimmParams params_;
  PinnedLayout layout_;
  NvdimmState state_;
  mos::PageContent zero_;
};

}  // namespace hams::nvdimm
