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
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hams/nvdimm/nvdimm.hpp"
#include "hams/nvme/command.hpp"

namespace hams::nvme {

/// Persist: FUA on every write and a single command in flight.
/// Extend: parallel NVMe operation, crash safety from the journal tags.
enum class Mode : std::uint8_t { kPersist, kExtend };

/// The controller-side NVMe queue engine. All ring state (slots, journal
/// tags, the four pointers) lives in the pinned NVDIMM region passed in, so
/// a fresh engine built over a restored region sees the pre-crash picture.
///
/// Ring conventions: the host produces at sq_tail and consumes completions
/// at cq_head; the device consumes at sq_head and produces at cq_tail.
/// A slot may not be reused while its journal tag is still set, because the
/// tag is the only record of the command after a power loss.
class NvmeEngine {
 public:
  NvmeEngine(nvdimm::PinnedRegion& pinned, Mode mode);

  std::uint32_t depth() const {
    return static_cast<std::uint32_t>(pinned_.sq.size());
  }
  Mode mode() const { return mode_; }
  void set_mode(Mode mode) { mode_ = mode; }

  void set_sq_doorbell(std::function<void()> fn) { sq_doorbell_ = std::move(fn); }
  void set_cq_doorbell(std::function<void()> fn) { cq_doorbell_ = std::move(fn); }

  /// Builds a command with a fresh cid. FUA is set on writes in persist mode.
  NvmeCommand compose(Opcode opcode, std::uint64_t prp, std::uint64_t lba,
                      std::uint32_t length_bytes);
  /// Returns a composed cid that will never be submitted.
  void abandon(std::uint16_t cid) { reserved_.erase(cid); }

  /// True when the mode gate lets another command in.
  bool gate_open() const;
  bool sq_full() const;
  bool can_submit() const { return gate_open() && !sq_full(); }

  /// Writes the command into the slot at sq_tail with its journal tag set,
  /// advances the tail and rings the SQ doorbell. Returns the slot.
  std::uint32_t submit(NvmeCommand cmd);

  /// Device side: takes the next entry in FIFO order, advancing sq_head.
  std::optional<NvmeCommand> device_fetch();
  /// Device side: posts a CQE for `cid` at cq_tail.
  void device_post_completion(std::uint16_t cid);

  /// Host side interrupt handler: consumes the CQE at cq_head, clears the
  /// journal tag of the matching SQ slot, advances cq_head and rings the CQ
  /// doorbell. Throws SimError(kUnknownCid) if the CQE names a command that
  /// is not outstanding.
  NvmeCommand on_msi();

  /// Re-enqueues every journaled command into a freshly reset ring pair,
  /// oldest first, and rings the doorbell.
  std::vector<NvmeCommand> recover();

  /// Commands whose journal tag is set, oldest first.
  std::vector<NvmeCommand> outstanding_commands() const;
  std::size_t outstanding() const { return by_cid_.size(); }
  bool is_outstanding(std::uint16_t cid) const { return by_cid_.contains(cid); }
  std::size_t pending_completions() const;

  /// Cross-check between the journal and the ring pointers: the number of
  /// tagged slots equals the submissions the host has not yet retired.
  bool offsets_consistent() const;

 private:
  void rebuild_index();

  nvdimm::PinnedRegion& pinned_;
  Mode mode_;
  std::unordered_map<std::uint16_t, std::uint32_t> by_cid_;  // cid -> slot
  std::unordered_set<std::uint16_t> reserved_;
  std::uint32_t next_cid_ = 0;
  std::function<void()> sq_doorbell_;
  std::function<void()> cq_doorbell_;
};

}  // namespace hams::nvme
