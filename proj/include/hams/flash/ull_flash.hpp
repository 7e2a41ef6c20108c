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
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hams/mos/page_content.hpp"
#include "hams/nvme/command.hpp"
#include "hams/sim/sim_time.hpp"

namespace hams::flash {

struct FlashGeometry {
  std::uint32_t channels = 16;
  std::uint32_t dies_per_channel = 4;
  std::uint32_t planes_per_die = 2;
  std::uint32_t flash_page_bytes = 4096;
  /// 2: every flash page is split in halves served by two channels.
  std::uint32_t channel_stripe = 2;
  std::uint64_t read_ps = 3'000'000;
  std::uint64_t program_ps = 100'000'000;
  double channel_bytes_per_s = 800e6;

  std::uint32_t channel_groups() const { return channels / channel_stripe; }
  sim::SimTime channel_dma(std::uint64_t bytes) const {
    return sim::transfer_time(bytes, channel_bytes_per_s);
  }
  void validate() const;
};

/// SSD-internal DRAM of the baseline device. Absent in the advanced design.
struct BufferConfig {
  bool enabled = true;
  std::uint64_t capacity_bytes = 512ULL * 1024 * 1024;
  std::uint64_t access_latency_ps = 50'000;
  double bytes_per_s = 12.8e9;

  sim::SimTime access(std::uint64_t bytes) const {
    return sim::SimTime{access_latency_ps} + sim::transfer_time(bytes, bytes_per_s);
  }
};

/// One channel-sized slice of an NVMe command after HIL splitting.
struct SubRequest {
  std::uint16_t parent_cid = 0;
  std::uint32_t channel = 0;
  std::uint32_t die = 0;
  std::uint64_t ppn = 0;
  std::uint64_t lpn = 0;
  std::uint32_t bytes = 0;

  bool operator==(const SubRequest&) const = default;
};

/// Page-level mapping. Physical pages are handed out round-robin over
/// (channel group, die) so consecutive writes land on different channels
/// first and different dies second. No garbage collection.
class Ftl {
 public:
  struct State {
    std::unordered_map<std::uint64_t, std::uint64_t> map;
    std::unordered_set<std::uint64_t> invalid;
    std::uint64_t next_free = 0;

    bool operator==(const State&) const = default;
  };

  Ftl(const FlashGeometry& geo, std::uint64_t physical_pages);

  std::optional<std::uint64_t> lookup(std::uint64_t lpn) const;
  /// Mapped ppn, or the static home of a never-written page.
  std::uint64_t translate(std::uint64_t lpn) const;
  /// Out-of-place update. Throws SimError(kCapacityExhausted) when every
  /// physical page has been used once.
  std::uint64_t allocate(std::uint64_t lpn);
  bool is_invalid(std::uint64_t ppn) const { return state_.invalid.contains(ppn); }

  std::uint32_t group_of(std::uint64_t ppn) const;
  std::uint32_t die_of(std::uint64_t ppn) const;

  const State& state() const { return state_; }
  void restore(State s) { state_ = std::move(s); }
  std::uint64_t physical_pages() const { return physical_pages_; }

 private:
  FlashGeometry geo_;
  std::uint64_t physical_pages_;
  State state_;
};

/// Flash interface layer: channel and die occupancy.
class FlashInterface {
 public:
  struct Service {
    sim::SimTime start;
    sim::SimTime end;
  };
  struct Occupancy {
    sim::SimTime start;
    sim::SimTime end;
    std::uint32_t channel;
    std::uint32_t die;
    bool is_dma;
  };

  explicit FlashInterface(const FlashGeometry& geo);

  /// Read: array sense on the die, then the data out over the channel. The
  /// die stays held until its data register drains.
  Service read(const SubRequest& sub, sim::SimTime now);
  /// Program: data in over the channel, then the array program.
  Service program(const SubRequest& sub, sim::SimTime now);

  sim::SimTime channel_free(std::uint32_t ch) const { return channel_free_[ch]; }
  sim::SimTime die_free(std::uint32_t ch, std::uint32_t die) const {
    return die_free_[ch * geo_.dies_per_channel + die];
  }

  void set_recording(bool on) { recording_ = on; }
  const std::vector<Occupancy>& history() const { return history_; }
  std::uint64_t channel_bytes() const { return channel_bytes_; }

 private:
  FlashGeometry geo_;
  std::vector<sim::SimTime> channel_free_;
  std::vector<sim::SimTime> die_free_;
  bool recording_ = false;
  std::vector<Occupancy> history_;
  std::uint64_t channel_bytes_ = 0;
};

/// What survives power loss inside the device.
struct PersistentFlash {
  std::map<std::uint64_t, mos::PageContent> pages;  // by lba; absent = zero
  Ftl::State ftl;

  bool operator==(const PersistentFlash&) const = default;
};

struct FlashCounters {
  std::uint64_t read_bytes = 0;
  std::uint64_t program_bytes = 0;
  std::uint64_t buffer_bytes = 0;
  std::uint64_t buffer_hits = 0;
  std::uint64_t commands = 0;
};

/// The ULL-Flash device: HIL splitting, FTL, FIL timing and the optional
/// internal DRAM buffer. Content is tracked per NVMe lba (one MoS page).
class UllFlash {
 public:
  UllFlash(const FlashGeometry& geo, const BufferConfig& buffer,
           std::uint64_t lba_bytes, std::uint64_t capacity_bytes,
           mos::ContentMode mode);

  /// Splits per flash page, then per channel stripe. Writes allocate new
  /// physical pages; reads use the current mapping.
  std::vector<SubRequest> hil_split(const nvme::NvmeCommand& cmd);

  /// Physical page currently backing a logical flash page.
  std::uint64_t ftl_translate(std::uint64_t lpn) const { return ftl_.translate(lpn); }

  /// Services one sub-request on the FIL. Returns its completion time.
  sim::SimTime fil_service(const SubRequest& sub, sim::SimTime now,
                           nvme::Opcode op);

  /// Timing of a read command started at `now`. Content is sampled by the
  /// caller through logical_content() when the data leaves the device.
  sim::SimTime execute_read(const nvme::NvmeCommand& cmd, sim::SimTime now);

  /// Timing of a write whose payload is inside the device at `data_ready`.
  /// Without the buffer, or with FUA, this is the program completion. With
  /// the buffer it is the insert acknowledgement; the program happens in
  /// the background.
  sim::SimTime execute_write(const nvme::NvmeCommand& cmd,
                             sim::SimTime data_ready);

  /// Makes a completed write visible. Buffered writes stay in the buffer
  /// until their destage finishes.
  void commit_write(const nvme::NvmeCommand& cmd, const mos::PageContent& data,
                    sim::SimTime now);

  /// Moves destaged buffer pages into flash.
  void advance(sim::SimTime now);

  /// Power-loss path: the supercap writes every dirty buffer page to flash.
  void supercap_flush();

  const mos::PageContent& logical_content(std::uint64_t lba) const;
  const mos::PageContent& flash_content(std::uint64_t lba) const;

  bool buffer_enabled() const { return buffer_cfg_.enabled; }
  bool buffer_resident(std::uint64_t lba) const { return buffer_.contains(lba); }
  std::size_t buffer_dirty_pages() const;
  std::uint64_t buffer_occupancy_bytes() const {
    return buffer_.size() * lba_bytes_;
  }

  /// Lbas with content in flash or in the buffer.
  std::vector<std::uint64_t> stored_lbas() const;

  PersistentFlash persistent_state() const;
  void restore(const PersistentFlash& image);

  const FlashGeometry& geometry() const { return geo_; }
  const FlashCounters& counters() const { return counters_; }
  FlashInterface& fil() { return fil_; }
  const Ftl& ftl() const { return ftl_; }
  std::uint32_t units_per_lba() const { return units_per_lba_; }

 private:
  struct BufferEntry {
    mos::PageContent content;
    bool dirty = false;
    sim::SimTime destage_done;
    std::uint64_t last_use = 0;
  };

  sim::SimTime buffer_access(std::uint64_t bytes, sim::SimTime now);
  sim::SimTime make_room(sim::SimTime now);
  sim::SimTime media_read(const nvme::NvmeCommand& cmd, sim::SimTime now);
  sim::SimTime media_program(const nvme::NvmeCommand& cmd, sim::SimTime now);

  FlashGeometry geo_;
  BufferConfig buffer_cfg_;
  std::uint64_t lba_bytes_;
  std::uint32_t units_per_lba_;
  mos::ContentMode mode_;
  Ftl ftl_;
  FlashInterface fil_;
  std::map<std::uint64_t, mos::PageContent> pages_;
  std::map<std::uint64_t, BufferEntry> buffer_;
  std::map<std::uint64_t, sim::SimTime> pending_buffer_writes_;
  sim::SimTime buffer_free_;
  std::uint64_t use_clock_ = 0;
  FlashCounters counters_;
  mos::PageContent zero_;
};

}  // namespace hams::flash
