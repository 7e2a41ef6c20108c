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

#include "hams/nvdimm/nvdimm.hpp"

#include <algorithm>
#include <sstream>

#include "hams/error.hpp"

namespace hams::nvdimm {

sim::SimTime Ddr4Timing::transfer(std::uint64_t bytes) const {
  const std::uint64_t beats = (bytes + 63) / 64;
  sim::SimTime burst{beats * tburst_ps};
  // A misconfigured tBURST must not let the bus beat its peak rate.
  burst = sim::max(burst, sim::transfer_time(bytes, peak_bw_bytes_per_s));
  return sim::SimTime{tcl_ps} + burst;
}

void Ddr4Timing::validate() const {
  if (tcl_ps == 0 || tburst_ps == 0 || !(peak_bw_bytes_per_s > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "DDR4 timing parameters must be positive");
  }
}

PinnedLayout PinnedLayout::compute(std::uint32_t queue_depth,
                                   std::uint32_t prp_slots,
                                   std::uint64_t page_size,
                                   std::uint32_t msi_vectors,
                                   std::uint32_t wait_capacity) {
  auto align = [](std::uint64_t v, std::uint64_t a) {
    return (v + a - 1) / a * a;
  };
  PinnedLayout l;
  l.sq_offset = 0;
  l.cq_offset = l.sq_offset + std::uint64_t{queue_depth} * nvme::kCommandBytes;
  const std::uint64_t cq_end =
      l.cq_offset + std::uint64_t{queue_depth} * nvme::kCompletionBytes;
  l.prp_offset = align(cq_end, std::max<std::uint64_t>(page_size, 4096));
  l.msi_offset = l.prp_offset + std::uint64_t{prp_slots} * page_size;
  l.wait_offset = l.msi_offset + std::uint64_t{msi_vectors} * kMsiRecordBytes;
  l.total_bytes = l.wait_offset + std::uint64_t{wait_capacity} * kWaitRecordBytes;
  return l;
}

Nvdimm::Nvdimm(const mos::MosConfig& cfg, const Ddr4Timing& timing,
               const NvdimmParams& params)
    : cfg_(cfg), timing_(timing), params_(params), zero_(params.content_mode) {
  cfg_.validate();
  timing_.validate();
  if (params.queue_depth < 2 || params.queue_depth > 65536) {
    raise(ErrorCode::kInvalidConfig, "queue depth must be within [2, 65536]");
  }
  if (params.prp_slots == 0) {
    raise(ErrorCode::kInvalidConfig, "PRP pool needs at least one slot");
  }
  layout_ = PinnedLayout::compute(params.queue_depth, params.prp_slots,
                                  cfg.page_size_bytes, params.msi_vectors,
                                  params.wait_capacity);
  if (layout_.total_bytes > cfg.pinned_bytes) {
    std::ostringstream msg;
    msg << "pinned region needs " << layout_.total_bytes << " bytes but only "
        << cfg.pinned_bytes << " are reserved";
    raise(ErrorCode::kInvalidConfig, msg.str());
  }
  state_.tags.assign(cfg.num_sets(), TagEntry{});
  auto& p = state_.pinned;
  p.sq.assign(params.queue_depth, nvme::NvmeCommand{});
  p.cq.assign(params.queue_depth, nvme::CompletionEntry{});
  p.prp_slots.assign(params.prp_slots, mos::PageContent(params.content_mode));
  p.prp_free.assign(params.prp_slots, true);
  p.msi_table.assign(params.msi_vectors, MsiVector{});
  for (std::uint32_t v = 0; v < params.msi_vectors; ++v) {
    p.msi_table[v] = MsiVector{0xFEE00000ULL, v, false};
  }
}

void Nvdimm::check_set(std::uint64_t set) const {
  if (set >= state_.tags.size()) {
    raise(ErrorCode::kAddressOutOfRange, "set index beyond tag-array");
  }
}

Nvdimm::LineRead Nvdimm::read_line(std::uint64_t set,
                                   std::uint64_t fetch_bytes) const {
  check_set(set);
  return LineRead{state_.tags[set], &frame(set), timing_.transfer(fetch_bytes)};
}

sim::SimTime Nvdimm::write_line(std::uint64_t set, const TagEntry& entry,
                                const mos::PageContent& page,
                                std::uint64_t write_bytes) {
  check_set(set);
  set_tag(set, entry);
  write_frame(set, page);
  return timing_.transfer(write_bytes);
}

const TagEntry& Nvdimm::tag(std::uint64_t set) const {
  check_set(set);
  return state_.tags[set];
}

void Nvdimm::set_tag(std::uint64_t set, const TagEntry& entry) {
  check_set(set);
  if (entry.dirty && !entry.valid) {
    raise(ErrorCode::kInvariantViolation, "dirty bit on an invalid set");
  }
  state_.tags[set] = entry;
}

const mos::PageContent& Nvdimm::frame(std::uint64_t set) const {
  auto it = state_.frames.find(set);
  return it == state_.frames.end() ? zero_ : it->second;
}

mos::PageContent& Nvdimm::mutable_frame(std::uint64_t set) {
  check_set(set);
  auto it = state_.frames.find(set);
  if (it == state_.frames.end()) {
    it = state_.frames.emplace(set, mos::PageContent(params_.content_mode)).first;
  }
  return it->second;
}

void Nvdimm::write_frame(std::uint64_t set, const mos::PageContent& page) {
  check_set(set);
  if (page.is_zero()) {
    state_.frames.erase(set);
  } else {
    state_.frames.insert_or_assign(set, page);
  }
}

std::uint64_t Nvdimm::frame_address(std::uint64_t set) const {
  check_set(set);
  return set * cfg_.page_size_bytes;
}

std::uint64_t Nvdimm::prp_slot_address(std::uint32_t slot) const {
  if (slot >= state_.pinned.prp_slots.size()) {
    raise(ErrorCode::kAddressOutOfRange, "PRP slot beyond pool");
  }
  return cfg_.pinned_base() + layout_.prp_offset +
         std::uint64_t{slot} * cfg_.page_size_bytes;
}

std::optional<std::uint64_t> Nvdimm::set_of_address(std::uint64_t addr) const {
  if (addr % cfg_.page_size_bytes != 0) return std::nullopt;
  const std::uint64_t set = addr / cfg_.page_size_bytes;
  if (set >= state_.tags.size()) return std::nullopt;
  return set;
}

std::optional<std::uint32_t> Nvdimm::slot_of_address(std::uint64_t addr) const {
  const std::uint64_t base = cfg_.pinned_base() + layout_.prp_offset;
  if (addr < base || (addr - base) % cfg_.page_size_bytes != 0) {
    return std::nullopt;
  }
  const std::uint64_t slot = (addr - base) / cfg_.page_size_bytes;
  if (slot >= state_.pinned.prp_slots.size()) return std::nullopt;
  return static_cast<std::uint32_t>(slot);
}

const mos::PageContent& Nvdimm::content_at(std::uint64_t prp) const {
  if (auto set = set_of_address(prp)) return frame(*set);
  if (auto slot = slot_of_address(prp)) return state_.pinned.prp_slots[*slot];
  raise(ErrorCode::kAddressOutOfRange, "PRP does not name a frame or slot");
}

void Nvdimm::write_at(std::uint64_t prp, const mos::PageContent& page) {
  if (auto set = set_of_address(prp)) {
    write_frame(*set, page);
    return;
  }
  if (auto slot = slot_of_address(prp)) {
    state_.pinned.prp_slots[*slot] = page;
    return;
  }
  raise(ErrorCode::kAddressOutOfRange, "PRP does not name a frame or slot");
}

std::optional<std::uint32_t> Nvdimm::allocate_prp_slot() {
  auto& free = state_.pinned.prp_free;
  for (std::uint32_t i = 0; i < free.size(); ++i) {
    if (free[i]) {
      free[i] = false;
      return i;
    }
  }
  return std::nullopt;
}

void Nvdimm::free_prp_slot(std::uint32_t slot) {
  auto& p = state_.pinned;
  if (slot >= p.prp_free.size() || p.prp_free[slot]) {
    raise(ErrorCode::kInvariantViolation, "freeing a PRP slot that is not held");
  }
  p.prp_free[slot] = true;
  p.prp_slots[slot] = mos::PageContent(params_.content_mode);
}

std::uint32_t Nvdimm::free_prp_slots() const {
  std::uint32_t n = 0;
  for (bool f : state_.pinned.prp_free) n += f ? 1 : 0;
  return n;
}

void Nvdimm::restore_snapshot(NvdimmState state) {
  if (state.tags.size() != state_.tags.size() ||
      state.pinned.sq.size() != state_.pinned.sq.size() ||
      state.pinned.prp_slots.size() != state_.pinned.prp_slots.size()) {
    raise(ErrorCode::kInvalidConfig, "snapshot geometry does not match DIMM");
  }
  state_ = std::move(state);
}

}  // namespace hams::nvdimm
