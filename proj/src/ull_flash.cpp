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

#include "hams/flash/ull_flash.hpp"

#include <algorithm>

#include "hams/error.hpp"

namespace hams::flash {

void FlashGeometry::validate() const {
  if (channels == 0 || dies_per_channel == 0 || planes_per_die == 0 ||
      flash_page_bytes == 0 || read_ps == 0 || program_ps == 0 ||
      !(channel_bytes_per_s > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "flash geometry fields must be positive");
  }
  if (channel_stripe != 1 && channel_stripe != 2) {
    raise(ErrorCode::kInvalidConfig, "channel_stripe must be 1 or 2");
  }
  if (channels % channel_stripe != 0) {
    raise(ErrorCode::kInvalidConfig, "channels must be a multiple of the stripe");
  }
}

// ---------------------------------------------------------------- Ftl

Ftl::Ftl(const FlashGeometry& geo, std::uint64_t physical_pages)
    : geo_(geo), physical_pages_(physical_pages) {
  if (physical_pages_ == 0) {
    raise(ErrorCode::kInvalidConfig, "flash has no physical page");
  }
}

std::optional<std::uint64_t> Ftl::lookup(std::uint64_t lpn) const {
  auto it = state_.map.find(lpn);
  if (it == state_.map.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Ftl::translate(std::uint64_t lpn) const {
  if (lpn >= physical_pages_) {
    raise(ErrorCode::kAddressOutOfRange, "logical page beyond device capacity");
  }
  return lookup(lpn).value_or(lpn);
}

std::uint64_t Ftl::allocate(std::uint64_t lpn) {
  if (lpn >= physical_pages_) {
    raise(ErrorCode::kAddressOutOfRange, "logical page beyond device capacity");
  }
  if (state_.next_free >= physical_pages_) {
    raise(ErrorCode::kCapacityExhausted,
          "no free physical page left (garbage collection is not modeled)");
  }
  const std::uint64_t ppn = state_.next_free++;
  auto [it, inserted] = state_.map.try_emplace(lpn, ppn);
  if (!inserted) {
    state_.invalid.insert(it->second);
    it->second = ppn;
  }
  return ppn;
}

std::uint32_t Ftl::group_of(std::uint64_t ppn) const {
  return static_cast<std::uint32_t>(ppn % geo_.channel_groups());
}

std::uint32_t Ftl::die_of(std::uint64_t ppn) const {
  return static_cast<std::uint32_t>((ppn / geo_.channel_groups()) %
                                    geo_.dies_per_channel);
}

// ---------------------------------------------------------------- FIL

FlashInterface::FlashInterface(const FlashGeometry& geo)
    : geo_(geo),
      channel_free_(geo.channels),
      die_free_(std::size_t{geo.channels} * geo.dies_per_channel) {}

FlashInterface::Service FlashInterface::read(const SubRequest& sub,
                                             sim::SimTime now) {
  sim::SimTime& die = die_free_[sub.channel * geo_.dies_per_channel + sub.die];
  sim::SimTime& ch = channel_free_[sub.channel];
  const sim::SimTime start = sim::max(now, die);
  const sim::SimTime sensed = start + sim::SimTime{geo_.read_ps};
  const sim::SimTime dma_start = sim::max(sensed, ch);
  const sim::SimTime end = dma_start + geo_.channel_dma(sub.bytes);
  die = end;
  ch = end;
  channel_bytes_ += sub.bytes;
  if (recording_) {
    history_.push_back({start, end, sub.channel, sub.die, false});
    history_.push_back({dma_start, end, sub.channel, sub.die, true});
  }
  return {start, end};
}

FlashInterface::Service FlashInterface::program(const SubRequest& sub,
                                                sim::SimTime now) {
  sim::SimTime& die = die_free_[sub.channel * geo_.dies_per_channel + sub.die];
  sim::SimTime& ch = channel_free_[sub.channel];
  const sim::SimTime start = sim::max(now, sim::max(die, ch));
  const sim::SimTime loaded = start + geo_.channel_dma(sub.bytes);
  const sim::SimTime end = loaded + sim::SimTime{geo_.program_ps};
  ch = loaded;
  die = end;
  channel_bytes_ += sub.bytes;
  if (recording_) {
    history_.push_back({start, end, sub.channel, sub.die, false});
    history_.push_back({start, loaded, sub.channel, sub.die, true});
  }
  return {start, end};
}

// ---------------------------------------------------------------- device

UllFlash::UllFlash(const FlashGeometry& geo, const BufferConfig& buffer,
                   std::uint64_t lba_bytes, std::uint64_t capacity_bytes,
                   mos::ContentMode mode)
    : geo_(geo),
      buffer_cfg_(buffer),
      lba_bytes_(lba_bytes),
      units_per_lba_(static_cast<std::uint32_t>(
          std::max<std::uint64_t>(1, lba_bytes / geo.flash_page_bytes))),
      mode_(mode),
      ftl_(geo, [&] {
        geo.validate();
        const std::uint64_t units = std::max<std::uint64_t>(
            1, lba_bytes / geo.flash_page_bytes);
        return capacity_bytes / lba_bytes * units;
      }()),
      fil_(geo),
      zero_(mode) {}

std::vector<SubRequest> UllFlash::hil_split(const nvme::NvmeCommand& cmd) {
  const std::uint64_t len = cmd.length_bytes == 0 ? lba_bytes_ : cmd.length_bytes;
  const std::uint32_t unit_bytes = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(len, geo_.flash_page_bytes));
  const std::uint64_t units = (len + unit_bytes - 1) / unit_bytes;
  std::vector<SubRequest> subs;
  subs.reserve(units * geo_.channel_stripe);
  for (std::uint64_t u = 0; u < units; ++u) {
    const std::uint64_t lpn = cmd.lba * units_per_lba_ + u;
    const std::uint64_t ppn = cmd.opcode == nvme::Opcode::kWrite
                                  ? ftl_.allocate(lpn)
                                  : ftl_.translate(lpn);
    const std::uint32_t group = ftl_.group_of(ppn);
    const std::uint32_t die = ftl_.die_of(ppn);
    const std::uint32_t unit_len = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(unit_bytes, len - u * unit_bytes));
    std::uint32_t left = unit_len;
    for (std::uint32_t k = 0; k < geo_.channel_stripe; ++k) {
      const std::uint32_t share =
          k + 1 == geo_.channel_stripe ? left : unit_len / geo_.channel_stripe;
      left -= share;
      subs.push_back(SubRequest{cmd.cid, group * geo_.channel_stripe + k, die,
                                ppn, lpn, share});
    }
  }
  return subs;
}

sim::SimTime UllFlash::fil_service(const SubRequest& sub, sim::SimTime now,
                                   nvme::Opcode op) {
  if (op == nvme::Opcode::kRead) {
    counters_.read_bytes += sub.bytes;
    return fil_.read(sub, now).end;
  }
  counters_.program_bytes += sub.bytes;
  return fil_.program(sub, now).end;
}

sim::SimTime UllFlash::media_read(const nvme::NvmeCommand& cmd,
                                  sim::SimTime now) {
  sim::SimTime done = now;
  for (const SubRequest& sub : hil_split(cmd)) {
    done = sim::max(done, fil_service(sub, now, nvme::Opcode::kRead));
  }
  return done;
}

sim::SimTime UllFlash::media_program(const nvme::NvmeCommand& cmd,
                                     sim::SimTime now) {
  sim::SimTime done = now;
  for (const SubRequest& sub : hil_split(cmd)) {
    done = sim::max(done, fil_service(sub, now, nvme::Opcode::kWrite));
  }
  return done;
}

sim::SimTime UllFlash::buffer_access(std::uint64_t bytes, sim::SimTime now) {
  const sim::SimTime start = sim::max(now, buffer_free_);
  buffer_free_ = start + buffer_cfg_.access(bytes);
  counters_.buffer_bytes += bytes;
  return buffer_free_;
}

sim::SimTime UllFlash::make_room(sim::SimTime now) {
  const std::uint64_t cap = std::max<std::uint64_t>(
      1, buffer_cfg_.capacity_bytes / lba_bytes_);
  while (buffer_.size() + pending_buffer_writes_.size() >= cap &&
         !buffer_.empty()) {
    auto victim = buffer_.end();
    for (auto it = buffer_.begin(); it != buffer_.end(); ++it) {
      if (!it->second.dirty &&
          (victim == buffer_.end() || it->second.last_use < victim->second.last_use)) {
        victim = it;
      }
    }
    if (victim == buffer_.end()) {
      // Everything is dirty: wait for the earliest destage.
      auto oldest = std::min_element(
          buffer_.begin(), buffer_.end(), [](const auto& a, const auto& b) {
            return a.second.destage_done < b.second.destage_done;
          });
      now = sim::max(now, oldest->second.destage_done);
      pages_.insert_or_assign(oldest->first, oldest->second.content);
      victim = oldest;
    }
    buffer_.erase(victim);
  }
  return now;
}

sim::SimTime UllFlash::execute_read(const nvme::NvmeCommand& cmd,
                                    sim::SimTime now) {
  ++counters_.commands;
  advance(now);
  const std::uint64_t len = cmd.length_bytes;
  if (buffer_cfg_.enabled) {
    auto it = buffer_.find(cmd.lba);
    if (it != buffer_.end()) {
      ++counters_.buffer_hits;
      it->second.last_use = ++use_clock_;
      return buffer_access(len, now);
    }
  }
  sim::SimTime done = media_read(cmd, now);
  if (buffer_cfg_.enabled) {
    // The payload is staged in the internal DRAM on its way to the host.
    done = buffer_access(len, done);
    const std::uint64_t cap = buffer_cfg_.capacity_bytes / lba_bytes_;
    if (cap > 0 && buffer_.size() + pending_buffer_writes_.size() < cap) {
      buffer_.emplace(cmd.lba,
                      BufferEntry{flash_content(cmd.lba), false, done, ++use_clock_});
    }
  }
  return done;
}

sim::SimTime UllFlash::execute_write(const nvme::NvmeCommand& cmd,
                                     sim::SimTime data_ready) {
  ++counters_.commands;
  advance(data_ready);
  if (buffer_cfg_.enabled && !cmd.fua) {
    const sim::SimTime room = make_room(data_ready);
    const sim::SimTime ack = buffer_access(cmd.length_bytes, room);
    pending_buffer_writes_[cmd.lba] = media_program(cmd, ack);
    return ack;
  }
  if (buffer_cfg_.enabled) {
    // FUA supersedes whatever the buffer holds for this page.
    buffer_.erase(cmd.lba);
    pending_buffer_writes_.erase(cmd.lba);
  }
  return media_program(cmd, data_ready);
}

void UllFlash::commit_write(const nvme::NvmeCommand& cmd,
                            const mos::PageContent& data, sim::SimTime now) {
  auto pending = pending_buffer_writes_.find(cmd.lba);
  if (pending != pending_buffer_writes_.end()) {
    buffer_.insert_or_assign(cmd.lba,
                             BufferEntry{data, true, pending->second, ++use_clock_});
    pending_buffer_writes_.erase(pending);
    advance(now);
    return;
  }
  if (data.is_zero()) {
    pages_.erase(cmd.lba);
  } else {
    pages_.insert_or_assign(cmd.lba, data);
  }
}

void UllFlash::advance(sim::SimTime now) {
  for (auto& [lba, entry] : buffer_) {
    if (entry.dirty && entry.destage_done <= now) {
      pages_.insert_or_assign(lba, entry.content);
      entry.dirty = false;
    }
  }
}

void UllFlash::supercap_flush() {
  for (auto& [lba, entry] : buffer_) {
    if (entry.dirty) pages_.insert_or_assign(lba, entry.content);
  }
  buffer_.clear();
  pending_buffer_writes_.clear();
}

std::size_t UllFlash::buffer_dirty_pages() const {
  return static_cast<std::size_t>(std::count_if(
      buffer_.begin(), buffer_.end(),
      [](const auto& kv) { return kv.second.dirty; }));
}

const mos::PageContent& UllFlash::flash_content(std::uint64_t lba) const {
  auto it = pages_.find(lba);
  return it == pages_.end() ? zero_ : it->second;
}

const mos::PageContent& UllFlash::logical_content(std::uint64_t lba) const {
  auto it = buffer_.find(lba);
  if (it != buffer_.end()) return it->second.content;
  return flash_content(lba);
}

std::vector<std::uint64_t> UllFlash::stored_lbas() const {
  std::vector<std::uint64_t> out;
  out.reserve(pages_.size() + buffer_.size());
  for (const auto& kv : pages_) out.push_back(kv.first);
  for (const auto& kv : buffer_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PersistentFlash UllFlash::persistent_state() const {
  return PersistentFlash{pages_, ftl_.state()};
}

void UllFlash::restore(const PersistentFlash& image) {
  pages_ = image.pages;
  ftl_.restore(image.ftl);
  buffer_.clear();
  pending_buffer_writes_.clear();
}

}  // namespace hams::flash
