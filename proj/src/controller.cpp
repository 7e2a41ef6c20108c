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

#include "hams/controller/controller.hpp"

#include <algorithm>
#include <unordered_set>

#include "hams/error.hpp"
#include "hams/mos/address.hpp"

namespace hams::controller {

namespace {
constexpr std::uint64_t kTagProbeBytes = 64;
constexpr std::size_t kDmaHistoryPerSet = 8;
}  // namespace

HamsController::HamsController(sim::EventQueue& events, nvdimm::Nvdimm& nvdimm,
                               nvme::NvmeEngine& engine,
                               interconnect::DdrBus& bus,
                               CompletionFn on_complete)
    : events_(events),
      nvdimm_(nvdimm),
      engine_(engine),
      bus_(bus),
      on_complete_(std::move(on_complete)) {}

std::uint64_t HamsController::set_of(const MemoryRequest& req) const {
  return mos::decompose(req.addr, nvdimm_.config()).index;
}

bool HamsController::blocked(std::uint64_t set) const {
  return nvdimm_.tag(set).busy || waiters_.contains(set);
}

void HamsController::serve(const MemoryRequest& req) {
  const auto& cfg = nvdimm_.config();
  const mos::AddressParts parts = mos::decompose(req.addr, cfg);
  if (req.size_bytes == 0 || parts.offset + req.size_bytes > cfg.page_size_bytes) {
    raise(ErrorCode::kAddressOutOfRange,
          "request must be non-empty and inside one page");
  }
  if (blocked(parts.index)) {
    enqueue_wait(req);
    return;
  }
  start_access(req);
}

void HamsController::enqueue_wait(const MemoryRequest& req) {
  auto& wq = nvdimm_.pinned().wait_queue;
  if (wq.size() >= nvdimm_.params().wait_capacity) {
    raise(ErrorCode::kInvariantViolation, "wait queue overflow");
  }
  wq.push_back(req);
  ++waiters_[set_of(req)];
  ++stats_.waits;
  stats_.max_wait_depth = std::max<std::uint64_t>(stats_.max_wait_depth, wq.size());
}

void HamsController::start_access(const MemoryRequest& req) {
  const mos::AddressParts parts = mos::decompose(req.addr, nvdimm_.config());
  const nvdimm::TagEntry entry = nvdimm_.tag(parts.index);
  if (entry.valid && entry.tag == parts.tag) {
    serve_hit(req, false, {});
    return;
  }
  if (pending_hits_.contains(parts.index)) {
    enqueue_wait(req);
    return;
  }
  open_miss(req, entry);
}

MissTransaction HamsController::open_miss(const MemoryRequest& req,
                                          const nvdimm::TagEntry& victim) {
  const auto& cfg = nvdimm_.config();
  const std::uint64_t set = set_of(req);
  MissTransaction txn;
  txn.req = req;
  txn.issued = req.issue_time;
  if (victim.busy) {
    enqueue_wait(req);
    txn.state = TxnState::kWaiting;
    return txn;
  }

  const bool needs_clone = victim.valid && victim.dirty;
  std::optional<std::uint32_t> slot;
  nvdimm::TagEntry entry = victim;
  entry.busy = true;
  if (needs_clone) {
    slot = nvdimm_.allocate_prp_slot();
    if (!slot) {
      ++stats_.prp_stalls;
      nvdimm_.set_tag(set, entry);
      stalled_.push_back(req);
      txn.state = TxnState::kWaiting;
      return txn;
    }
  }
  ++stats_.misses;
  nvdimm_.set_tag(set, entry);

  const sim::SimTime now = events_.now();
  const interconnect::Interval probe = bus_.controller_access(now, kTagProbeBytes);
  txn.stages.nvdimm += probe.end - probe.start;
  sim::SimTime ready = probe.end;
  const auto page_bytes = static_cast<std::uint32_t>(cfg.page_size_bytes);

  std::vector<nvme::NvmeCommand> cmds;
  if (needs_clone) {
    const std::uint64_t slot_addr = nvdimm_.prp_slot_address(*slot);
    nvdimm_.write_at(slot_addr, nvdimm_.frame(set));
    const interconnect::Interval rd = bus_.controller_access(ready, page_bytes);
    const interconnect::Interval wr = bus_.controller_access(rd.end, page_bytes);
    txn.stages.nvdimm += (rd.end - rd.start) + (wr.end - wr.start);
    ready = wr.end;
    ++stats_.clones;

    const std::uint64_t victim_page = mos::page_of(victim.tag, set, cfg);
    if (inflight_evicts_.contains(victim_page)) ++stats_.redundant_evictions;
    inflight_evicts_.insert(victim_page);
    nvme::NvmeCommand evict =
        engine_.compose(nvme::Opcode::kWrite, slot_addr, victim_page, page_bytes);
    txn.evict_cmd = evict.cid;
    txn.prp_clone_slot = slot;
    ++set_commands_[set];
    cmds.push_back(evict);
  }
  nvme::NvmeCommand fill =
      engine_.compose(nvme::Opcode::kRead, nvdimm_.frame_address(set),
                      mos::page_number(req.addr, cfg), page_bytes);
  txn.fill_cmd = fill.cid;
  ++set_commands_[set];
  cmds.push_back(fill);
  txn.state = TxnState::kFilling;
  owners_[set] = txn;

  events_.schedule(ready, sim::DeviceId::kController, [this, cmds] {
    for (const auto& c : cmds) pending_submit_.push_back(c);
    try_submit();
  });
  return txn;
}

void HamsController::try_submit() {
  while (!pending_submit_.empty()) {
    if (!engine_.gate_open()) break;
    if (engine_.sq_full()) {
      ++stats_.queue_full_stalls;
      break;
    }
    const nvme::NvmeCommand cmd = pending_submit_.front();
    pending_submit_.pop_front();
    const interconnect::Interval wr =
        bus_.controller_access(events_.now(), nvme::kCommandBytes);
    costs_[cmd.cid].interface += wr.end - wr.start;
    doorbell_time_ = wr.end;
    engine_.submit(cmd);
    stats_.max_outstanding_commands =
        std::max<std::uint64_t>(stats_.max_outstanding_commands, engine_.outstanding());
  }
}

void HamsController::serve_hit(const MemoryRequest& req, bool was_miss,
                               LatencyBreakdown stages) {
  const std::uint64_t set = set_of(req);
  ++pending_hits_[set];
  if (!was_miss) ++stats_.hits;
  const interconnect::Interval iv =
      bus_.controller_access(events_.now(), req.size_bytes);
  stages.nvdimm += iv.end - iv.start;
  events_.schedule(iv.end, sim::DeviceId::kController,
                   [this, req, set, was_miss, stages, iv]() mutable {
    if (req.kind == AccessKind::kStore) {
      if (set_commands_.contains(set) || nvdimm_.tag(set).busy) {
        ++stats_.dma_cache_overlaps;
      }
      if (auto it = frame_dma_.find(set); it != frame_dma_.end()) {
        for (const auto& dma : it->second) {
          if (dma.start < iv.end && iv.start < dma.end) ++stats_.dma_cache_overlaps;
        }
      }
      nvdimm::TagEntry entry = nvdimm_.tag(set);
      entry.dirty = true;
      nvdimm_.set_tag(set, entry);
      const auto offset = static_cast<std::uint32_t>(
          mos::decompose(req.addr, nvdimm_.config()).offset);
      nvdimm_.mutable_frame(set).write(offset, req.size_bytes, req.req_id);
    }
    auto it = pending_hits_.find(set);
    if (--it->second == 0) pending_hits_.erase(it);

    Completion done;
    done.req = req;
    done.hit = !was_miss;
    done.issued = req.issue_time;
    done.completed = events_.now();
    done.breakdown = stages;
    done.breakdown.queueing = done.latency() - stages.service();
    if (on_complete_) on_complete_(done);
    replay_waiters();
  });
}

void HamsController::on_interrupt() { finish_command(engine_.on_msi()); }

void HamsController::finish_command(const nvme::NvmeCommand& cmd) {
  const auto& cfg = nvdimm_.config();
  const std::uint64_t sets = cfg.num_sets();
  const std::uint64_t set = cmd.lba % sets;
  CommandCost cost;
  if (auto it = costs_.find(cmd.cid); it != costs_.end()) {
    cost = it->second;
    costs_.erase(it);
  }

  bool slot_freed = false;
  if (cmd.opcode == nvme::Opcode::kRead) {
    nvdimm::TagEntry entry = nvdimm_.tag(set);
    entry.tag = cmd.lba / sets;
    entry.valid = true;
    entry.dirty = false;
    nvdimm_.set_tag(set, entry);
    ++stats_.fills_done;
    if (auto it = owners_.find(set);
        it != owners_.end() && it->second.fill_cmd == cmd.cid) {
      it->second.stages.interface += cost.interface;
      it->second.stages.flash_array += cost.flash;
    }
  } else {
    if (auto slot = nvdimm_.slot_of_address(cmd.prp)) {
      nvdimm_.free_prp_slot(*slot);
      slot_freed = true;
    }
    if (auto it = inflight_evicts_.find(cmd.lba); it != inflight_evicts_.end()) {
      inflight_evicts_.erase(it);
    }
    ++stats_.evictions_done;
  }

  auto count = set_commands_.find(set);
  if (count != set_commands_.end() && --count->second == 0) {
    set_commands_.erase(count);
    nvdimm::TagEntry entry = nvdimm_.tag(set);
    entry.busy = false;
    nvdimm_.set_tag(set, entry);
    if (auto it = owners_.find(set); it != owners_.end()) {
      MissTransaction txn = std::move(it->second);
      owners_.erase(it);
      txn.state = TxnState::kDone;
      serve_hit(txn.req, true, txn.stages);
    }
    replay_waiters();
  }
  if (slot_freed) retry_stalled();
  try_submit();
}

void HamsController::replay_waiters() {
  auto& wq = nvdimm_.pinned().wait_queue;
  std::unordered_set<std::uint64_t> held;
  for (auto it = wq.begin(); it != wq.end();) {
    const MemoryRequest req = *it;
    const mos::AddressParts parts = mos::decompose(req.addr, nvdimm_.config());
    const std::uint64_t set = parts.index;
    const nvdimm::TagEntry entry = nvdimm_.tag(set);
    const bool hit = entry.valid && entry.tag == parts.tag;
    if (held.contains(set) || entry.busy ||
        (!hit && pending_hits_.contains(set))) {
      held.insert(set);
      ++it;
      continue;
    }
    it = wq.erase(it);
    auto w = waiters_.find(set);
    if (--w->second == 0) waiters_.erase(w);
    if (hit) {
      serve_hit(req, false, {});
    } else {
      open_miss(req, entry);
    }
    // Serving may have made later waiters of this set ineligible; the
    // per-iteration checks above pick that up.
  }
}

void HamsController::retry_stalled() {
  while (!stalled_.empty() && nvdimm_.free_prp_slots() > 0) {
    const MemoryRequest req = stalled_.front();
    stalled_.pop_front();
    const std::uint64_t set = set_of(req);
    nvdimm::TagEntry entry = nvdimm_.tag(set);
    entry.busy = false;
    nvdimm_.set_tag(set, entry);
    open_miss(req, entry);
  }
}

void HamsController::note_dma(std::uint64_t prp, sim::SimTime start,
                              sim::SimTime end) {
  auto set = nvdimm_.set_of_address(prp);
  if (!set) return;
  auto& hist = frame_dma_[*set];
  hist.push_back({start, end, interconnect::BusMaster::kNvme, 0});
  while (hist.size() > kDmaHistoryPerSet) hist.pop_front();
}

bool HamsController::idle() const {
  return owners_.empty() && pending_submit_.empty() && stalled_.empty() &&
         nvdimm_.pinned().wait_queue.empty() && engine_.outstanding() == 0 &&
         set_commands_.empty();
}

void HamsController::set_mode(nvme::Mode mode) {
  if (!idle()) {
    raise(ErrorCode::kModeChangeWhileBusy,
          "mode change with transactions in flight");
  }
  engine_.set_mode(mode);
}

std::vector<nvme::NvmeCommand> HamsController::recover() {
  auto& pinned = nvdimm_.pinned();
  pinned.wait_queue.clear();
  waiters_.clear();
  set_commands_.clear();
  inflight_evicts_.clear();

  const std::uint64_t sets = nvdimm_.num_sets();
  std::unordered_set<std::uint32_t> referenced;
  for (const auto& cmd : engine_.outstanding_commands()) {
    ++set_commands_[cmd.lba % sets];
    if (cmd.opcode == nvme::Opcode::kWrite) inflight_evicts_.insert(cmd.lba);
    if (auto slot = nvdimm_.slot_of_address(cmd.prp)) referenced.insert(*slot);
  }
  for (std::uint64_t set = 0; set < sets; ++set) {
    nvdimm::TagEntry entry = nvdimm_.tag(set);
    if (entry.busy && !set_commands_.contains(set)) {
      entry.busy = false;
      nvdimm_.set_tag(set, entry);
    }
  }
  for (std::uint32_t slot = 0; slot < pinned.prp_free.size(); ++slot) {
    if (!pinned.prp_free[slot] && !referenced.contains(slot)) {
      nvdimm_.free_prp_slot(slot);
    }
  }
  offsets_ok_ = engine_.offsets_consistent();
  doorbell_time_ = events_.now();
  return engine_.recover();
}

}  // namespace hams::controller
