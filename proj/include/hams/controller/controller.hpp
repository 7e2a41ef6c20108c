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
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hams/controller/accounting.hpp"
#include "hams/controller/request.hpp"
#include "hams/interconnect/interconnect.hpp"
#include "hams/nvdimm/nvdimm.hpp"
#include "hams/nvme/engine.hpp"
#include "hams/sim/event_queue.hpp"

namespace hams::controller {

enum class TxnState : std::uint8_t { kIssued, kWaiting, kFilling, kDone };

struct MissTransaction {
  MemoryRequest req;
  std::optional<std::uint16_t> evict_cmd;
  std::optional<std::uint16_t> fill_cmd;
  std::optional<std::uint32_t> prp_clone_slot;
  TxnState state = TxnState::kIssued;
  sim::SimTime issued;
  LatencyBreakdown stages;
};

struct ControllerStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t waits = 0;
  std::uint64_t fills_done = 0;
  std::uint64_t evictions_done = 0;
  std::uint64_t clones = 0;
  std::uint64_t prp_stalls = 0;
  std::uint64_t queue_full_stalls = 0;
  std::uint64_t redundant_evictions = 0;
  std::uint64_t dma_cache_overlaps = 0;
  std::uint64_t busy_victim_violations = 0;
  std::uint64_t max_wait_depth = 0;
  std::uint64_t max_outstanding_commands = 0;
};

/// The MoS address manager. Hits are served from the NVDIMM cache; misses
/// become an evict/fill command pair on the NVMe engine. All persistent
/// state (tags, frames, rings, PRP pool, wait queue) is in the Nvdimm, the
/// rest is volatile and rebuilt by recover().
///
/// Ordering rules: a set with the busy bit, or with a request already in the
/// wait queue, takes new requests into the wait queue. A miss also waits
/// while earlier hits on its set are still in flight, so stores are never
/// lost under an eviction.
class HamsController {
 public:
  using CompletionFn = std::function<void(const Completion&)>;

  HamsController(sim::EventQueue& events, nvdimm::Nvdimm& nvdimm,
                 nvme::NvmeEngine& engine, interconnect::DdrBus& bus,
                 CompletionFn on_complete);

  /// Entry point for a request at the current simulated time.
  void serve(const MemoryRequest& req);

  /// Handles a lookup that missed on `victim`. Returns the transaction; its
  /// state is kWaiting when the request went to the wait queue or stalled
  /// on the PRP pool.
  MissTransaction open_miss(const MemoryRequest& req,
                            const nvdimm::TagEntry& victim);

  /// MSI handler: consumes one completion and finishes its command.
  void on_interrupt();

  /// Throws SimError(kModeChangeWhileBusy) unless idle.
  void set_mode(nvme::Mode mode);
  nvme::Mode mode() const { return engine_.mode(); }

  /// Power-up path over a restored NVDIMM: drops the wait queue (none of
  /// those requests was acknowledged), clears busy bits and PRP slots that
  /// no journaled command refers to, then replays the journal.
  std::vector<nvme::NvmeCommand> recover();
  bool offsets_consistent_at_recovery() const { return offsets_ok_; }

  bool idle() const;

  CommandCost& cost(std::uint16_t cid) { return costs_[cid]; }
  /// Device DMA into or out of NVDIMM, for the hazard audit.
  void note_dma(std::uint64_t prp, sim::SimTime start, sim::SimTime end);
  /// Time at which the most recent SQ entry is fully written.
  sim::SimTime doorbell_time() const { return doorbell_time_; }

  const ControllerStats& stats() const { return stats_; }
  const std::unordered_map<std::uint64_t, MissTransaction>& transactions() const {
    return owners_;
  }

 private:
  std::uint64_t set_of(const MemoryRequest& req) const;
  bool blocked(std::uint64_t set) const;
  void enqueue_wait(const MemoryRequest& req);
  void start_access(const MemoryRequest& req);
  void serve_hit(const MemoryRequest& req, bool was_miss,
                 LatencyBreakdown stages);
  void replay_waiters();
  void retry_stalled();
  void try_submit();
  void finish_command(const nvme::NvmeCommand& cmd);

  sim::EventQueue& events_;
  nvdimm::Nvdimm& nvdimm_;
  nvme::NvmeEngine& engine_;
  interconnect::DdrBus& bus_;
  CompletionFn on_complete_;

  std::unordered_map<std::uint64_t, MissTransaction> owners_;  // by set
  std::unordered_map<std::uint64_t, std::uint32_t> pending_hits_;
  std::unordered_map<std::uint64_t, std::uint32_t> waiters_;
  std::unordered_map<std::uint64_t, std::uint32_t> set_commands_;
  std::deque<nvme::NvmeCommand> pending_submit_;
  std::deque<MemoryRequest> stalled_;
  std::unordered_map<std::uint16_t, CommandCost> costs_;
  std::unordered_multiset<std::uint64_t> inflight_evicts_;  // lba
  std::unordered_map<std::uint64_t, std::deque<interconnect::Interval>> frame_dma_;
  sim::SimTime doorbell_time_;
  bool offsets_ok_ = true;
  ControllerStats stats_;
};

}  // namespace hams::controller
