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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hams/nvdimm/nvdimm.hpp"
#include "hams/nvme/command.hpp"
#include "hams/sim/event_queue.hpp"
#include "hams/sim/sim_time.hpp"

namespace hams::interconnect {

struct PcieLink {
  std::uint32_t lanes = 4;
  double bytes_per_s = 4e9;
  std::uint64_t tlp_payload = 4096;
  std::uint64_t per_tlp_overhead_ps = 200'000;

  /// ceil(bytes / tlp_payload) * per-TLP overhead + bytes / bandwidth.
  sim::SimTime transfer(std::uint64_t bytes) const;
  void validate() const;
};

enum class BusMaster : std::uint8_t { kController, kNvme };

struct Interval {
  sim::SimTime start;
  sim::SimTime end;
  BusMaster master = BusMaster::kController;
  std::uint64_t bytes = 0;
};

/// Occupancy of one link or bus. Requests are granted in arrival order, so
/// intervals never overlap.
class Timeline {
 public:
  Interval reserve(sim::SimTime now, sim::SimTime duration, BusMaster master,
                   std::uint64_t bytes);

  sim::SimTime free_at() const { return free_at_; }
  std::uint64_t bytes_moved() const { return bytes_moved_; }
  std::optional<BusMaster> last_master() const { return last_master_; }
  sim::SimTime busy_time() const { return busy_; }

  void set_recording(bool on) { recording_ = on; }
  const std::vector<Interval>& history() const { return history_; }

 private:
  sim::SimTime free_at_;
  sim::SimTime busy_;
  std::uint64_t bytes_moved_ = 0;
  std::optional<BusMaster> last_master_;
  bool recording_ = false;
  std::vector<Interval> history_;
};

/// Single-bit bus-mastership arbiter of the shared DDR4 channel. The memory
/// controller grants it to the NVMe controller, which clears it when its
/// DMA finishes.
class LockRegister {
 public:
  struct Window {
    sim::SimTime granted;
    sim::SimTime released;
  };

  bool value() const { return value_; }
  BusMaster owner() const {
    return value_ ? BusMaster::kNvme : BusMaster::kController;
  }

  /// Throws SimError(kDoubleGrant) if the lock is already held.
  void grant(sim::SimTime at);
  /// Throws SimError(kReleaseWithoutOwnership) unless `who` holds the lock.
  void release(BusMaster who, sim::SimTime at);

  const std::vector<Window>& windows() const { return windows_; }
  std::uint64_t grants() const { return grants_; }
  std::uint64_t releases() const { return releases_; }

 private:
  bool value_ = false;
  sim::SimTime granted_at_;
  std::vector<Window> windows_;
  std::uint64_t grants_ = 0;
  std::uint64_t releases_ = 0;
};

/// Bus-level picture of pushing one 64-byte command into the device's data
/// buffer registers: a deselect cycle (CS# high), a write-command cycle
/// (WE# low, CAS# low, RAS# high) and eight beats on D[63:0].
struct RegisterCommandTransaction {
  struct Cycle {
    bool cs_n = true;
    bool we_n = true;
    bool cas_n = true;
    bool ras_n = true;
    std::uint16_t address = 0;  // A[15:0]
    std::optional<std::uint64_t> data;  // D[63:0]
  };

  static constexpr std::uint32_t kCycles = 10;
  std::array<Cycle, kCycles> cycles{};

  /// `address_noise` is driven on A[15:0] during every cycle; the device
  /// must not depend on it.
  static RegisterCommandTransaction build(const nvme::NvmeCommand& cmd,
                                          std::uint16_t address_noise = 0);
};

/// Device-side register decoder. Reads only the data beats.
nvme::NvmeCommand decode_register_transaction(
    const RegisterCommandTransaction& txn);

class DdrBus {
 public:
  DdrBus(const nvdimm::Ddr4Timing& timing, double clock_hz, bool lock_protocol);

  /// When attached, NVMe transfers schedule the lock grant at their start
  /// and the release at their end.
  void attach(sim::EventQueue* events) { events_ = events; }

  /// A controller access that follows an NVMe transfer starts one command
  /// cycle after the lock is released.
  Interval controller_access(sim::SimTime now, std::uint64_t bytes);
  Interval nvme_access(sim::SimTime now, std::uint64_t bytes);
  /// Ten command-clock cycles of controller mastership.
  Interval send_command(sim::SimTime now);

  /// Immediate access check: throws SimError(kBusLocked) if the other master
  /// holds the lock right now.
  void try_acquire(BusMaster who) const;

  sim::SimTime cycle_time() const { return cycle_; }
  const nvdimm::Ddr4Timing& timing() const { return timing_; }
  bool lock_protocol() const { return lock_protocol_; }
  LockRegister& lock() { return lock_; }
  const LockRegister& lock() const { return lock_; }
  Timeline& timeline() { return timeline_; }
  const Timeline& timeline() const { return timeline_; }

 private:
  nvdimm::Ddr4Timing timing_;
  double clock_hz_;
  sim::SimTime cycle_;
  bool lock_protocol_;
  sim::EventQueue* events_ = nullptr;
  Timeline timeline_;
  LockRegister lock_;
};

/// Checks that no two recorded intervals overlap.
bool intervals_disjoint(const std::vector<Interval>& history);

/// Checks that every NVMe-mastered interval sits inside a lock window.
bool nvme_within_lock(const std::vector<Interval>& history,
                      const std::vector<LockRegister::Window>& windows);

}  // namespace hams::interconnect
