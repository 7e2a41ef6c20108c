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

#include "hams/interconnect/interconnect.hpp"

#include <algorithm>
#include <cmath>

#include "hams/error.hpp"

namespace hams::interconnect {

sim::SimTime PcieLink::transfer(std::uint64_t bytes) const {
  if (bytes == 0) return sim::SimTime::zero();
  const std::uint64_t tlps = (bytes + tlp_payload - 1) / tlp_payload;
  return sim::SimTime{tlps * per_tlp_overhead_ps} +
         sim::transfer_time(bytes, bytes_per_s);
}

void PcieLink::validate() const {
  if (lanes == 0 || tlp_payload == 0 || !(bytes_per_s > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "PCIe link parameters must be positive");
  }
}

Interval Timeline::reserve(sim::SimTime now, sim::SimTime duration,
                           BusMaster master, std::uint64_t bytes) {
  Interval iv{sim::max(now, free_at_), {}, master, bytes};
  iv.end = iv.start + duration;
  free_at_ = iv.end;
  last_master_ = master;
  busy_ += duration;
  bytes_moved_ += bytes;
  if (recording_) history_.push_back(iv);
  return iv;
}

void LockRegister::grant(sim::SimTime at) {
  if (value_) raise(ErrorCode::kDoubleGrant, "lock register already granted");
  value_ = true;
  granted_at_ = at;
  ++grants_;
}

void LockRegister::release(BusMaster who, sim::SimTime at) {
  if (!value_ || who != BusMaster::kNvme) {
    raise(ErrorCode::kReleaseWithoutOwnership,
          "lock register released by a non-owner");
  }
  value_ = false;
  windows_.push_back({granted_at_, at});
  ++releases_;
}

RegisterCommandTransaction RegisterCommandTransaction::build(
    const nvme::NvmeCommand& cmd, std::uint16_t address_noise) {
  RegisterCommandTransaction txn;
  for (auto& c : txn.cycles) c.address = address_noise;
  // Cycle 0: deselect the DIMM.
  txn.cycles[0].cs_n = true;
  // Cycle 1: write command.
  txn.cycles[1].cs_n = false;
  txn.cycles[1].we_n = false;
  txn.cycles[1].cas_n = false;
  txn.cycles[1].ras_n = true;
  const nvme::CommandBytes raw = nvme::encode(cmd);
  for (std::uint32_t beat = 0; beat < 8; ++beat) {
    std::uint64_t word = 0;
    for (int b = 0; b < 8; ++b) {
      word |= static_cast<std::uint64_t>(raw[beat * 8 + b]) << (8 * b);
    }
    auto& c = txn.cycles[2 + beat];
    c.cs_n = false;
    c.data = word;
  }
  return txn;
}

nvme::NvmeCommand decode_register_transaction(
    const RegisterCommandTransaction& txn) {
  const auto& cmd_cycle = txn.cycles[1];
  if (!txn.cycles[0].cs_n || cmd_cycle.we_n || cmd_cycle.cas_n ||
      !cmd_cycle.ras_n) {
    raise(ErrorCode::kInvariantViolation, "malformed register write sequence");
  }
  nvme::CommandBytes raw{};
  for (std::uint32_t beat = 0; beat < 8; ++beat) {
    const auto& data = txn.cycles[2 + beat].data;
    if (!data) raise(ErrorCode::kInvariantViolation, "missing data beat");
    for (int b = 0; b < 8; ++b) {
      raw[beat * 8 + b] = static_cast<std::byte>((*data >> (8 * b)) & 0xFFu);
    }
  }
  return nvme::decode(raw);
}

DdrBus::DdrBus(const nvdimm::Ddr4Timing& timing, double clock_hz,
               bool lock_protocol)
    : timing_(timing), clock_hz_(clock_hz), lock_protocol_(lock_protocol) {
  timing_.validate();
  if (!(clock_hz > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "bus clock must be positive");
  }
  cycle_ = sim::SimTime{static_cast<std::uint64_t>(std::llround(1e12 / clock_hz))};
}

Interval DdrBus::controller_access(sim::SimTime now, std::uint64_t bytes) {
  if (lock_protocol_ && timeline_.last_master() == BusMaster::kNvme &&
      now < timeline_.free_at() + cycle_) {
    now = timeline_.free_at() + cycle_;
  }
  return timeline_.reserve(now, timing_.transfer(bytes), BusMaster::kController,
                           bytes);
}

Interval DdrBus::nvme_access(sim::SimTime now, std::uint64_t bytes) {
  Interval iv = timeline_.reserve(now, timing_.transfer(bytes),
                                  BusMaster::kNvme, bytes);
  if (lock_protocol_ && events_ != nullptr) {
    events_->schedule(iv.start, sim::DeviceId::kBus,
                      [this, t = iv.start] { lock_.grant(t); });
    events_->schedule(iv.end, sim::DeviceId::kBus, [this, t = iv.end] {
      lock_.release(BusMaster::kNvme, t);
    });
  }
  return iv;
}

Interval DdrBus::send_command(sim::SimTime now) {
  if (lock_protocol_ && timeline_.last_master() == BusMaster::kNvme &&
      now < timeline_.free_at() + cycle_) {
    now = timeline_.free_at() + cycle_;
  }
  const sim::SimTime duration{static_cast<std::uint64_t>(
      std::llround(RegisterCommandTransaction::kCycles * 1e12 / clock_hz_))};
  return timeline_.reserve(now, duration, BusMaster::kController,
                           nvme::kCommandBytes);
}

void DdrBus::try_acquire(BusMaster who) const {
  if (lock_protocol_ && lock_.value() && lock_.owner() != who) {
    raise(ErrorCode::kBusLocked, "DDR4 bus is held by the NVMe controller");
  }
}

bool intervals_disjoint(const std::vector<Interval>& history) {
  std::vector<Interval> sorted = history;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) return false;
  }
  return true;
}

bool nvme_within_lock(const std::vector<Interval>& history,
                      const std::vector<LockRegister::Window>& windows) {
  for (const auto& iv : history) {
    if (iv.master != BusMaster::kNvme) continue;
    const bool covered =
        std::any_of(windows.begin(), windows.end(), [&](const auto& w) {
          return w.granted <= iv.start && iv.end <= w.released;
        });
    if (!covered) return false;
  }
  return true;
}

}  // namespace hams::interconnect
