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

#include "hams/workload/mmap_baseline.hpp"

#include <cmath>
#include <list>
#include <unordered_map>

#include "hams/error.hpp"
#include "hams/flash/ull_flash.hpp"

namespace hams::workload {

void MmapParams::validate() const {
  if (!(overhead_us >= 0.0)) {
    raise(ErrorCode::kInvalidConfig, "mmap overhead must be >= 0");
  }
  if (os_page_bytes == 0) raise(ErrorCode::kInvalidConfig, "OS page size must be > 0");
}

MetricsReport mmap_baseline(const std::vector<controller::MemoryRequest>& requests,
                            const controller::SystemConfig& cfg,
                            const MmapParams& params, const EnergyModel& energy,
                            const std::string& workload) {
  params.validate();
  cfg.validate();
  const std::uint32_t page = params.os_page_bytes;
  const std::uint64_t capacity = std::max<std::uint64_t>(1, cfg.mos.cache_bytes() / page);
  const sim::SimTime overhead{
      static_cast<std::uint64_t>(std::llround(params.overhead_us * 1e6))};

  flash::UllFlash device(cfg.flash, cfg.buffer, page, cfg.mos.flash_bytes,
                         mos::ContentMode::kChecksum);
  struct Resident {
    std::list<std::uint64_t>::iterator pos;
    bool dirty = false;
  };
  std::list<std::uint64_t> lru;  // front = most recent
  std::unordered_map<std::uint64_t, Resident> cache;

  MetricsReport r;
  r.workload = workload;
  r.platform = "mmap";
  r.activity.buffer_present = cfg.buffer.enabled;
  sim::SimTime cursor;
  sim::SimTime first = requests.empty() ? sim::SimTime{} : requests.front().issue_time;
  std::uint16_t cid = 0;

  auto host_copy = [&](std::uint64_t bytes) {
    r.activity.nvdimm_bytes += bytes;
    return cfg.ddr4.transfer(bytes);
  };
  auto link_copy = [&](std::uint64_t bytes) {
    r.activity.pcie_bytes += bytes;
    return cfg.pcie.transfer(bytes);
  };

  for (const auto& req : requests) {
    const sim::SimTime start = sim::max(cursor, req.issue_time);
    sim::SimTime t = start;
    controller::LatencyBreakdown b;
    const std::uint64_t vpage = req.addr.value / page;
    auto it = cache.find(vpage);
    if (it != cache.end()) {
      ++r.hits;
      lru.splice(lru.begin(), lru, it->second.pos);
    } else {
      b.software += overhead;
      t += overhead;
      if (cache.size() >= capacity) {
        const std::uint64_t victim = lru.back();
        if (cache[victim].dirty) {
          const sim::SimTime out = host_copy(page) + link_copy(page);
          b.interface += out;
          t += out;
          nvme::NvmeCommand wb{cid++, nvme::Opcode::kWrite, victim, 0, page, false, false};
          const sim::SimTime acked = device.execute_write(wb, t);
          b.flash_array += acked - t;
          t = acked;
          ++r.activity.commands;
        }
        cache.erase(victim);
        lru.pop_back();
      }
      nvme::NvmeCommand rd{cid++, nvme::Opcode::kRead, vpage, 0, page, false, false};
      const sim::SimTime ready = device.execute_read(rd, t);
      b.flash_array += ready - t;
      t = ready;
      const sim::SimTime in = link_copy(page) + host_copy(page);
      b.interface += in;
      t += in;
      ++r.activity.commands;
      lru.push_front(vpage);
      it = cache.emplace(vpage, Resident{lru.begin(), false}).first;
    }
    const sim::SimTime access = host_copy(req.size_bytes);
    b.nvdimm += access;
    t += access;
    if (req.kind == controller::AccessKind::kStore) it->second.dirty = true;

    r.classes += b;
    r.total_delay += t - start;
    cursor = t;
  }
  r.requests = requests.size();
  r.hit_rate = r.requests == 0 ? 0.0
                               : static_cast<double>(r.hits) / static_cast<double>(r.requests);
  r.makespan = cursor > first ? cursor - first : sim::SimTime{};
  const auto& fc = device.counters();
  r.activity.flash_read_bytes = fc.read_bytes;
  r.activity.flash_program_bytes = fc.program_bytes;
  r.activity.buffer_bytes = fc.buffer_bytes;
  r.energy = energy_of(r.activity, energy, r.makespan);
  return r;
}

}  // namespace hams::workload
