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

#include "hams/controller/system.hpp"

#include <algorithm>

#include "hams/error.hpp"
#include "hams/mos/address.hpp"

namespace hams::controller {

namespace {

flash::BufferConfig effective_buffer(const SystemConfig& cfg) {
  flash::BufferConfig b = cfg.buffer;
  b.enabled = cfg.buffer_enabled();
  return b;
}

}  // namespace

void SystemConfig::validate() const {
  mos.validate();
  ddr4.validate();
  flash.validate();
  pcie.validate();
  if (max_outstanding == 0) {
    raise(ErrorCode::kInvalidConfig, "driver window must be at least 1");
  }
  if (!(bus_clock_hz > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "bus clock must be positive");
  }
  if (buffer_enabled() &&
      (buffer.capacity_bytes < mos.page_size_bytes || !(buffer.bytes_per_s > 0.0))) {
    raise(ErrorCode::kInvalidConfig, "device buffer must hold at least one page");
  }
}

System::System(const SystemConfig& cfg, const SystemImage* image)
    : cfg_((cfg.validate(), cfg)),
      nvdimm_(cfg.mos, cfg.ddr4, cfg.nvdimm),
      flash_(cfg.flash, effective_buffer(cfg), cfg.mos.page_size_bytes,
             cfg.mos.flash_bytes, cfg.nvdimm.content_mode),
      bus_(cfg.ddr4, cfg.bus_clock_hz, cfg.datapath == Datapath::kAdvanced) {
  if (cfg_.datapath == Datapath::kAdvanced && cfg_.dedicated_channel) {
    side_bus_ = std::make_unique<interconnect::DdrBus>(cfg.ddr4, cfg.bus_clock_hz,
                                                       false);
  }
  bus_.attach(&events_);
  if (image != nullptr) {
    nvdimm_.restore_snapshot(image->nvdimm);
    flash_.restore(image->flash);
  }
  engine_ = std::make_unique<nvme::NvmeEngine>(nvdimm_.pinned(), cfg_.mode);
  controller_ = std::make_unique<HamsController>(
      events_, nvdimm_, *engine_, bus_,
      [this](const Completion& c) { on_complete(c); });
  engine_->set_sq_doorbell([this] { on_sq_doorbell(); });
  engine_->set_cq_doorbell([this] { on_cq_doorbell(); });
}

// ------------------------------------------------------------ driver

void System::load(std::vector<MemoryRequest> requests) {
  for (std::size_t i = 1; i < requests.size(); ++i) {
    if (requests[i].issue_time < requests[i - 1].issue_time) {
      raise(ErrorCode::kUnsortedTrace, "requests must be sorted by issue time");
    }
  }
  trace_ = std::move(requests);
  next_ = 0;
  pump();
}

void System::pump() {
  while (in_flight_ < cfg_.max_outstanding && next_ < trace_.size()) {
    const MemoryRequest req = trace_[next_++];
    ++in_flight_;
    const sim::SimTime at = sim::max(events_.now(), req.issue_time);
    events_.schedule(at, sim::DeviceId::kDriver, [this, req] { issue(req); });
  }
}

void System::issue(MemoryRequest req) {
  req.issue_time = events_.now();
  controller_->serve(req);
}

void System::on_complete(const Completion& c) {
  completions_.push_back(c);
  if (c.req.kind == AccessKind::kStore) {
    const auto parts = mos::decompose(c.req.addr, cfg_.mos);
    const std::uint64_t page = mos::page_number(c.req.addr, cfg_.mos);
    auto [it, fresh] =
        acked_.try_emplace(page, mos::PageContent(cfg_.nvdimm.content_mode));
    it->second.write(static_cast<std::uint32_t>(parts.offset), c.req.size_bytes,
                     c.req.req_id);
  }
  --in_flight_;
  pump();
}

std::uint64_t System::step(std::uint64_t n) {
  std::uint64_t fired = 0;
  while (fired < n && events_.step()) ++fired;
  return fired;
}

// ------------------------------------------------------------ device side

sim::SimTime System::pcie_move(sim::SimTime at, std::uint64_t bytes,
                               std::uint16_t cid) {
  const interconnect::Interval iv =
      pcie_.reserve(at, cfg_.pcie.transfer(bytes),
                    interconnect::BusMaster::kController, bytes);
  controller_->cost(cid).interface += iv.end - iv.start;
  return iv.end;
}

void System::on_sq_doorbell() {
  auto& pinned = nvdimm_.pinned();
  const std::uint32_t depth = engine_->depth();
  // Entries between the device's head and the new tail are new.
  const std::uint32_t count = (pinned.sq_tail + depth - pinned.sq_head) % depth;
  const std::uint32_t already = announced_;
  announced_ = count;
  device_receive(controller_->doorbell_time(), count - std::min(count, already));
}

void System::device_receive(sim::SimTime at, std::uint32_t count) {
  if (count == 0) return;
  if (cfg_.datapath == Datapath::kAdvanced) {
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto fetched = engine_->device_fetch();
      --announced_;
      const auto txn =
          interconnect::RegisterCommandTransaction::build(*fetched, 0xA5A5);
      const nvme::NvmeCommand cmd = interconnect::decode_register_transaction(txn);
      const interconnect::Interval iv = cmd_bus().send_command(at);
      controller_->cost(cmd.cid).interface += iv.end - iv.start;
      events_.schedule(iv.end, sim::DeviceId::kFlash,
                       [this, cmd] { device_start(cmd); });
    }
    return;
  }
  const auto& sq = nvdimm_.pinned().sq;
  const std::uint32_t depth = engine_->depth();
  const std::uint16_t newest = sq[(nvdimm_.pinned().sq_tail + depth - 1) % depth].cid;
  const sim::SimTime rung = pcie_move(at, 4, newest);
  events_.schedule(rung, sim::DeviceId::kFlash, [this, count] {
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto cmd = engine_->device_fetch();
      --announced_;
      const sim::SimTime sqe = pcie_move(events_.now(), nvme::kCommandBytes, cmd->cid);
      const interconnect::Interval ddr =
          bus_.controller_access(sqe, nvme::kCommandBytes);
      controller_->cost(cmd->cid).interface += ddr.end - ddr.start;
      events_.schedule(ddr.end, sim::DeviceId::kFlash,
                       [this, c = *cmd] { device_start(c); });
    }
  });
}

void System::device_start(const nvme::NvmeCommand& cmd) {
  ++commands_executed_;
  if (cmd.opcode == nvme::Opcode::kRead) {
    const sim::SimTime now = events_.now();
    const sim::SimTime done = flash_.execute_read(cmd, now);
    controller_->cost(cmd.cid).flash += done - now;
    events_.schedule(done, sim::DeviceId::kFlash,
                     [this, cmd] { device_read_dma(cmd); });
  } else {
    device_write_dma(cmd);
  }
}

void System::device_read_dma(const nvme::NvmeCommand& cmd) {
  const sim::SimTime now = events_.now();
  mos::PageContent data = flash_.logical_content(cmd.lba);
  sim::SimTime start = now;
  sim::SimTime end;
  if (cfg_.datapath == Datapath::kBaseline) {
    const sim::SimTime link = pcie_move(now, cmd.length_bytes, cmd.cid);
    const interconnect::Interval ddr = bus_.controller_access(link, cmd.length_bytes);
    controller_->cost(cmd.cid).interface += ddr.end - ddr.start;
    end = ddr.end;
  } else {
    const interconnect::Interval iv = bus_.nvme_access(now, cmd.length_bytes);
    controller_->cost(cmd.cid).interface += iv.end - iv.start;
    start = iv.start;
    end = iv.end;
  }
  controller_->note_dma(cmd.prp, start, end);
  events_.schedule(end, sim::DeviceId::kFlash,
                   [this, cmd, data = std::move(data)] {
                     nvdimm_.write_at(cmd.prp, data);
                     device_post_cqe(cmd);
                   });
}

void System::device_write_dma(const nvme::NvmeCommand& cmd) {
  const sim::SimTime now = events_.now();
  mos::PageContent data = nvdimm_.content_at(cmd.prp);
  sim::SimTime start;
  sim::SimTime end;
  if (cfg_.datapath == Datapath::kBaseline) {
    const interconnect::Interval ddr = bus_.controller_access(now, cmd.length_bytes);
    controller_->cost(cmd.cid).interface += ddr.end - ddr.start;
    start = ddr.start;
    end = pcie_move(ddr.end, cmd.length_bytes, cmd.cid);
  } else {
    const interconnect::Interval iv = bus_.nvme_access(now, cmd.length_bytes);
    controller_->cost(cmd.cid).interface += iv.end - iv.start;
    start = iv.start;
    end = iv.end;
  }
  controller_->note_dma(cmd.prp, start, end);
  events_.schedule(end, sim::DeviceId::kFlash,
                   [this, cmd, data = std::move(data)]() mutable {
    const sim::SimTime arrived = events_.now();
    const sim::SimTime ack = flash_.execute_write(cmd, arrived);
    controller_->cost(cmd.cid).flash += ack - arrived;
    events_.schedule(ack, sim::DeviceId::kFlash,
                     [this, cmd, data = std::move(data)] {
                       flash_.commit_write(cmd, data, events_.now());
                       device_post_cqe(cmd);
                     });
  });
}

void System::device_post_cqe(const nvme::NvmeCommand& cmd) {
  const sim::SimTime now = events_.now();
  sim::SimTime end;
  if (cfg_.datapath == Datapath::kBaseline) {
    const sim::SimTime link = pcie_move(now, nvme::kCompletionBytes, cmd.cid);
    const interconnect::Interval ddr =
        bus_.controller_access(link, nvme::kCompletionBytes);
    controller_->cost(cmd.cid).interface += ddr.end - ddr.start;
    end = ddr.end;
  } else {
    const interconnect::Interval iv = bus_.nvme_access(now, nvme::kCompletionBytes);
    controller_->cost(cmd.cid).interface += iv.end - iv.start;
    end = iv.end;
  }
  events_.schedule(end, sim::DeviceId::kNvmeEngine, [this, cmd] {
    engine_->device_post_completion(cmd.cid);
    controller_->cost(cmd.cid).interface += cfg_.msi_latency;
    events_.schedule_in(cfg_.msi_latency, sim::DeviceId::kController,
                        [this] { controller_->on_interrupt(); });
  });
}

void System::on_cq_doorbell() {
  if (cfg_.datapath == Datapath::kBaseline) {
    pcie_.reserve(events_.now(), cfg_.pcie.transfer(4),
                  interconnect::BusMaster::kController, 4);
  }
}

// ------------------------------------------------------------ crash

SystemImage System::power_fail() {
  flash_.supercap_flush();
  return SystemImage{nvdimm_.persist_snapshot(), flash_.persistent_state()};
}

std::vector<nvme::NvmeCommand> System::recover() {
  std::vector<nvme::NvmeCommand> replayed = controller_->recover();
  events_.run();
  return replayed;
}

const mos::PageContent& System::logical_page(std::uint64_t page) const {
  const std::uint64_t set = mos::set_of_page(page, cfg_.mos);
  const nvdimm::TagEntry& e = nvdimm_.tag(set);
  if (e.valid && e.tag == mos::tag_of_page(page, cfg_.mos)) {
    return nvdimm_.frame(set);
  }
  return flash_.logical_content(page);
}

std::vector<std::uint64_t> System::touched_pages() const {
  std::vector<std::uint64_t> pages = flash_.stored_lbas();
  for (const auto& [set, content] : nvdimm_.state().frames) {
    const nvdimm::TagEntry& e = nvdimm_.tag(set);
    if (e.valid && !content.is_zero()) {
      pages.push_back(mos::page_of(e.tag, set, cfg_.mos));
    }
  }
  std::sort(pages.begin(), pages.end());
  pages.erase(std::unique(pages.begin(), pages.end()), pages.end());
  std::erase_if(pages, [this](std::uint64_t p) { return logical_page(p).is_zero(); });
  return pages;
}

}  // namespace hams::controller
