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
#include <memory>
#include <optional>
#include <vector>

#include "hams/controller/accounting.hpp"
#include "hams/controller/controller.hpp"
#include "hams/flash/ull_flash.hpp"
#include "hams/interconnect/interconnect.hpp"
#include "hams/mos/config.hpp"
#include "hams/nvdimm/nvdimm.hpp"
#include "hams/nvme/engine.hpp"
#include "hams/sim/event_queue.hpp"

namespace hams::controller {

/// Baseline: ULL-Flash behind PCIe with its internal DRAM buffer.
/// Advanced: ULL-Flash on the NVDIMM's DDR4 channel, no buffer, commands
/// pushed through the register interface, DMA arbitrated by the lock.
enum class Datapath : std::uint8_t { kBaseline, kAdvanced };

struct SystemConfig {
  mos::MosConfig mos;
  nvdimm::Ddr4Timing ddr4;
  nvdimm::NvdimmParams nvdimm;
  flash::FlashGeometry flash;
  flash::BufferConfig buffer;  // ignored (forced off) on the advanced datapath
  interconnect::PcieLink pcie;
  Datapath datapath = Datapath::kAdvanced;
  /// Advanced only: register commands travel on a second DDR4 channel.
  bool dedicated_channel = false;
  double bus_clock_hz = 1.2e9;
  sim::SimTime msi_latency;
  nvme::Mode mode = nvme::Mode::kExtend;
  /// Closed-loop window of the request driver.
  std::uint32_t max_outstanding = 16;

  void validate() const;
  bool buffer_enabled() const {
    return datapath == Datapath::kBaseline && buffer.enabled;
  }
};

/// What survives a power failure.
struct SystemImage {
  nvdimm::NvdimmState nvdimm;
  flash::PersistentFlash flash;
};

/// One HAMS instance: event queue, NVDIMM, controller, NVMe engine, the
/// device and the links between them, plus a closed-loop request driver.
/// Not copyable or movable: events hold pointers into it.
class System {
 public:
  explicit System(const SystemConfig& cfg, const SystemImage* image = nullptr);
  System(const System&) = delete;
  System& operator=(const System&) = delete;

  /// Queues a request stream sorted by issue_time. The driver keeps at most
  /// max_outstanding requests in the controller.
  void load(std::vector<MemoryRequest> requests);

  void run() { events_.run(); }
  /// Dispatches up to `n` events. Returns how many fired.
  std::uint64_t step(std::uint64_t n);

  /// Power failure now: the device buffer is flushed by its supercap, then
  /// the persistent state is captured. The instance must not be used after.
  SystemImage power_fail();

  /// Power-up over `image`: recovery of the controller and replay of the
  /// journal, run to quiescence. Returns the replayed commands.
  std::vector<nvme::NvmeCommand> recover();

  /// Page content as a reader of the MoS space would see it.
  const mos::PageContent& logical_page(std::uint64_t page) const;
  /// Pages with any non-zero content in cache or flash.
  std::vector<std::uint64_t> touched_pages() const;

  /// Stores acknowledged to the driver, per page.
  const std::map<std::uint64_t, mos::PageContent>& acknowledged() const {
    return acked_;
  }
  const std::vector<Completion>& completions() const { return completions_; }

  const SystemConfig& config() const { return cfg_; }
  sim::EventQueue& events() { return events_; }
  const sim::EventQueue& events() const { return events_; }
  nvdimm::Nvdimm& nvdimm() { return nvdimm_; }
  const nvdimm::Nvdimm& nvdimm() const { return nvdimm_; }
  nvme::NvmeEngine& engine() { return *engine_; }
  HamsController& controller() { return *controller_; }
  const HamsController& controller() const { return *controller_; }
  flash::UllFlash& flash() { return flash_; }
  const flash::UllFlash& flash() const { return flash_; }
  interconnect::DdrBus& bus() { return bus_; }
  const interconnect::DdrBus& bus() const { return bus_; }
  const interconnect::DdrBus& command_bus() const {
    return side_bus_ ? *side_bus_ : bus_;
  }
  const interconnect::Timeline& pcie() const { return pcie_; }
  std::uint64_t commands_executed() const { return commands_executed_; }

 private:
  void pump();
  void issue(MemoryRequest req);
  void on_complete(const Completion& c);

  void on_sq_doorbell();
  void device_receive(sim::SimTime at, std::uint32_t count);
  void device_start(const nvme::NvmeCommand& cmd);
  void device_read_dma(const nvme::NvmeCommand& cmd);
  void device_write_dma(const nvme::NvmeCommand& cmd);
  void device_post_cqe(const nvme::NvmeCommand& cmd);
  void on_cq_doorbell();
  interconnect::DdrBus& cmd_bus() { return side_bus_ ? *side_bus_ : bus_; }
  sim::SimTime pcie_move(sim::SimTime at, std::uint64_t bytes,
                         std::uint16_t cid);

  SystemConfig cfg_;
  sim::EventQueue events_;
  nvdimm::Nvdimm nvdimm_;
  flash::UllFlash flash_;
  interconnect::DdrBus bus_;
  std::unique_ptr<interconnect::DdrBus> side_bus_;
  interconnect::Timeline pcie_;
  std::unique_ptr<nvme::NvmeEngine> engine_;
  std::unique_ptr<HamsController> controller_;

  std::vector<MemoryRequest> trace_;
  std::size_t next_ = 0;
  std::uint32_t in_flight_ = 0;
  std::vector<Completion> completions_;
  std::map<std::uint64_t, mos::PageContent> acked_;
  std::uint64_t commands_executed_ = 0;
  // SQ entries the device has been told about but not fetched yet.
  std::uint32_t announced_ = 0;
};

}  // namespace hams::controller
