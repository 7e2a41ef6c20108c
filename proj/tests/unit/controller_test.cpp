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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "hams/controller/system.hpp"
#include "hams/error.hpp"
#include "support.hpp"

namespace hams::controller {
namespace {

using hams::testing::mixed_trace;
using hams::testing::request;
using hams::testing::small_system;

constexpr auto kLoad = AccessKind::kLoad;
constexpr auto kStore = AccessKind::kStore;

/// page_size 16, one cache set: address 0xF0 is tag 0xF, set 0.
SystemConfig toy() {
  SystemConfig cfg;
  cfg.mos.page_size_bytes = 16;
  cfg.mos.pinned_bytes = 64 * 1024;
  cfg.mos.nvdimm_bytes = cfg.mos.pinned_bytes + 16;
  cfg.mos.flash_bytes = 1024 * 1024;
  cfg.flash.flash_page_bytes = 16;
  cfg.flash.channel_stripe = 1;
  return cfg;
}

/// Steps until the engine holds `n` journaled commands.
std::vector<nvme::NvmeCommand> step_until_outstanding(System& sys, std::size_t n) {
  while (sys.engine().outstanding() < n) {
    if (sys.step(1) == 0) break;
  }
  return sys.engine().outstanding_commands();
}

const Completion& completion_of(const System& sys, std::uint64_t id) {
  const auto& all = sys.completions();
  auto it = std::find_if(all.begin(), all.end(),
                         [&](const Completion& c) { return c.req.req_id == id; });
  if (it == all.end()) throw std::runtime_error("request never completed");
  return *it;
}

TEST(Controller, ToyColdLoadComposesFill) {
  System sys(toy());
  sys.load({request(1, kLoad, 0xF0, 8)});
  const auto cmds = step_until_outstanding(sys, 1);
  ASSERT_EQ(cmds.size(), 1u);
  EXPECT_EQ(cmds[0].opcode, nvme::Opcode::kRead);
  EXPECT_EQ(cmds[0].lba, 0xFu);
  EXPECT_EQ(cmds[0].prp, sys.nvdimm().frame_address(0));
  EXPECT_TRUE(sys.nvdimm().tag(0).busy);
  sys.run();
  EXPECT_FALSE(completion_of(sys, 1).hit);
  EXPECT_EQ(sys.nvdimm().tag(0), (nvdimm::TagEntry{0xF, true, false, false}));
}

TEST(Controller, ReloadHitCostsOneLineAccess) {
  auto cfg = small_system(16, Datapath::kAdvanced, nvme::Mode::kExtend);
  System sys(cfg);
  sys.load({request(1, kLoad, 4096, 64),
            request(2, kLoad, 4096, 64, sim::microseconds(1000))});
  sys.run();
  const auto& again = completion_of(sys, 2);
  EXPECT_TRUE(again.hit);
  const auto line = cfg.ddr4.transfer(64);
  EXPECT_EQ(again.latency(), line);
  EXPECT_EQ(again.breakdown.nvdimm, line);
  EXPECT_EQ(again.breakdown.flash_array, sim::SimTime{});
  EXPECT_EQ(again.breakdown.interface, sim::SimTime{});
}

TEST(Controller, DirtyVictimIsClonedBeforeEviction) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  const std::uint64_t page = cfg.mos.page_size_bytes;
  System sys(cfg);
  sys.load({request(1, kStore, 1 * page, 64),
            request(2, kLoad, 5 * page, 64, sim::microseconds(1000))});
  for (auto t = sys.events().next_time(); t && *t < sim::microseconds(1000);
       t = sys.events().next_time()) {
    sys.step(1);
  }
  const auto before = sys.nvdimm().frame(1);
  const auto cmds = step_until_outstanding(sys, 2);
  ASSERT_EQ(cmds.size(), 2u);
  const auto& evict = cmds[0];
  const auto& fill = cmds[1];
  EXPECT_EQ(evict.opcode, nvme::Opcode::kWrite);
  EXPECT_EQ(evict.lba, 1u);
  EXPECT_NE(evict.prp, sys.nvdimm().frame_address(1));
  ASSERT_TRUE(sys.nvdimm().slot_of_address(evict.prp).has_value());
  EXPECT_EQ(sys.nvdimm().content_at(evict.prp), before);
  EXPECT_EQ(fill.opcode, nvme::Opcode::kRead);
  EXPECT_EQ(fill.lba, 5u);
  EXPECT_EQ(fill.prp, sys.nvdimm().frame_address(1));
  sys.run();
  EXPECT_EQ(sys.controller().stats().clones, 1u);
  EXPECT_EQ(sys.flash().logical_content(1).writer_at(0), 1u);
  EXPECT_EQ(sys.nvdimm().free_prp_slots(), cfg.nvdimm.prp_slots);
}

TEST(Controller, MissOnEmptySetHasNoEviction) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  System sys(cfg);
  sys.load({request(1, kLoad, 0, 64)});
  step_until_outstanding(sys, 1);
  const auto& txns = sys.controller().transactions();
  ASSERT_EQ(txns.size(), 1u);
  const auto& txn = txns.begin()->second;
  EXPECT_FALSE(txn.evict_cmd.has_value());
  EXPECT_FALSE(txn.prp_clone_slot.has_value());
  EXPECT_TRUE(txn.fill_cmd.has_value());
  sys.run();
  EXPECT_EQ(sys.controller().stats().clones, 0u);
  EXPECT_EQ(sys.controller().stats().evictions_done, 0u);
}

TEST(Controller, SecondMissToBusySetWaits) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  const std::uint64_t page = cfg.mos.page_size_bytes;
  System sys(cfg);
  sys.load({request(1, kLoad, 0, 64), request(2, kLoad, 4 * page, 64)});
  step_until_outstanding(sys, 1);
  ASSERT_EQ(sys.nvdimm().pinned().wait_queue.size(), 1u);
  EXPECT_EQ(sys.nvdimm().pinned().wait_queue.front().req_id, 2u);
  sys.run();
  EXPECT_EQ(sys.controller().stats().waits, 1u);
  EXPECT_EQ(sys.controller().stats().misses, 2u);
  EXPECT_TRUE(sys.nvdimm().pinned().wait_queue.empty());
}

TEST(Controller, WaitingStoreReplaysExactlyOnce) {
  System sys(toy());
  sys.load({request(1, kLoad, 0x00, 8), request(2, kStore, 0xF0, 8)});
  sys.run();
  const auto n = std::count_if(sys.completions().begin(), sys.completions().end(),
                               [](const Completion& c) { return c.req.req_id == 2; });
  EXPECT_EQ(n, 1);
  EXPECT_EQ(sys.controller().stats().waits, 1u);
  EXPECT_EQ(sys.logical_page(0xF).writer_at(0), 2u);
  EXPECT_FALSE(sys.logical_page(0xF).writer_at(8).has_value());
}

TEST(Controller, NoWaitersLeavesQueueEmpty) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  System sys(cfg);
  sys.load({request(1, kLoad, 0, 64)});
  sys.run();
  EXPECT_TRUE(sys.nvdimm().pinned().wait_queue.empty());
  EXPECT_EQ(sys.controller().stats().waits, 0u);
}

TEST(Controller, PersistModeSerializesMisses) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kPersist);
  const std::uint64_t page = cfg.mos.page_size_bytes;
  System sys(cfg);
  sys.load({request(1, kLoad, 0, 64), request(2, kLoad, 1 * page, 64)});
  while (sys.step(1) == 1) ASSERT_LE(sys.engine().outstanding(), 1u);
  EXPECT_EQ(sys.controller().stats().max_outstanding_commands, 1u);
  EXPECT_EQ(sys.controller().stats().misses, 2u);
}

TEST(Controller, ExtendModeOverlapsMissesToDistinctSets) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  const std::uint64_t page = cfg.mos.page_size_bytes;
  System sys(cfg);
  sys.load({request(1, kLoad, 0, 64), request(2, kLoad, 1 * page, 64)});
  sys.run();
  EXPECT_EQ(sys.controller().stats().max_outstanding_commands, 2u);
}

TEST(Controller, PersistWritesBypassDeviceBuffer) {
  auto cfg = small_system(4, Datapath::kBaseline, nvme::Mode::kPersist);
  const std::uint64_t page = cfg.mos.page_size_bytes;
  System sys(cfg);
  sys.load({request(1, kStore, 0, 64), request(2, kLoad, 4 * page, 64)});
  std::vector<nvme::NvmeCommand> seen;
  while (sys.step(1) == 1) {
    for (const auto& c : sys.engine().outstanding_commands()) {
      if (c.opcode == nvme::Opcode::kWrite) seen.push_back(c);
    }
  }
  ASSERT_FALSE(seen.empty());
  for (const auto& c : seen) EXPECT_TRUE(c.fua);
  EXPECT_FALSE(sys.flash().buffer_resident(0));
  EXPECT_EQ(sys.flash().flash_content(0).writer_at(0), 1u);
}

TEST(Controller, ModeChangeRequiresIdle) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  System sys(cfg);
  sys.load({request(1, kLoad, 0, 64)});
  step_until_outstanding(sys, 1);
  try {
    sys.controller().set_mode(nvme::Mode::kPersist);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModeChangeWhileBusy);
  }
  sys.run();
  sys.controller().set_mode(nvme::Mode::kPersist);
  EXPECT_EQ(sys.controller().mode(), nvme::Mode::kPersist);
}

TEST(Controller, RequestCrossingPageRejected) {
  auto cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  System sys(cfg);
  sys.load({request(1, kLoad, cfg.mos.page_size_bytes - 32, 64)});
  try {
    sys.run();
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAddressOutOfRange);
  }
}

TEST(Controller, PrpExhaustionStallsThenDrains) {
  auto cfg = small_system(8, Datapath::kAdvanced, nvme::Mode::kExtend);
  cfg.nvdimm.prp_slots = 1;
  const std::uint64_t page = cfg.mos.page_size_bytes;
  std::vector<MemoryRequest> reqs;
  for (std::uint64_t s = 0; s < 4; ++s) reqs.push_back(request(s + 1, kStore, s * page, 64));
  for (std::uint64_t s = 0; s < 4; ++s) {
    reqs.push_back(request(s + 5, kLoad, (s + 8) * page, 64, sim::microseconds(1000)));
  }
  System sys(cfg);
  sys.load(reqs);
  sys.run();
  EXPECT_GT(sys.controller().stats().prp_stalls, 0u);
  EXPECT_EQ(sys.completions().size(), reqs.size());
  EXPECT_TRUE(sys.controller().idle());
  for (std::uint64_t s = 0; s < 4; ++s) {
    EXPECT_EQ(sys.logical_page(s).writer_at(0), s + 1);
  }
}

TEST(Controller, UnsortedTraceRejected) {
  System sys(small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend));
  try {
    sys.load({request(1, kLoad, 0, 64, sim::SimTime{5}),
              request(2, kLoad, 0, 64, sim::SimTime{4})});
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsortedTrace);
  }
}

class ControllerProperty
    : public ::testing::TestWithParam<std::tuple<Datapath, nvme::Mode>> {};

// Property: per-request classes sum to the end-to-end latency, and no class
// is negative (SimTime subtraction raises on a negative remainder).
TEST_P(ControllerProperty, AccountingConservation) {
  auto [dp, mode] = GetParam();
  auto cfg = small_system(16, dp, mode);
  const auto reqs = mixed_trace(cfg.mos, 2000, 64, 31);
  System sys(cfg);
  sys.load(reqs);
  sys.run();
  ASSERT_EQ(sys.completions().size(), reqs.size());
  for (const auto& c : sys.completions()) {
    ASSERT_EQ(c.breakdown.total(), c.latency()) << c.req.req_id;
    if (c.hit) {
      ASSERT_EQ(c.breakdown.flash_array, sim::SimTime{});
    }
  }
}

// Property: bus occupancies never overlap, NVMe DMA only under the lock,
// and the hazard audits stay at zero.
TEST_P(ControllerProperty, BusAndHazardAudits) {
  auto [dp, mode] = GetParam();
  auto cfg = small_system(8, dp, mode);
  const auto reqs = mixed_trace(cfg.mos, 2000, 32, 77);
  System sys(cfg);
  sys.bus().timeline().set_recording(true);
  sys.load(reqs);
  sys.run();
  const auto& h = sys.bus().timeline().history();
  EXPECT_TRUE(interconnect::intervals_disjoint(h));
  EXPECT_TRUE(interconnect::nvme_within_lock(h, sys.bus().lock().windows()));
  const auto& st = sys.controller().stats();
  EXPECT_EQ(st.redundant_evictions, 0u);
  EXPECT_EQ(st.dma_cache_overlaps, 0u);
  EXPECT_EQ(st.busy_victim_violations, 0u);
  EXPECT_TRUE(sys.controller().idle());
  EXPECT_EQ(sys.nvdimm().free_prp_slots(), cfg.nvdimm.prp_slots);
  for (std::uint64_t s = 0; s < sys.nvdimm().num_sets(); ++s) {
    EXPECT_FALSE(sys.nvdimm().tag(s).busy);
  }
}

// Property: the final memory image equals stores applied in trace order.
TEST_P(ControllerProperty, FinalStateMatchesSequentialOracle) {
  auto [dp, mode] = GetParam();
  auto cfg = small_system(8, dp, mode);
  const auto reqs = mixed_trace(cfg.mos, 3000, 40, 123);
  std::map<std::uint64_t, mos::PageContent> oracle;
  for (const auto& r : reqs) {
    if (r.kind != kStore) continue;
    const std::uint64_t page = r.addr.value / cfg.mos.page_size_bytes;
    oracle[page].write(static_cast<std::uint32_t>(r.addr.value % cfg.mos.page_size_bytes),
                       r.size_bytes, r.req_id);
  }
  System sys(cfg);
  sys.load(reqs);
  sys.run();
  std::vector<std::uint64_t> expected_pages;
  for (const auto& [p, c] : oracle) expected_pages.push_back(p);
  EXPECT_EQ(sys.touched_pages(), expected_pages);
  for (const auto& [p, c] : oracle) EXPECT_EQ(sys.logical_page(p), c) << "page " << p;
  EXPECT_EQ(sys.acknowledged(), oracle);
}

INSTANTIATE_TEST_SUITE_P(
    AllConfigs, ControllerProperty,
    ::testing::Combine(::testing::Values(Datapath::kBaseline, Datapath::kAdvanced),
                       ::testing::Values(nvme::Mode::kPersist, nvme::Mode::kExtend)),
    [](const auto& info) {
      std::string name = std::get<0>(info.param) == Datapath::kBaseline ? "Baseline"
                                                                         : "Advanced";
      name += std::get<1>(info.param) == nvme::Mode::kPersist ? "Persist" : "Extend";
      return name;
    });

}  // namespace
}  // namespace hams::controller
