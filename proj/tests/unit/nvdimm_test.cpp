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

#include <random>

#include "hams/error.hpp"
#include "hams/nvdimm/nvdimm.hpp"

namespace hams::nvdimm {
namespace {

mos::MosConfig small_mos(std::uint64_t sets) {
  mos::MosConfig cfg;
  cfg.nvdimm_bytes = cfg.pinned_bytes + sets * cfg.page_size_bytes;
  return cfg;
}

TEST(Ddr4Timing, ClosedForm) {
  const Ddr4Timing t;
  EXPECT_EQ(t.transfer(64), sim::SimTime{14'000 + 3'330});
  EXPECT_EQ(t.transfer(0), sim::SimTime{14'000});
  EXPECT_EQ(t.transfer(65), sim::SimTime{14'000 + 2 * 3'330});
  EXPECT_EQ(t.transfer(131072), sim::SimTime{14'000 + 2048 * 3'330});
}

TEST(Ddr4Timing, PeakBandwidthCapsFastBursts) {
  Ddr4Timing t;
  t.tburst_ps = 1;
  // 64 B at 20 GB/s takes 3.2 ns, so the one-picosecond burst is overridden.
  EXPECT_EQ(t.transfer(64), sim::SimTime{14'000 + 3'200});
}

TEST(Nvdimm, ReadLineLatency) {
  Nvdimm d(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  const auto line = d.read_line(2, 64);
  EXPECT_EQ(line.latency, sim::SimTime{17'330});
  EXPECT_EQ(line.entry, TagEntry{});
  EXPECT_TRUE(line.page->is_zero());
  EXPECT_EQ(d.read_line(0, 0).latency, sim::SimTime{14'000});
  EXPECT_THROW(d.read_line(4, 64), SimError);
}

TEST(Nvdimm, WriteLineUpdatesTagAndFrame) {
  Nvdimm d(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  mos::PageContent page;
  page.write(0, 64, 9);
  const TagEntry e{3, true, true, false};
  EXPECT_EQ(d.write_line(1, e, page, 64), sim::SimTime{17'330});
  EXPECT_EQ(d.tag(1), e);
  EXPECT_EQ(d.frame(1), page);
}

TEST(Nvdimm, DirtyInvalidTagRejected) {
  Nvdimm d(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  EXPECT_THROW(d.set_tag(0, TagEntry{0, false, true, false}), SimError);
}

TEST(Nvdimm, PinnedLayoutOrder) {
  const auto l = PinnedLayout::compute(16, 32, 131072, 1, 1024);
  EXPECT_EQ(l.sq_offset, 0u);
  EXPECT_EQ(l.cq_offset, 16u * 64);
  EXPECT_EQ(l.prp_offset, 131072u);
  EXPECT_EQ(l.msi_offset, 131072u + 32 * 131072);
  EXPECT_EQ(l.wait_offset, l.msi_offset + 16);
  EXPECT_EQ(l.total_bytes, l.wait_offset + 1024 * 32);
}

TEST(Nvdimm, PinnedRegionTooSmallRejected) {
  auto cfg = small_mos(4);
  cfg.pinned_bytes = 64 * 1024;
  cfg.nvdimm_bytes = cfg.pinned_bytes + 4 * cfg.page_size_bytes;
  EXPECT_THROW(Nvdimm(cfg, Ddr4Timing{}, NvdimmParams{}), SimError);
}

TEST(Nvdimm, PrpAddressesDoNotAliasFrames) {
  Nvdimm d(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  const auto a = d.prp_slot_address(0);
  EXPECT_FALSE(d.set_of_address(a).has_value());
  EXPECT_EQ(d.slot_of_address(a), 0u);
  EXPECT_EQ(d.set_of_address(d.frame_address(3)), 3u);
  EXPECT_FALSE(d.slot_of_address(d.frame_address(3)).has_value());
  EXPECT_THROW(d.content_at(a + 1), SimError);
}

TEST(Nvdimm, PrpPoolAllocation) {
  NvdimmParams p;
  p.prp_slots = 2;
  Nvdimm d(small_mos(4), Ddr4Timing{}, p);
  EXPECT_EQ(d.allocate_prp_slot(), 0u);
  EXPECT_EQ(d.allocate_prp_slot(), 1u);
  EXPECT_FALSE(d.allocate_prp_slot().has_value());
  EXPECT_EQ(d.free_prp_slots(), 0u);
  d.free_prp_slot(0);
  EXPECT_EQ(d.free_prp_slots(), 1u);
  EXPECT_THROW(d.free_prp_slot(0), SimError);
}

TEST(Nvdimm, SnapshotRestoreIsIdentity) {
  Nvdimm d(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  const auto before = d.persist_snapshot();
  d.restore_snapshot(before);
  EXPECT_EQ(d.persist_snapshot(), before);
}

TEST(Nvdimm, PinnedSqSlotSurvivesRestore) {
  Nvdimm d(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  nvme::NvmeCommand cmd;
  cmd.cid = 5;
  cmd.lba = 77;
  cmd.journal_tag = true;
  d.pinned().sq[3] = cmd;
  const auto image = d.persist_snapshot();
  Nvdimm fresh(small_mos(4), Ddr4Timing{}, NvdimmParams{});
  fresh.restore_snapshot(image);
  EXPECT_EQ(fresh.pinned().sq[3], cmd);
}

// Property: at any crash point the restored pinned region equals a shadow
// copy maintained alongside the mutations.
TEST(NvdimmProperty, PinnedRegionMatchesShadowAtRandomCrashes) {
  std::mt19937_64 rng(17);
  Nvdimm d(small_mos(8), Ddr4Timing{}, NvdimmParams{});
  PinnedRegion shadow = d.pinned();
  for (int crash = 0; crash < 1000; ++crash) {
    const int steps = 1 + static_cast<int>(rng() % 8);
    for (int s = 0; s < steps; ++s) {
      const std::uint32_t slot = rng() % d.pinned().sq.size();
      nvme::NvmeCommand cmd;
      cmd.cid = static_cast<std::uint16_t>(rng());
      cmd.lba = rng() % 1000;
      cmd.journal_tag = rng() % 2;
      d.pinned().sq[slot] = cmd;
      shadow.sq[slot] = cmd;
      d.pinned().sq_tail = shadow.sq_tail = rng() % 16;
      const std::uint32_t pslot = rng() % d.pinned().prp_slots.size();
      d.pinned().prp_slots[pslot].write(0, 64, crash + 1);
      shadow.prp_slots[pslot].write(0, 64, crash + 1);
    }
    Nvdimm restored(small_mos(8), Ddr4Timing{}, NvdimmParams{});
    restored.restore_snapshot(d.persist_snapshot());
    ASSERT_EQ(restored.pinned(), shadow) << "crash " << crash;
  }
}

}  // namespace
}  // namespace hams::nvdimm
