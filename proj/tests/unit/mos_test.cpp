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
#include <random>
#include <vector>

#include "hams/error.hpp"
#include "hams/mos/address.hpp"
#include "hams/mos/page_content.hpp"

namespace hams::mos {
namespace {

MosConfig toy() {
  MosConfig cfg;
  cfg.page_size_bytes = 16;
  cfg.pinned_bytes = 16;
  cfg.nvdimm_bytes = 32;
  cfg.flash_bytes = 4096;
  return cfg;
}

TEST(MosConfig, DefaultGeometry) {
  MosConfig cfg;
  EXPECT_EQ(cfg.num_sets(), 61440u);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(toy().num_sets(), 1u);
}

TEST(MosConfig, RejectsBadGeometry) {
  MosConfig cfg;
  cfg.page_size_bytes = 3000;
  EXPECT_THROW(cfg.validate(), SimError);
  cfg = MosConfig{};
  cfg.pinned_bytes = cfg.nvdimm_bytes;
  EXPECT_THROW(cfg.validate(), SimError);
  cfg = MosConfig{};
  cfg.flash_bytes = cfg.nvdimm_bytes - 1;
  EXPECT_THROW(cfg.validate(), SimError);
}

TEST(Decompose, ToyWorkedExample) {
  EXPECT_EQ(decompose(MosAddress{0xF0}, toy()), (AddressParts{0xF, 0x0, 0x0}));
  EXPECT_EQ(recompose(AddressParts{0xF, 0x0, 0x0}, toy()), MosAddress{0xF0});
}

TEST(Decompose, ZeroAddress) {
  EXPECT_EQ(decompose(MosAddress{0}, MosConfig{}), (AddressParts{}));
  EXPECT_EQ(recompose(AddressParts{}, MosConfig{}), MosAddress{0});
}

TEST(Decompose, DefaultConfigArithmetic) {
  const MosConfig cfg;
  const std::uint64_t page = 131072;
  const std::uint64_t sets = 61440;
  const std::uint64_t addr = page * 61441 + 5;
  // Oracle: page number 61441 = 1 * sets + 1.
  const std::uint64_t pn = addr / page;
  EXPECT_EQ(decompose(MosAddress{addr}, cfg),
            (AddressParts{pn / sets, pn % sets, addr % page}));
  EXPECT_EQ(decompose(MosAddress{addr}, cfg), (AddressParts{1, 1, 5}));
}

TEST(Decompose, BeyondFlashRaises) {
  try {
    decompose(MosAddress{toy().flash_bytes}, toy());
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAddressOutOfRange);
  }
}

TEST(Recompose, RejectsOutOfRangeParts) {
  EXPECT_THROW(recompose(AddressParts{0, 61440, 0}, MosConfig{}), SimError);
  EXPECT_THROW(recompose(AddressParts{0, 0, 131072}, MosConfig{}), SimError);
}

TEST(AddressProperty, RoundTripMillionRandomAddresses) {
  const MosConfig cfg;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1'000'000; ++i) {
    const MosAddress a{rng() % cfg.flash_bytes};
    const auto parts = decompose(a, cfg);
    ASSERT_LT(parts.index, cfg.num_sets());
    ASSERT_LT(parts.offset, cfg.page_size_bytes);
    ASSERT_EQ(recompose(parts, cfg), a);
    ASSERT_EQ(set_of_page(page_number(a, cfg), cfg), parts.index);
  }
}

TEST(PageContent, WriterTracking) {
  PageContent p;
  EXPECT_TRUE(p.is_zero());
  p.write(0, 64, 7);
  p.write(32, 64, 8);
  EXPECT_EQ(p.writer_at(0), 7u);
  EXPECT_EQ(p.writer_at(31), 7u);
  EXPECT_EQ(p.writer_at(32), 8u);
  EXPECT_EQ(p.writer_at(95), 8u);
  EXPECT_FALSE(p.writer_at(96).has_value());
  EXPECT_FALSE(p.is_zero());
}

TEST(PageContent, EqualityIgnoresWriteFragmentation) {
  PageContent a;
  a.write(0, 128, 1);
  PageContent b;
  b.write(0, 64, 1);
  b.write(64, 64, 1);
  EXPECT_EQ(a, b);
  b.write(10, 1, 2);
  EXPECT_NE(a, b);
}

TEST(PageContent, ChecksumModeComparesHistory) {
  PageContent a(ContentMode::kChecksum);
  PageContent b(ContentMode::kChecksum);
  a.write(0, 64, 1);
  b.write(0, 64, 1);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.is_zero());
  b.write(0, 64, 2);
  EXPECT_NE(a, b);
}

}  // namespace
}  // namespace hams::mos

namespace hams::mos {
namespace {

// Property: the extent map agrees with a byte-array model of the page.
TEST(PageContentProperty, MatchesByteArrayOracle) {
  constexpr std::uint32_t kPage = 4096;
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    PageContent p;
    std::vector<std::uint64_t> bytes(kPage, 0);
    for (int w = 0; w < 40; ++w) {
      const std::uint32_t off = rng() % kPage;
      const std::uint32_t size = 1 + rng() % (kPage - off);
      const std::uint64_t writer = 1 + rng() % 5;
      p.write(off, size, writer);
      std::fill(bytes.begin() + off, bytes.begin() + off + size, writer);
    }
    for (std::uint32_t i = 0; i < kPage; ++i) {
      const auto got = p.writer_at(i);
      ASSERT_EQ(got.value_or(0), bytes[i]) << "byte " << i;
    }
    // Canonical form: rebuilding from the oracle gives an equal page.
    PageContent rebuilt;
    for (std::uint32_t i = 0; i < kPage; ++i) {
      if (bytes[i] != 0) rebuilt.write(i, 1, bytes[i]);
    }
    ASSERT_EQ(rebuilt, p);
  }
}

}  // namespace
}  // namespace hams::mos
