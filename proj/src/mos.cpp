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

#include <sstream>

#include "hams/error.hpp"
#include "hams/mos/address.hpp"
#include "hams/mos/config.hpp"
#include "hams/mos/page_content.hpp"

namespace hams::mos {

void MosConfig::validate() const {
  auto fail = [](const std::string& m) { raise(ErrorCode::kInvalidConfig, m); };
  if (page_size_bytes == 0 || (page_size_bytes & (page_size_bytes - 1)) != 0) {
    fail("page_size_bytes must be a power of two");
  }
  if (pinned_bytes >= nvdimm_bytes) fail("pinned_bytes must be < nvdimm_bytes");
  if (flash_bytes < nvdimm_bytes) fail("flash_bytes must be >= nvdimm_bytes");
  if (num_sets() == 0) fail("cache region holds no page");
  if (flash_pages() == 0) fail("flash holds no page");
}

AddressParts decompose(MosAddress addr, const MosConfig& cfg) {
  if (addr.value >= cfg.flash_bytes) {
    std::ostringstream msg;
    msg << "address 0x" << std::hex << addr.value << " beyond flash capacity 0x"
        << cfg.flash_bytes;
    raise(ErrorCode::kAddressOutOfRange, msg.str());
  }
  const std::uint64_t page = addr.value / cfg.page_size_bytes;
  const std::uint64_t sets = cfg.num_sets();
  return AddressParts{page / sets, page % sets,
                      addr.value % cfg.page_size_bytes};
}

MosAddress recompose(const AddressParts& parts, const MosConfig& cfg) {
  const std::uint64_t sets = cfg.num_sets();
  const std::uint64_t max_tag = (cfg.flash_pages() + sets - 1) / sets;
  if (parts.index >= sets || parts.offset >= cfg.page_size_bytes ||
      parts.tag >= max_tag) {
    raise(ErrorCode::kPartsOutOfRange, "address parts outside field ranges");
  }
  const std::uint64_t page = parts.tag * sets + parts.index;
  const std::uint64_t value = page * cfg.page_size_bytes + parts.offset;
  if (value >= cfg.flash_bytes) {
    raise(ErrorCode::kPartsOutOfRange, "recomposed address beyond flash");
  }
  return MosAddress{value};
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

void PageContent::write(std::uint32_t offset, std::uint32_t size,
                        std::uint64_t writer) {
  if (size == 0) return;
  if (mode_ == ContentMode::kChecksum) {
    std::uint64_t h = digest_ ^ 0x9e3779b97f4a7c15ULL;
    h = mix64(h ^ offset);
    h = mix64(h ^ (static_cast<std::uint64_t>(size) << 1));
    h = mix64(h ^ writer);
    digest_ = h == 0 ? 1 : h;
    return;
  }
  const std::uint32_t end = offset + size;
  // Trim or split whatever overlaps [offset, end).
  auto it = extents_.lower_bound(offset);
  if (it != extents_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.end > offset) {
      const Extent old = prev->second;
      prev->second.end = offset;
      if (old.end > end) extents_[end] = Extent{old.end, old.writer};
    }
  }
  it = extents_.lower_bound(offset);
  while (it != extents_.end() && it->first < end) {
    const Extent old = it->second;
    it = extents_.erase(it);
    if (old.end > end) {
      extents_[end] = Extent{old.end, old.writer};
      break;
    }
  }
  auto [pos, _] = extents_.insert_or_assign(offset, Extent{end, writer});
  // Keep the representation canonical so equal contents compare equal.
  auto next = std::next(pos);
  if (next != extents_.end() && next->first == pos->second.end &&
      next->second.writer == writer) {
    pos->second.end = next->second.end;
    extents_.erase(next);
  }
  if (pos != extents_.begin()) {
    auto prev = std::prev(pos);
    if (prev->second.end == pos->first && prev->second.writer == writer) {
      prev->second.end = pos->second.end;
      extents_.erase(pos);
    }
  }
}

std::optional<std::uint64_t> PageContent::writer_at(std::uint32_t offset) const {
  auto it = extents_.upper_bound(offset);
  if (it == extents_.begin()) return std::nullopt;
  --it;
  if (offset < it->second.end) return it->second.writer;
  return std::nullopt;
}

std::uint64_t PageContent::digest() const {
  if (mode_ == ContentMode::kChecksum) return digest_;
  if (extents_.empty()) return 0;
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (const auto& [start, ext] : extents_) {
    h = mix64(h ^ start);
    h = mix64(h ^ ext.end);
    h = mix64(h ^ ext.writer);
  }
  return h == 0 ? 1 : h;
}

bool PageContent::operator==(const PageContent& other) const {
  if (mode_ != other.mode_) {
    raise(ErrorCode::kInvariantViolation,
          "comparing page contents tracked in different modes");
  }
  if (mode_ == ContentMode::kChecksum) return digest_ == other.digest_;
  return extents_ == other.extents_;
}

}  // namespace hams::mos
