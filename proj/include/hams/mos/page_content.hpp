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
#include <optional>

namespace hams::mos {

enum class ContentMode : std::uint8_t {
  /// Every byte range remembers the id of the store that last wrote it.
  kExact,
  /// Only a 64-bit digest of the write history is kept.
  kChecksum,
};

/// Contents of one MoS page. Stores are identified by an opaque writer id
/// (the request id), so content comparison is a comparison of who wrote
/// which bytes. A default-constructed page is the zero page.
class PageContent {
 public:
  struct Extent {
    std::uint32_t end = 0;  // exclusive
    std::uint64_t writer = 0;

    bool operator==(const Extent&) const = default;
  };

  PageContent() = default;
  explicit PageContent(ContentMode mode) : mode_(mode) {}

  ContentMode mode() const { return mode_; }

  void write(std::uint32_t offset, std::uint32_t size, std::uint64_t writer);

  /// Writer id of the byte at `offset`, or nullopt for a zero byte. Only
  /// meaningful in exact mode.
  std::optional<std::uint64_t> writer_at(std::uint32_t offset) const;

  /// Extents keyed by start offset; empty in checksum mode.
  const std::map<std::uint32_t, Extent>& extents() const { return extents_; }

  bool is_zero() const { return digest_ == 0 && extents_.empty(); }
  std::uint64_t digest() const;

  bool operator==(const PageContent& other) const;

 private:
  ContentMode mode_ = ContentMode::kExact;
  std::map<std::uint32_t, Extent> extents_;
  std::uint64_t digest_ = 0;  // checksum mode only
};

}  // namespace hams::mos
