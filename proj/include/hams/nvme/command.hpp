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
#include <cstddef>
#include <cstdint>

namespace hams::nvme {

enum class Opcode : std::uint8_t {
  kWrite = 0x01,
  kRead = 0x02,
};

/// An NVMe I/O command as kept in an SQ slot. `lba` counts MoS pages and
/// `prp` is an NVDIMM byte address (a cache frame or a PRP-pool slot).
struct NvmeCommand {
  std::uint16_t cid = 0;
  Opcode opcode = Opcode::kRead;
  std::uint64_t lba = 0;
  std::uint64_t prp = 0;
  std::uint32_t length_bytes = 0;
  bool fua = false;
  bool journal_tag = false;

  bool operator==(const NvmeCommand&) const = default;
};

inline constexpr std::size_t kCommandBytes = 64;
using CommandBytes = std::array<std::byte, kCommandBytes>;

/// Serializes to the 64-byte submission entry layout: opcode in CDW0[7:0],
/// CID in CDW0[31:16], the journal tag in reserved CDW2 bit 0, PRP1 in
/// CDW6-7, SLBA in CDW10-11, FUA in CDW12 bit 30 and the transfer length in
/// bytes in CDW13.
CommandBytes encode(const NvmeCommand& cmd);
NvmeCommand decode(const CommandBytes& raw);

/// Completion queue entry. Only the fields the engine consumes.
struct CompletionEntry {
  std::uint16_t cid = 0;
  std::uint16_t sq_head = 0;
  std::uint16_t status = 0;
  bool phase = false;

  bool operator==(const CompletionEntry&) const = default;
};

inline constexpr std::size_t kCompletionBytes = 16;

}  // namespace hams::nvme
