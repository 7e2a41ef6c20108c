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

#include <cstring>

#include "hams/nvme/command.hpp"

namespace hams::nvme {

namespace {

void put32(CommandBytes& raw, std::size_t dword, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    raw[dword * 4 + i] = static_cast<std::byte>((v >> (8 * i)) & 0xFFu);
  }
}

std::uint32_t get32(const CommandBytes& raw, std::size_t dword) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(raw[dword * 4 + i]) << (8 * i);
  }
  return v;
}

}  // namespace

CommandBytes encode(const NvmeCommand& cmd) {
  CommandBytes raw{};
  put32(raw, 0,
        static_cast<std::uint32_t>(cmd.opcode) |
            (static_cast<std::uint32_t>(cmd.cid) << 16));
  put32(raw, 2, cmd.journal_tag ? 1u : 0u);
  put32(raw, 6, static_cast<std::uint32_t>(cmd.prp));
  put32(raw, 7, static_cast<std::uint32_t>(cmd.prp >> 32));
  put32(raw, 10, static_cast<std::uint32_t>(cmd.lba));
  put32(raw, 11, static_cast<std::uint32_t>(cmd.lba >> 32));
  put32(raw, 12, cmd.fua ? (1u << 30) : 0u);
  put32(raw, 13, cmd.length_bytes);
  return raw;
}

NvmeCommand decode(const CommandBytes& raw) {
  NvmeCommand cmd;
  const std::uint32_t cdw0 = get32(raw, 0);
  cmd.opcode = static_cast<Opcode>(cdw0 & 0xFFu);
  cmd.cid = static_cast<std::uint16_t>(cdw0 >> 16);
  cmd.journal_tag = (get32(raw, 2) & 1u) != 0;
  cmd.prp = get32(raw, 6) | (static_cast<std::uint64_t>(get32(raw, 7)) << 32);
  cmd.lba = get32(raw, 10) | (static_cast<std::uint64_t>(get32(raw, 11)) << 32);
  cmd.fua = (get32(raw, 12) & (1u << 30)) != 0;
  cmd.length_bytes = get32(raw, 13);
  return cmd;
}

}  // namespace hams::nvme
