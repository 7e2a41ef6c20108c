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

#include "hams/workload/trace.hpp"

#include <cctype>
#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hams/error.hpp"

namespace hams::workload {

namespace {

[[noreturn]] void bad_line(std::size_t line, const std::string& why) {
  raise(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + why);
}

bool parse_u64(const std::string& tok, int base, std::uint64_t& out) {
  if (tok.empty()) return false;
  for (char c : tok) {
    const bool ok = base == 16 ? std::isxdigit(static_cast<unsigned char>(c)) != 0
                               : std::isdigit(static_cast<unsigned char>(c)) != 0;
    if (!ok) return false;
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, base);
  if (errno == ERANGE || *end != '\0') return false;
  out = v;
  return true;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string tick, op, addr, size, extra;
    if (!(fields >> tick >> op >> addr >> size)) bad_line(lineno, "expected 4 fields");
    if (fields >> extra) bad_line(lineno, "trailing field '" + extra + "'");

    TraceRecord r;
    if (!parse_u64(tick, 10, r.tick.ticks)) bad_line(lineno, "bad tick '" + tick + "'");
    if (op == "L") {
      r.op = controller::AccessKind::kLoad;
    } else if (op == "S") {
      r.op = controller::AccessKind::kStore;
    } else {
      bad_line(lineno, "bad op '" + op + "'");
    }
    if (addr.size() < 3 || addr[0] != '0' || (addr[1] != 'x' && addr[1] != 'X') ||
        !parse_u64(addr.substr(2), 16, r.addr)) {
      bad_line(lineno, "bad address '" + addr + "'");
    }
    std::uint64_t sz = 0;
    if (!parse_u64(size, 10, sz) || sz == 0 || sz > UINT32_MAX) {
      bad_line(lineno, "bad size '" + size + "'");
    }
    r.size = static_cast<std::uint32_t>(sz);
    if (!out.empty() && r.tick < out.back().tick) {
      raise(ErrorCode::kUnsortedTrace,
            "line " + std::to_string(lineno) + ": tick goes backwards");
    }
    out.push_back(r);
  }
  return out;
}

std::vector<TraceRecord> parse_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoError, "cannot open trace '" + path + "'");
  return parse_trace(in);
}

std::string format_record(const TraceRecord& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%" PRIu64 " %c 0x%" PRIX64 " %" PRIu32, r.tick.ticks,
                r.op == controller::AccessKind::kLoad ? 'L' : 'S', r.addr, r.size);
  return buf;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

void write_trace_file(const std::string& path,
                      const std::vector<TraceRecord>& records) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::kIoError, "cannot write trace '" + path + "'");
  write_trace(out, records);
}

std::vector<controller::MemoryRequest> to_requests(
    const std::vector<TraceRecord>& records, const mos::MosConfig& cfg) {
  std::vector<controller::MemoryRequest> out;
  out.reserve(records.size());
  const std::uint64_t page = cfg.page_size_bytes;
  std::uint64_t id = 1;
  for (const auto& r : records) {
    if (r.addr >= cfg.flash_bytes || r.size > cfg.flash_bytes - r.addr) {
      raise(ErrorCode::kAddressOutOfRange, "trace record beyond the MoS space");
    }
    std::uint64_t addr = r.addr;
    std::uint64_t left = r.size;
    while (left > 0) {
      const std::uint64_t room = page - addr % page;
      const std::uint64_t piece = left < room ? left : room;
      controller::MemoryRequest req;
      req.issue_time = r.tick;
      req.kind = r.op;
      req.addr = mos::MosAddress{addr};
      req.size_bytes = static_cast<std::uint32_t>(piece);
      req.req_id = id++;
      out.push_back(req);
      addr += piece;
      left -= piece;
    }
  }
  return out;
}

}  // namespace hams::workload
