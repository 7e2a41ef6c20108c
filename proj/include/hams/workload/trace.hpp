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
#include <iosfwd>
#include <string>
#include <vector>

#include "hams/controller/request.hpp"
#include "hams/mos/config.hpp"
#include "hams/sim/sim_time.hpp"

namespace hams::workload {

/// One line of a trace file: `<tick> <L|S> <0xADDR> <size>`, tick in ps.
struct TraceRecord {
  sim::SimTime tick;
  controller::AccessKind op = controller::AccessKind::kLoad;
  std::uint64_t addr = 0;
  std::uint32_t size = 0;

  bool operator==(const TraceRecord&) const = default;
};

/// Blank lines and lines starting with '#' are skipped. Throws
/// SimError(kParseError) naming the line, or kUnsortedTrace.
std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> parse_trace_file(const std::string& path);

/// Canonical form: decimal tick, uppercase hex digits after "0x".
std::string format_record(const TraceRecord& r);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);
void write_trace_file(const std::string& path,
                      const std::vector<TraceRecord>& records);

/// Cuts records at page boundaries and numbers the pieces from 1.
/// Throws SimError(kAddressOutOfRange) for bytes beyond the flash.
std::vector<controller::MemoryRequest> to_requests(
    const std::vector<TraceRecord>& records, const mos::MosConfig& cfg);

}  // namespace hams::workload
