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

#include "hams/controller/accounting.hpp"
#include "hams/controller/system.hpp"

namespace hams::workload {

/// Per-event energy parameters. Defaults are assumed placeholders; only
/// relative comparisons between platforms are meaningful.
struct EnergyModel {
  double nvdimm_pj_per_64b = 7680.0;
  double flash_read_pj_per_4k = 1.5e6;
  double flash_program_pj_per_4k = 1.5e7;
  double buffer_pj_per_4k = 491520.0;
  double controller_pj_per_command = 1.0e4;
  double pcie_pj_per_byte = 40.0;
  double nvdimm_idle_mw = 500.0;
  double flash_idle_mw = 100.0;
  double buffer_idle_mw = 200.0;

  void validate() const;
};

struct EnergyBreakdown {
  double nvdimm_pj = 0;
  double flash_pj = 0;
  double buffer_pj = 0;
  double controller_pj = 0;

  double total() const { return nvdimm_pj + flash_pj + buffer_pj + controller_pj; }
};

/// Raw activity a run produced; energy is a linear function of it.
struct ActivityCounters {
  std::uint64_t nvdimm_bytes = 0;
  std::uint64_t flash_read_bytes = 0;
  std::uint64_t flash_program_bytes = 0;
  std::uint64_t buffer_bytes = 0;
  std::uint64_t pcie_bytes = 0;
  std::uint64_t commands = 0;
  bool buffer_present = false;
};

EnergyBreakdown energy_of(const ActivityCounters& a, const EnergyModel& m,
                          sim::SimTime makespan);

struct MetricsReport {
  std::string workload;
  std::string platform;
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  double hit_rate = 0;
  sim::SimTime total_delay;
  sim::SimTime makespan;
  controller::LatencyBreakdown classes;
  ActivityCounters activity;
  EnergyBreakdown energy;

  double amat_ns() const {
    return requests == 0 ? 0.0 : total_delay.as_ns() / static_cast<double>(requests);
  }
  double throughput_rps() const {
    return makespan.ticks == 0 ? 0.0
                               : static_cast<double>(requests) / makespan.as_seconds();
  }
};

/// Summarizes a finished run.
MetricsReport make_report(const controller::System& sys, const EnergyModel& energy,
                          const std::string& workload, const std::string& platform);

/// Fixed column order, see kReportColumns.
extern const std::vector<std::string> kReportColumns;
void write_report_csv(std::ostream& out, const std::vector<MetricsReport>& reports);
/// Reads rows written by write_report_csv. Derived columns are recomputed;
/// activity counters are not part of the table and come back zero.
std::vector<MetricsReport> read_report_csv(std::istream& in);
void write_summary(std::ostream& out, const MetricsReport& r);

}  // namespace hams::workload
