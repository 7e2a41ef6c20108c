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

#include "hams/workload/metrics.hpp"

namespace hams::workload {

/// Stacked latency breakdown, one row per (workload, platform). Values in ps.
struct BreakdownRow {
  std::string workload;
  std::string platform;
  std::uint64_t nvdimm_ps = 0;
  std::uint64_t flash_ps = 0;
  std::uint64_t interface_ps = 0;
  std::uint64_t queueing_ps = 0;
  std::uint64_t software_ps = 0;

  bool operator==(const BreakdownRow&) const = default;
};

/// Throughput bars, normalized to the mmap row of the same workload when
/// one exists (otherwise 1).
struct ThroughputRow {
  std::string workload;
  std::string platform;
  double throughput_rps = 0;
  double amat_ns = 0;
  double speedup_vs_mmap = 1;

  bool operator==(const ThroughputRow&) const = default;
};

/// Energy bars in pJ, normalized to the mmap row when one exists.
struct EnergyRow {
  std::string workload;
  std::string platform;
  double nvdimm_pj = 0;
  double flash_pj = 0;
  double buffer_pj = 0;
  double controller_pj = 0;
  double normalized_total = 1;

  bool operator==(const EnergyRow&) const = default;
};

struct PlotBundle {
  std::vector<BreakdownRow> breakdown;
  std::vector<ThroughputRow> throughput;
  std::vector<EnergyRow> energy;

  bool operator==(const PlotBundle&) const = default;
};

PlotBundle make_plots(const std::vector<MetricsReport>& reports);

void write_breakdown_csv(std::ostream& out, const std::vector<BreakdownRow>& rows);
void write_throughput_csv(std::ostream& out, const std::vector<ThroughputRow>& rows);
void write_energy_csv(std::ostream& out, const std::vector<EnergyRow>& rows);

/// Inverses of the writers. Throw SimError(kParseError) on malformed input.
std::vector<BreakdownRow> read_breakdown_csv(std::istream& in);
std::vector<ThroughputRow> read_throughput_csv(std::istream& in);
std::vector<EnergyRow> read_energy_csv(std::istream& in);

/// Writes breakdown.csv, throughput.csv and energy.csv into `dir`.
void emit_plots(const PlotBundle& bundle, const std::string& dir);
PlotBundle load_plots(const std::string& dir);

}  // namespace hams::workload
