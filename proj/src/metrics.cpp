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

#include "hams/workload/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "hams/error.hpp"

namespace hams::workload {

void EnergyModel::validate() const {
  for (double v : {nvdimm_pj_per_64b, flash_read_pj_per_4k, flash_program_pj_per_4k,
                   buffer_pj_per_4k, controller_pj_per_command, pcie_pj_per_byte,
                   nvdimm_idle_mw, flash_idle_mw, buffer_idle_mw}) {
    if (!(v >= 0.0)) raise(ErrorCode::kInvalidConfig, "energy parameters must be >= 0");
  }
}

EnergyBreakdown energy_of(const ActivityCounters& a, const EnergyModel& m,
                          sim::SimTime makespan) {
  // mW * ps = 1e-15 J = 1e-3 pJ
  const double idle_scale = static_cast<double>(makespan.ticks) / 1000.0;
  EnergyBreakdown e;
  e.nvdimm_pj = static_cast<double>(a.nvdimm_bytes) / 64.0 * m.nvdimm_pj_per_64b +
                m.nvdimm_idle_mw * idle_scale;
  e.flash_pj = static_cast<double>(a.flash_read_bytes) / 4096.0 * m.flash_read_pj_per_4k +
               static_cast<double>(a.flash_program_bytes) / 4096.0 *
                   m.flash_program_pj_per_4k +
               m.flash_idle_mw * idle_scale;
  if (a.buffer_present) {
    e.buffer_pj = static_cast<double>(a.buffer_bytes) / 4096.0 * m.buffer_pj_per_4k +
                  m.buffer_idle_mw * idle_scale;
  }
  e.controller_pj = static_cast<double>(a.commands) * m.controller_pj_per_command +
                    static_cast<double>(a.pcie_bytes) * m.pcie_pj_per_byte;
  return e;
}

MetricsReport make_report(const controller::System& sys, const EnergyModel& energy,
                          const std::string& workload, const std::string& platform) {
  MetricsReport r;
  r.workload = workload;
  r.platform = platform;
  const auto& done = sys.completions();
  r.requests = done.size();
  sim::SimTime first = sim::SimTime::max();
  sim::SimTime last;
  for (const auto& c : done) {
    if (c.hit) ++r.hits;
    r.total_delay += c.latency();
    r.classes += c.breakdown;
    first = std::min(first, c.issued);
    last = std::max(last, c.completed);
  }
  r.hit_rate = r.requests == 0 ? 0.0
                               : static_cast<double>(r.hits) / static_cast<double>(r.requests);
  r.makespan = r.requests == 0 ? sim::SimTime{} : last - first;

  const auto& fc = sys.flash().counters();
  r.activity.nvdimm_bytes = sys.bus().timeline().bytes_moved();
  r.activity.flash_read_bytes = fc.read_bytes;
  r.activity.flash_program_bytes = fc.program_bytes;
  r.activity.buffer_bytes = fc.buffer_bytes;
  r.activity.pcie_bytes = sys.pcie().bytes_moved();
  r.activity.commands = sys.commands_executed();
  r.activity.buffer_present = sys.config().buffer_enabled();
  r.energy = energy_of(r.activity, energy, r.makespan);
  return r;
}

const std::vector<std::string> kReportColumns = {
    "workload",        "platform",         "requests",        "hits",
    "hit_rate",        "amat_ns",          "total_delay_ps",  "makespan_ps",
    "throughput_rps",  "nvdimm_ps",        "flash_array_ps",  "interface_ps",
    "queueing_ps",     "software_ps",      "energy_nvdimm_pj", "energy_flash_pj",
    "energy_buffer_pj", "energy_controller_pj", "energy_total_pj"};

void write_report_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    out << (i ? "," : "") << kReportColumns[i];
  }
  out << '\n';
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf,
                  "%s,%s,%" PRIu64 ",%" PRIu64 ",%.6f,%.3f,%" PRIu64 ",%" PRIu64
                  ",%.3f,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                  ",%.3f,%.3f,%.3f,%.3f,%.3f\n",
                  r.workload.c_str(), r.platform.c_str(), r.requests, r.hits, r.hit_rate,
                  r.amat_ns(), r.total_delay.ticks, r.makespan.ticks, r.throughput_rps(),
                  r.classes.nvdimm.ticks, r.classes.flash_array.ticks,
                  r.classes.interface.ticks, r.classes.queueing.ticks,
                  r.classes.software.ticks, r.energy.nvdimm_pj, r.energy.flash_pj,
                  r.energy.buffer_pj, r.energy.controller_pj, r.energy.total());
    out << buf;
  }
}

std::vector<MetricsReport> read_report_csv(std::istream& in) {
  std::string line;
  std::string header;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    header += (i ? "," : "") + kReportColumns[i];
  }
  if (!std::getline(in, line) || line != header) {
    raise(ErrorCode::kParseError, "line 1: unexpected report header");
  }
  std::vector<MetricsReport> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(cell);
    if (c.size() != kReportColumns.size()) {
      raise(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": wrong cell count");
    }
    auto u64 = [&](const std::string& v) {
      char* end = nullptr;
      const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
      if (v.empty() || *end != '\0') {
        raise(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": bad integer");
      }
      return static_cast<std::uint64_t>(x);
    };
    auto dbl = [&](const std::string& v) {
      char* end = nullptr;
      const double x = std::strtod(v.c_str(), &end);
      if (v.empty() || *end != '\0') {
        raise(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": bad number");
      }
      return x;
    };
    MetricsReport r;
    r.workload = c[0];
    r.platform = c[1];
    r.requests = u64(c[2]);
    r.hits = u64(c[3]);
    r.hit_rate = dbl(c[4]);
    r.total_delay = sim::SimTime{u64(c[6])};
    r.makespan = sim::SimTime{u64(c[7])};
    r.classes.nvdimm = sim::SimTime{u64(c[9])};
    r.classes.flash_array = sim::SimTime{u64(c[10])};
    r.classes.interface = sim::SimTime{u64(c[11])};
    r.classes.queueing = sim::SimTime{u64(c[12])};
    r.classes.software = sim::SimTime{u64(c[13])};
    r.energy.nvdimm_pj = dbl(c[14]);
    r.energy.flash_pj = dbl(c[15]);
    r.energy.buffer_pj = dbl(c[16]);
    r.energy.controller_pj = dbl(c[17]);
    out.push_back(r);
  }
  return out;
}

void write_summary(std::ostream& out, const MetricsReport& r) {
  const double total = static_cast<double>(r.classes.total().ticks);
  auto pct = [&](sim::SimTime t) {
    return total > 0 ? 100.0 * static_cast<double>(t.ticks) / total : 0.0;
  };
  char buf[1024];
  std::snprintf(
      buf, sizeof buf,
      "%s on %s\n"
      "  requests      %" PRIu64 " (hit rate %.4f)\n"
      "  AMAT          %.3f ns\n"
      "  throughput    %.1f req/s over %.3f us\n"
      "  delay classes nvdimm %.1f%%  flash %.1f%%  interface %.1f%%  "
      "queueing %.1f%%  software %.1f%%\n"
      "  energy        %.3f uJ (nvdimm %.3f, flash %.3f, buffer %.3f, controller %.3f)\n",
      r.workload.c_str(), r.platform.c_str(), r.requests, r.hit_rate, r.amat_ns(),
      r.throughput_rps(), r.makespan.as_us(), pct(r.classes.nvdimm),
      pct(r.classes.flash_array), pct(r.classes.interface), pct(r.classes.queueing),
      pct(r.classes.software), r.energy.total() / 1e6, r.energy.nvdimm_pj / 1e6,
      r.energy.flash_pj / 1e6, r.energy.buffer_pj / 1e6, r.energy.controller_pj / 1e6);
  out << buf;
}

}  // namespace hams::workload
