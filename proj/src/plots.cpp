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

#include "hams/workload/plots.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "hams/error.hpp"

namespace hams::workload {

namespace {

const char* kBreakdownHeader =
    "workload,platform,nvdimm_ps,flash_ps,interface_ps,queueing_ps,software_ps";
const char* kThroughputHeader =
    "workload,platform,throughput_rps,amat_ns,speedup_vs_mmap";
const char* kEnergyHeader =
    "workload,platform,nvdimm_pj,flash_pj,buffer_pj,controller_pj,normalized_total";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string label(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    raise(ErrorCode::kInvalidConfig, "labels must not contain commas or newlines");
  }
  return s;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in, const char* header,
                                                std::size_t width) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    raise(ErrorCode::kParseError, "line 1: unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != width) {
      raise(ErrorCode::kParseError,
            "line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                " cells");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') raise(ErrorCode::kParseError, "bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || s[0] == '-') {
    raise(ErrorCode::kParseError, "bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

PlotBundle make_plots(const std::vector<MetricsReport>& reports) {
  std::map<std::string, const MetricsReport*> mmap_of;
  for (const auto& r : reports) {
    if (r.platform == "mmap") mmap_of[r.workload] = &r;
  }
  PlotBundle b;
  for (const auto& r : reports) {
    b.breakdown.push_back({r.workload, r.platform, r.classes.nvdimm.ticks,
                           r.classes.flash_array.ticks, r.classes.interface.ticks,
                           r.classes.queueing.ticks, r.classes.software.ticks});
    const MetricsReport* base = mmap_of.count(r.workload) ? mmap_of[r.workload] : nullptr;
    const double speedup = base && base->throughput_rps() > 0
                               ? r.throughput_rps() / base->throughput_rps()
                               : 1.0;
    b.throughput.push_back({r.workload, r.platform, r.throughput_rps(), r.amat_ns(), speedup});
    const double norm = base && base->energy.total() > 0
                            ? r.energy.total() / base->energy.total()
                            : 1.0;
    b.energy.push_back({r.workload, r.platform, r.energy.nvdimm_pj, r.energy.flash_pj,
                        r.energy.buffer_pj, r.energy.controller_pj, norm});
  }
  return b;
}

void write_breakdown_csv(std::ostream& out, const std::vector<BreakdownRow>& rows) {
  out << kBreakdownHeader << '\n';
  for (const auto& r : rows) {
    out << label(r.workload) << ',' << label(r.platform) << ',' << r.nvdimm_ps << ','
        << r.flash_ps << ',' << r.interface_ps << ',' << r.queueing_ps << ','
        << r.software_ps << '\n';
  }
}

void write_throughput_csv(std::ostream& out, const std::vector<ThroughputRow>& rows) {
  out << kThroughputHeader << '\n';
  for (const auto& r : rows) {
    out << label(r.workload) << ',' << label(r.platform) << ',' << num(r.throughput_rps)
        << ',' << num(r.amat_ns) << ',' << num(r.speedup_vs_mmap) << '\n';
  }
}

void write_energy_csv(std::ostream& out, const std::vector<EnergyRow>& rows) {
  out << kEnergyHeader << '\n';
  for (const auto& r : rows) {
    out << label(r.workload) << ',' << label(r.platform) << ',' << num(r.nvdimm_pj) << ','
        << num(r.flash_pj) << ',' << num(r.buffer_pj) << ',' << num(r.controller_pj)
        << ',' << num(r.normalized_total) << '\n';
  }
}

std::vector<BreakdownRow> read_breakdown_csv(std::istream& in) {
  std::vector<BreakdownRow> out;
  for (const auto& c : read_rows(in, kBreakdownHeader, 7)) {
    out.push_back({c[0], c[1], to_u64(c[2]), to_u64(c[3]), to_u64(c[4]), to_u64(c[5]),
                   to_u64(c[6])});
  }
  return out;
}

std::vector<ThroughputRow> read_throughput_csv(std::istream& in) {
  std::vector<ThroughputRow> out;
  for (const auto& c : read_rows(in, kThroughputHeader, 5)) {
    out.push_back({c[0], c[1], to_double(c[2]), to_double(c[3]), to_double(c[4])});
  }
  return out;
}

std::vector<EnergyRow> read_energy_csv(std::istream& in) {
  std::vector<EnergyRow> out;
  for (const auto& c : read_rows(in, kEnergyHeader, 7)) {
    out.push_back({c[0], c[1], to_double(c[2]), to_double(c[3]), to_double(c[4]),
                   to_double(c[5]), to_double(c[6])});
  }
  return out;
}

void emit_plots(const PlotBundle& bundle, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) raise(ErrorCode::kIoError, std::string("cannot write ") + name);
    return out;
  };
  {
    auto out = open("breakdown.csv");
    write_breakdown_csv(out, bundle.breakdown);
  }
  {
    auto out = open("throughput.csv");
    write_throughput_csv(out, bundle.throughput);
  }
  {
    auto out = open("energy.csv");
    write_energy_csv(out, bundle.energy);
  }
}

PlotBundle load_plots(const std::string& dir) {
  namespace fs = std::filesystem;
  auto open = [&](const char* name) {
    std::ifstream in(fs::path(dir) / name);
    if (!in) raise(ErrorCode::kIoError, std::string("cannot read ") + name);
    return in;
  };
  PlotBundle b;
  {
    auto in = open("breakdown.csv");
    b.breakdown = read_breakdown_csv(in);
  }
  {
    auto in = open("throughput.csv");
    b.throughput = read_throughput_csv(in);
  }
  {
    auto in = open("energy.csv");
    b.energy = read_energy_csv(in);
  }
  return b;
}

}  // namespace hams::workload
