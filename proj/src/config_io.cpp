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

#include "hams/workload/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hams/error.hpp"

namespace hams::workload {

namespace {

using nlohmann::json;

/// Reads fields out of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Section(*it, path_ + "." + key);
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) fail("unknown key '" + it.key() + "'");
    }
  }

  [[noreturn]] void fail(const std::string& why) const {
    raise(ErrorCode::kInvalidConfig, path_ + ": " + why);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E>
E pick(Section& s, const std::string& value,
       std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, v] : options) {
    if (value == name) return v;
  }
  s.fail("unknown choice '" + value + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig rc;
  auto& sys = rc.system;
  Section top(root, "config");

  std::string datapath = sys.datapath == controller::Datapath::kBaseline ? "baseline"
                                                                          : "advanced";
  std::string mode = sys.mode == nvme::Mode::kPersist ? "persist" : "extend";
  std::string platform = "hams";
  top.get("datapath", datapath);
  top.get("mode", mode);
  top.get("platform", platform);
  sys.datapath = pick<controller::Datapath>(
      top, datapath,
      {{"baseline", controller::Datapath::kBaseline},
       {"advanced", controller::Datapath::kAdvanced}});
  sys.mode = pick<nvme::Mode>(top, mode,
                              {{"persist", nvme::Mode::kPersist},
                               {"extend", nvme::Mode::kExtend}});
  rc.platform = pick<Platform>(top, platform,
                               {{"hams", Platform::kHams}, {"mmap", Platform::kMmap}});

  if (auto s = top.child("mos")) {
    s->get("page_size_bytes", sys.mos.page_size_bytes);
    s->get("nvdimm_bytes", sys.mos.nvdimm_bytes);
    s->get("pinned_bytes", sys.mos.pinned_bytes);
    s->get("flash_bytes", sys.mos.flash_bytes);
    std::string content = "exact";
    s->get("content", content);
    sys.nvdimm.content_mode = pick<mos::ContentMode>(
        *s, content,
        {{"exact", mos::ContentMode::kExact}, {"checksum", mos::ContentMode::kChecksum}});
    s->done();
  }
  if (auto s = top.child("nvdimm")) {
    s->get("queue_depth", sys.nvdimm.queue_depth);
    s->get("prp_slots", sys.nvdimm.prp_slots);
    s->get("msi_vectors", sys.nvdimm.msi_vectors);
    s->get("wait_capacity", sys.nvdimm.wait_capacity);
    std::uint64_t msi_ps = sys.msi_latency.ticks;
    s->get("msi_latency_ps", msi_ps);
    sys.msi_latency = sim::SimTime{msi_ps};
    s->done();
  }
  if (auto s = top.child("ddr4")) {
    s->get("tcl_ps", sys.ddr4.tcl_ps);
    s->get("tburst_ps", sys.ddr4.tburst_ps);
    s->get("peak_bw_bytes_per_s", sys.ddr4.peak_bw_bytes_per_s);
    s->get("bus_clock_hz", sys.bus_clock_hz);
    s->get("dedicated_channel", sys.dedicated_channel);
    s->done();
  }
  if (auto s = top.child("pcie")) {
    s->get("lanes", sys.pcie.lanes);
    s->get("bytes_per_s", sys.pcie.bytes_per_s);
    s->get("tlp_payload", sys.pcie.tlp_payload);
    s->get("per_tlp_overhead_ps", sys.pcie.per_tlp_overhead_ps);
    s->done();
  }
  if (auto s = top.child("flash")) {
    s->get("channels", sys.flash.channels);
    s->get("dies_per_channel", sys.flash.dies_per_channel);
    s->get("planes_per_die", sys.flash.planes_per_die);
    s->get("flash_page_bytes", sys.flash.flash_page_bytes);
    s->get("channel_stripe", sys.flash.channel_stripe);
    s->get("read_ps", sys.flash.read_ps);
    s->get("program_ps", sys.flash.program_ps);
    s->get("channel_bytes_per_s", sys.flash.channel_bytes_per_s);
    if (auto b = s->child("buffer")) {
      b->get("enabled", sys.buffer.enabled);
      b->get("capacity_bytes", sys.buffer.capacity_bytes);
      b->get("access_latency_ps", sys.buffer.access_latency_ps);
      b->get("bytes_per_s", sys.buffer.bytes_per_s);
      b->done();
    }
    s->done();
  }
  if (auto s = top.child("driver")) {
    s->get("max_outstanding", sys.max_outstanding);
    s->done();
  }
  if (auto s = top.child("energy")) {
    auto& e = rc.energy;
    s->get("nvdimm_pj_per_64b", e.nvdimm_pj_per_64b);
    s->get("flash_read_pj_per_4k", e.flash_read_pj_per_4k);
    s->get("flash_program_pj_per_4k", e.flash_program_pj_per_4k);
    s->get("buffer_pj_per_4k", e.buffer_pj_per_4k);
    s->get("controller_pj_per_command", e.controller_pj_per_command);
    s->get("pcie_pj_per_byte", e.pcie_pj_per_byte);
    s->get("nvdimm_idle_mw", e.nvdimm_idle_mw);
    s->get("flash_idle_mw", e.flash_idle_mw);
    s->get("buffer_idle_mw", e.buffer_idle_mw);
    s->done();
  }
  if (auto s = top.child("mmap")) {
    s->get("overhead_us", rc.mmap.overhead_us);
    s->get("os_page_bytes", rc.mmap.os_page_bytes);
    s->done();
  }
  top.done();

  sys.validate();
  rc.energy.validate();
  rc.mmap.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& rc) {
  const auto& s = rc.system;
  json j;
  j["datapath"] = s.datapath == controller::Datapath::kBaseline ? "baseline" : "advanced";
  j["mode"] = s.mode == nvme::Mode::kPersist ? "persist" : "extend";
  j["platform"] = rc.platform == Platform::kMmap ? "mmap" : "hams";
  j["mos"] = {{"page_size_bytes", s.mos.page_size_bytes},
              {"nvdimm_bytes", s.mos.nvdimm_bytes},
              {"pinned_bytes", s.mos.pinned_bytes},
              {"flash_bytes", s.mos.flash_bytes},
              {"content", s.nvdimm.content_mode == mos::ContentMode::kExact ? "exact"
                                                                           : "checksum"}};
  j["nvdimm"] = {{"queue_depth", s.nvdimm.queue_depth},
                 {"prp_slots", s.nvdimm.prp_slots},
                 {"msi_vectors", s.nvdimm.msi_vectors},
                 {"wait_capacity", s.nvdimm.wait_capacity},
                 {"msi_latency_ps", s.msi_latency.ticks}};
  j["ddr4"] = {{"tcl_ps", s.ddr4.tcl_ps},
               {"tburst_ps", s.ddr4.tburst_ps},
               {"peak_bw_bytes_per_s", s.ddr4.peak_bw_bytes_per_s},
               {"bus_clock_hz", s.bus_clock_hz},
               {"dedicated_channel", s.dedicated_channel}};
  j["pcie"] = {{"lanes", s.pcie.lanes},
               {"bytes_per_s", s.pcie.bytes_per_s},
               {"tlp_payload", s.pcie.tlp_payload},
               {"per_tlp_overhead_ps", s.pcie.per_tlp_overhead_ps}};
  j["flash"] = {{"channels", s.flash.channels},
                {"dies_per_channel", s.flash.dies_per_channel},
                {"planes_per_die", s.flash.planes_per_die},
                {"flash_page_bytes", s.flash.flash_page_bytes},
                {"channel_stripe", s.flash.channel_stripe},
                {"read_ps", s.flash.read_ps},
                {"program_ps", s.flash.program_ps},
                {"channel_bytes_per_s", s.flash.channel_bytes_per_s},
                {"buffer",
                 {{"enabled", s.buffer.enabled},
                  {"capacity_bytes", s.buffer.capacity_bytes},
                  {"access_latency_ps", s.buffer.access_latency_ps},
                  {"bytes_per_s", s.buffer.bytes_per_s}}}};
  j["driver"] = {{"max_outstanding", s.max_outstanding}};
  const auto& e = rc.energy;
  j["energy"] = {{"nvdimm_pj_per_64b", e.nvdimm_pj_per_64b},
                 {"flash_read_pj_per_4k", e.flash_read_pj_per_4k},
                 {"flash_program_pj_per_4k", e.flash_program_pj_per_4k},
                 {"buffer_pj_per_4k", e.buffer_pj_per_4k},
                 {"controller_pj_per_command", e.controller_pj_per_command},
                 {"pcie_pj_per_byte", e.pcie_pj_per_byte},
                 {"nvdimm_idle_mw", e.nvdimm_idle_mw},
                 {"flash_idle_mw", e.flash_idle_mw},
                 {"buffer_idle_mw", e.buffer_idle_mw}};
  j["mmap"] = {{"overhead_us", rc.mmap.overhead_us},
               {"os_page_bytes", rc.mmap.os_page_bytes}};
  return j.dump(2);
}

std::string platform_label(const RunConfig& rc) {
  if (rc.platform == Platform::kMmap) return "mmap";
  std::string s = "hams-";
  s += rc.system.datapath == controller::Datapath::kBaseline ? "baseline" : "advanced";
  s += rc.system.mode == nvme::Mode::kPersist ? "-persist" : "-extend";
  return s;
}

}  // namespace hams::workload
