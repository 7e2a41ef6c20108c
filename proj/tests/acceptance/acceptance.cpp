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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hams/controller/system.hpp"
#include "hams/failure/harness.hpp"
#include "hams/flash/ull_flash.hpp"
#include "hams/workload/generator.hpp"
#include "hams/workload/metrics.hpp"
#include "hams/workload/mmap_baseline.hpp"
#include "hams/workload/plots.hpp"
#include "hams/workload/trace.hpp"
#include "support.hpp"

namespace {

using namespace hams;
using controller::AccessKind;
using controller::Datapath;
using controller::MemoryRequest;
using controller::SystemConfig;
using hams::testing::request;
using hams::testing::small_system;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const char* name_of(Datapath dp, nvme::Mode m) {
  if (dp == Datapath::kBaseline) return m == nvme::Mode::kPersist ? "baseline/persist" : "baseline/extend";
  return m == nvme::Mode::kPersist ? "advanced/persist" : "advanced/extend";
}

std::vector<MemoryRequest> cold_reads(const mos::MosConfig& mos, std::uint64_t count) {
  workload::WorkloadSpec spec;
  spec.kind = workload::WorkloadKind::kColdRd;
  spec.count = count;
  spec.access_bytes = 4096;
  spec.footprint_bytes = mos.flash_bytes;
  spec.seed = 1;
  return workload::to_requests(workload::generate(spec), mos);
}

workload::MetricsReport run(const SystemConfig& cfg, const std::vector<MemoryRequest>& reqs,
                            const std::string& platform) {
  controller::System sys(cfg);
  sys.load(reqs);
  sys.run();
  return workload::make_report(sys, workload::EnergyModel{}, "trace", platform);
}

// ---------------------------------------------------------------------------

Outcome crash_soundness() {
  workload::WorkloadSpec spec;
  spec.kind = workload::WorkloadKind::kMixed;
  spec.count = 200;
  spec.access_bytes = 64;
  spec.footprint_bytes = 64 * 128 * 1024;
  spec.seed = 1;
  std::string detail;
  bool pass = true;
  for (auto dp : {Datapath::kBaseline, Datapath::kAdvanced}) {
    for (auto mode : {nvme::Mode::kPersist, nvme::Mode::kExtend}) {
      const SystemConfig cfg = small_system(16, dp, mode);
      const auto reqs = workload::to_requests(workload::generate(spec), cfg.mos);
      failure::CrashPlan plan;
      plan.every_event = true;
      const auto verdicts = failure::sweep(cfg, reqs, plan);
      std::size_t bad = 0, lost = 0, replay_max = 0;
      for (const auto& v : verdicts) {
        bad += !v.ok();
        lost += !v.acknowledged_writes_preserved;
        replay_max = std::max(replay_max, v.replayed_cids.size());
      }
      pass = pass && bad == 0 && !verdicts.empty();
      detail += fmt("%s %zu points %zu bad %zu lost max-replay %zu; ", name_of(dp, mode),
                    verdicts.size(), bad, lost, replay_max);
    }
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// Four commands in SQ slots 0..3; only the eviction is still unfinished when
// power fails. With 8 dies per channel and one earlier eviction aging the
// allocator, the in-flight program sits on dies the later fills do not use.
Outcome journal_replay_scenario() {
  SystemConfig cfg = small_system(4, Datapath::kAdvanced, nvme::Mode::kExtend);
  cfg.flash.dies_per_channel = 8;
  const std::uint64_t page = cfg.mos.page_size_bytes;
  const std::uint64_t sets = cfg.mos.num_sets();

  // Phase 1: page 4 is written back to flash, then page 0 becomes dirty in
  // set 0. Both stores are acknowledged.
  controller::System warm(cfg);
  warm.load({request(1, AccessKind::kStore, sets * page, 64),
             request(2, AccessKind::kStore, 0, 64, sim::microseconds(1))});
  warm.run();
  auto acked = warm.acknowledged();
  const controller::SystemImage clean = warm.power_fail();

  // Phase 2: fill P1; evict P0 + fill P0' (same set); fill P2.
  controller::System sys(cfg, &clean);
  sys.recover();
  sys.load({request(3, AccessKind::kLoad, 1 * page, 64),
            request(4, AccessKind::kLoad, sets * page, 64, sim::microseconds(1)),
            request(5, AccessKind::kLoad, 2 * page, 64, sim::microseconds(30))});
  // Crash once CMD1, CMD3 and CMD4 have completed while CMD2 still programs.
  while (sys.controller().stats().fills_done < 3) {
    if (sys.step(1) == 0) return {false, "fills never completed"};
  }
  if (sys.controller().stats().evictions_done != 0) {
    return {false, "eviction finished before the fills"};
  }
  const sim::SimTime crash_at = sys.events().now();
  for (const auto& [p, c] : sys.acknowledged()) acked[p] = c;
  const controller::SystemImage image = sys.power_fail();

  const auto& sq = image.nvdimm.pinned.sq;
  std::string tags;
  for (int i = 0; i < 4; ++i) tags += sq[i].journal_tag ? '1' : '0';
  const bool shape = sq[0].opcode == nvme::Opcode::kRead && sq[0].lba == 1 &&
                     sq[1].opcode == nvme::Opcode::kWrite && sq[1].lba == 0 &&
                     sq[2].opcode == nvme::Opcode::kRead && sq[2].lba == sets &&
                     sq[3].opcode == nvme::Opcode::kRead && sq[3].lba == 2;

  controller::System after(cfg, &image);
  const auto replayed = after.recover();
  failure::PersistencyVerdict v;
  failure::judge(after, acked, v);
  const bool only_cmd2 = replayed.size() == 1 && replayed[0].cid == sq[1].cid;
  const bool p0 = after.logical_page(0).writer_at(0) == 2u &&
                  after.logical_page(sets).writer_at(0) == 1u;
  const bool pass = shape && tags == "0100" && only_cmd2 && v.ok() && p0 &&
                    after.controller().idle();
  return {pass, fmt("crash at %.3f us, tags {%c,%c,%c,%c}, replayed %zu command(s)%s, "
                    "pages 0 and 4 %s",
                    crash_at.as_us(), tags[0], tags[1], tags[2], tags[3], replayed.size(),
                    only_cmd2 ? " = CMD2 (evict page 0)" : "", p0 ? "preserved" : "LOST")};
}

// Sequential write-back direct-mapped cache over flash, in trace order.
struct ReferenceCache {
  struct Line {
    bool valid = false;
    bool dirty = false;
    std::uint64_t tag = 0;
    mos::PageContent data;
  };
  mos::MosConfig cfg;
  std::map<std::uint64_t, Line> lines;
  std::map<std::uint64_t, mos::PageContent> flash;
  std::vector<bool> hits;

  void access(const MemoryRequest& r) {
    const std::uint64_t pn = r.addr.value / cfg.page_size_bytes;
    const std::uint64_t set = pn % cfg.num_sets();
    const std::uint64_t tag = pn / cfg.num_sets();
    Line& l = lines[set];
    const bool hit = l.valid && l.tag == tag;
    hits.push_back(hit);
    if (!hit) {
      if (l.valid && l.dirty) flash[l.tag * cfg.num_sets() + set] = l.data;
      l = Line{true, false, tag, flash[pn]};
    }
    if (r.kind == AccessKind::kStore) {
      l.data.write(static_cast<std::uint32_t>(r.addr.value % cfg.page_size_bytes),
                   r.size_bytes, r.req_id);
      l.dirty = true;
    }
  }
};

Outcome hazard_freedom() {
  std::string detail;
  bool pass = true;
  for (auto dp : {Datapath::kBaseline, Datapath::kAdvanced}) {
    for (auto mode : {nvme::Mode::kPersist, nvme::Mode::kExtend}) {
      SystemConfig cfg;
      cfg.datapath = dp;
      cfg.mode = mode;
      const std::uint64_t sets = cfg.mos.num_sets();
      std::mt19937_64 rng(404);
      std::vector<MemoryRequest> reqs;
      for (std::uint64_t i = 0; i < 10'000; ++i) {
        const std::uint64_t pn = (rng() % 12) * sets + rng() % 4;
        const std::uint64_t off = (rng() % 2048) * 64;
        reqs.push_back(request(i + 1, rng() % 2 ? AccessKind::kStore : AccessKind::kLoad,
                               pn * cfg.mos.page_size_bytes + off, 64));
      }
      ReferenceCache ref{cfg.mos, {}, {}, {}};
      for (const auto& r : reqs) ref.access(r);

      controller::System sys(cfg);
      sys.load(reqs);
      sys.run();
      const auto& st = sys.controller().stats();
      bool state_ok = sys.completions().size() == reqs.size();
      for (const auto& [set, line] : ref.lines) {
        const auto& tag = sys.nvdimm().tag(set);
        state_ok = state_ok && tag.valid == line.valid && tag.tag == line.tag &&
                   tag.dirty == line.dirty && !tag.busy &&
                   sys.nvdimm().frame(set) == line.data;
      }
      for (const auto& [pn, data] : ref.flash) {
        state_ok = state_ok && sys.flash().logical_content(pn) == data;
      }
      for (std::uint64_t lba : sys.flash().stored_lbas()) {
        const auto it = ref.flash.find(lba);
        const mos::PageContent zero;
        state_ok = state_ok &&
                   sys.flash().logical_content(lba) == (it == ref.flash.end() ? zero : it->second);
      }
      const bool ok = st.redundant_evictions == 0 && st.dma_cache_overlaps == 0 &&
                      st.busy_victim_violations == 0 && state_ok;
      pass = pass && ok;
      detail += fmt("%s: %llu evictions, %llu waits, %llu dup-evict, %llu overlaps, state %s; ",
                    name_of(dp, mode), static_cast<unsigned long long>(st.evictions_done),
                    static_cast<unsigned long long>(st.waits),
                    static_cast<unsigned long long>(st.redundant_evictions),
                    static_cast<unsigned long long>(st.dma_cache_overlaps),
                    state_ok ? "exact" : "MISMATCH");
    }
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome cache_oracle() {
  const SystemConfig cfg = small_system(256, Datapath::kAdvanced, nvme::Mode::kExtend);
  const auto reqs = hams::testing::mixed_trace(cfg.mos, 100'000, 1024, 55);
  ReferenceCache ref{cfg.mos, {}, {}, {}};
  for (const auto& r : reqs) ref.access(r);

  controller::System sys(cfg);
  sys.load(reqs);
  sys.run();
  std::vector<int> got(reqs.size(), -1);
  for (const auto& c : sys.completions()) got[c.req.req_id - 1] = c.hit ? 1 : 0;
  std::size_t mismatches = 0, hits = 0;
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    mismatches += got[i] != (ref.hits[i] ? 1 : 0);
    hits += ref.hits[i];
  }
  return {mismatches == 0,
          fmt("%zu requests, %zu oracle hits, %zu mismatches", reqs.size(), hits, mismatches)};
}

struct ColdRuns {
  workload::MetricsReport baseline_extend;
  workload::MetricsReport advanced_extend;
  workload::MetricsReport advanced_persist;
  std::vector<MemoryRequest> reqs;
};

const ColdRuns& cold_runs() {
  static const ColdRuns runs = [] {
    ColdRuns r;
    SystemConfig cfg;
    r.reqs = cold_reads(cfg.mos, 10'000);
    cfg.datapath = Datapath::kBaseline;
    r.baseline_extend = run(cfg, r.reqs, "hams-baseline-extend");
    cfg.datapath = Datapath::kAdvanced;
    r.advanced_extend = run(cfg, r.reqs, "hams-advanced-extend");
    cfg.mode = nvme::Mode::kPersist;
    r.advanced_persist = run(cfg, r.reqs, "hams-advanced-persist");
    return r;
  }();
  return runs;
}

Outcome datapath_direction() {
  const auto& r = cold_runs();
  const double base = r.baseline_extend.total_delay.as_us();
  const double adv = r.advanced_extend.total_delay.as_us();
  const bool all_miss = r.baseline_extend.hits == 0 && r.advanced_extend.hits == 0;
  const double reduction = 1.0 - adv / base;
  return {all_miss && reduction >= 0.10,
          fmt("total stall baseline %.1f us, advanced %.1f us, reduction %.1f%% (floor 10%%)",
              base, adv, reduction * 100)};
}

Outcome mode_direction() {
  const auto& r = cold_runs();
  const double ext = r.advanced_extend.total_delay.as_us();
  const double per = r.advanced_persist.total_delay.as_us();
  const double extra = per / ext - 1.0;
  return {extra >= 0.20,
          fmt("memory delay persist %.1f us, extend %.1f us, persist +%.1f%% (floor 20%%)", per,
              ext, extra * 100)};
}

Outcome interface_decomposition() {
  const auto& r = cold_runs().baseline_extend;
  const SystemConfig cfg;
  const std::uint64_t page = cfg.mos.page_size_bytes;
  const auto& p = cfg.pcie;
  const auto& d = cfg.ddr4;
  // SQ entry write, doorbell, command fetch, page DMA, completion entry.
  const sim::SimTime per_miss = d.transfer(64) + p.transfer(4) + p.transfer(64) +
                                d.transfer(64) + p.transfer(page) + d.transfer(page) +
                                p.transfer(16) + d.transfer(16);
  const double predicted = per_miss.as_us() * static_cast<double>(r.requests - r.hits);
  const double measured = r.classes.interface.as_us();
  const double err = std::abs(measured - predicted) / predicted;
  return {err <= 0.01, fmt("measured %.3f us, closed form %.3f us, error %.4f%%", measured,
                           predicted, err * 100)};
}

Outcome channel_striping() {
  auto idle_read = [](std::uint32_t stripe) {
    flash::FlashGeometry geo;
    geo.channel_stripe = stripe;
    flash::BufferConfig buf;
    buf.enabled = false;
    flash::UllFlash dev(geo, buf, 128 * 1024, 1ULL << 30, mos::ContentMode::kExact);
    nvme::NvmeCommand cmd;
    cmd.opcode = nvme::Opcode::kRead;
    cmd.length_bytes = 4096;
    return dev.execute_read(cmd, sim::SimTime{});
  };
  const sim::SimTime one = idle_read(1);
  const sim::SimTime two = idle_read(2);
  // Half a 4 KiB flash page over an 800 MB/s channel.
  const sim::SimTime half_page_dma{2048ULL * 1'000'000'000'000ULL / 800'000'000ULL};
  return {one - two == half_page_dma,
          fmt("stripe=1 %.3f us, stripe=2 %.3f us, difference %.3f us, half-page DMA %.3f us",
              one.as_us(), two.as_us(), (one - two).as_us(), half_page_dma.as_us())};
}

double sequential_read_throughput(std::uint32_t depth, std::uint64_t commands) {
  const std::uint64_t bytes = 128 * 1024;
  flash::BufferConfig buf;
  buf.enabled = false;
  flash::UllFlash dev(flash::FlashGeometry{}, buf, bytes, 1ULL << 34, mos::ContentMode::kChecksum);
  std::priority_queue<sim::SimTime, std::vector<sim::SimTime>, std::greater<>> inflight;
  std::uint64_t issued = 0;
  sim::SimTime last;
  auto issue = [&](sim::SimTime at) {
    nvme::NvmeCommand cmd;
    cmd.opcode = nvme::Opcode::kRead;
    cmd.lba = issued++;
    cmd.length_bytes = static_cast<std::uint32_t>(bytes);
    inflight.push(dev.execute_read(cmd, at));
  };
  for (std::uint32_t i = 0; i < depth; ++i) issue(sim::SimTime{});
  while (!inflight.empty()) {
    const sim::SimTime done = inflight.top();
    inflight.pop();
    last = std::max(last, done);
    if (issued < commands) issue(done);
  }
  return static_cast<double>(commands * bytes) / last.as_seconds();
}

Outcome saturation_knee() {
  const double qd4 = sequential_read_throughput(4, 4000);
  const double qd32 = sequential_read_throughput(32, 4000);
  const double ratio = qd4 / qd32;
  return {ratio >= 0.95, fmt("QD4 %.1f MB/s, QD32 %.1f MB/s, ratio %.4f (floor 0.95)",
                             qd4 / 1e6, qd32 / 1e6, ratio)};
}

Outcome mmap_comparator() {
  const auto& r = cold_runs();
  SystemConfig cfg;
  cfg.datapath = Datapath::kBaseline;
  std::string detail = fmt("hams-advanced-extend %.0f req/s", r.advanced_extend.throughput_rps());
  bool pass = true;
  for (double overhead : {15.0, 17.5, 20.0}) {
    workload::MmapParams mp;
    mp.overhead_us = overhead;
    const auto m = workload::mmap_baseline(r.reqs, cfg, mp, workload::EnergyModel{}, "cold");
    const double speedup = r.advanced_extend.throughput_rps() / m.throughput_rps();
    pass = pass && speedup >= 2.0 && m.hits == 0;
    detail += fmt("; overhead %.1f us: mmap %.0f req/s, speedup %.2fx", overhead,
                  m.throughput_rps(), speedup);
  }
  return {pass, detail + " (floor 2x)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  auto reports = [] {
    SystemConfig cfg = small_system(32, Datapath::kAdvanced, nvme::Mode::kExtend);
    workload::WorkloadSpec spec;
    spec.kind = workload::WorkloadKind::kMixed;
    spec.count = 5000;
    spec.footprint_bytes = 16 * 1024 * 1024;
    spec.seed = 9;
    const auto reqs = workload::to_requests(workload::generate(spec), cfg.mos);
    std::vector<workload::MetricsReport> out;
    for (auto dp : {Datapath::kBaseline, Datapath::kAdvanced}) {
      for (auto mode : {nvme::Mode::kPersist, nvme::Mode::kExtend}) {
        cfg.datapath = dp;
        cfg.mode = mode;
        out.push_back(run(cfg, reqs, name_of(dp, mode)));
      }
    }
    out.push_back(workload::mmap_baseline(reqs, cfg, {}, {}, "mixed"));
    std::ostringstream csv;
    workload::write_report_csv(csv, out);
    return csv.str();
  };
  const std::string a = reports();
  const std::string b = reports();
  bool pass = a == b && !a.empty();
  std::string detail = fmt("in-process reports %s (%zu bytes)", a == b ? "identical" : "DIFFER",
                           a.size());

  if (!cli.empty()) {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "hams_acceptance_determinism";
    fs::remove_all(root);
    bool cli_ok = true;
    for (const char* d : {"a", "b"}) {
      const fs::path out = root / d;
      const std::string cmd =
          "\"" + cli + "\" --seed 9 --out \"" + out.string() +
          "\" --trace \"" + (out / "t.trace").string() +
          "\" generate --kind mixed --count 3000 --footprint 16777216 >/dev/null && \"" + cli +
          "\" --trace \"" + (out / "t.trace").string() + "\" --out \"" + out.string() +
          "\" compare --threads 4 >/dev/null && \"" + cli + "\" --out \"" + out.string() +
          "\" emit-plots >/dev/null";
      cli_ok = cli_ok && std::system(cmd.c_str()) == 0;
    }
    for (const char* f : {"compare.csv", "plots/breakdown.csv", "plots/throughput.csv",
                          "plots/energy.csv"}) {
      const std::string x = slurp(root / "a" / f);
      cli_ok = cli_ok && !x.empty() && x == slurp(root / "b" / f);
    }
    fs::remove_all(root);
    pass = pass && cli_ok;
    detail += fmt("; CLI compare + emit-plots outputs %s", cli_ok ? "identical" : "DIFFER");
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"crash-recovery soundness", crash_soundness},
      {"journal replay of the single unfinished command", journal_replay_scenario},
      {"hazard freedom on 4 hot sets", hazard_freedom},
      {"hit/miss sequence vs direct-mapped oracle", cache_oracle},
      {"datapath direction (advanced vs baseline stall)", datapath_direction},
      {"mode direction (persist vs extend delay)", mode_direction},
      {"interface-cost decomposition", interface_decomposition},
      {"channel striping halves the DMA term", channel_striping},
      {"saturation knee at queue depth 4", saturation_knee},
      {"mmap comparator speedup", mmap_comparator},
      {"determinism of CSV reports", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
