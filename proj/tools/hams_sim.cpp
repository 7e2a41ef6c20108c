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

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hams/error.hpp"
#include "hams/failure/harness.hpp"
#include "hams/workload/config_io.hpp"
#include "hams/workload/generator.hpp"
#include "hams/workload/metrics.hpp"
#include "hams/workload/mmap_baseline.hpp"
#include "hams/workload/plots.hpp"
#include "hams/workload/trace.hpp"

namespace fs = std::filesystem;
using namespace hams;

namespace {

struct Globals {
  std::string config;
  std::string trace;
  std::uint64_t seed = 1;
  std::string out = "out";
};

workload::RunConfig load_config(const Globals& g) {
  return g.config.empty() ? workload::RunConfig{} : workload::load_run_config(g.config);
}

std::vector<controller::MemoryRequest> load_requests(const Globals& g,
                                                     const workload::RunConfig& rc) {
  if (g.trace.empty()) raise(ErrorCode::kIoError, "--trace is required");
  return workload::to_requests(workload::parse_trace_file(g.trace), rc.system.mos);
}

std::string workload_name(const Globals& g) { return fs::path(g.trace).stem().string(); }

std::ofstream open_out(const Globals& g, const std::string& name) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  std::ofstream out(fs::path(g.out) / name);
  if (!out) raise(ErrorCode::kIoError, "cannot write " + (fs::path(g.out) / name).string());
  return out;
}

workload::MetricsReport run_one(const workload::RunConfig& rc,
                                const std::vector<controller::MemoryRequest>& reqs,
                                const std::string& name) {
  if (rc.platform == workload::Platform::kMmap) {
    return workload::mmap_baseline(reqs, rc.system, rc.mmap, rc.energy, name);
  }
  controller::System sys(rc.system);
  sys.load(reqs);
  sys.run();
  return workload::make_report(sys, rc.energy, name, workload::platform_label(rc));
}

std::vector<workload::MetricsReport> run_compare(
    const workload::RunConfig& base, const std::vector<controller::MemoryRequest>& reqs,
    const std::string& name, unsigned threads) {
  std::vector<workload::RunConfig> jobs;
  for (auto dp : {controller::Datapath::kBaseline, controller::Datapath::kAdvanced}) {
    for (auto mode : {nvme::Mode::kPersist, nvme::Mode::kExtend}) {
      workload::RunConfig rc = base;
      rc.platform = workload::Platform::kHams;
      rc.system.datapath = dp;
      rc.system.mode = mode;
      jobs.push_back(rc);
    }
  }
  workload::RunConfig mm = base;
  mm.platform = workload::Platform::kMmap;
  mm.system.datapath = controller::Datapath::kBaseline;
  jobs.push_back(mm);

  std::vector<workload::MetricsReport> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= jobs.size()) return;
        i = next++;
      }
      try {
        out[i] = run_one(jobs[i], reqs, name);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  for (unsigned t = 1; t < threads && t < jobs.size(); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

int cmd_simulate(const Globals& g) {
  const auto rc = load_config(g);
  const auto reqs = load_requests(g, rc);
  const auto report = run_one(rc, reqs, workload_name(g));
  {
    auto csv = open_out(g, "report.csv");
    workload::write_report_csv(csv, {report});
  }
  {
    auto txt = open_out(g, "summary.txt");
    workload::write_summary(txt, report);
  }
  workload::write_summary(std::cout, report);
  return 0;
}

int cmd_generate(const Globals& g, workload::WorkloadSpec spec, const std::string& kind) {
  const auto k = workload::parse_workload_kind(kind);
  if (!k) raise(ErrorCode::kInvalidConfig, "unknown workload kind '" + kind + "'");
  spec.kind = *k;
  spec.seed = g.seed;
  const auto rc = load_config(g);
  if (spec.footprint_bytes > rc.system.mos.flash_bytes) {
    raise(ErrorCode::kInvalidConfig, "footprint exceeds the flash capacity");
  }
  const auto records = workload::generate(spec);
  const std::string path =
      g.trace.empty() ? (fs::path(g.out) / (kind + ".trace")).string() : g.trace;
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
  }
  workload::write_trace_file(path, records);
  std::cout << "wrote " << records.size() << " records to " << path << '\n';
  return 0;
}

int cmd_crash_sweep(const Globals& g, failure::CrashPlan plan,
                    const std::vector<std::uint64_t>& at_ps, unsigned threads) {
  const auto rc = load_config(g);
  const auto reqs = load_requests(g, rc);
  for (auto t : at_ps) plan.injection_times.push_back(sim::SimTime{t});
  if (plan.injection_times.empty() && plan.samples == 0) plan.every_event = true;
  plan.seed = g.seed;
  const auto verdicts = failure::sweep(rc.system, reqs, plan, threads);

  auto csv = open_out(g, "crash_sweep.csv");
  csv << "crash_event,crash_time_ps,preserved,spurious,offsets_consistent,quiescent,"
         "replayed,replayed_cids\n";
  std::size_t failed = 0;
  for (const auto& v : verdicts) {
    if (!v.ok()) ++failed;
    csv << v.crash_event << ',' << v.crash_time.ticks << ','
        << v.acknowledged_writes_preserved << ',' << v.spurious_data << ','
        << v.offsets_consistent << ',' << v.quiescent << ',' << v.replayed_cids.size()
        << ',';
    for (std::size_t i = 0; i < v.replayed_cids.size(); ++i) {
      csv << (i ? ";" : "") << v.replayed_cids[i];
    }
    csv << '\n';
  }
  std::cout << verdicts.size() << " injection points, " << failed << " failed\n";
  return failed == 0 ? 0 : 2;
}

int cmd_compare(const Globals& g, unsigned threads) {
  const auto rc = load_config(g);
  const auto reqs = load_requests(g, rc);
  const auto reports = run_compare(rc, reqs, workload_name(g), threads);
  auto csv = open_out(g, "compare.csv");
  workload::write_report_csv(csv, reports);
  for (const auto& r : reports) workload::write_summary(std::cout, r);
  return 0;
}

int cmd_emit_plots(const Globals& g, const std::string& reports_path) {
  const std::string path =
      reports_path.empty() ? (fs::path(g.out) / "compare.csv").string() : reports_path;
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoError, "cannot read reports '" + path + "'");
  const auto bundle = workload::make_plots(workload::read_report_csv(in));
  const std::string dir = (fs::path(g.out) / "plots").string();
  workload::emit_plots(bundle, dir);
  if (!(workload::load_plots(dir) == bundle)) {
    raise(ErrorCode::kIoError, "plot tables did not read back identically");
  }
  std::cout << "wrote breakdown.csv, throughput.csv, energy.csv to " << dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HAMS memory-over-storage simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--trace", g.trace, "trace file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory");

  auto* simulate = app.add_subcommand("simulate", "run one trace and report metrics");

  auto* generate = app.add_subcommand("generate", "write a synthetic trace");
  workload::WorkloadSpec spec;
  std::string kind = "rndRd";
  generate->add_option("--kind", kind, "seqRd|rndRd|seqWr|rndWr|mixed|coldRd");
  generate->add_option("--footprint", spec.footprint_bytes, "footprint in bytes");
  generate->add_option("--count", spec.count, "number of records");
  generate->add_option("--access-bytes", spec.access_bytes, "bytes per access");
  generate->add_option("--interarrival-ps", spec.interarrival_ps, "tick spacing");
  generate->add_option("--store-fraction", spec.store_fraction, "stores in mixed");
  generate->add_option("--stride", spec.stride_bytes, "coldRd region size");

  auto* crash = app.add_subcommand("crash-sweep", "inject power failures and verify");
  failure::CrashPlan plan;
  std::vector<std::uint64_t> at_ps;
  unsigned threads = 0;
  crash->add_option("--at", at_ps, "injection times in ps");
  crash->add_option("--samples", plan.samples, "random event indices instead of all");
  crash->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* compare = app.add_subcommand("compare", "all platforms on one trace");
  compare->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* plots = app.add_subcommand("emit-plots", "plot tables from a compare report");
  std::string reports_path;
  plots->add_option("--reports", reports_path, "compare.csv (default <out>/compare.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) return cmd_simulate(g);
    if (*generate) return cmd_generate(g, spec, kind);
    if (*crash) return cmd_crash_sweep(g, plan, at_ps, threads);
    if (*compare) return cmd_compare(g, threads);
    if (*plots) return cmd_emit_plots(g, reports_path);
  } catch (const SimError& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
