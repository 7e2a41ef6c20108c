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

#include "hams/failure/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace hams::failure {

namespace {

FrozenImage freeze(controller::System& sys) {
  FrozenImage f;
  f.at = sys.events().now();
  f.events_dispatched = sys.events().dispatched();
  f.acknowledged = sys.acknowledged();
  f.journaled = sys.engine().outstanding_commands();
  f.image = sys.power_fail();
  return f;
}

struct ByteCheck {
  bool lost = false;
  bool spurious = false;
};

ByteCheck compare_page(const mos::PageContent& actual,
                       const mos::PageContent& expected) {
  ByteCheck r;
  if (actual.mode() == mos::ContentMode::kChecksum ||
      expected.mode() == mos::ContentMode::kChecksum) {
    if (actual.digest() != expected.digest()) r.lost = true;
    return r;
  }
  std::set<std::uint32_t> cuts;
  for (const auto* c : {&actual, &expected}) {
    for (const auto& [start, ext] : c->extents()) {
      cuts.insert(start);
      cuts.insert(ext.end);
    }
  }
  for (std::uint32_t at : cuts) {
    const auto want = expected.writer_at(at);
    const auto got = actual.writer_at(at);
    if (want == got) continue;
    if (want) r.lost = true;
    if (got) r.spurious = true;
  }
  return r;
}

}  // namespace

FrozenImage inject(const controller::SystemConfig& cfg,
                   const std::vector<controller::MemoryRequest>& trace,
                   sim::SimTime at) {
  controller::System sys(cfg);
  sys.load(trace);
  sys.events().run_before(at);
  FrozenImage f = freeze(sys);
  f.at = at;
  return f;
}

FrozenImage inject_after_events(const controller::SystemConfig& cfg,
                                const std::vector<controller::MemoryRequest>& trace,
                                std::uint64_t events) {
  controller::System sys(cfg);
  sys.load(trace);
  sys.step(events);
  return freeze(sys);
}

void judge(const controller::System& sys,
           const std::map<std::uint64_t, mos::PageContent>& acknowledged,
           PersistencyVerdict& verdict) {
  std::vector<std::uint64_t> pages = sys.touched_pages();
  for (const auto& kv : acknowledged) pages.push_back(kv.first);
  std::sort(pages.begin(), pages.end());
  pages.erase(std::unique(pages.begin(), pages.end()), pages.end());
  const mos::PageContent zero(sys.config().nvdimm.content_mode);
  for (std::uint64_t page : pages) {
    auto it = acknowledged.find(page);
    const ByteCheck c =
        compare_page(sys.logical_page(page), it == acknowledged.end() ? zero : it->second);
    if (c.lost) verdict.acknowledged_writes_preserved = false;
    if (c.spurious) verdict.spurious_data = true;
  }
  verdict.acknowledged_pages = acknowledged.size();
}

PersistencyVerdict restore_and_recover(const controller::SystemConfig& cfg,
                                       const FrozenImage& frozen) {
  controller::System sys(cfg, &frozen.image);
  PersistencyVerdict v;
  v.crash_time = frozen.at;
  v.crash_event = frozen.events_dispatched;
  for (const auto& cmd : sys.recover()) v.replayed_cids.push_back(cmd.cid);
  v.offsets_consistent = sys.controller().offsets_consistent_at_recovery();
  v.quiescent = sys.controller().idle();
  judge(sys, frozen.acknowledged, v);
  return v;
}

std::uint64_t count_events(const controller::SystemConfig& cfg,
                           const std::vector<controller::MemoryRequest>& trace) {
  controller::System sys(cfg);
  sys.load(trace);
  sys.run();
  return sys.events().dispatched();
}

std::vector<PersistencyVerdict> sweep(
    const controller::SystemConfig& cfg,
    const std::vector<controller::MemoryRequest>& trace, const CrashPlan& plan,
    unsigned threads) {
  struct Point {
    bool by_event;
    std::uint64_t events;
    sim::SimTime at;
  };
  std::vector<Point> points;
  for (sim::SimTime t : plan.injection_times) points.push_back({false, 0, t});
  if (plan.every_event || plan.samples > 0) {
    const std::uint64_t total = count_events(cfg, trace);
    if (plan.samples > 0) {
      std::mt19937_64 rng(plan.seed);
      std::uniform_int_distribution<std::uint64_t> pick(0, total);
      for (std::uint32_t i = 0; i < plan.samples; ++i) {
        points.push_back({true, pick(rng), {}});
      }
    } else {
      for (std::uint64_t k = 0; k <= total; ++k) points.push_back({true, k, {}});
    }
  }

  std::vector<PersistencyVerdict> out(points.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, points.size()));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mu;
  std::exception_ptr failure;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        const Point& p = points[i];
        const FrozenImage f = p.by_event ? inject_after_events(cfg, trace, p.events)
                                         : inject(cfg, trace, p.at);
        out[i] = restore_and_recover(cfg, f);
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = points.size();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace hams::failure
