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
#include <map>
#include <optional>
#include <vector>

#include "hams/controller/system.hpp"

namespace hams::failure {

/// Injection schedule. With `every_event` set, one crash is injected after
/// each dispatched event of the crash-free run (0 events included). With
/// `samples` > 0 that enumeration is replaced by a seeded random subset.
struct CrashPlan {
  std::vector<sim::SimTime> injection_times;
  bool every_event = false;
  std::uint32_t samples = 0;
  std::uint64_t seed = 0;
};

/// A powered-off system plus what the driver had been told before the cut.
struct FrozenImage {
  controller::SystemImage image;
  std::map<std::uint64_t, mos::PageContent> acknowledged;
  sim::SimTime at;
  std::uint64_t events_dispatched = 0;
  std::vector<nvme::NvmeCommand> journaled;
};

struct PersistencyVerdict {
  bool acknowledged_writes_preserved = true;
  bool spurious_data = false;
  std::vector<std::uint16_t> replayed_cids;
  bool offsets_consistent = true;
  bool quiescent = true;
  sim::SimTime crash_time;
  std::uint64_t crash_event = 0;
  std::uint64_t acknowledged_pages = 0;

  bool ok() const {
    return acknowledged_writes_preserved && !spurious_data && quiescent &&
           offsets_consistent;
  }
};

/// Runs the trace and cuts power at `at`: events due strictly before `at`
/// fire, nothing else does.
FrozenImage inject(const controller::SystemConfig& cfg,
                   const std::vector<controller::MemoryRequest>& trace,
                   sim::SimTime at);

/// Cuts power after exactly `events` dispatched events.
FrozenImage inject_after_events(const controller::SystemConfig& cfg,
                                const std::vector<controller::MemoryRequest>& trace,
                                std::uint64_t events);

/// Powers up a fresh instance over the image, recovers, runs it to
/// quiescence and judges the result against the acknowledged stores.
PersistencyVerdict restore_and_recover(const controller::SystemConfig& cfg,
                                       const FrozenImage& frozen);

/// Compares every page a reader can see against the acknowledged stores.
void judge(const controller::System& sys,
           const std::map<std::uint64_t, mos::PageContent>& acknowledged,
           PersistencyVerdict& verdict);

/// Number of events in the crash-free run of `trace`.
std::uint64_t count_events(const controller::SystemConfig& cfg,
                           const std::vector<controller::MemoryRequest>& trace);

/// Executes the plan. Injection points are independent instances spread
/// over `threads` workers; the result order follows the plan.
std::vector<PersistencyVerdict> sweep(
    const controller::SystemConfig& cfg,
    const std::vector<controller::MemoryRequest>& trace, const CrashPlan& plan,
    unsigned threads = 0);

}  // namespace hams::failure
