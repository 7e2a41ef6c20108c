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
#include <functional>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "hams/sim/sim_time.hpp"

namespace hams::sim {

/// Identifies the device model an event is addressed to. Only used for the
/// dispatch log; actions are closures.
enum class DeviceId : std::uint8_t {
  kDriver = 0,
  kController = 1,
  kNvmeEngine = 2,
  kFlash = 3,
  kBus = 4,
  kHarness = 5,
};

struct EventHandle {
  std::uint64_t sequence = 0;
};

struct SimEvent {
  SimTime fire_at;
  DeviceId target = DeviceId::kDriver;
  std::function<void()> payload;
  std::uint64_t sequence = 0;
};

struct DispatchRecord {
  SimTime fire_at;
  std::uint64_t sequence;
  DeviceId target;

  bool operator==(const DispatchRecord&) const = default;
};

/// Binary-heap event queue. Dispatch order is the lexicographic order of
/// (fire_at, sequence); sequence is assigned at schedule time.
class EventQueue {
 public:
  EventHandle schedule(SimTime fire_at, DeviceId target,
                       std::function<void()> payload);
  EventHandle schedule_in(SimTime delay, DeviceId target,
                          std::function<void()> payload) {
    return schedule(now_ + delay, target, std::move(payload));
  }

  /// Returns false if the event already fired or was already cancelled.
  bool cancel(EventHandle handle);

  /// Dispatches every event with fire_at <= limit and leaves the clock at
  /// `limit` (or later, if the clock was already past it).
  SimTime run_until(SimTime limit);

  /// Dispatches every event with fire_at < limit. The clock stays at the
  /// last dispatched event.
  SimTime run_before(SimTime limit);

  /// Runs until the queue is empty.
  SimTime run();

  /// Dispatches a single event. Returns false when nothing is pending.
  bool step();

  SimTime now() const { return now_; }
  std::uint64_t dispatched() const { return dispatched_; }
  std::size_t pending() const { return heap_.size() - cancelled_.size(); }
  bool empty() const { return pending() == 0; }
  std::optional<SimTime> next_time();

  void enable_log(bool on) { log_enabled_ = on; }
  const std::vector<DispatchRecord>& log() const { return log_; }
  /// Running FNV-1a digest over every dispatched (fire_at, sequence, target).
  std::uint64_t log_digest() const { return digest_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  void drop_cancelled_top();
  void dispatch_top();

  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::unordered_set<std::uint64_t> live_;
  SimTime now_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
  bool log_enabled_ = false;
  std::vector<DispatchRecord> log_;
  std::uint64_t digest_ = 1469598103934665603ULL;
};

}  // namespace hams::sim
