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

#include "hams/sim/event_queue.hpp"

#include <sstream>

namespace hams::sim {

EventHandle EventQueue::schedule(SimTime fire_at, DeviceId target,
                                 std::function<void()> payload) {
  if (fire_at < now_) {
    std::ostringstream msg;
    msg << "event at " << fire_at << " scheduled while clock is " << now_;
    raise(ErrorCode::kSchedulingInPast, msg.str());
  }
  const std::uint64_t seq = next_sequence_++;
  heap_.push(SimEvent{fire_at, target, std::move(payload), seq});
  live_.insert(seq);
  return EventHandle{seq};
}

bool EventQueue::cancel(EventHandle handle) {
  if (live_.erase(handle.sequence) == 0) return false;
  cancelled_.insert(handle.sequence);
  return true;
}

void EventQueue::drop_cancelled_top() {
  while (!heap_.empty()) {
    auto it = cancelled_.find(heap_.top().sequence);
    if (it == cancelled_.end()) return;
    cancelled_.erase(it);
    heap_.pop();
  }
}

std::optional<SimTime> EventQueue::next_time() {
  drop_cancelled_top();
  if (heap_.empty()) return std::nullopt;
  return heap_.top().fire_at;
}

void EventQueue::dispatch_top() {
  // The payload may schedule new events, so move it out before popping.
  SimEvent ev = std::move(const_cast<SimEvent&>(heap_.top()));
  heap_.pop();
  live_.erase(ev.sequence);
  now_ = ev.fire_at;
  ++dispatched_;
  if (log_enabled_) log_.push_back({ev.fire_at, ev.sequence, ev.target});
  auto mix = [this](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      digest_ ^= (v >> (8 * i)) & 0xFFu;
      digest_ *= 1099511628211ULL;
    }
  };
  mix(ev.fire_at.ticks);
  mix(ev.sequence);
  mix(static_cast<std::uint64_t>(ev.target));
  ev.payload();
}

bool EventQueue::step() {
  drop_cancelled_top();
  if (heap_.empty()) return false;
  dispatch_top();
  return true;
}

SimTime EventQueue::run_until(SimTime limit) {
  for (;;) {
    drop_cancelled_top();
    if (heap_.empty() || heap_.top().fire_at > limit) break;
    dispatch_top();
  }
  if (now_ < limit) now_ = limit;
  return now_;
}

SimTime EventQueue::run_before(SimTime limit) {
  for (;;) {
    drop_cancelled_top();
    if (heap_.empty() || heap_.top().fire_at >= limit) break;
    dispatch_top();
  }
  return now_;
}

SimTime EventQueue::run() {
  while (step()) {
  }
  return now_;
}

}  // namespace hams::sim
