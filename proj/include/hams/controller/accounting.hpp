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

#include "hams/controller/request.hpp"
#include "hams/sim/sim_time.hpp"

namespace hams::controller {

/// Where the end-to-end latency of one request went. `queueing` is whatever
/// the service stages on the request's critical path do not explain.
struct LatencyBreakdown {
  sim::SimTime nvdimm;
  sim::SimTime flash_array;
  sim::SimTime interface;
  sim::SimTime queueing;
  sim::SimTime software;

  sim::SimTime service() const {
    return nvdimm + flash_array + interface + software;
  }
  sim::SimTime total() const { return service() + queueing; }

  LatencyBreakdown& operator+=(const LatencyBreakdown& o) {
    nvdimm += o.nvdimm;
    flash_array += o.flash_array;
    interface += o.interface;
    queueing += o.queueing;
    software += o.software;
    return *this;
  }

  bool operator==(const LatencyBreakdown&) const = default;
};

/// Service time charged to one NVMe command along its own path.
struct CommandCost {
  sim::SimTime interface;
  sim::SimTime flash;
};

struct Completion {
  MemoryRequest req;
  bool hit = false;
  sim::SimTime issued;
  sim::SimTime completed;
  LatencyBreakdown breakdown;

  sim::SimTime latency() const { return completed - issued; }
};

}  // namespace hams::controller
