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

#include <string>

#include "hams/controller/system.hpp"
#include "hams/workload/metrics.hpp"
#include "hams/workload/mmap_baseline.hpp"

namespace hams::workload {

enum class Platform : std::uint8_t { kHams, kMmap };

struct RunConfig {
  controller::SystemConfig system;
  EnergyModel energy;
  MmapParams mmap;
  Platform platform = Platform::kHams;
};

/// JSON document; every key is optional and unknown keys are rejected.
/// Throws SimError(kInvalidConfig) or kIoError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string dump_run_config(const RunConfig& cfg);

std::string platform_label(const RunConfig& cfg);

}  // namespace hams::workload
