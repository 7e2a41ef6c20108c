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
#include <vector>

#include "hams/controller/system.hpp"
#include "hams/workload/metrics.hpp"

namespace hams::workload {

struct MmapParams {
  /// Kernel page-fault and file-mapping software cost per fault.
  double overhead_us = 17.5;
  std::uint32_t os_page_bytes = 4096;

  void validate() const;
};

/// Analytic memory-mapped-file comparator. A host page cache of the NVDIMM
/// cache size (LRU, os_page_bytes pages) in front of the baseline PCIe
/// device. One thread: each access starts when the previous one finished,
/// or at its own tick if later. A fault costs the software overhead, the
/// device read and the PCIe plus DDR4 transfer of one OS page; dirty
/// victims are written back through the same path.
MetricsReport mmap_baseline(const std::vector<controller::MemoryRequest>& requests,
                            const controller::SystemConfig& cfg,
                            const MmapParams& params, const EnergyModel& energy,
                            const std::string& workload);

}  // namespace hams::workload
