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

#include "hams/sim/sim_time.hpp"

#include <cmath>

namespace hams::sim {

SimTime transfer_time(std::uint64_t bytes, double bytes_per_second) {
  if (bytes == 0) return SimTime::zero();
  if (!(bytes_per_second > 0.0)) {
    raise(ErrorCode::kInvalidConfig, "transfer rate must be positive");
  }
  const double rounded = std::round(bytes_per_second);
  if (std::fabs(rounded - bytes_per_second) < 1e-6 && rounded < 1.8e19) {
    // Integral rates are the common case; keep them exact.
    const auto rate = static_cast<unsigned __int128>(rounded);
    const unsigned __int128 num =
        static_cast<unsigned __int128>(bytes) * 1'000'000'000'000ULL;
    return SimTime{static_cast<std::uint64_t>((num + rate - 1) / rate)};
  }
  return SimTime{static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(bytes) * 1e12 / bytes_per_second))};
}

}  // namespace hams::sim
