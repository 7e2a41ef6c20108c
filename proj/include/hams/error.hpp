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

#include <stdexcept>
#include <string>
#include <string_view>

namespace hams {

/// Error classes raised by the simulator. The CLI maps each to a distinct
/// process exit code, so the numeric values are part of the interface.
enum class ErrorCode : int {
  kSchedulingInPast = 10,
  kClockOverflow = 11,
  kAddressOutOfRange = 20,
  kPartsOutOfRange = 21,
  kInvalidConfig = 22,
  kPrpPoolExhausted = 30,
  kModeChangeWhileBusy = 31,
  kCidExhausted = 40,
  kQueueFull = 41,
  kUnknownCid = 42,
  kCapacityExhausted = 50,
  kBusLocked = 60,
  kDoubleGrant = 61,
  kReleaseWithoutOwnership = 62,
  kParseError = 70,
  kUnsortedTrace = 71,
  kIoError = 72,
  kInvariantViolation = 80,
};

std::string_view to_string(ErrorCode code);

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace hams
