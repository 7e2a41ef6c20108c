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

#include "hams/error.hpp"

namespace hams {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchedulingInPast: return "SchedulingInPast";
    case ErrorCode::kClockOverflow: return "ClockOverflow";
    case ErrorCode::kAddressOutOfRange: return "AddressOutOfRange";
    case ErrorCode::kPartsOutOfRange: return "PartsOutOfRange";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kPrpPoolExhausted: return "PrpPoolExhausted";
    case ErrorCode::kModeChangeWhileBusy: return "ModeChangeWhileBusy";
    case ErrorCode::kCidExhausted: return "CidExhausted";
    case ErrorCode::kQueueFull: return "QueueFull";
    case ErrorCode::kUnknownCid: return "UnknownCid";
    case ErrorCode::kCapacityExhausted: return "CapacityExhausted";
    case ErrorCode::kBusLocked: return "BusLocked";
    case ErrorCode::kDoubleGrant: return "DoubleGrant";
    case ErrorCode::kReleaseWithoutOwnership: return "ReleaseWithoutOwnership";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsortedTrace: return "UnsortedTrace";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw SimError(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace hams
