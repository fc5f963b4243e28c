// Copyright 2026 The heapsql Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "heapsql/status.h"

namespace heapsql {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfHeap: return "OutOfHeap";
    case ErrorCode::kAllocationFailed: return "AllocationFailed";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedQuery: return "MalformedQuery";
    case ErrorCode::kValidation: return "Validation";
    case ErrorCode::kUnsupportedShape: return "UnsupportedShape";
    case ErrorCode::kChainExhausted: return "ChainExhausted";
    case ErrorCode::kConversion: return "Conversion";
    case ErrorCode::kArity: return "Arity";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadChecksum: return "BadChecksum";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kUnknownTable: return "UnknownTable";
    case ErrorCode::kFreeRejected: return "FreeRejected";
    case ErrorCode::kNoMatch: return "NoMatch";
    case ErrorCode::kUnmappedAggregate: return "UnmappedAggregate";
  }
  return "Unknown";
}

}  // namespace heapsql
