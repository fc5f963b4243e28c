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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heapsql {

enum class ErrorCode {
  kOutOfHeap,
  kAllocationFailed,
  kInvalidArgument,
  kMalformedQuery,
  kValidation,
  kUnsupportedShape,
  kChainExhausted,
  kConversion,
  kArity,
  kIo,
  kBadMagic,
  kBadChecksum,
  kVersionUnsupported,
  kTruncated,
  kUnknownColumn,
  kUnknownTable,
  kFreeRejected,
  kNoMatch,
  kUnmappedAggregate,
};

std::string_view ErrorCodeName(ErrorCode code);

// All engine failures surface as this exception; `code()` distinguishes them.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace heapsql
