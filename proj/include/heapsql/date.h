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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace heapsql {

/// A calendar date stored as signed days since 1970-01-01 (proleptic
/// Gregorian). This is the D32 column encoding.
struct Date {
  int32_t days = 0;

  auto operator<=>(const Date&) const = default;
};

int32_t DaysFromCivil(int32_t year, unsigned month, unsigned day);

/// Parses strict `YYYY-MM-DD`. Returns nullopt on any malformed input,
/// including out-of-range month/day.
std::optional<Date> TryParseDate(std::string_view text);

/// Throws Error(kConversion) on malformed input.
Date ParseDate(std::string_view text);

std::string FormatDate(Date date);

}  // namespace heapsql
