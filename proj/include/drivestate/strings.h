// include/drivestate/strings.h

// Copyright 2026 The drivestate Authors.
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

#ifndef DRIVESTATE_STRINGS_H_
#define DRIVESTATE_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace drivestate {

// Plain comma split; fields never contain quoted commas in our formats.
std::vector<std::string> SplitCsvLine(std::string_view line);
std::vector<std::string> SplitWhitespace(std::string_view line);
std::string StripCr(std::string line);
std::string Trim(std::string_view s);

// Fixed-precision decimal, e.g. FormatFixed(0.6114, 3) == "0.611".
std::string FormatFixed(double value, int digits);
// Shortest representation that round-trips a double.
std::string FormatRoundTrip(double value);

}  // namespace drivestate

#endif  // DRIVESTATE_STRINGS_H_
