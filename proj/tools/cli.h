// tools/cli.h

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

#ifndef DRIVESTATE_TOOLS_CLI_H_
#define DRIVESTATE_TOOLS_CLI_H_

#include <iosfwd>

#include "drivestate/error.h"

namespace drivestate {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Input, schema and configuration problems map to kExitValidation; the rest
// to kExitRuntime.
bool IsValidationError(ErrorCode code);

// Entry point of the drivestate tool: synth, segment, features, run, report,
// selftest.
int Dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace drivestate

#endif  // DRIVESTATE_TOOLS_CLI_H_
