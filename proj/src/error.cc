// src/error.cc

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

#include "drivestate/error.h"

namespace drivestate {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateClip: return "DuplicateClip";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kBadSchema: return "BadSchema";
    case ErrorCode::kEmptyAudio: return "EmptyAudio";
    case ErrorCode::kBadFormat: return "BadFormat";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kBadTimestamp: return "BadTimestamp";
    case ErrorCode::kNotSorted: return "NotSorted";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kEmptyTrain: return "EmptyTrain";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kNoSoberBaseline: return "NoSoberBaseline";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kTooFewSubjects: return "TooFewSubjects";
    case ErrorCode::kEmptyClip: return "EmptyClip";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
      code_(code) {}

}  // namespace drivestate
