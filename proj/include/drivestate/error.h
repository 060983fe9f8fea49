// include/drivestate/error.h

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

#ifndef DRIVESTATE_ERROR_H_
#define DRIVESTATE_ERROR_H_

#include <stdexcept>
#include <string>

namespace drivestate {

enum class ErrorCode {
  kDuplicateClip,
  kBadLabel,
  kBadSchema,
  kEmptyAudio,
  kBadFormat,
  kDimMismatch,
  kParseError,
  kNonFinite,
  kBadTimestamp,
  kNotSorted,
  kOutOfRange,
  kEmptyTrain,
  kTooFewRows,
  kNoSoberBaseline,
  kSingleClass,
  kTooFewSubjects,
  kEmptyClip,
  kShapeError,
  kIo,
  kConfig,
};

const char *ErrorCodeName(ErrorCode code);

// All library failures are reported through this type; callers switch on
// code() rather than parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace drivestate

#endif  // DRIVESTATE_ERROR_H_
