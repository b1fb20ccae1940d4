// Copyright 2026 The varmark Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace varmark {

enum class ErrorCode {
  kUnsupportedLanguage,
  kUnparseableInput,
  kIllegalIdentifier,
  kNameCollision,
  kReservedWord,
  kEmptyContext,
  kDimensionMismatch,
  kIsolatedNode,
  kIndexOutOfRange,
  kEmptyOutput,
  kTeacherUnavailable,
  kNoStatementContext,
  kSchemaError,
  kEmptyCorpus,
  kDivergence,
  kCapacityExceeded,
  kNoVariables,
  kBeamExhausted,
  kLengthMismatch,
  kUntrainedModel,
  kInvalidArgument,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; the code is stable and
// machine-readable, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace varmark
