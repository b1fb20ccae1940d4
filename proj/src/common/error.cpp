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

#include "varmark/common/error.hpp"

namespace varmark {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::kUnparseableInput: return "UnparseableInput";
    case ErrorCode::kIllegalIdentifier: return "IllegalIdentifier";
    case ErrorCode::kNameCollision: return "NameCollision";
    case ErrorCode::kReservedWord: return "ReservedWord";
    case ErrorCode::kEmptyContext: return "EmptyContext";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIsolatedNode: return "IsolatedNode";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEmptyOutput: return "EmptyOutput";
    case ErrorCode::kTeacherUnavailable: return "TeacherUnavailable";
    case ErrorCode::kNoStatementContext: return "NoStatementContext";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kNoVariables: return "NoVariables";
    case ErrorCode::kBeamExhausted: return "BeamExhausted";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUntrainedModel: return "UntrainedModel";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace varmark
