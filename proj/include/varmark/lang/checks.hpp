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

#include <string_view>
#include <vector>

#include "varmark/lang/syntax.hpp"

namespace varmark::lang {

struct CheckReport {
  bool ast_ok = false;
  bool keyword_ok = false;
  std::vector<Diagnostic> diagnostics;
};

// True iff the source parses with zero error nodes.
bool AstCheck(std::string_view source, std::string_view language);

// True iff both texts carry the same multiset of reserved words and
// protected class names.
bool KeywordCheck(std::string_view original, std::string_view watermarked,
                  std::string_view language);

CheckReport CheckWatermarked(std::string_view original, std::string_view watermarked,
                             std::string_view language);

}  // namespace varmark::lang
