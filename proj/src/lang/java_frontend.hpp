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

namespace varmark::lang::java {

bool IsReservedWord(std::string_view word);
const std::vector<std::string_view>& ReservedWords();
const std::vector<std::string_view>& ContextualKeywords();

// Comments are kept as tokens; `>` is never merged with a following `>` so
// that nested type arguments close naturally. The parser reassembles shift
// operators from adjacent `>` tokens.
std::vector<Token> Lex(std::string_view source);

struct ParseOutput {
  SyntaxTree tree;
  std::vector<Diagnostic> diagnostics;
};

ParseOutput Parse(std::string_view source, const std::vector<Token>& tokens);

}  // namespace varmark::lang::java
