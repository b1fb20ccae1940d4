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

#include "varmark/lang/function_unit.hpp"

#include <algorithm>

namespace varmark::lang {

FunctionUnit::FunctionUnit(std::string id, std::string language, std::string source,
                           std::vector<Token> tokens, SyntaxTree tree,
                           std::vector<Diagnostic> diagnostics)
    : id_(std::move(id)),
      language_(std::move(language)),
      source_(std::move(source)),
      tokens_(std::move(tokens)),
      tree_(std::move(tree)),
      diagnostics_(std::move(diagnostics)) {
  for (const Token& t : tokens_) {
    if (t.kind != TokenKind::kComment) code_token_starts_.push_back(t.span.begin);
  }
}

std::size_t FunctionUnit::CodeTokenCount() const { return code_token_starts_.size(); }

std::string_view FunctionUnit::Text(NodeId id) const {
  const Span s = tree_.node(id).span;
  return std::string_view(source_).substr(s.begin, s.size());
}

const Token* FunctionUnit::LeafToken(NodeId id) const {
  const int t = tree_.node(id).token;
  return t < 0 ? nullptr : &tokens_[static_cast<std::size_t>(t)];
}

std::size_t FunctionUnit::CodeTokenIndexAt(std::uint32_t offset) const {
  return static_cast<std::size_t>(
      std::lower_bound(code_token_starts_.begin(), code_token_starts_.end(), offset) -
      code_token_starts_.begin());
}

std::string FunctionUnit::Reserialize() const {
  std::string out;
  for (const Token& t : tokens_) {
    if (!out.empty() && out.back() != '\n') out += ' ';
    out += t.text;
    if (t.kind == TokenKind::kComment && t.text.rfind("//", 0) == 0) out += '\n';
  }
  return out;
}

}  // namespace varmark::lang
