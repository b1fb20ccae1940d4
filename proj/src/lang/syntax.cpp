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

#include "varmark/lang/syntax.hpp"

namespace varmark::lang {

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier: return "identifier";
    case TokenKind::kKeyword: return "keyword";
    case TokenKind::kIntegerLiteral: return "integer_literal";
    case TokenKind::kFloatLiteral: return "float_literal";
    case TokenKind::kCharLiteral: return "char_literal";
    case TokenKind::kStringLiteral: return "string_literal";
    case TokenKind::kTextBlock: return "text_block";
    case TokenKind::kOperator: return "operator";
    case TokenKind::kSeparator: return "separator";
    case TokenKind::kComment: return "comment";
    case TokenKind::kUnknown: return "unknown";
  }
  return "unknown";
}

std::vector<NodeId> SyntaxTree::Subtree(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    const auto& kids = node(cur).children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::size_t SyntaxTree::ErrorCount() const {
  std::size_t n = 0;
  for (const SyntaxNode& node : nodes_) n += node.is_error ? 1 : 0;
  return n;
}

std::string SyntaxTree::ShapeSignature() const {
  std::string out;
  for (const SyntaxNode& node : nodes_) {
    out += node.kind;
    out += '/';
    out += node.field;
    out += '@';
    out += std::to_string(node.parent);
    out += ';';
  }
  return out;
}

}  // namespace varmark::lang
