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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace varmark::lang {

// Half-open byte range into the source text.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const { return end - begin; }
  bool Contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kIntegerLiteral,
  kFloatLiteral,
  kCharLiteral,
  kStringLiteral,
  kTextBlock,
  kOperator,
  kSeparator,
  kComment,
  kUnknown,
};

std::string_view TokenKindName(TokenKind kind);

struct Token {
  std::string text;
  TokenKind kind = TokenKind::kUnknown;
  Span span;

  bool Is(std::string_view s) const {
    return kind != TokenKind::kStringLiteral && kind != TokenKind::kComment &&
           text == s;
  }
};

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct SyntaxNode {
  std::string kind;
  // Role of this node inside its parent ("name", "body", "condition", ...);
  // empty when the grammar assigns none.
  std::string field;
  Span span;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  // Index into FunctionUnit::tokens for leaves, -1 otherwise.
  int token = -1;
  bool is_error = false;
  // Zero-width node standing in for a token the parser expected.
  bool is_missing = false;

  bool IsLeaf() const { return children.empty(); }
};

// Nodes are stored in pre-order, so node ids increase with source position
// and parents precede their descendants.
class SyntaxTree {
 public:
  SyntaxTree() = default;
  explicit SyntaxTree(std::vector<SyntaxNode> nodes) : nodes_(std::move(nodes)) {}

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return nodes_.empty() ? kNoNode : 0; }
  const SyntaxNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<SyntaxNode>& nodes() const { return nodes_; }

  // Nodes of the subtree rooted at `id`, in pre-order.
  std::vector<NodeId> Subtree(NodeId id) const;
  std::size_t ErrorCount() const;
  // Kind/parent structure as a compact string; equal iff the trees have the
  // same shape ignoring token text.
  std::string ShapeSignature() const;

 private:
  std::vector<SyntaxNode> nodes_;
};

struct Diagnostic {
  Span span;
  std::string message;
};

}  // namespace varmark::lang
