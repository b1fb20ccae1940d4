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

#include <string>
#include <string_view>
#include <vector>

#include "varmark/lang/syntax.hpp"

namespace varmark::lang {

class Language;

// One parsed function: the unit of watermarking. Immutable once built.
class FunctionUnit {
 public:
  FunctionUnit(std::string id, std::string language, std::string source,
               std::vector<Token> tokens, SyntaxTree tree,
               std::vector<Diagnostic> diagnostics);

  const std::string& id() const { return id_; }
  const std::string& language() const { return language_; }
  const std::string& source() const { return source_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const SyntaxTree& tree() const { return tree_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  bool HasErrors() const { return !diagnostics_.empty() || tree_.ErrorCount() > 0; }
  // Tokens excluding comments.
  std::size_t CodeTokenCount() const;
  std::string_view Text(NodeId id) const;
  const Token* LeafToken(NodeId id) const;
  // Index of the first code token starting at or after `offset`.
  std::size_t CodeTokenIndexAt(std::uint32_t offset) const;

  // Code tokens joined by single spaces.
  std::string Reserialize() const;

 private:
  std::string id_;
  std::string language_;
  std::string source_;
  std::vector<Token> tokens_;
  SyntaxTree tree_;
  std::vector<Diagnostic> diagnostics_;
  std::vector<std::uint32_t> code_token_starts_;
};

}  // namespace varmark::lang
