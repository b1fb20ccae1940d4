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

#include "varmark/lang/language.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "java_frontend.hpp"
#include "varmark/common/error.hpp"

#ifndef VARMARK_DATA_DIR
#define VARMARK_DATA_DIR "data"
#endif

namespace varmark::lang {

namespace {

std::set<std::string> ReadNameList(const std::filesystem::path& path) {
  std::set<std::string> names;
  std::ifstream in(path);
  if (!in) return names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    line.erase(0, b);
    if (line.empty() || line[0] == '#') continue;
    names.insert(line);
  }
  return names;
}

std::shared_ptr<const Language> MakeJava(const std::filesystem::path& grammar_dir) {
  std::set<std::string> reserved;
  for (std::string_view w : java::ReservedWords()) reserved.emplace(w);
  std::set<std::string> contextual;
  for (std::string_view w : java::ContextualKeywords()) contextual.emplace(w);
  std::set<std::string> statements = {
      "local_variable_declaration", "expression_statement", "if_statement",
      "while_statement", "do_statement", "for_statement", "enhanced_for_statement",
      "return_statement", "throw_statement", "break_statement", "continue_statement",
      "try_statement", "try_with_resources_statement", "switch_expression",
      "synchronized_statement", "assert_statement", "labeled_statement",
      "yield_statement", "formal_parameter", "spread_parameter",
      "catch_formal_parameter", "resource", "field_declaration"};
  return std::make_shared<Language>("java", std::move(reserved), std::move(contextual),
                                    ReadNameList(grammar_dir / "java" / "protected_names.txt"),
                                    std::move(statements));
}

}  // namespace

Language::Language(std::string name, std::set<std::string> reserved,
                   std::set<std::string> contextual, std::set<std::string> protected_names,
                   std::set<std::string> statement_kinds)
    : name_(std::move(name)),
      reserved_lookup_(reserved.begin(), reserved.end()),
      reserved_(std::move(reserved)),
      contextual_(contextual.begin(), contextual.end()),
      protected_names_(std::move(protected_names)),
      protected_lookup_(protected_names_.begin(), protected_names_.end()),
      statement_kinds_(statement_kinds.begin(), statement_kinds.end()) {}

bool Language::IsReserved(std::string_view word) const {
  return reserved_lookup_.find(word) != reserved_lookup_.end();
}

bool Language::IsProtected(std::string_view word) const {
  return IsReserved(word) || contextual_.find(word) != contextual_.end() ||
         protected_lookup_.find(word) != protected_lookup_.end();
}

bool Language::IsKeywordCheckToken(std::string_view word) const {
  return IsReserved(word) || protected_lookup_.find(word) != protected_lookup_.end();
}

bool Language::IsStatementKind(std::string_view kind) const {
  return statement_kinds_.find(kind) != statement_kinds_.end();
}

bool Language::IsLegalIdentifier(std::string_view name) const {
  if (name.empty() || name == "_") return false;
  const auto first = static_cast<unsigned char>(name[0]);
  if (!(std::isalpha(first) || first == '_' || first == '$')) return false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '$')) return false;
  }
  return true;
}

std::vector<Token> Language::Tokenize(std::string_view source) const {
  return java::Lex(source);
}

FunctionUnit Language::Parse(std::string_view source, std::string id) const {
  std::vector<Token> tokens = java::Lex(source);
  bool any_code = false;
  for (const Token& t : tokens) any_code = any_code || t.kind != TokenKind::kComment;
  if (!any_code) Fail(ErrorCode::kUnparseableInput, "input contains no code tokens");
  java::ParseOutput parsed = java::Parse(source, tokens);
  if (parsed.tree.empty() || parsed.tree.node(parsed.tree.root()).children.empty()) {
    Fail(ErrorCode::kUnparseableInput, "parser produced no tree");
  }
  for (const SyntaxNode& node : parsed.tree.nodes()) {
    if (node.token >= 0 && tokens[static_cast<std::size_t>(node.token)].kind == TokenKind::kUnknown) {
      parsed.diagnostics.push_back(Diagnostic{node.span, "invalid token"});
    }
  }
  return FunctionUnit(std::move(id), name_, std::string(source), std::move(tokens),
                      std::move(parsed.tree), std::move(parsed.diagnostics));
}

LanguageRegistry::LanguageRegistry(const std::filesystem::path& grammar_dir) {
  languages_.emplace("java", MakeJava(grammar_dir));
}

std::filesystem::path LanguageRegistry::DefaultGrammarDir() {
  if (const char* env = std::getenv("VARMARK_GRAMMAR_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::path(VARMARK_DATA_DIR) / "grammars";
}

const LanguageRegistry& LanguageRegistry::Default() {
  static const LanguageRegistry registry(DefaultGrammarDir());
  return registry;
}

const Language& LanguageRegistry::Get(std::string_view id) const {
  const auto it = languages_.find(id);
  if (it == languages_.end()) {
    Fail(ErrorCode::kUnsupportedLanguage, "unsupported language: " + std::string(id));
  }
  return *it->second;
}

bool LanguageRegistry::Has(std::string_view id) const {
  return languages_.find(id) != languages_.end();
}

FunctionUnit ParseFunction(std::string_view source, std::string_view language, std::string id) {
  return LanguageRegistry::Default().Get(language).Parse(source, std::move(id));
}

}  // namespace varmark::lang
