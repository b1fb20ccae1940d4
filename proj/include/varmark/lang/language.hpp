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

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "varmark/lang/function_unit.hpp"

namespace varmark::lang {

// Grammar-level facts about one source language: lexical keyword sets, the
// protected-name list used by the keyword check, and which node kinds count
// as statements for context-graph construction.
class Language {
 public:
  Language(std::string name, std::set<std::string> reserved,
           std::set<std::string> contextual, std::set<std::string> protected_names,
           std::set<std::string> statement_kinds);

  const std::string& name() const { return name_; }

  // Lexically reserved words, including literal keywords.
  bool IsReserved(std::string_view word) const;
  // Words that may not be introduced as a variable name: reserved words,
  // contextual keywords and protected class names.
  bool IsProtected(std::string_view word) const;
  // Tokens tracked by the keyword check.
  bool IsKeywordCheckToken(std::string_view word) const;
  bool IsStatementKind(std::string_view kind) const;
  bool IsLegalIdentifier(std::string_view name) const;

  const std::set<std::string>& reserved() const { return reserved_; }
  const std::set<std::string>& protected_names() const { return protected_names_; }

  FunctionUnit Parse(std::string_view source, std::string id = "") const;
  std::vector<Token> Tokenize(std::string_view source) const;

 private:
  std::string name_;
  std::set<std::string, std::less<>> reserved_lookup_;
  std::set<std::string> reserved_;
  std::set<std::string, std::less<>> contextual_;
  std::set<std::string> protected_names_;
  std::set<std::string, std::less<>> protected_lookup_;
  std::set<std::string, std::less<>> statement_kinds_;
};

// Loads languages from a grammar directory laid out as
// <dir>/<language>/protected_names.txt. Only Java has a front end; other
// subdirectories are ignored.
class LanguageRegistry {
 public:
  explicit LanguageRegistry(const std::filesystem::path& grammar_dir);

  // Registry rooted at $VARMARK_GRAMMAR_DIR, or the data directory shipped
  // with the sources.
  static const LanguageRegistry& Default();
  static std::filesystem::path DefaultGrammarDir();

  const Language& Get(std::string_view id) const;
  bool Has(std::string_view id) const;

 private:
  std::map<std::string, std::shared_ptr<const Language>, std::less<>> languages_;
};

FunctionUnit ParseFunction(std::string_view source, std::string_view language,
                           std::string id = "");

}  // namespace varmark::lang
