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

#include "varmark/lang/checks.hpp"

#include <algorithm>
#include <string>

#include "varmark/common/error.hpp"
#include "varmark/lang/language.hpp"

namespace varmark::lang {

namespace {

std::vector<std::string> KeywordTokens(std::string_view source, const Language& lang) {
  std::vector<std::string> out;
  for (const Token& t : lang.Tokenize(source)) {
    if ((t.kind == TokenKind::kKeyword || t.kind == TokenKind::kIdentifier) &&
        lang.IsKeywordCheckToken(t.text)) {
      out.push_back(t.text);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool AstCheck(std::string_view source, std::string_view language) {
  const Language& lang = LanguageRegistry::Default().Get(language);
  try {
    return !lang.Parse(source).HasErrors();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnparseableInput) return false;
    throw;
  }
}

bool KeywordCheck(std::string_view original, std::string_view watermarked,
                  std::string_view language) {
  const Language& lang = LanguageRegistry::Default().Get(language);
  return KeywordTokens(original, lang) == KeywordTokens(watermarked, lang);
}

CheckReport CheckWatermarked(std::string_view original, std::string_view watermarked,
                             std::string_view language) {
  const Language& lang = LanguageRegistry::Default().Get(language);
  CheckReport report;
  try {
    const FunctionUnit fn = lang.Parse(watermarked);
    report.ast_ok = !fn.HasErrors();
    report.diagnostics = fn.diagnostics();
    if (!report.ast_ok && report.diagnostics.empty()) {
      report.diagnostics.push_back(Diagnostic{{}, "syntax tree contains error nodes"});
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnparseableInput) throw;
    report.ast_ok = false;
    report.diagnostics.push_back(Diagnostic{{}, e.what()});
  }
  report.keyword_ok = KeywordTokens(original, lang) == KeywordTokens(watermarked, lang);
  if (!report.keyword_ok) {
    report.diagnostics.push_back(Diagnostic{{}, "reserved word or protected name changed"});
  }
  return report;
}

}  // namespace varmark::lang
