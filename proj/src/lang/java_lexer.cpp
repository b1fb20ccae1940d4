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

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

#include "java_frontend.hpp"

namespace varmark::lang::java {

namespace {

constexpr std::array<std::string_view, 53> kReserved = {
    "abstract", "assert",     "boolean",   "break",     "byte",      "case",
    "catch",    "char",       "class",     "const",     "continue",  "default",
    "do",       "double",     "else",      "enum",      "extends",   "final",
    "finally",  "float",      "for",       "goto",      "if",        "implements",
    "import",   "instanceof", "int",       "interface", "long",      "native",
    "new",      "package",    "private",   "protected", "public",    "return",
    "short",    "static",     "strictfp",  "super",     "switch",    "synchronized",
    "this",     "throw",      "throws",    "transient", "try",       "void",
    "volatile", "while",      "true",      "false",     "null"};

// Longest first within each leading character.
constexpr std::array<std::string_view, 21> kMultiCharOps = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<"};

bool IsIdentStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
bool IsIdentPart(unsigned char c) { return IsIdentStart(c) || std::isdigit(c); }

}  // namespace

bool IsReservedWord(std::string_view word) {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

const std::vector<std::string_view>& ReservedWords() {
  static const std::vector<std::string_view> words(kReserved.begin(), kReserved.end());
  return words;
}

const std::vector<std::string_view>& ContextualKeywords() {
  static const std::vector<std::string_view> words = {
      "var", "yield", "record", "sealed", "permits", "non-sealed", "_"};
  return words;
}

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  const std::size_t n = src.size();
  std::size_t i = 0;
  auto emit = [&](std::size_t begin, std::size_t end, TokenKind kind) {
    out.push_back(Token{std::string(src.substr(begin, end - begin)), kind,
                        Span{static_cast<std::uint32_t>(begin),
                             static_cast<std::uint32_t>(end)}});
  };
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      emit(start, i, TokenKind::kComment);
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      const std::size_t close = src.find("*/", i + 2);
      i = close == std::string_view::npos ? n : close + 2;
      emit(start, i, TokenKind::kComment);
      continue;
    }
    if (IsIdentStart(c)) {
      while (i < n && IsIdentPart(static_cast<unsigned char>(src[i]))) ++i;
      const auto word = src.substr(start, i - start);
      emit(start, i, IsReservedWord(word) ? TokenKind::kKeyword : TokenKind::kIdentifier);
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      bool is_float = false;
      if (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X' ||
                                    src[i + 1] == 'b' || src[i + 1] == 'B')) {
        i += 2;
        while (i < n && (std::isxdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      } else {
        while (i < n && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        if (i < n && src[i] == '.' && !(i + 1 < n && src[i + 1] == '.')) {
          is_float = true;
          ++i;
          while (i < n && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        }
        if (i < n && (src[i] == 'e' || src[i] == 'E')) {
          is_float = true;
          ++i;
          if (i < n && (src[i] == '+' || src[i] == '-')) ++i;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      if (i < n && src[i] != '\0' && std::strchr("fFdD", src[i]) != nullptr) {
        is_float = true;
        ++i;
      } else if (i < n && (src[i] == 'l' || src[i] == 'L')) {
        ++i;
      }
      emit(start, i, is_float ? TokenKind::kFloatLiteral : TokenKind::kIntegerLiteral);
      continue;
    }
    if (c == '"') {
      if (src.substr(i, 3) == "\"\"\"") {
        const std::size_t close = src.find("\"\"\"", i + 3);
        i = close == std::string_view::npos ? n : close + 3;
        emit(start, i, TokenKind::kTextBlock);
        continue;
      }
      ++i;
      while (i < n && src[i] != '"' && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      if (i < n && src[i] == '"') {
        ++i;
        emit(start, i, TokenKind::kStringLiteral);
      } else {
        emit(start, i, TokenKind::kUnknown);
      }
      continue;
    }
    if (c == '\'') {
      ++i;
      while (i < n && src[i] != '\'' && src[i] != '\n') {
        if (src[i] == '\\' && i + 1 < n) ++i;
        ++i;
      }
      if (i < n && src[i] == '\'') {
        ++i;
        emit(start, i, TokenKind::kCharLiteral);
      } else {
        emit(start, i, TokenKind::kUnknown);
      }
      continue;
    }
    if (c == '>') {
      if (i + 1 < n && src[i + 1] == '=') {
        emit(start, i + 2, TokenKind::kOperator);
        i += 2;
      } else {
        emit(start, i + 1, TokenKind::kOperator);
        i += 1;
      }
      continue;
    }
    bool matched = false;
    for (std::string_view op : kMultiCharOps) {
      if (src.substr(i, op.size()) == op) {
        emit(start, i + op.size(), TokenKind::kOperator);
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (c != 0 && std::strchr("(){}[];,.@", c) != nullptr) {
      emit(start, i + 1, TokenKind::kSeparator);
      ++i;
      continue;
    }
    if (c != 0 && std::strchr("+-*/%=<!~?:&|^", c) != nullptr) {
      emit(start, i + 1, TokenKind::kOperator);
      ++i;
      continue;
    }
    emit(start, i + 1, TokenKind::kUnknown);
    ++i;
  }
  return out;
}

}  // namespace varmark::lang::java
