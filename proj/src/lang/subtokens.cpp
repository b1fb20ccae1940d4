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

#include "varmark/lang/subtokens.hpp"

#include <cctype>

namespace varmark::lang {

namespace {

bool IsSep(char c) { return c == '_' || c == '$'; }
bool IsUpper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool IsLower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool IsDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Capitalize(const std::string& s) {
  std::string out = s;
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace

std::string IdentifierSplit::Join() const {
  std::string out = prefix;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    out += pieces[i];
    if (i < separators.size()) out += separators[i];
  }
  return out + suffix;
}

IdentifierSplit SplitIdentifier(std::string_view name) {
  IdentifierSplit split;
  std::size_t b = 0;
  while (b < name.size() && IsSep(name[b])) ++b;
  std::size_t e = name.size();
  while (e > b && IsSep(name[e - 1])) --e;
  split.prefix = std::string(name.substr(0, b));
  split.suffix = std::string(name.substr(e));
  std::string piece;
  std::string sep;
  for (std::size_t i = b; i < e; ++i) {
    const char c = name[i];
    if (IsSep(c)) {
      sep += c;
      continue;
    }
    bool boundary = !sep.empty();
    if (!boundary && !piece.empty()) {
      const char prev = piece.back();
      const char next = i + 1 < e ? name[i + 1] : '\0';
      boundary = (IsLower(prev) && IsUpper(c)) || (IsDigit(prev) != IsDigit(c)) ||
                 (IsUpper(prev) && IsUpper(c) && IsLower(next));
    }
    if (boundary && !piece.empty()) {
      split.pieces.push_back(piece);
      split.separators.push_back(sep);
      piece.clear();
    }
    sep.clear();
    piece += c;
  }
  if (!piece.empty()) split.pieces.push_back(piece);
  return split;
}

std::vector<std::string> Subtokenize(std::string_view name) {
  const IdentifierSplit split = SplitIdentifier(name);
  std::vector<std::string> out;
  out.reserve(split.pieces.size());
  for (const std::string& p : split.pieces) out.push_back(Lower(p));
  if (out.empty() && !name.empty()) out.push_back(Lower(name));
  return out;
}

std::string RenderName(const std::vector<std::string>& subtokens, NamingStyle style) {
  std::string out;
  switch (style) {
    case NamingStyle::kSnake:
      for (std::size_t i = 0; i < subtokens.size(); ++i) {
        if (i > 0) out += '_';
        out += subtokens[i];
      }
      return out;
    case NamingStyle::kPascal:
      for (const std::string& s : subtokens) out += Capitalize(s);
      return out;
    case NamingStyle::kUnderscore:
      out = "_";
      [[fallthrough]];
    case NamingStyle::kCamel:
      for (std::size_t i = 0; i < subtokens.size(); ++i) {
        out += i == 0 ? subtokens[i] : Capitalize(subtokens[i]);
      }
      return out;
  }
  return out;
}

}  // namespace varmark::lang
