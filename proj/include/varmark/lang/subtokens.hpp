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

namespace varmark::lang {

// Identifier split into pieces with their original spelling. Joining
// `prefix`, the pieces separated by `separators` and `suffix` reproduces the
// identifier byte for byte.
struct IdentifierSplit {
  std::string prefix;
  std::vector<std::string> pieces;
  // separators[i] sits between pieces[i] and pieces[i + 1].
  std::vector<std::string> separators;
  std::string suffix;

  std::string Join() const;
};

IdentifierSplit SplitIdentifier(std::string_view name);

// Lowercase subtokens: camelCase boundaries, underscores and digit runs.
std::vector<std::string> Subtokenize(std::string_view name);

enum class NamingStyle { kCamel, kPascal, kSnake, kUnderscore };

// Renders lowercase subtokens in a naming style. kUnderscore is camelCase
// with a leading underscore.
std::string RenderName(const std::vector<std::string>& subtokens, NamingStyle style);

}  // namespace varmark::lang
