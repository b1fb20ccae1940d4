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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varmark/common/error.hpp"
#include "varmark/lang/function_unit.hpp"
#include "varmark/lang/language.hpp"

namespace varmark::lang {

struct VariableBinding {
  std::string name;
  // Identifier leaves in source order; the first is the declaration.
  std::vector<NodeId> occurrences;
  int ordinal = 0;
  // Node whose extent bounds the visibility of the variable.
  NodeId scope = kNoNode;
  bool is_parameter = false;
  // Declared in an enhanced-for header.
  bool is_loop_header = false;
};

// Local variables and parameters ordered by first occurrence. Fields,
// method names, type names and unresolved names are never bindings.
std::vector<VariableBinding> ListVariables(const FunctionUnit& fn);

// Identifier leaves that are not occurrences of any binding (fields, methods,
// labels, types, unresolved names).
std::vector<NodeId> NonVariableIdentifiers(const FunctionUnit& fn,
                                           const std::vector<VariableBinding>& bindings);

struct RenameIssue {
  ErrorCode code;
  std::string message;
};

// First reason a rename of `b` to `new_name` would be rejected, if any.
// `bindings` must be ListVariables(fn).
std::optional<RenameIssue> CheckRename(const FunctionUnit& fn,
                                       const std::vector<VariableBinding>& bindings,
                                       const VariableBinding& b, std::string_view new_name,
                                       const Language& lang);

// Replaces all occurrences of `b` with `new_name` and reparses.
// Throws IllegalIdentifier, ReservedWord or NameCollision.
FunctionUnit RenameVariable(const FunctionUnit& fn, const VariableBinding& b,
                            std::string_view new_name);
FunctionUnit RenameVariable(const FunctionUnit& fn, const VariableBinding& b,
                            std::string_view new_name, const Language& lang);

// Applies several renames at once; bindings must come from `fn`. Pairs whose
// name is unchanged are ignored. No collision checks are performed beyond
// the per-name legality checks.
FunctionUnit RenameMany(const FunctionUnit& fn,
                        const std::vector<std::pair<const VariableBinding*, std::string>>& renames,
                        const Language& lang);

}  // namespace varmark::lang
