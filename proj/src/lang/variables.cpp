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

#include "varmark/lang/variables.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace varmark::lang {

namespace {

bool OpensScope(std::string_view kind) {
  return kind == "block" || kind == "method_declaration" ||
         kind == "constructor_declaration" || kind == "lambda_expression" ||
         kind == "for_statement" || kind == "enhanced_for_statement" ||
         kind == "catch_clause" || kind == "try_with_resources_statement" ||
         kind == "switch_block" || kind == "class_body" || kind == "program";
}

enum class Role { kDeclaration, kParameterDeclaration, kLoopDeclaration, kUse, kOther };

Role Classify(const SyntaxTree& tree, NodeId id) {
  const SyntaxNode& node = tree.node(id);
  if (node.kind != "identifier" || node.parent == kNoNode) return Role::kOther;
  const SyntaxNode& parent = tree.node(node.parent);
  const std::string& pk = parent.kind;
  const std::string& field = node.field;
  if (field == "name") {
    if (pk == "formal_parameter" || pk == "spread_parameter") {
      const NodeId list = parent.parent;
      if (list != kNoNode && tree.node(list).parent != kNoNode &&
          tree.node(tree.node(list).parent).kind == "record_declaration") {
        return Role::kOther;
      }
      return Role::kParameterDeclaration;
    }
    if (pk == "catch_formal_parameter" || pk == "resource" || pk == "instanceof_expression") {
      return Role::kDeclaration;
    }
    if (pk == "enhanced_for_statement") return Role::kLoopDeclaration;
    if (pk == "variable_declarator") {
      const NodeId decl = parent.parent;
      if (decl != kNoNode && tree.node(decl).kind == "local_variable_declaration") {
        return Role::kDeclaration;
      }
      return Role::kOther;
    }
    if (pk == "inferred_parameters") return Role::kParameterDeclaration;
    return Role::kOther;
  }
  if (field == "parameters" && pk == "lambda_expression") return Role::kParameterDeclaration;
  if (field == "field" || field == "label" || field == "key") return Role::kOther;
  if (pk == "method_reference" || pk == "marker_annotation" || pk == "annotation" ||
      pk == "scoped_identifier") {
    return Role::kOther;
  }
  return Role::kUse;
}

class ScopeWalker {
 public:
  explicit ScopeWalker(const FunctionUnit& fn) : fn_(fn), tree_(fn.tree()) {}

  std::vector<VariableBinding> Run() {
    if (!tree_.empty()) Visit(tree_.root());
    std::stable_sort(bindings_.begin(), bindings_.end(),
                     [&](const VariableBinding& a, const VariableBinding& b) {
                       return tree_.node(a.occurrences.front()).span.begin <
                              tree_.node(b.occurrences.front()).span.begin;
                     });
    for (std::size_t i = 0; i < bindings_.size(); ++i) bindings_[i].ordinal = static_cast<int>(i);
    return std::move(bindings_);
  }

 private:
  struct Scope {
    NodeId node;
    std::map<std::string, std::size_t, std::less<>> names;
  };

  void Visit(NodeId id) {
    const SyntaxNode& node = tree_.node(id);
    const bool opens = OpensScope(node.kind);
    if (opens) scopes_.push_back(Scope{id, {}});
    if (node.IsLeaf()) {
      Leaf(id);
    } else {
      for (NodeId c : node.children) Visit(c);
    }
    if (opens) scopes_.pop_back();
  }

  void Leaf(NodeId id) {
    const Role role = Classify(tree_, id);
    const std::string name(fn_.Text(id));
    if (role == Role::kUse) {
      for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
        const auto found = it->names.find(name);
        if (found != it->names.end()) {
          bindings_[found->second].occurrences.push_back(id);
          return;
        }
      }
      return;
    }
    if (role == Role::kOther || scopes_.empty()) return;
    VariableBinding b;
    b.name = name;
    b.occurrences.push_back(id);
    b.scope = scopes_.back().node;
    b.is_parameter = role == Role::kParameterDeclaration;
    b.is_loop_header = role == Role::kLoopDeclaration;
    scopes_.back().names[name] = bindings_.size();
    bindings_.push_back(std::move(b));
  }

  const FunctionUnit& fn_;
  const SyntaxTree& tree_;
  std::vector<Scope> scopes_;
  std::vector<VariableBinding> bindings_;
};

bool Overlaps(const Span& a, const Span& b) { return a.begin < b.end && b.begin < a.end; }

void CheckName(std::string_view new_name, const Language& lang) {
  if (!lang.IsLegalIdentifier(new_name)) {
    Fail(ErrorCode::kIllegalIdentifier, "illegal identifier: " + std::string(new_name));
  }
  if (lang.IsProtected(new_name)) {
    Fail(ErrorCode::kReservedWord, "reserved or protected name: " + std::string(new_name));
  }
}

}  // namespace

std::vector<VariableBinding> ListVariables(const FunctionUnit& fn) {
  return ScopeWalker(fn).Run();
}

std::vector<NodeId> NonVariableIdentifiers(const FunctionUnit& fn,
                                           const std::vector<VariableBinding>& bindings) {
  std::set<NodeId> taken;
  for (const VariableBinding& b : bindings) taken.insert(b.occurrences.begin(), b.occurrences.end());
  std::vector<NodeId> out;
  const auto& nodes = fn.tree().nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const SyntaxNode& n = nodes[i];
    if ((n.kind == "identifier" || n.kind == "type_identifier") && n.token >= 0 &&
        taken.count(static_cast<NodeId>(i)) == 0) {
      out.push_back(static_cast<NodeId>(i));
    }
  }
  return out;
}

std::optional<RenameIssue> CheckRename(const FunctionUnit& fn,
                                       const std::vector<VariableBinding>& bindings,
                                       const VariableBinding& b, std::string_view new_name,
                                       const Language& lang) {
  if (!lang.IsLegalIdentifier(new_name)) {
    return RenameIssue{ErrorCode::kIllegalIdentifier, "illegal identifier: " + std::string(new_name)};
  }
  if (lang.IsProtected(new_name)) {
    return RenameIssue{ErrorCode::kReservedWord, "reserved or protected name: " + std::string(new_name)};
  }
  if (new_name == b.name) return std::nullopt;
  const SyntaxTree& tree = fn.tree();
  const Span own = tree.node(b.scope).span;
  for (const VariableBinding& other : bindings) {
    if (other.name != new_name || other.occurrences == b.occurrences) continue;
    if (Overlaps(own, tree.node(other.scope).span)) {
      return RenameIssue{ErrorCode::kNameCollision,
                         "name '" + std::string(new_name) + "' is already visible"};
    }
  }
  for (NodeId id : NonVariableIdentifiers(fn, bindings)) {
    if (fn.Text(id) == new_name) {
      return RenameIssue{ErrorCode::kNameCollision,
                         "name '" + std::string(new_name) + "' is used by a non-variable"};
    }
  }
  return std::nullopt;
}

FunctionUnit RenameVariable(const FunctionUnit& fn, const VariableBinding& b,
                            std::string_view new_name) {
  return RenameVariable(fn, b, new_name, LanguageRegistry::Default().Get(fn.language()));
}

FunctionUnit RenameVariable(const FunctionUnit& fn, const VariableBinding& b,
                            std::string_view new_name, const Language& lang) {
  const std::vector<VariableBinding> bindings = ListVariables(fn);
  if (auto issue = CheckRename(fn, bindings, b, new_name, lang)) Fail(issue->code, issue->message);
  if (new_name == b.name) return fn;
  return RenameMany(fn, {{&b, std::string(new_name)}}, lang);
}

FunctionUnit RenameMany(const FunctionUnit& fn,
                        const std::vector<std::pair<const VariableBinding*, std::string>>& renames,
                        const Language& lang) {
  std::vector<std::pair<Span, const std::string*>> edits;
  for (const auto& [binding, name] : renames) {
    if (binding->name == name) continue;
    CheckName(name, lang);
    for (NodeId id : binding->occurrences) edits.emplace_back(fn.tree().node(id).span, &name);
  }
  if (edits.empty()) return fn;
  std::sort(edits.begin(), edits.end(),
            [](const auto& a, const auto& b) { return a.first.begin < b.first.begin; });
  const std::string& src = fn.source();
  std::string out;
  out.reserve(src.size() + 16 * edits.size());
  std::uint32_t at = 0;
  for (const auto& [span, name] : edits) {
    if (span.begin < at) Fail(ErrorCode::kInvalidArgument, "overlapping rename edits");
    out.append(src, at, span.begin - at);
    out += *name;
    at = span.end;
  }
  out.append(src, at, std::string::npos);
  FunctionUnit renamed = lang.Parse(out, fn.id());
  if (renamed.CodeTokenCount() != fn.CodeTokenCount() ||
      renamed.tree().ShapeSignature() != fn.tree().ShapeSignature()) {
    Fail(ErrorCode::kInvalidArgument, "rename changed the syntax tree of " + fn.id());
  }
  return renamed;
}

}  // namespace varmark::lang
