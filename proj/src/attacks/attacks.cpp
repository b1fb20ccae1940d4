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

#include "varmark/attacks/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "varmark/common/error.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/subtokens.hpp"
#include "varmark/lang/variables.hpp"

namespace varmark::attacks {

namespace {

using lang::FunctionUnit;
using lang::kNoNode;
using lang::NodeId;
using lang::SyntaxNode;

const lang::Language& Java() { return lang::LanguageRegistry::Default().Get("java"); }

struct Edit {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::string text;
};

std::string ApplyEdits(std::string_view src, std::vector<Edit> edits) {
  std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
  std::string out;
  std::uint32_t pos = 0;
  for (const Edit& e : edits) {
    if (e.begin < pos) continue;
    out.append(src.substr(pos, e.begin - pos));
    out += e.text;
    pos = e.end;
  }
  out.append(src.substr(pos));
  return out;
}

class View {
 public:
  explicit View(const FunctionUnit& fn) : fn_(fn), bindings_(lang::ListVariables(fn)) {}

  const FunctionUnit& fn() const { return fn_; }
  const std::vector<lang::VariableBinding>& bindings() const { return bindings_; }
  const SyntaxNode& N(NodeId id) const { return fn_.tree().node(id); }
  std::string_view Kind(NodeId id) const { return N(id).kind; }
  std::size_t size() const { return fn_.tree().size(); }

  std::string Text(NodeId id) const {
    const lang::Span s = N(id).span;
    return std::string(fn_.source().substr(s.begin, s.size()));
  }
  std::string Text(std::uint32_t begin, std::uint32_t end) const {
    return std::string(fn_.source().substr(begin, end - begin));
  }

  NodeId Child(NodeId id, std::string_view field) const {
    for (NodeId c : N(id).children) {
      if (N(c).field == field) return c;
    }
    return kNoNode;
  }
  std::vector<NodeId> Children(NodeId id, std::string_view field) const {
    std::vector<NodeId> out;
    for (NodeId c : N(id).children) {
      if (N(c).field == field) out.push_back(c);
    }
    return out;
  }
  std::vector<NodeId> ChildrenOfKind(NodeId id, std::string_view kind) const {
    std::vector<NodeId> out;
    for (NodeId c : N(id).children) {
      if (N(c).kind == kind) out.push_back(c);
    }
    return out;
  }
  // Statements of a block or switch group, without braces and labels.
  std::vector<NodeId> Statements(NodeId id) const {
    std::vector<NodeId> out;
    for (NodeId c : N(id).children) {
      const auto& k = N(c).kind;
      if (k == "{" || k == "}" || k == "switch_label") continue;
      out.push_back(c);
    }
    return out;
  }
  bool Contains(NodeId id, std::string_view kind) const {
    for (NodeId d : fn_.tree().Subtree(id)) {
      if (N(d).kind == kind) return true;
    }
    return false;
  }
  bool Mentions(NodeId id, std::string_view name) const {
    for (NodeId d : fn_.tree().Subtree(id)) {
      if (N(d).kind == "identifier" && Text(d) == name) return true;
    }
    return false;
  }
  // Expression inside a parenthesized condition.
  NodeId Inner(NodeId paren) const {
    const auto& ch = N(paren).children;
    return ch.size() == 3 ? ch[1] : kNoNode;
  }
  std::string Operator(NodeId id) const {
    std::string op;
    for (NodeId c : Children(id, "operator")) op += Text(c);
    return op;
  }

  const lang::VariableBinding* Binding(std::string_view name) const {
    const lang::VariableBinding* found = nullptr;
    for (const auto& b : bindings_) {
      if (b.name != name) continue;
      if (found != nullptr) return nullptr;
      found = &b;
    }
    return found;
  }

  // Declared type text of a local variable or parameter, empty if unknown.
  std::string DeclaredType(std::string_view name) const {
    const lang::VariableBinding* b = Binding(name);
    if (b == nullptr) return "";
    NodeId decl = N(b->occurrences.front()).parent;
    if (decl == kNoNode) return "";
    if (Kind(decl) == "variable_declarator") {
      for (NodeId c : N(decl).children) {
        if (Kind(c) == "dimensions") return "";
      }
      decl = N(decl).parent;
    }
    const NodeId type = Child(decl, "type");
    return type == kNoNode ? "" : Text(type);
  }

  bool IsStatementContext(NodeId id) const {
    const NodeId p = N(id).parent;
    if (p == kNoNode) return false;
    const auto& k = N(p).kind;
    return k == "block" || k == "switch_block_statement_group";
  }

 private:
  const FunctionUnit& fn_;
  std::vector<lang::VariableBinding> bindings_;
};

bool IsIntegralLiteral(std::string_view kind) {
  return kind == "decimal_integer_literal" || kind == "hex_integer_literal" ||
         kind == "binary_integer_literal" || kind == "character_literal";
}

bool IsSwitchableType(std::string_view type) {
  return type == "int" || type == "char" || type == "short" || type == "byte";
}

bool CanCompleteNormally(const View& v, NodeId id) {
  const auto k = v.Kind(id);
  if (k == "return_statement" || k == "throw_statement" || k == "break_statement" ||
      k == "continue_statement") {
    return false;
  }
  if (k == "block") {
    const auto stmts = v.Statements(id);
    return stmts.empty() || CanCompleteNormally(v, stmts.back());
  }
  if (k == "if_statement") {
    const NodeId alt = v.Child(id, "alternative");
    if (alt == kNoNode) return true;
    return CanCompleteNormally(v, v.Child(id, "consequence")) || CanCompleteNormally(v, alt);
  }
  return true;
}

std::string AsBlock(const View& v, NodeId stmt) {
  return v.Kind(stmt) == "block" ? v.Text(stmt) : "{ " + v.Text(stmt) + " }";
}

// Picks sites with probability p, skipping any that overlap an earlier pick.
class SitePicker {
 public:
  SitePicker(Rng& rng, double p) : rng_(rng), p_(p) {}
  bool Take(lang::Span span) {
    if (!rng_.Bernoulli(p_)) return false;
    for (const auto& s : taken_) {
      if (span.begin < s.end && s.begin < span.end) return false;
    }
    taken_.push_back(span);
    return true;
  }

 private:
  Rng& rng_;
  double p_;
  std::vector<lang::Span> taken_;
};

// ---- Type I -------------------------------------------------------------

struct Increment {
  std::string var;
  bool up = true;
  int form = 0;  // 0 v++, 1 ++v, 2 v += 1, 3 v = v + 1
};

std::optional<Increment> MatchIncrement(const View& v, NodeId id) {
  const auto k = v.Kind(id);
  const auto& ch = v.N(id).children;
  if (k == "update_expression" && ch.size() == 2) {
    const bool prefix = v.Kind(ch[0]) == "++" || v.Kind(ch[0]) == "--";
    const NodeId operand = prefix ? ch[1] : ch[0];
    const NodeId op = prefix ? ch[0] : ch[1];
    if (v.Kind(operand) != "identifier") return std::nullopt;
    return Increment{v.Text(operand), v.Kind(op) == "++", prefix ? 1 : 0};
  }
  if (k != "assignment_expression") return std::nullopt;
  const NodeId left = v.Child(id, "left");
  const NodeId right = v.Child(id, "right");
  if (left == kNoNode || right == kNoNode || v.Kind(left) != "identifier") return std::nullopt;
  const std::string op = v.Operator(id);
  const std::string name = v.Text(left);
  if ((op == "+=" || op == "-=") && v.Kind(right) == "decimal_integer_literal" && v.Text(right) == "1") {
    return Increment{name, op == "+=", 2};
  }
  if (op == "=" && v.Kind(right) == "binary_expression") {
    const NodeId a = v.Child(right, "left");
    const NodeId b = v.Child(right, "right");
    const std::string bop = v.Operator(right);
    if (a != kNoNode && b != kNoNode && v.Kind(a) == "identifier" && v.Text(a) == name &&
        (bop == "+" || bop == "-") && v.Kind(b) == "decimal_integer_literal" && v.Text(b) == "1") {
      return Increment{name, bop == "+", 3};
    }
  }
  return std::nullopt;
}

std::string RenderIncrement(const Increment& inc, int form) {
  const std::string op = inc.up ? "+" : "-";
  switch (form) {
    case 0: return inc.var + op + op;
    case 1: return op + op + inc.var;
    case 2: return inc.var + " " + op + "= 1";
    default: return inc.var + " = " + inc.var + " " + op + " 1";
  }
}

std::vector<Edit> IncrementStyleEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    NodeId expr = kNoNode;
    if (v.Kind(id) == "expression_statement" && !v.N(id).children.empty()) {
      expr = v.N(id).children.front();
    } else if (v.N(id).field == "update" && v.Kind(v.N(id).parent) == "for_statement") {
      expr = id;
    }
    if (expr == kNoNode) continue;
    const auto inc = MatchIncrement(v, expr);
    if (!inc) continue;
    const std::string type = v.DeclaredType(inc->var);
    if (type.empty()) continue;
    const bool widening_ok = type == "int" || type == "long" || type == "float" || type == "double";
    std::vector<int> forms;
    for (int f = 0; f < 4; ++f) {
      if (f != inc->form && (f != 3 || widening_ok)) forms.push_back(f);
    }
    if (!pick.Take(v.N(expr).span)) continue;
    const int form = rng.Pick(forms);
    edits.push_back(Edit{v.N(expr).span.begin, v.N(expr).span.end, RenderIncrement(*inc, form)});
  }
  return edits;
}

std::vector<Edit> LoopFormEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    const auto k = v.Kind(id);
    if (k != "for_statement" && k != "while_statement") continue;
    const NodeId parent = v.N(id).parent;
    if (parent != kNoNode && v.Kind(parent) == "labeled_statement") continue;
    const NodeId body = v.Child(id, "body");
    if (body == kNoNode) continue;
    if (k == "while_statement") {
      const NodeId cond = v.Inner(v.Child(id, "condition"));
      if (cond == kNoNode || !pick.Take(v.N(id).span)) continue;
      edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end,
                           "for (; " + v.Text(cond) + "; ) " + v.Text(body)});
      continue;
    }
    if (v.Contains(body, "continue_statement")) continue;
    std::string init;
    for (NodeId c : v.Children(id, "init")) {
      init += v.Text(c);
      if (v.Kind(c) != "local_variable_declaration") init += ";";
      init += " ";
    }
    const NodeId cond = v.Child(id, "condition");
    std::string updates;
    for (NodeId u : v.Children(id, "update")) updates += v.Text(u) + "; ";
    std::string new_body;
    if (v.Kind(body) == "block") {
      const std::string text = v.Text(body);
      new_body = text.substr(0, text.size() - 1) + (updates.empty() ? "" : "  " + updates) + "}";
    } else {
      new_body = "{ " + v.Text(body) + " " + updates + "}";
    }
    std::string loop = "while (" + (cond == kNoNode ? std::string("true") : v.Text(cond)) + ") " + new_body;
    if (!init.empty()) loop = "{ " + init + loop + " }";
    if (!pick.Take(v.N(id).span)) continue;
    edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end, loop});
  }
  return edits;
}

// if (x == A) {...} else if (x == B) {...} else {...}  ->  switch (x) {...}
std::optional<std::string> IfChainToSwitch(const View& v, NodeId head) {
  std::string subject;
  std::set<std::string> seen;
  std::string cases;
  NodeId cur = head;
  int arms = 0;
  while (true) {
    const NodeId cond = v.Inner(v.Child(cur, "condition"));
    const NodeId cons = v.Child(cur, "consequence");
    if (cond == kNoNode || cons == kNoNode || v.Kind(cond) != "binary_expression" || v.Operator(cond) != "==") {
      return std::nullopt;
    }
    NodeId a = v.Child(cond, "left");
    NodeId b = v.Child(cond, "right");
    if (a == kNoNode || b == kNoNode) return std::nullopt;
    if (v.Kind(a) != "identifier") std::swap(a, b);
    if (v.Kind(a) != "identifier" || !IsIntegralLiteral(v.Kind(b))) return std::nullopt;
    if (subject.empty()) subject = v.Text(a);
    if (v.Text(a) != subject || !seen.insert(v.Text(b)).second) return std::nullopt;
    if (v.Contains(cons, "break_statement")) return std::nullopt;
    cases += "case " + v.Text(b) + ": " + AsBlock(v, cons) + (CanCompleteNormally(v, cons) ? " break; " : " ");
    ++arms;
    const NodeId alt = v.Child(cur, "alternative");
    if (alt == kNoNode) break;
    if (v.Kind(alt) == "if_statement") {
      cur = alt;
      continue;
    }
    if (v.Contains(alt, "break_statement")) return std::nullopt;
    cases += "default: " + AsBlock(v, alt) + (CanCompleteNormally(v, alt) ? " break; " : " ");
    break;
  }
  if (arms < 2 || !IsSwitchableType(v.DeclaredType(subject))) return std::nullopt;
  return "switch (" + subject + ") { " + cases + "}";
}

// switch (x) { case A: ...; break; default: ...; }  ->  if/else chain
std::optional<std::string> SwitchToIfChain(const View& v, NodeId sw) {
  if (!v.IsStatementContext(sw)) return std::nullopt;
  const NodeId subject = v.Inner(v.Child(sw, "condition"));
  const NodeId block = v.Child(sw, "body");
  if (subject == kNoNode || block == kNoNode || v.Kind(subject) != "identifier") return std::nullopt;
  if (!IsSwitchableType(v.DeclaredType(v.Text(subject)))) return std::nullopt;
  const std::string x = v.Text(subject);
  std::string out;
  std::string default_body;
  bool has_default = false;
  int arms = 0;
  const auto groups = v.Statements(block);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const NodeId g = groups[gi];
    if (v.Kind(g) != "switch_block_statement_group") return std::nullopt;
    std::vector<std::string> values;
    bool is_default = false;
    for (NodeId label : v.ChildrenOfKind(g, "switch_label")) {
      const auto& ch = v.N(label).children;
      if (v.Kind(ch.front()) == "default") {
        is_default = true;
        continue;
      }
      for (std::size_t i = 1; i < ch.size(); ++i) {
        const auto k = v.Kind(ch[i]);
        if (k == "," || k == ":") continue;
        if (!IsIntegralLiteral(k)) return std::nullopt;
        values.push_back(v.Text(ch[i]));
      }
    }
    auto stmts = v.Statements(g);
    if (stmts.empty()) return std::nullopt;
    const NodeId last = stmts.back();
    if (v.Kind(last) == "break_statement" && v.N(last).children.size() == 2) {
      stmts.pop_back();
    } else if (CanCompleteNormally(v, last)) {
      return std::nullopt;
    }
    std::string body;
    for (NodeId s : stmts) {
      if (v.Kind(s) == "local_variable_declaration" || v.Contains(s, "break_statement")) return std::nullopt;
      body += v.Text(s) + " ";
    }
    if (is_default) {
      if (gi + 1 != groups.size()) return std::nullopt;
      has_default = true;
      default_body = body;
      continue;
    }
    std::string cond;
    for (std::size_t i = 0; i < values.size(); ++i) cond += (i ? " || " : "") + x + " == " + values[i];
    out += (arms ? " else if (" : "if (") + cond + ") { " + body + "}";
    ++arms;
  }
  if (arms == 0) return std::nullopt;
  if (has_default) out += " else { " + default_body + "}";
  return out;
}

std::vector<Edit> IfSwitchEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    std::optional<std::string> text;
    if (v.Kind(id) == "if_statement") {
      const NodeId parent = v.N(id).parent;
      if (parent != kNoNode && v.Kind(parent) == "if_statement" && v.N(id).field == "alternative") continue;
      text = IfChainToSwitch(v, id);
    } else if (v.Kind(id) == "switch_expression") {
      text = SwitchToIfChain(v, id);
    }
    if (!text || !pick.Take(v.N(id).span)) continue;
    edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end, *text});
  }
  return edits;
}

bool NeedsParens(const View& v, NodeId expr) {
  const auto k = v.Kind(expr);
  if (k == "assignment_expression" || k == "ternary_expression" || k == "lambda_expression") return true;
  return k == "binary_expression" && v.Operator(expr) == "||";
}

std::string Operand(const View& v, NodeId expr) {
  return NeedsParens(v, expr) ? "(" + v.Text(expr) + ")" : v.Text(expr);
}

std::vector<Edit> NestedIfEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    if (v.Kind(id) != "if_statement" || v.Child(id, "alternative") != kNoNode) continue;
    const NodeId cond = v.Inner(v.Child(id, "condition"));
    const NodeId cons = v.Child(id, "consequence");
    if (cond == kNoNode || cons == kNoNode) continue;
    std::vector<std::string> options;
    // Merge: if (a) { if (b) S }  ->  if (a && b) S
    NodeId inner = cons;
    if (v.Kind(cons) == "block") {
      const auto stmts = v.Statements(cons);
      inner = stmts.size() == 1 ? stmts.front() : kNoNode;
    }
    if (inner != kNoNode && v.Kind(inner) == "if_statement" && v.Child(inner, "alternative") == kNoNode) {
      const NodeId b = v.Inner(v.Child(inner, "condition"));
      const NodeId s = v.Child(inner, "consequence");
      if (b != kNoNode && s != kNoNode) {
        options.push_back("if (" + Operand(v, cond) + " && " + Operand(v, b) + ") " + v.Text(s));
      }
    }
    // Split: if (a && b) S  ->  if (a) { if (b) S }
    if (v.Kind(cond) == "binary_expression" && v.Operator(cond) == "&&") {
      const NodeId a = v.Child(cond, "left");
      const NodeId b = v.Child(cond, "right");
      if (a != kNoNode && b != kNoNode) {
        options.push_back("if (" + v.Text(a) + ") { if (" + v.Text(b) + ") " + v.Text(cons) + " }");
      }
    }
    if (options.empty() || !pick.Take(v.N(id).span)) continue;
    edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end, rng.Pick(options)});
  }
  return edits;
}

// ---- Type II ------------------------------------------------------------

struct Declaration {
  NodeId node = kNoNode;
  // Modifiers and type, as written.
  std::string prefix;
  std::vector<NodeId> declarators;
};

std::optional<Declaration> MatchDeclaration(const View& v, NodeId id) {
  if (v.Kind(id) != "local_variable_declaration" || !v.IsStatementContext(id)) return std::nullopt;
  Declaration d;
  d.node = id;
  d.declarators = v.ChildrenOfKind(id, "variable_declarator");
  if (d.declarators.empty()) return std::nullopt;
  const NodeId type = v.Child(id, "type");
  if (type == kNoNode || v.Text(type) == "var") return std::nullopt;
  d.prefix = v.Text(v.N(id).span.begin, v.N(type).span.end);
  return d;
}

// Name (with dimensions) and initializer of a declarator.
struct DeclaratorParts {
  std::string head;
  NodeId value = kNoNode;
};

DeclaratorParts SplitDeclarator(const View& v, NodeId decl) {
  DeclaratorParts parts;
  parts.value = v.Child(decl, "value");
  std::uint32_t head_end = v.N(decl).span.end;
  for (NodeId c : v.N(decl).children) {
    if (v.Kind(c) == "=") head_end = v.N(c).span.begin;
  }
  std::string head = v.Text(v.N(decl).span.begin, head_end);
  while (!head.empty() && (head.back() == ' ' || head.back() == '\t' || head.back() == '\n')) head.pop_back();
  parts.head = head;
  return parts;
}

std::string DeclaratorName(const View& v, NodeId decl) {
  const NodeId name = v.Child(decl, "name");
  return name == kNoNode ? "" : v.Text(name);
}

// `x = e;` with e not mentioning x.
std::optional<NodeId> MatchInitAssignment(const View& v, NodeId stmt, const std::string& name) {
  if (v.Kind(stmt) != "expression_statement" || v.N(stmt).children.empty()) return std::nullopt;
  const NodeId e = v.N(stmt).children.front();
  if (v.Kind(e) != "assignment_expression" || v.Operator(e) != "=") return std::nullopt;
  const NodeId left = v.Child(e, "left");
  const NodeId right = v.Child(e, "right");
  if (left == kNoNode || right == kNoNode || v.Kind(left) != "identifier" || v.Text(left) != name) {
    return std::nullopt;
  }
  if (v.Mentions(right, name) || v.Kind(right) == "array_initializer") return std::nullopt;
  return right;
}

std::vector<Edit> DeclarationInitEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    const auto d = MatchDeclaration(v, id);
    if (!d || d->declarators.size() != 1) continue;
    const DeclaratorParts parts = SplitDeclarator(v, d->declarators.front());
    const std::string name = DeclaratorName(v, d->declarators.front());
    if (parts.value != kNoNode) {
      if (v.Kind(parts.value) == "array_initializer") continue;
      if (!pick.Take(v.N(id).span)) continue;
      edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end,
                           d->prefix + " " + parts.head + "; " + name + " = " + v.Text(parts.value) + ";"});
      continue;
    }
    const auto stmts = v.Statements(v.N(id).parent);
    const auto it = std::find(stmts.begin(), stmts.end(), id);
    if (it + 1 == stmts.end()) continue;
    const auto rhs = MatchInitAssignment(v, *(it + 1), name);
    if (!rhs) continue;
    const lang::Span span{v.N(id).span.begin, v.N(*(it + 1)).span.end};
    if (!pick.Take(span)) continue;
    edits.push_back(Edit{span.begin, span.end, d->prefix + " " + parts.head + " = " + v.Text(*rhs) + ";"});
  }
  return edits;
}

std::vector<Edit> MultiDeclarationEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    const auto d = MatchDeclaration(v, id);
    if (!d) continue;
    if (d->declarators.size() > 1) {
      if (!pick.Take(v.N(id).span)) continue;
      std::string text;
      for (std::size_t i = 0; i < d->declarators.size(); ++i) {
        text += (i ? " " : "") + d->prefix + " " + v.Text(d->declarators[i]) + ";";
      }
      edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end, text});
      continue;
    }
    const auto stmts = v.Statements(v.N(id).parent);
    const auto it = std::find(stmts.begin(), stmts.end(), id);
    if (it + 1 == stmts.end()) continue;
    const auto next = MatchDeclaration(v, *(it + 1));
    if (!next || next->prefix != d->prefix) continue;
    const lang::Span span{v.N(id).span.begin, v.N(*(it + 1)).span.end};
    if (!pick.Take(span)) continue;
    std::string text = d->prefix + " " + v.Text(d->declarators.front());
    for (NodeId decl : next->declarators) text += ", " + v.Text(decl);
    edits.push_back(Edit{span.begin, span.end, text + ";"});
  }
  return edits;
}

bool IsMethodBody(const View& v, NodeId block) {
  if (v.Kind(block) != "block") return false;
  const NodeId p = v.N(block).parent;
  return p != kNoNode && (v.Kind(p) == "method_declaration" || v.Kind(p) == "constructor_declaration");
}

bool NameIsUnique(const View& v, const std::string& name) {
  int owners = 0;
  for (const auto& b : v.bindings()) owners += b.name == name ? 1 : 0;
  return owners == 1;
}

std::vector<Edit> DeclarationPositionEdits(const View& v, Rng& rng, double p) {
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  NodeId body = kNoNode;
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()); ++id) {
    if (IsMethodBody(v, id)) {
      body = id;
      break;
    }
  }
  if (body == kNoNode) return edits;
  const auto stmts = v.Statements(body);
  const std::uint32_t insert_at = v.N(v.N(body).children.front()).span.end;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    const auto d = MatchDeclaration(v, stmts[i]);
    if (!d || d->declarators.size() != 1) continue;
    const NodeId decl = d->declarators.front();
    const std::string name = DeclaratorName(v, decl);
    if (!NameIsUnique(v, name)) continue;
    const DeclaratorParts parts = SplitDeclarator(v, decl);
    if (parts.value != kNoNode) {
      // Hoist the declaration to the top, keep the initialization in place.
      if (i == 0 || v.Kind(parts.value) == "array_initializer") continue;
      if (!pick.Take(v.N(stmts[i]).span)) continue;
      edits.push_back(Edit{insert_at, insert_at, " " + d->prefix + " " + parts.head + ";"});
      edits.push_back(Edit{v.N(stmts[i]).span.begin, v.N(stmts[i]).span.end,
                           name + " = " + v.Text(parts.value) + ";"});
      continue;
    }
    // Sink a bare declaration to its first use when that use initializes it.
    for (std::size_t j = i + 1; j < stmts.size(); ++j) {
      if (!v.Mentions(stmts[j], name)) continue;
      const auto rhs = MatchInitAssignment(v, stmts[j], name);
      if (rhs && j > i + 1 && pick.Take(lang::Span{v.N(stmts[i]).span.begin, v.N(stmts[j]).span.end})) {
        edits.push_back(Edit{v.N(stmts[i]).span.begin, v.N(stmts[i]).span.end, ""});
        edits.push_back(Edit{v.N(stmts[j]).span.begin, v.N(stmts[j]).span.end,
                             d->prefix + " " + parts.head + " = " + v.Text(*rhs) + ";"});
      }
      break;
    }
  }
  return edits;
}

std::string FreshName(const View& v, const std::vector<std::string>& stems, std::set<std::string>& taken) {
  std::set<std::string> used = taken;
  for (const auto& t : v.fn().tokens()) {
    if (t.kind == lang::TokenKind::kIdentifier) used.insert(t.text);
  }
  for (int n = 0;; ++n) {
    for (const auto& stem : stems) {
      const std::string name = n == 0 ? stem : stem + std::to_string(n);
      if (used.count(name) == 0 && !Java().IsProtected(name)) {
        taken.insert(name);
        return name;
      }
    }
  }
}

std::vector<Edit> TemporaryEdits(const View& v, Rng& rng, double p) {
  constexpr int kMaxTemporaries = 2;
  std::vector<Edit> edits;
  SitePicker pick(rng, p);
  std::set<std::string> taken;
  int added = 0;
  for (NodeId id = 0; id < static_cast<NodeId>(v.size()) && added < kMaxTemporaries; ++id) {
    if (v.Kind(id) != "expression_statement" || !v.IsStatementContext(id)) continue;
    const NodeId e = v.N(id).children.front();
    if (v.Kind(e) != "assignment_expression" || v.Operator(e) != "=") continue;
    const NodeId left = v.Child(e, "left");
    const NodeId right = v.Child(e, "right");
    if (left == kNoNode || right == kNoNode || v.Kind(left) != "identifier") continue;
    if (v.Kind(right) == "array_initializer" || v.Kind(right) == "lambda_expression") continue;
    const std::string type = v.DeclaredType(v.Text(left));
    if (type.empty() || type == "var") continue;
    if (!pick.Take(v.N(id).span)) continue;
    const std::string tmp = FreshName(v, {"tmp", "temp"}, taken);
    edits.push_back(Edit{v.N(id).span.begin, v.N(id).span.end,
                         type + " " + tmp + " = " + v.Text(right) + "; " + v.Text(left) + " = " + tmp + ";"});
    ++added;
  }
  return edits;
}

std::string NamingStylePass(std::string_view source, Rng& rng, double p) {
  static const lang::NamingStyle kStyles[] = {lang::NamingStyle::kCamel, lang::NamingStyle::kPascal,
                                              lang::NamingStyle::kSnake, lang::NamingStyle::kUnderscore};
  const lang::NamingStyle style = kStyles[rng.Index(4)];
  const auto& java = Java();
  FunctionUnit fn = java.Parse(source);
  const std::size_t count = lang::ListVariables(fn).size();
  for (std::size_t i = 0; i < count; ++i) {
    const auto bindings = lang::ListVariables(fn);
    const auto& b = bindings[i];
    if (!rng.Bernoulli(p)) continue;
    const std::string name = lang::RenderName(lang::Subtokenize(b.name), style);
    if (name == b.name || lang::CheckRename(fn, bindings, b, name, java)) continue;
    fn = lang::RenameVariable(fn, b, name, java);
  }
  return fn.source();
}

bool PassAccepted(std::string_view before, const std::string& after, Attribute a) {
  const auto& java = Java();
  const FunctionUnit out = java.Parse(after);
  if (out.HasErrors()) return false;
  const FunctionUnit in = java.Parse(before);
  const auto bin = lang::ListVariables(in);
  const auto bout = lang::ListVariables(out);
  // Non-variable identifiers (types, methods, fields) must survive untouched.
  auto others = [](const FunctionUnit& fn, const std::vector<lang::VariableBinding>& b) {
    std::multiset<std::string> names;
    for (NodeId id : lang::NonVariableIdentifiers(fn, b)) names.insert(std::string(fn.Text(id)));
    return names;
  };
  if (others(in, bin) != others(out, bout)) return false;
  if (a == Attribute::kTemporary) return bout.size() >= bin.size();
  if (bin.size() != bout.size()) return false;
  std::multiset<std::vector<std::string>> sin, sout;
  for (const auto& b : bin) sin.insert(lang::Subtokenize(b.name));
  for (const auto& b : bout) sout.insert(lang::Subtokenize(b.name));
  return sin == sout;
}

}  // namespace

std::string_view AttributeName(Attribute a) {
  switch (a) {
    case Attribute::kIncrementStyle: return "increment_style";
    case Attribute::kLoopForm: return "loop_form";
    case Attribute::kIfSwitch: return "if_switch";
    case Attribute::kNestedIf: return "nested_if";
    case Attribute::kNamingStyle: return "naming_style";
    case Attribute::kDeclarationPosition: return "declaration_position";
    case Attribute::kDeclarationInit: return "declaration_init";
    case Attribute::kMultiDeclaration: return "multi_declaration";
    case Attribute::kTemporary: return "temporary";
  }
  return "?";
}

std::vector<Attribute> TypeIAttributes() {
  return {Attribute::kIncrementStyle, Attribute::kLoopForm, Attribute::kIfSwitch, Attribute::kNestedIf};
}

std::vector<Attribute> TypeIIAttributes() {
  return {Attribute::kNamingStyle, Attribute::kDeclarationPosition, Attribute::kDeclarationInit,
          Attribute::kMultiDeclaration, Attribute::kTemporary};
}

std::string AttackSpec::Name() const {
  switch (type) {
    case AttackType::kNone: return "none";
    case AttackType::kTypeI: return "type1";
    case AttackType::kTypeII: return "type2";
    case AttackType::kTypeIII: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "type3@%.2f", rename_fraction);
      return buf;
    }
  }
  return "?";
}

std::string ApplyAttribute(std::string_view source, Attribute a, Rng& rng, double site_prob) {
  std::string out;
  if (a == Attribute::kNamingStyle) {
    out = NamingStylePass(source, rng, site_prob);
  } else {
    const FunctionUnit fn = Java().Parse(source);
    const View v(fn);
    std::vector<Edit> edits;
    switch (a) {
      case Attribute::kIncrementStyle: edits = IncrementStyleEdits(v, rng, site_prob); break;
      case Attribute::kLoopForm: edits = LoopFormEdits(v, rng, site_prob); break;
      case Attribute::kIfSwitch: edits = IfSwitchEdits(v, rng, site_prob); break;
      case Attribute::kNestedIf: edits = NestedIfEdits(v, rng, site_prob); break;
      case Attribute::kDeclarationPosition: edits = DeclarationPositionEdits(v, rng, site_prob); break;
      case Attribute::kDeclarationInit: edits = DeclarationInitEdits(v, rng, site_prob); break;
      case Attribute::kMultiDeclaration: edits = MultiDeclarationEdits(v, rng, site_prob); break;
      case Attribute::kTemporary: edits = TemporaryEdits(v, rng, site_prob); break;
      case Attribute::kNamingStyle: break;
    }
    if (edits.empty()) return std::string(source);
    out = ApplyEdits(fn.source(), std::move(edits));
  }
  return PassAccepted(source, out, a) ? out : std::string(source);
}

namespace {

std::string RunAttributes(std::string_view source, std::uint64_t seed, const std::vector<Attribute>& attributes) {
  std::string cur(source);
  for (Attribute a : attributes) {
    Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(a) + 1}));
    cur = ApplyAttribute(cur, a, rng);
  }
  return cur;
}

}  // namespace

std::string AttackTypeI(std::string_view source, std::uint64_t seed, const std::vector<Attribute>& attributes) {
  return RunAttributes(source, seed, attributes.empty() ? TypeIAttributes() : attributes);
}

std::string AttackTypeII(std::string_view source, std::uint64_t seed, const std::vector<Attribute>& attributes) {
  return RunAttributes(source, seed, attributes.empty() ? TypeIIAttributes() : attributes);
}

std::string AttackTypeIII(std::string_view source, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) Fail(ErrorCode::kInvalidArgument, "rename fraction must be in (0, 1]");
  const auto& java = Java();
  FunctionUnit fn = java.Parse(source);
  const std::size_t count = lang::ListVariables(fn).size();
  if (count == 0) return std::string(source);
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);
  const auto n = static_cast<std::size_t>(std::ceil(p * static_cast<double>(count) - 1e-9));
  std::set<std::string> used;
  for (const auto& t : fn.tokens()) {
    if (t.kind == lang::TokenKind::kIdentifier) used.insert(t.text);
  }
  int next = 0;
  for (std::size_t k = 0; k < n && k < count; ++k) {
    const auto bindings = lang::ListVariables(fn);
    const auto& b = bindings[order[k]];
    std::string name;
    do {
      name = "var" + std::to_string(next++);
    } while (used.count(name) != 0 || lang::CheckRename(fn, bindings, b, name, java));
    used.insert(name);
    fn = lang::RenameVariable(fn, b, name, java);
  }
  return fn.source();
}

std::string ApplyAttack(std::string_view source, const AttackSpec& spec) {
  switch (spec.type) {
    case AttackType::kNone: return std::string(source);
    case AttackType::kTypeI: return AttackTypeI(source, spec.seed, spec.attributes);
    case AttackType::kTypeII: return AttackTypeII(source, spec.seed, spec.attributes);
    case AttackType::kTypeIII: return AttackTypeIII(source, spec.rename_fraction, spec.seed);
  }
  return std::string(source);
}

}  // namespace varmark::attacks
