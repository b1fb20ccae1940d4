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
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "java_frontend.hpp"

namespace varmark::lang::java {

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool IsPrimitiveTypeWord(std::string_view w) {
  return w == "int" || w == "long" || w == "short" || w == "byte" || w == "char" ||
         w == "float" || w == "double" || w == "boolean" || w == "void";
}

bool IsModifierWord(std::string_view w) {
  return w == "public" || w == "private" || w == "protected" || w == "static" ||
         w == "final" || w == "abstract" || w == "native" || w == "synchronized" ||
         w == "transient" || w == "volatile" || w == "strictfp" || w == "default";
}

bool IsAssignOpText(std::string_view w) {
  return w == "=" || w == "+=" || w == "-=" || w == "*=" || w == "/=" || w == "%=" ||
         w == "&=" || w == "|=" || w == "^=" || w == "<<=";
}

class Parser {
 public:
  Parser(std::string_view source, const std::vector<Token>& tokens)
      : source_(source), tokens_(tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].kind != TokenKind::kComment) code_.push_back(static_cast<int>(i));
    }
  }

  ParseOutput Run() {
    std::vector<int> members;
    while (!AtEnd()) {
      const std::size_t start = pos_;
      try {
        members.push_back(ParseMember());
      } catch (const ParseError& e) {
        pos_ = start;
        members.push_back(RecoverMember(e.what()));
      }
    }
    const int root = Make("program", members);
    return Finish(root);
  }

 private:
  struct Proto {
    std::string kind;
    std::string field;
    std::vector<int> children;
    int token = -1;
    bool error = false;
    bool missing = false;
    std::uint32_t pos = 0;
  };

  // ---- token access -------------------------------------------------------

  bool AtEnd() const { return pos_ >= code_.size(); }
  const Token& TokAt(std::size_t i) const {
    static const Token kEof{"", TokenKind::kUnknown, {}};
    return i < code_.size() ? tokens_[static_cast<std::size_t>(code_[i])] : kEof;
  }
  const Token& Cur() const { return TokAt(pos_); }
  const Token& Peek(std::size_t k = 1) const { return TokAt(pos_ + k); }
  bool At(std::string_view text) const { return !AtEnd() && Cur().Is(text); }
  bool AtIdentifier() const { return !AtEnd() && Cur().kind == TokenKind::kIdentifier; }
  bool IsIdentAt(std::size_t i) const {
    return i < code_.size() && TokAt(i).kind == TokenKind::kIdentifier;
  }
  bool IsAt(std::size_t i, std::string_view text) const {
    return i < code_.size() && TokAt(i).Is(text);
  }
  bool Adjacent(std::size_t i) const {
    return i + 1 < code_.size() && TokAt(i).span.end == TokAt(i + 1).span.begin;
  }

  [[noreturn]] void Error(const std::string& what) const {
    if (AtEnd()) throw ParseError("unexpected end of input, " + what);
    throw ParseError("unexpected '" + Cur().text + "', " + what);
  }

  // ---- node construction --------------------------------------------------

  int Make(std::string kind, std::vector<int> children) {
    Proto p;
    p.kind = std::move(kind);
    p.children = std::move(children);
    arena_.push_back(std::move(p));
    return static_cast<int>(arena_.size()) - 1;
  }

  int Field(int node, std::string field) {
    arena_[static_cast<std::size_t>(node)].field = std::move(field);
    return node;
  }

  std::string LeafKind(const Token& t) const {
    switch (t.kind) {
      case TokenKind::kIdentifier: return "identifier";
      case TokenKind::kIntegerLiteral:
        if (t.text.size() > 1 && t.text[0] == '0' && (t.text[1] == 'x' || t.text[1] == 'X'))
          return "hex_integer_literal";
        if (t.text.size() > 1 && t.text[0] == '0' && (t.text[1] == 'b' || t.text[1] == 'B'))
          return "binary_integer_literal";
        return "decimal_integer_literal";
      case TokenKind::kFloatLiteral: return "decimal_floating_point_literal";
      case TokenKind::kCharLiteral: return "character_literal";
      case TokenKind::kStringLiteral: return "string_literal";
      case TokenKind::kTextBlock: return "text_block";
      case TokenKind::kKeyword:
        if (t.text == "null") return "null_literal";
        return t.text;
      case TokenKind::kUnknown: return "ERROR";
      default: return t.text;
    }
  }

  int Leaf(std::string kind = "") {
    if (AtEnd()) Error("expected a token");
    Proto p;
    p.token = code_[pos_];
    p.kind = kind.empty() ? LeafKind(Cur()) : std::move(kind);
    p.error = Cur().kind == TokenKind::kUnknown;
    arena_.push_back(std::move(p));
    ++pos_;
    return static_cast<int>(arena_.size()) - 1;
  }

  int Expect(std::string_view text) {
    if (!At(text)) Error("expected '" + std::string(text) + "'");
    return Leaf();
  }

  int ExpectIdentifier(std::string field = "name", std::string kind = "identifier") {
    if (!AtIdentifier()) Error("expected identifier");
    return Field(Leaf(std::move(kind)), std::move(field));
  }

  int Missing(std::string what) {
    Proto p;
    p.kind = "ERROR";
    p.error = true;
    p.missing = true;
    p.pos = pos_ == 0 ? 0 : TokAt(pos_ - 1).span.end;
    arena_.push_back(std::move(p));
    diagnostics_.push_back(Diagnostic{Span{p.pos, p.pos}, "missing '" + what + "'"});
    return static_cast<int>(arena_.size()) - 1;
  }

  void ExpectSemicolon(std::vector<int>& children) {
    if (At(";")) {
      children.push_back(Leaf());
    } else {
      children.push_back(Missing(";"));
    }
  }

  // ---- recovery -----------------------------------------------------------

  int ErrorNodeUntil(std::size_t end, const std::string& message) {
    std::vector<int> kids;
    const std::uint32_t at = AtEnd() ? static_cast<std::uint32_t>(source_.size()) : Cur().span.begin;
    while (pos_ < end) kids.push_back(Leaf());
    const int node = Make("ERROR", kids);
    arena_[static_cast<std::size_t>(node)].error = true;
    arena_[static_cast<std::size_t>(node)].pos = at;
    diagnostics_.push_back(Diagnostic{Span{at, at}, message});
    return node;
  }

  int RecoverStatement(const std::string& message) {
    std::size_t i = pos_;
    int depth = 0;
    while (i < code_.size()) {
      const Token& t = TokAt(i);
      if (t.Is("{")) {
        ++depth;
      } else if (t.Is("}")) {
        if (depth == 0) break;
        --depth;
        if (depth == 0) {
          ++i;
          break;
        }
      } else if (t.Is(";") && depth == 0) {
        ++i;
        break;
      }
      ++i;
    }
    if (i == pos_) ++i;
    return ErrorNodeUntil(i, message);
  }

  int RecoverMember(const std::string& message) {
    std::size_t i = pos_;
    int depth = 0;
    bool opened = false;
    while (i < code_.size()) {
      const Token& t = TokAt(i);
      if (t.Is("{")) {
        ++depth;
        opened = true;
      } else if (t.Is("}")) {
        --depth;
        if (depth <= 0 && opened) {
          ++i;
          break;
        }
      } else if (t.Is(";") && depth == 0) {
        ++i;
        break;
      }
      ++i;
    }
    if (i == pos_) ++i;
    return ErrorNodeUntil(i, message);
  }

  // ---- lookahead scanners (no node construction) --------------------------

  std::size_t ScanAnnotation(std::size_t i) const {
    if (!IsAt(i, "@") || IsAt(i + 1, "interface")) return std::string::npos;
    ++i;
    if (!IsIdentAt(i)) return std::string::npos;
    ++i;
    while (IsAt(i, ".") && IsIdentAt(i + 1)) i += 2;
    if (IsAt(i, "(")) {
      int depth = 0;
      for (; i < code_.size(); ++i) {
        if (TokAt(i).Is("(")) ++depth;
        if (TokAt(i).Is(")") && --depth == 0) return i + 1;
      }
      return std::string::npos;
    }
    return i;
  }

  std::size_t ScanModifiers(std::size_t i) const {
    while (i < code_.size()) {
      if (TokAt(i).Is("final")) {
        ++i;
      } else if (TokAt(i).Is("@")) {
        const std::size_t next = ScanAnnotation(i);
        if (next == std::string::npos) return i;
        i = next;
      } else {
        break;
      }
    }
    return i;
  }

  std::size_t ScanTypeArguments(std::size_t i) const {
    if (!IsAt(i, "<")) return std::string::npos;
    ++i;
    if (IsAt(i, ">")) return i + 1;
    for (;;) {
      if (IsAt(i, "?")) {
        ++i;
        if (IsAt(i, "extends") || IsAt(i, "super")) {
          i = ScanType(i + 1);
          if (i == std::string::npos) return i;
        }
      } else {
        i = ScanType(i);
        if (i == std::string::npos) return i;
      }
      if (IsAt(i, ",")) {
        ++i;
        continue;
      }
      if (IsAt(i, ">")) return i + 1;
      return std::string::npos;
    }
  }

  std::size_t ScanType(std::size_t i) const {
    if (i >= code_.size()) return std::string::npos;
    while (IsAt(i, "@")) {
      const std::size_t next = ScanAnnotation(i);
      if (next == std::string::npos) return next;
      i = next;
    }
    const Token& t = TokAt(i);
    if (t.kind == TokenKind::kKeyword && IsPrimitiveTypeWord(t.text)) {
      ++i;
    } else if (t.kind == TokenKind::kIdentifier) {
      ++i;
      if (IsAt(i, "<")) {
        i = ScanTypeArguments(i);
        if (i == std::string::npos) return i;
      }
      while (IsAt(i, ".") && IsIdentAt(i + 1)) {
        i += 2;
        if (IsAt(i, "<")) {
          i = ScanTypeArguments(i);
          if (i == std::string::npos) return i;
        }
      }
    } else {
      return std::string::npos;
    }
    while (IsAt(i, "[") && IsAt(i + 1, "]")) i += 2;
    return i;
  }

  bool IsLocalVarDeclAt(std::size_t i) const {
    const std::size_t after_mods = ScanModifiers(i);
    const std::size_t after_type = ScanType(after_mods);
    if (after_type == std::string::npos || !IsIdentAt(after_type)) return false;
    const std::size_t k = after_type + 1;
    return IsAt(k, "=") || IsAt(k, ";") || IsAt(k, ",") || IsAt(k, "[") || IsAt(k, ":") ||
           (after_mods != i && k < code_.size());
  }

  std::size_t MatchingParen(std::size_t i) const {
    int depth = 0;
    for (; i < code_.size(); ++i) {
      if (TokAt(i).Is("(")) ++depth;
      if (TokAt(i).Is(")") && --depth == 0) return i;
    }
    return std::string::npos;
  }

  bool IsLambdaStart() const {
    if (no_lambda_) return false;
    if (AtIdentifier() && Peek().Is("->")) return true;
    if (At("(")) {
      const std::size_t close = MatchingParen(pos_);
      return close != std::string::npos && IsAt(close + 1, "->");
    }
    return false;
  }

  bool IsCastStart() const {
    if (!At("(")) return false;
    const std::size_t after = ScanType(pos_ + 1);
    if (after == std::string::npos || !IsAt(after, ")")) return false;
    const Token& first = Peek();
    if (first.kind == TokenKind::kKeyword && IsPrimitiveTypeWord(first.text)) return true;
    const Token& next = TokAt(after + 1);
    if (after + 1 >= code_.size()) return false;
    switch (next.kind) {
      case TokenKind::kIdentifier:
      case TokenKind::kIntegerLiteral:
      case TokenKind::kFloatLiteral:
      case TokenKind::kCharLiteral:
      case TokenKind::kStringLiteral:
      case TokenKind::kTextBlock:
        return true;
      case TokenKind::kKeyword:
        return next.text == "this" || next.text == "super" || next.text == "new" ||
               next.text == "true" || next.text == "false" || next.text == "null" ||
               next.text == "switch";
      default:
        return next.Is("(") || next.Is("!") || next.Is("~");
    }
  }

  // ---- members ------------------------------------------------------------

  int ParseAnnotation() {
    std::vector<int> kids;
    kids.push_back(Expect("@"));
    int name = ExpectIdentifier("name");
    while (At(".") && Peek().kind == TokenKind::kIdentifier) {
      const int dot = Leaf();
      const int rhs = ExpectIdentifier("name");
      arena_[static_cast<std::size_t>(name)].field.clear();
      name = Field(Make("scoped_identifier", {name, dot, rhs}), "name");
    }
    kids.push_back(name);
    if (!At("(")) return Make("marker_annotation", kids);
    std::vector<int> args;
    args.push_back(Leaf());
    while (!At(")")) {
      if (AtIdentifier() && Peek().Is("=")) {
        const int key = ExpectIdentifier("key");
        const int eq = Leaf();
        const int value = ParseElementValue();
        args.push_back(Make("element_value_pair", {key, eq, value}));
      } else {
        args.push_back(ParseElementValue());
      }
      if (At(",")) {
        args.push_back(Leaf());
      } else {
        break;
      }
    }
    args.push_back(Expect(")"));
    kids.push_back(Make("annotation_argument_list", args));
    return Make("annotation", kids);
  }

  int ParseElementValue() {
    if (At("@")) return ParseAnnotation();
    if (At("{")) {
      std::vector<int> kids{Leaf()};
      while (!At("}")) {
        kids.push_back(ParseElementValue());
        if (At(",")) kids.push_back(Leaf()); else break;
      }
      kids.push_back(Expect("}"));
      return Make("element_value_array_initializer", kids);
    }
    return ParseTernary();
  }

  // Modifiers node or -1 if there are none.
  int ParseModifiers(bool allow_all) {
    std::vector<int> kids;
    for (;;) {
      if (At("@") && !Peek().Is("interface")) {
        kids.push_back(ParseAnnotation());
      } else if (!AtEnd() && Cur().kind == TokenKind::kKeyword && IsModifierWord(Cur().text) &&
                 (allow_all || Cur().text == "final")) {
        // "default" is a modifier only in member position before a type.
        if (Cur().text == "default" && (Peek().Is(":") || Peek().Is("->"))) break;
        kids.push_back(Leaf());
      } else {
        break;
      }
    }
    if (kids.empty()) return -1;
    return Make("modifiers", kids);
  }

  int ParseTypeParameters() {
    std::vector<int> kids{Expect("<")};
    for (;;) {
      std::vector<int> param{ExpectIdentifier("name", "type_identifier")};
      if (At("extends")) {
        std::vector<int> bound{Leaf(), ParseType()};
        while (At("&")) {
          bound.push_back(Leaf());
          bound.push_back(ParseType());
        }
        param.push_back(Make("type_bound", bound));
      }
      kids.push_back(Make("type_parameter", param));
      if (At(",")) kids.push_back(Leaf()); else break;
    }
    kids.push_back(Expect(">"));
    return Make("type_parameters", kids);
  }

  int ParseMember() {
    if (At(";")) return Leaf();
    if (At("{")) return ParseBlock();
    if (At("static") && Peek().Is("{")) {
      const int kw = Leaf();
      return Make("static_initializer", {kw, ParseBlock()});
    }
    std::vector<int> kids;
    const int mods = ParseModifiers(true);
    if (mods >= 0) kids.push_back(mods);
    if (At("class") || At("interface") || At("enum") || (At("@") && Peek().Is("interface")) ||
        (At("record") && Peek().kind == TokenKind::kIdentifier)) {
      return ParseClassLike(kids);
    }
    if (At("<")) kids.push_back(ParseTypeParameters());
    if (AtIdentifier() && Peek().Is("(")) {
      kids.push_back(ExpectIdentifier("name"));
      return ParseCallableRest("constructor_declaration", kids);
    }
    kids.push_back(Field(ParseType(), "type"));
    if (AtIdentifier() && Peek().Is("(")) {
      kids.push_back(ExpectIdentifier("name"));
      return ParseCallableRest("method_declaration", kids);
    }
    kids.push_back(ParseVariableDeclarator());
    while (At(",")) {
      kids.push_back(Leaf());
      kids.push_back(ParseVariableDeclarator());
    }
    ExpectSemicolon(kids);
    return Make("field_declaration", kids);
  }

  int ParseCallableRest(const char* kind, std::vector<int> kids) {
    kids.push_back(Field(ParseFormalParameters(), "parameters"));
    while (At("[") && Peek().Is("]")) {
      const int l = Leaf();
      const int r = Leaf();
      kids.push_back(Make("dimensions", {l, r}));
    }
    if (At("throws")) {
      std::vector<int> t{Leaf(), ParseType()};
      while (At(",")) {
        t.push_back(Leaf());
        t.push_back(ParseType());
      }
      kids.push_back(Make("throws", t));
    }
    if (At("{")) {
      kids.push_back(Field(ParseBlock(), "body"));
    } else {
      ExpectSemicolon(kids);
    }
    return Make(kind, kids);
  }

  int ParseClassLike(std::vector<int> kids) {
    std::string kind = "class_declaration";
    if (At("interface")) kind = "interface_declaration";
    if (At("enum")) kind = "enum_declaration";
    if (At("record")) kind = "record_declaration";
    if (At("@")) {
      kind = "annotation_type_declaration";
      kids.push_back(Leaf());
    }
    kids.push_back(Leaf(At("record") ? "record" : ""));
    kids.push_back(ExpectIdentifier("name"));
    if (At("<")) kids.push_back(ParseTypeParameters());
    if (kind == "record_declaration") kids.push_back(ParseFormalParameters());
    while (At("extends") || At("implements") || At("permits")) {
      std::vector<int> clause{Leaf(), ParseType()};
      while (At(",")) {
        clause.push_back(Leaf());
        clause.push_back(ParseType());
      }
      kids.push_back(Make("super_interfaces", clause));
    }
    if (kind == "enum_declaration") {
      kids.push_back(Field(ParseOpaqueBody("enum_body"), "body"));
    } else {
      kids.push_back(Field(ParseClassBody(), "body"));
    }
    return Make(kind, kids);
  }

  int ParseOpaqueBody(const char* kind) {
    std::vector<int> kids{Expect("{")};
    int depth = 1;
    while (!AtEnd()) {
      if (At("{")) ++depth;
      if (At("}") && --depth == 0) break;
      kids.push_back(Leaf());
    }
    kids.push_back(Expect("}"));
    return Make(kind, kids);
  }

  int ParseClassBody() {
    std::vector<int> kids{Expect("{")};
    while (!AtEnd() && !At("}")) {
      const std::size_t start = pos_;
      try {
        kids.push_back(ParseMember());
      } catch (const ParseError& e) {
        pos_ = start;
        kids.push_back(RecoverStatement(e.what()));
      }
    }
    kids.push_back(Expect("}"));
    return Make("class_body", kids);
  }

  int ParseFormalParameters() {
    std::vector<int> kids{Expect("(")};
    while (!At(")")) {
      std::vector<int> param;
      const int mods = ParseModifiers(false);
      if (mods >= 0) param.push_back(mods);
      param.push_back(Field(ParseType(), "type"));
      if (At("...")) {
        param.push_back(Leaf());
        param.push_back(ExpectIdentifier("name"));
        kids.push_back(Make("spread_parameter", param));
      } else if (At("this")) {
        param.push_back(Leaf());
        kids.push_back(Make("receiver_parameter", param));
      } else {
        param.push_back(ExpectIdentifier("name"));
        while (At("[") && Peek().Is("]")) {
          const int l = Leaf();
          const int r = Leaf();
          param.push_back(Make("dimensions", {l, r}));
        }
        kids.push_back(Make("formal_parameter", param));
      }
      if (At(",")) kids.push_back(Leaf()); else break;
    }
    kids.push_back(Expect(")"));
    return Make("formal_parameters", kids);
  }

  // ---- types --------------------------------------------------------------

  int ParseTypeArguments() {
    std::vector<int> kids{Expect("<")};
    while (!At(">")) {
      if (At("?")) {
        std::vector<int> w{Leaf()};
        if (At("extends") || At("super")) {
          w.push_back(Leaf());
          w.push_back(ParseType());
        }
        kids.push_back(Make("wildcard", w));
      } else {
        kids.push_back(ParseType());
      }
      if (At(",")) kids.push_back(Leaf()); else break;
    }
    kids.push_back(Expect(">"));
    return Make("type_arguments", kids);
  }

  int ParseNonArrayType() {
    while (At("@")) ParseAnnotation();
    if (!AtEnd() && Cur().kind == TokenKind::kKeyword && IsPrimitiveTypeWord(Cur().text)) {
      const std::string& w = Cur().text;
      const int leaf = Leaf();
      if (w == "void") return Make("void_type", {leaf});
      if (w == "boolean") return Make("boolean_type", {leaf});
      if (w == "float" || w == "double") return Make("floating_point_type", {leaf});
      return Make("integral_type", {leaf});
    }
    if (!AtIdentifier()) Error("expected a type");
    int type = Leaf("type_identifier");
    if (At("<")) type = Make("generic_type", {type, ParseTypeArguments()});
    while (At(".") && Peek().kind == TokenKind::kIdentifier) {
      const int dot = Leaf();
      const int rhs = Leaf("type_identifier");
      type = Make("scoped_type_identifier", {type, dot, rhs});
      if (At("<")) type = Make("generic_type", {type, ParseTypeArguments()});
    }
    return type;
  }

  int ParseDimensions() {
    std::vector<int> kids;
    while (At("[") && Peek().Is("]")) {
      kids.push_back(Leaf());
      kids.push_back(Leaf());
    }
    return Make("dimensions", kids);
  }

  int ParseType() {
    int type = ParseNonArrayType();
    if (At("[") && Peek().Is("]")) type = Make("array_type", {type, ParseDimensions()});
    return type;
  }

  // ---- statements ---------------------------------------------------------

  int ParseBlock() {
    std::vector<int> kids{Expect("{")};
    while (!AtEnd() && !At("}")) kids.push_back(ParseBlockStatement());
    kids.push_back(Expect("}"));
    return Make("block", kids);
  }

  int ParseBlockStatement() {
    const std::size_t start = pos_;
    try {
      return ParseStatement();
    } catch (const ParseError& e) {
      pos_ = start;
      return RecoverStatement(e.what());
    }
  }

  int ParseVariableDeclarator() {
    std::vector<int> kids{ExpectIdentifier("name")};
    if (At("[") && Peek().Is("]")) kids.push_back(ParseDimensions());
    if (At("=")) {
      kids.push_back(Leaf());
      kids.push_back(Field(At("{") ? ParseArrayInitializer() : ParseExpression(), "value"));
    }
    return Field(Make("variable_declarator", kids), "declarator");
  }

  int ParseLocalVariableDeclaration(bool with_semicolon) {
    std::vector<int> kids;
    const int mods = ParseModifiers(false);
    if (mods >= 0) kids.push_back(mods);
    kids.push_back(Field(ParseType(), "type"));
    kids.push_back(ParseVariableDeclarator());
    while (At(",")) {
      kids.push_back(Leaf());
      kids.push_back(ParseVariableDeclarator());
    }
    if (with_semicolon) ExpectSemicolon(kids);
    return Make("local_variable_declaration", kids);
  }

  int ParseParenthesized() {
    const int open = Expect("(");
    const int expr = ParseExpression();
    const int close = Expect(")");
    return Field(Make("parenthesized_expression", {open, expr, close}), "condition");
  }

  bool IsYieldStatement() const {
    if (!At("yield") || Cur().kind != TokenKind::kIdentifier) return false;
    const Token& next = Peek();
    return !(next.Is("=") || next.Is("(") || next.Is(".") || next.Is("[") || next.Is("++") ||
             next.Is("--") || next.Is(";") || IsAssignOpText(next.text));
  }

  int ParseStatement() {
    if (AtEnd()) Error("expected a statement");
    const Token& t = Cur();
    if (t.Is("{")) return ParseBlock();
    if (t.Is(";")) return Leaf();
    if (t.kind == TokenKind::kKeyword) {
      const std::string& w = t.text;
      if (w == "if") {
        std::vector<int> kids{Leaf(), ParseParenthesized()};
        kids.push_back(Field(ParseStatement(), "consequence"));
        if (At("else")) {
          kids.push_back(Leaf());
          kids.push_back(Field(ParseStatement(), "alternative"));
        }
        return Make("if_statement", kids);
      }
      if (w == "while") {
        std::vector<int> kids{Leaf(), ParseParenthesized()};
        kids.push_back(Field(ParseStatement(), "body"));
        return Make("while_statement", kids);
      }
      if (w == "do") {
        std::vector<int> kids{Leaf()};
        kids.push_back(Field(ParseStatement(), "body"));
        kids.push_back(Expect("while"));
        kids.push_back(ParseParenthesized());
        ExpectSemicolon(kids);
        return Make("do_statement", kids);
      }
      if (w == "for") return ParseFor();
      if (w == "return" || w == "throw") {
        std::vector<int> kids{Leaf()};
        if (!At(";")) kids.push_back(ParseExpression());
        ExpectSemicolon(kids);
        return Make(w == "return" ? "return_statement" : "throw_statement", kids);
      }
      if (w == "break" || w == "continue") {
        std::vector<int> kids{Leaf()};
        if (AtIdentifier()) kids.push_back(ExpectIdentifier("label"));
        ExpectSemicolon(kids);
        return Make(w == "break" ? "break_statement" : "continue_statement", kids);
      }
      if (w == "try") return ParseTry();
      if (w == "switch") return ParseSwitch();
      if (w == "synchronized") {
        std::vector<int> kids{Leaf(), ParseParenthesized()};
        kids.push_back(Field(ParseBlock(), "body"));
        return Make("synchronized_statement", kids);
      }
      if (w == "assert") {
        std::vector<int> kids{Leaf(), ParseExpression()};
        if (At(":")) {
          kids.push_back(Leaf());
          kids.push_back(ParseExpression());
        }
        ExpectSemicolon(kids);
        return Make("assert_statement", kids);
      }
      if (w == "class" || w == "interface" || w == "enum" || w == "abstract" || w == "static") {
        return ParseMember();
      }
    }
    if (IsYieldStatement()) {
      std::vector<int> kids{Leaf("yield"), ParseExpression()};
      ExpectSemicolon(kids);
      return Make("yield_statement", kids);
    }
    if (At("@") || At("final")) {
      const std::size_t after = ScanModifiers(pos_);
      if (IsAt(after, "class") || IsAt(after, "interface") || IsAt(after, "enum")) {
        return ParseMember();
      }
      return ParseLocalVariableDeclaration(true);
    }
    if (AtIdentifier() && Peek().Is(":")) {
      const int label = ExpectIdentifier("label");
      const int colon = Leaf();
      return Make("labeled_statement", {label, colon, ParseStatement()});
    }
    if (IsLocalVarDeclAt(pos_)) return ParseLocalVariableDeclaration(true);
    std::vector<int> kids{ParseExpression()};
    ExpectSemicolon(kids);
    return Make("expression_statement", kids);
  }

  int ParseFor() {
    std::vector<int> kids{Leaf(), Expect("(")};
    const std::size_t after_mods = ScanModifiers(pos_);
    const std::size_t after_type = ScanType(after_mods);
    if (after_type != std::string::npos && IsIdentAt(after_type) && IsAt(after_type + 1, ":")) {
      const int mods = ParseModifiers(false);
      if (mods >= 0) kids.push_back(mods);
      kids.push_back(Field(ParseType(), "type"));
      kids.push_back(ExpectIdentifier("name"));
      kids.push_back(Expect(":"));
      kids.push_back(Field(ParseExpression(), "value"));
      kids.push_back(Expect(")"));
      kids.push_back(Field(ParseStatement(), "body"));
      return Make("enhanced_for_statement", kids);
    }
    if (IsLocalVarDeclAt(pos_)) {
      kids.push_back(Field(ParseLocalVariableDeclaration(true), "init"));
    } else {
      while (!At(";")) {
        kids.push_back(Field(ParseExpression(), "init"));
        if (At(",")) kids.push_back(Leaf()); else break;
      }
      kids.push_back(Expect(";"));
    }
    if (!At(";")) kids.push_back(Field(ParseExpression(), "condition"));
    kids.push_back(Expect(";"));
    while (!At(")")) {
      kids.push_back(Field(ParseExpression(), "update"));
      if (At(",")) kids.push_back(Leaf()); else break;
    }
    kids.push_back(Expect(")"));
    kids.push_back(Field(ParseStatement(), "body"));
    return Make("for_statement", kids);
  }

  int ParseTry() {
    std::vector<int> kids{Leaf()};
    bool with_resources = false;
    if (At("(")) {
      with_resources = true;
      std::vector<int> spec{Leaf()};
      while (!At(")")) {
        std::vector<int> res;
        const std::size_t after_mods = ScanModifiers(pos_);
        const std::size_t after_type = ScanType(after_mods);
        if (after_type != std::string::npos && IsIdentAt(after_type) && IsAt(after_type + 1, "=")) {
          const int mods = ParseModifiers(false);
          if (mods >= 0) res.push_back(mods);
          res.push_back(Field(ParseType(), "type"));
          res.push_back(ExpectIdentifier("name"));
          res.push_back(Expect("="));
          res.push_back(Field(ParseExpression(), "value"));
        } else {
          res.push_back(ParseExpression());
        }
        spec.push_back(Make("resource", res));
        if (At(";")) spec.push_back(Leaf()); else break;
      }
      spec.push_back(Expect(")"));
      kids.push_back(Make("resource_specification", spec));
    }
    kids.push_back(Field(ParseBlock(), "body"));
    while (At("catch")) {
      std::vector<int> c{Leaf(), Expect("(")};
      std::vector<int> param;
      const int mods = ParseModifiers(false);
      if (mods >= 0) param.push_back(mods);
      std::vector<int> types{ParseType()};
      while (At("|")) {
        types.push_back(Leaf());
        types.push_back(ParseType());
      }
      param.push_back(Make("catch_type", types));
      param.push_back(ExpectIdentifier("name"));
      c.push_back(Make("catch_formal_parameter", param));
      c.push_back(Expect(")"));
      c.push_back(Field(ParseBlock(), "body"));
      kids.push_back(Make("catch_clause", c));
    }
    if (At("finally")) {
      const int kw = Leaf();
      kids.push_back(Make("finally_clause", {kw, ParseBlock()}));
    }
    return Make(with_resources ? "try_with_resources_statement" : "try_statement", kids);
  }

  int ParseSwitchLabel(bool* is_rule) {
    std::vector<int> kids{Leaf()};
    if (arena_[static_cast<std::size_t>(kids[0])].kind == "case") {
      const bool saved = no_lambda_;
      no_lambda_ = true;
      kids.push_back(ParseTernary());
      while (At(",")) {
        kids.push_back(Leaf());
        kids.push_back(ParseTernary());
      }
      no_lambda_ = saved;
    }
    if (At("->")) {
      *is_rule = true;
      return Make("switch_label", kids);
    }
    *is_rule = false;
    kids.push_back(Expect(":"));
    return Make("switch_label", kids);
  }

  int ParseSwitch() {
    std::vector<int> kids{Leaf(), ParseParenthesized()};
    std::vector<int> block{Expect("{")};
    while (!AtEnd() && !At("}")) {
      if (!At("case") && !At("default")) Error("expected 'case' or 'default'");
      bool is_rule = false;
      const int first = ParseSwitchLabel(&is_rule);
      if (is_rule) {
        std::vector<int> rule{first, Leaf()};
        if (At("{")) {
          rule.push_back(ParseBlock());
        } else if (At("throw")) {
          rule.push_back(ParseStatement());
        } else {
          std::vector<int> st{ParseExpression()};
          ExpectSemicolon(st);
          rule.push_back(Make("expression_statement", st));
        }
        block.push_back(Make("switch_rule", rule));
        continue;
      }
      std::vector<int> group{first};
      while ((At("case") || At("default")) && !Peek().Is("->")) {
        bool again = false;
        group.push_back(ParseSwitchLabel(&again));
        if (again) Error("mixed switch label styles");
      }
      while (!AtEnd() && !At("}") && !At("case") && !(At("default") && (Peek().Is(":") || Peek().Is("->")))) {
        group.push_back(ParseBlockStatement());
      }
      block.push_back(Make("switch_block_statement_group", group));
    }
    block.push_back(Expect("}"));
    kids.push_back(Field(Make("switch_block", block), "body"));
    return Make("switch_expression", kids);
  }

  // ---- expressions --------------------------------------------------------

  int ParseExpression() { return ParseAssignment(); }

  // Number of tokens forming an assignment operator at the cursor, 0 if none.
  std::size_t AssignOpLength() const {
    if (AtEnd()) return 0;
    if (Cur().kind == TokenKind::kOperator && IsAssignOpText(Cur().text)) return 1;
    if (At(">") && Adjacent(pos_)) {
      if (IsAt(pos_ + 1, ">=")) return 2;
      if (IsAt(pos_ + 1, ">") && Adjacent(pos_ + 1) && IsAt(pos_ + 2, ">=")) return 3;
    }
    return 0;
  }

  int ParseAssignment() {
    if (IsLambdaStart()) return ParseLambda();
    const int lhs = ParseTernary();
    const std::size_t op_len = AssignOpLength();
    if (op_len == 0) return lhs;
    std::vector<int> kids{Field(lhs, "left")};
    for (std::size_t i = 0; i < op_len; ++i) kids.push_back(Field(Leaf(), "operator"));
    kids.push_back(Field(ParseAssignment(), "right"));
    return Make("assignment_expression", kids);
  }

  int ParseLambda() {
    std::vector<int> kids;
    if (AtIdentifier()) {
      kids.push_back(ExpectIdentifier("parameters"));
    } else {
      bool inferred = true;
      const std::size_t close = MatchingParen(pos_);
      for (std::size_t i = pos_ + 1; i < close; ++i) {
        const bool ok = (i - pos_) % 2 == 1 ? IsIdentAt(i) : IsAt(i, ",");
        if (!ok) {
          inferred = false;
          break;
        }
      }
      if (inferred) {
        std::vector<int> params{Leaf()};
        while (!At(")")) {
          params.push_back(ExpectIdentifier("name"));
          if (At(",")) params.push_back(Leaf()); else break;
        }
        params.push_back(Expect(")"));
        kids.push_back(Field(Make("inferred_parameters", params), "parameters"));
      } else {
        kids.push_back(Field(ParseFormalParameters(), "parameters"));
      }
    }
    kids.push_back(Expect("->"));
    kids.push_back(Field(At("{") ? ParseBlock() : ParseExpression(), "body"));
    return Make("lambda_expression", kids);
  }

  int ParseTernary() {
    const int cond = ParseBinary(1);
    if (!At("?")) return cond;
    std::vector<int> kids{Field(cond, "condition"), Leaf()};
    kids.push_back(Field(ParseExpression(), "consequence"));
    kids.push_back(Expect(":"));
    kids.push_back(Field(IsLambdaStart() ? ParseLambda() : ParseTernary(), "alternative"));
    return Make("ternary_expression", kids);
  }

  // Precedence and token length of the binary operator at the cursor.
  std::pair<int, std::size_t> BinaryOp() const {
    if (AtEnd()) return {0, 0};
    const Token& t = Cur();
    if (t.kind == TokenKind::kKeyword && t.text == "instanceof") return {7, 1};
    if (t.kind != TokenKind::kOperator) return {0, 0};
    const std::string& s = t.text;
    if (s == ">") {
      if (Adjacent(pos_) && IsAt(pos_ + 1, ">")) {
        if (Adjacent(pos_ + 1) && IsAt(pos_ + 2, ">")) {
          if (Adjacent(pos_ + 2) && IsAt(pos_ + 3, ">=")) return {0, 0};
          return {8, 3};
        }
        if (Adjacent(pos_ + 1) && IsAt(pos_ + 2, ">=")) return {0, 0};
        return {8, 2};
      }
      if (Adjacent(pos_) && IsAt(pos_ + 1, ">=")) return {0, 0};
      return {7, 1};
    }
    if (s == "||") return {1, 1};
    if (s == "&&") return {2, 1};
    if (s == "|") return {3, 1};
    if (s == "^") return {4, 1};
    if (s == "&") return {5, 1};
    if (s == "==" || s == "!=") return {6, 1};
    if (s == "<" || s == "<=" || s == ">=") return {7, 1};
    if (s == "<<") return {8, 1};
    if (s == "+" || s == "-") return {9, 1};
    if (s == "*" || s == "/" || s == "%") return {10, 1};
    return {0, 0};
  }

  int ParseBinary(int min_prec) {
    int lhs = ParseUnary();
    for (;;) {
      const auto [prec, len] = BinaryOp();
      if (prec == 0 || prec < min_prec) return lhs;
      if (At("instanceof")) {
        std::vector<int> kids{Field(lhs, "left"), Leaf()};
        if (At("final")) kids.push_back(Leaf());
        kids.push_back(Field(ParseType(), "right"));
        if (AtIdentifier()) kids.push_back(ExpectIdentifier("name"));
        lhs = Make("instanceof_expression", kids);
        continue;
      }
      std::vector<int> kids{Field(lhs, "left")};
      for (std::size_t i = 0; i < len; ++i) kids.push_back(Field(Leaf(), "operator"));
      kids.push_back(Field(ParseBinary(prec + 1), "right"));
      lhs = Make("binary_expression", kids);
    }
  }

  int ParseUnary() {
    if (At("+") || At("-") || At("!") || At("~")) {
      const int op = Field(Leaf(), "operator");
      return Make("unary_expression", {op, Field(ParseUnary(), "operand")});
    }
    if (At("++") || At("--")) {
      const int op = Leaf();
      return Make("update_expression", {op, ParseUnary()});
    }
    if (IsLambdaStart()) return ParseLambda();
    if (IsCastStart()) {
      std::vector<int> kids{Leaf(), Field(ParseType(), "type")};
      kids.push_back(Expect(")"));
      kids.push_back(Field(IsLambdaStart() ? ParseLambda() : ParseUnary(), "value"));
      return Make("cast_expression", kids);
    }
    return ParsePostfix(ParsePrimary());
  }

  int ParseArguments() {
    std::vector<int> kids{Expect("(")};
    while (!At(")")) {
      kids.push_back(ParseExpression());
      if (At(",")) kids.push_back(Leaf()); else break;
    }
    kids.push_back(Expect(")"));
    return Field(Make("argument_list", kids), "arguments");
  }

  int ParseArrayInitializer() {
    std::vector<int> kids{Expect("{")};
    while (!At("}")) {
      kids.push_back(At("{") ? ParseArrayInitializer() : ParseExpression());
      if (At(",")) kids.push_back(Leaf()); else break;
    }
    kids.push_back(Expect("}"));
    return Make("array_initializer", kids);
  }

  int ParseCreation() {
    std::vector<int> kids{Leaf()};
    if (At("<")) kids.push_back(ParseTypeArguments());
    const int type = Field(ParseNonArrayType(), "type");
    kids.push_back(type);
    if (At("[")) {
      while (At("[")) {
        if (Peek().Is("]")) {
          kids.push_back(ParseDimensions());
          break;
        }
        const int l = Leaf();
        const int e = ParseExpression();
        const int r = Expect("]");
        kids.push_back(Make("dimensions_expr", {l, e, r}));
      }
      if (At("{")) kids.push_back(Field(ParseArrayInitializer(), "value"));
      return Make("array_creation_expression", kids);
    }
    kids.push_back(ParseArguments());
    if (At("{")) kids.push_back(ParseClassBody());
    return Make("object_creation_expression", kids);
  }

  int ParsePrimary() {
    if (AtEnd()) Error("expected an expression");
    const Token& t = Cur();
    switch (t.kind) {
      case TokenKind::kIntegerLiteral:
      case TokenKind::kFloatLiteral:
      case TokenKind::kCharLiteral:
      case TokenKind::kStringLiteral:
      case TokenKind::kTextBlock:
        return Leaf();
      case TokenKind::kIdentifier:
        if (Peek().Is("(")) {
          const int name = ExpectIdentifier("name");
          return Make("method_invocation", {name, ParseArguments()});
        }
        return Leaf();
      case TokenKind::kKeyword: {
        const std::string& w = t.text;
        if (w == "true" || w == "false" || w == "null" || w == "this" || w == "super") {
          if ((w == "this" || w == "super") && Peek().Is("(")) {
            const int kw = Leaf();
            return Make("explicit_constructor_invocation", {kw, ParseArguments()});
          }
          return Leaf();
        }
        if (w == "new") return ParseCreation();
        if (w == "switch") return ParseSwitch();
        if (IsPrimitiveTypeWord(w)) {
          const int type = ParseType();
          const int dot = Expect(".");
          return Make("class_literal", {type, dot, Expect("class")});
        }
        break;
      }
      default:
        if (t.Is("(")) {
          const int open = Leaf();
          const int expr = ParseExpression();
          const int close = Expect(")");
          return Make("parenthesized_expression", {open, expr, close});
        }
        break;
    }
    Error("expected an expression");
  }

  int ParsePostfix(int expr) {
    for (;;) {
      if (At(".")) {
        const int dot = Leaf();
        if (At("class")) {
          expr = Make("class_literal", {expr, dot, Leaf()});
        } else if (At("this") || At("super")) {
          expr = Make("field_access", {Field(expr, "object"), dot, Field(Leaf(), "field")});
        } else if (At("new")) {
          expr = Make("object_creation_expression", {expr, dot, ParseCreation()});
        } else {
          std::vector<int> kids{Field(expr, "object"), dot};
          if (At("<")) kids.push_back(ParseTypeArguments());
          if (AtIdentifier() && Peek().Is("(")) {
            kids.push_back(ExpectIdentifier("name"));
            kids.push_back(ParseArguments());
            expr = Make("method_invocation", kids);
          } else {
            kids.push_back(ExpectIdentifier("field"));
            expr = Make("field_access", kids);
          }
        }
      } else if (At("[")) {
        const int l = Leaf();
        const int index = Field(ParseExpression(), "index");
        const int r = Expect("]");
        expr = Make("array_access", {Field(expr, "array"), l, index, r});
      } else if (At("++") || At("--")) {
        expr = Make("update_expression", {expr, Leaf()});
      } else if (At("::")) {
        const int colons = Leaf();
        const int name = At("new") ? Leaf() : ExpectIdentifier("name");
        expr = Make("method_reference", {expr, colons, name});
      } else {
        return expr;
      }
    }
  }

  // ---- finalization -------------------------------------------------------

  ParseOutput Finish(int root) {
    std::vector<SyntaxNode> out;
    out.reserve(arena_.size());
    Emit(root, kNoNode, out);
    return ParseOutput{SyntaxTree(std::move(out)), std::move(diagnostics_)};
  }

  NodeId Emit(int proto_id, NodeId parent, std::vector<SyntaxNode>& out) {
    const Proto& p = arena_[static_cast<std::size_t>(proto_id)];
    const NodeId id = static_cast<NodeId>(out.size());
    out.push_back(SyntaxNode{});
    out[static_cast<std::size_t>(id)].kind = p.kind;
    out[static_cast<std::size_t>(id)].field = p.field;
    out[static_cast<std::size_t>(id)].parent = parent;
    out[static_cast<std::size_t>(id)].token = p.token;
    out[static_cast<std::size_t>(id)].is_error = p.error;
    out[static_cast<std::size_t>(id)].is_missing = p.missing;
    if (p.token >= 0) {
      out[static_cast<std::size_t>(id)].span = tokens_[static_cast<std::size_t>(p.token)].span;
      return id;
    }
    std::vector<NodeId> kids;
    kids.reserve(p.children.size());
    for (int c : p.children) kids.push_back(Emit(c, id, out));
    SyntaxNode& node = out[static_cast<std::size_t>(id)];
    node.children = std::move(kids);
    if (node.children.empty()) {
      node.span = Span{p.pos, p.pos};
    } else {
      std::uint32_t b = UINT32_MAX, e = 0;
      for (NodeId c : node.children) {
        const SyntaxNode& child = out[static_cast<std::size_t>(c)];
        if (child.is_missing) continue;
        b = std::min(b, child.span.begin);
        e = std::max(e, child.span.end);
      }
      if (b == UINT32_MAX) b = e = p.pos;
      node.span = Span{b, e};
    }
    return id;
  }

  std::string_view source_;
  const std::vector<Token>& tokens_;
  std::vector<int> code_;
  std::size_t pos_ = 0;
  std::vector<Proto> arena_;
  std::vector<Diagnostic> diagnostics_;
  bool no_lambda_ = false;
};

}  // namespace

ParseOutput Parse(std::string_view source, const std::vector<Token>& tokens) {
  Parser parser(source, tokens);
  return parser.Run();
}

}  // namespace varmark::lang::java
