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

#include <doctest.h>

#include "varmark/common/error.hpp"
#include "varmark/lang/checks.hpp"
#include "varmark/lang/corpus.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/subtokens.hpp"
#include "varmark/lang/variables.hpp"
#include "varmark/synth/java_synth.hpp"

#include <filesystem>
#include <fstream>

using namespace varmark;
using namespace varmark::lang;

namespace {

const Language& Java() { return LanguageRegistry::Default().Get("java"); }

const char* kSample =
    "int f(int n, String s) {\n"
    "  int count = 0;\n"
    "  for (int i = 0; i < n; i++) { count += s.length(); }\n"
    "  Runnable r = () -> { int k = count; };\n"
    "  return count + this.n;\n"
    "}\n";

std::vector<std::string> Names(const FunctionUnit& fn) {
  std::vector<std::string> out;
  for (const auto& b : ListVariables(fn)) out.push_back(b.name);
  return out;
}

}  // namespace

TEST_CASE("subtokens split camel, snake and acronym forms") {
  CHECK(Subtokenize("userDetails") == std::vector<std::string>{"user", "details"});
  CHECK(Subtokenize("user_details") == std::vector<std::string>{"user", "details"});
  CHECK(Subtokenize("HTTPServer") == std::vector<std::string>{"http", "server"});
  CHECK(Subtokenize("parseXMLFile") == std::vector<std::string>{"parse", "xml", "file"});
  CHECK(Subtokenize("MAX_VALUE") == std::vector<std::string>{"max", "value"});
  CHECK(Subtokenize("_count") == std::vector<std::string>{"count"});
  CHECK(Subtokenize("x2y") == std::vector<std::string>{"x", "2", "y"});
}

TEST_CASE("naming styles render the same subtokens") {
  const std::vector<std::string> pieces{"user", "details"};
  CHECK(RenderName(pieces, NamingStyle::kCamel) == "userDetails");
  CHECK(RenderName(pieces, NamingStyle::kPascal) == "UserDetails");
  CHECK(RenderName(pieces, NamingStyle::kSnake) == "user_details");
  CHECK(RenderName(pieces, NamingStyle::kUnderscore) == "_userDetails");
  for (auto style : {NamingStyle::kCamel, NamingStyle::kPascal, NamingStyle::kSnake, NamingStyle::kUnderscore}) {
    CHECK(Subtokenize(RenderName(pieces, style)) == pieces);
  }
}

TEST_CASE("identifier split round-trips through Join") {
  for (const char* name : {"userDetails", "__init__", "MAX_VALUE", "a1b2", "$tmp"}) {
    CHECK(SplitIdentifier(name).Join() == name);
  }
}

TEST_CASE("variables are listed in declaration order with parameters first") {
  const FunctionUnit fn = Java().Parse(kSample);
  REQUIRE_FALSE(fn.HasErrors());
  const auto vars = ListVariables(fn);
  CHECK(Names(fn) == std::vector<std::string>{"n", "s", "count", "i", "r", "k"});
  CHECK(vars[0].is_parameter);
  CHECK_FALSE(vars[2].is_parameter);
  // `this.n` is a field access, not the parameter.
  CHECK(vars[0].occurrences.size() == 2);
  CHECK(vars[2].occurrences.size() == 4);
  for (std::size_t i = 0; i < vars.size(); ++i) CHECK(vars[i].ordinal == static_cast<int>(i));
}

TEST_CASE("enhanced for and catch parameters are variables") {
  const FunctionUnit fn = Java().Parse(
      "void g(List<String> xs) { for (String x : xs) { try { use(x); } catch (IOException e) { log(e); } } }");
  REQUIRE_FALSE(fn.HasErrors());
  const auto vars = ListVariables(fn);
  CHECK(Names(fn) == std::vector<std::string>{"xs", "x", "e"});
  CHECK(vars[1].is_loop_header);
}

TEST_CASE("rename checks collisions, reserved words and legality") {
  const FunctionUnit fn = Java().Parse(kSample);
  const auto vars = ListVariables(fn);
  const auto& count = vars[2];
  auto code = [&](std::string_view name) {
    const auto issue = CheckRename(fn, vars, count, name, Java());
    return issue ? std::optional<ErrorCode>(issue->code) : std::nullopt;
  };
  CHECK(code("s") == ErrorCode::kNameCollision);
  // Declared in a scope where `count` is visible.
  CHECK(code("i") == ErrorCode::kNameCollision);
  CHECK(code("k") == ErrorCode::kNameCollision);
  CHECK(code("class") == ErrorCode::kReservedWord);
  CHECK(code("String") == ErrorCode::kReservedWord);
  CHECK(code("9x") == ErrorCode::kIllegalIdentifier);
  CHECK_FALSE(code("total").has_value());
}

TEST_CASE("rename touches every occurrence and nothing else") {
  const FunctionUnit fn = Java().Parse(kSample);
  const auto vars = ListVariables(fn);
  const FunctionUnit out = RenameVariable(fn, vars[0], "limit", Java());
  CHECK(out.source().find("int limit, String s") != std::string::npos);
  CHECK(out.source().find("i < limit") != std::string::npos);
  CHECK(out.source().find("this.n") != std::string::npos);
  CHECK(Names(out) == std::vector<std::string>{"limit", "s", "count", "i", "r", "k"});
  CHECK(out.tree().ShapeSignature() == fn.tree().ShapeSignature());
  CHECK_THROWS_AS(RenameVariable(fn, vars[0], "while", Java()), Error);

  const FunctionUnit many = RenameMany(fn, {{&vars[2], "total"}, {&vars[3], "idx"}}, Java());
  CHECK(Names(many) == std::vector<std::string>{"n", "s", "total", "idx", "r", "k"});
}

TEST_CASE("checks flag parse errors and changed keywords") {
  const FunctionUnit fn = Java().Parse(kSample);
  const std::string renamed = RenameVariable(fn, ListVariables(fn)[2], "total", Java()).source();
  const CheckReport ok = CheckWatermarked(kSample, renamed, "java");
  CHECK(ok.ast_ok);
  CHECK(ok.keyword_ok);

  std::string shadowing = kSample;
  shadowing.replace(shadowing.find("count"), 5, "String");
  CHECK_FALSE(CheckWatermarked(kSample, shadowing, "java").keyword_ok);

  CHECK_FALSE(AstCheck("int f( { return 1 }", "java"));
  CHECK(Java().Parse("int f( { return 1 }").HasErrors());
}

TEST_CASE("unknown languages are rejected") {
  CHECK_FALSE(LanguageRegistry::Default().Has("cobol"));
  try {
    ParseFunction("x", "cobol");
    FAIL("expected UnsupportedLanguage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedLanguage);
  }
}

TEST_CASE("synthetic corpus parses cleanly and is reproducible") {
  const auto a = synth::GenerateJavaCorpus(200, 9);
  const auto b = synth::GenerateJavaCorpus(200, 9);
  REQUIRE(a.size() == 200);
  int with_vars = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].code == b[i].code);
    const FunctionUnit fn = Java().Parse(a[i].code, a[i].id);
    CHECK_FALSE(fn.HasErrors());
    with_vars += ListVariables(fn).empty() ? 0 : 1;
  }
  CHECK(with_vars == 200);
}

TEST_CASE("corpus files round-trip and report schema errors") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "varmark_unit_corpus.jsonl";
  const auto entries = synth::GenerateJavaCorpus(5, 1);
  WriteCorpus(path, entries);
  const auto back = ReadCorpus(path);
  REQUIRE(back.size() == entries.size());
  CHECK(back[3].code == entries[3].code);
  CHECK(back[3].id == entries[3].id);
  {
    std::ofstream out(path);
    out << "{\"id\": 3}\n";
  }
  try {
    ReadCorpus(path);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchemaError);
  }
  std::filesystem::remove(path);
}
