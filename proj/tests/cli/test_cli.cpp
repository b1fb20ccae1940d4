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

// Drives the varmark executable end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& Work() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "varmark_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int Run(const std::string& args) {
  const std::string cmd = std::string(VARMARK_CLI) + " " + args + " >" + (Work() / "stdout.txt").string() +
                          " 2>" + (Work() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string P(const char* name) { return (Work() / name).string(); }

}  // namespace

TEST_CASE("train, embed, extract, attack and eval run from the command line") {
  REQUIRE(Run("synth --count 40 --seed 5 --out " + P("train.jsonl")) == 0);
  REQUIRE(Run("synth --count 10 --seed 6 --out " + P("test.jsonl")) == 0);
  std::ofstream(P("tiny.cfg")) << "feature_dim = 16\nhead_dim = 16\ndecoder_embed = 16\ndecoder_hidden = 16\n"
                                  "classifier_hidden = 16\nepochs = 3\nwarmup_epochs = 1\n";
  const std::string train = "train --corpus " + P("train.jsonl") + " --valid " + P("test.jsonl") + " --config " +
                            P("tiny.cfg") + " --seed 4 --jobs 1 --model ";
  REQUIRE(Run(train + P("a.bin")) == 0);
  CHECK(fs::exists(P("a.bin")));
  REQUIRE(Run(train + P("b.bin")) == 0);
  CHECK(Slurp(P("a.bin.metrics.csv")) == Slurp(P("b.bin.metrics.csv")));
  CHECK(Slurp(P("a.bin")) == Slurp(P("b.bin")));

  std::ofstream(P("fn.java")) << "int total(int[] values) {\n  int sum = 0;\n  for (int i = 0; i < values.length; i++) {\n"
                                 "    sum += values[i];\n  }\n  return sum;\n}\n";
  REQUIRE(Run("embed " + P("fn.java") + " --model " + P("a.bin") + " --message 6 --out " + P("wm.java") +
              " --report " + P("wm.json")) == 0);
  const auto report = nlohmann::json::parse(Slurp(P("wm.json")));
  CHECK(report["bits_embedded"].get<int>() == 2 * report["vars_used"].get<int>());
  CHECK(report["checks"]["ast_ok"].get<bool>());
  REQUIRE(Run("extract " + P("wm.java") + " --model " + P("a.bin") + " --report " + P("wm.json")) == 0);
  const auto extracted = nlohmann::json::parse(Slurp(P("stdout.txt")));
  CHECK(extracted["message_bits"].get<std::string>().size() == 4);

  REQUIRE(Run("attack " + P("test.jsonl") + " --type III --rename-frac 1 --seed 2 --out " + P("renamed.jsonl")) == 0);
  CHECK(Slurp(P("renamed.jsonl")).find("var0") != std::string::npos);
  REQUIRE(Run("eval --model " + P("a.bin") + " --corpus " + P("test.jsonl") + " --reference " + P("train.jsonl") +
              " --out " + P("bench.json") + " --csv " + P("bench.csv")) == 0);
  const auto bench = nlohmann::json::parse(Slurp(P("bench.json")));
  CHECK(bench["attacks"].size() == 7);
  CHECK(Slurp(P("bench.csv")).rfind("condition,bit_acc,bits,changed,extract_failures\n", 0) == 0);
}

TEST_CASE("usage errors exit with status 2 and library errors with 1") {
  CHECK(Run("train --corpus " + P("missing.jsonl") + " --model " + P("x.bin")) == 2);
  const auto err = nlohmann::json::parse(Slurp(P("stderr.txt")));
  CHECK(err.contains("error"));
  CHECK(Run("embed") == 2);
  CHECK(Run("frobnicate") != 0);
  std::ofstream(P("novars.java")) << "int one() { return 1; }\n";
  REQUIRE(fs::exists(P("a.bin")));
  CHECK(Run("embed " + P("novars.java") + " --model " + P("a.bin") + " --message 6") == 1);
  CHECK(nlohmann::json::parse(Slurp(P("stderr.txt")))["error"] == "NoVariables");
}
