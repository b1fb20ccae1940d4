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
#include "varmark/lang/language.hpp"
#include "varmark/synth/java_synth.hpp"
#include "varmark/train/trainer.hpp"
#include "varmark/wm/pipeline.hpp"

using namespace varmark;

namespace {

const lang::Language& Java() { return lang::LanguageRegistry::Default().Get("java"); }

bool Throws(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// An untrained model over a real vocabulary; its names are arbitrary but
// legal, which is all the plumbing tests need.
const nn::ModelBundle& UntrainedModel() {
  static const nn::ModelBundle m = [] {
    std::vector<lang::FunctionUnit> fns;
    for (const auto& e : synth::GenerateJavaCorpus(60, 9)) fns.push_back(Java().Parse(e.code, e.id));
    train::TrainConfig c;
    c.feature_dim = c.head_dim = c.decoder_embed = c.decoder_hidden = c.classifier_hidden = 16;
    return nn::ModelBundle(c.Model(), train::BuildSubtokenVocabulary(fns, 1, 5000),
                           train::BuildKindVocabulary(fns), 77);
  }();
  return m;
}

const char* kSample =
    "public int total(int[] values, int limit) {\n"
    "  int sum = 0;\n"
    "  for (int i = 0; i < values.length; i++) {\n"
    "    if (values[i] > limit) sum += values[i];\n"
    "  }\n"
    "  return sum;\n"
    "}\n";

}  // namespace

TEST_CASE("messages convert between hex and bit strings") {
  const auto m = wm::Message::FromHex("0x9c");
  CHECK(m.ToBitString() == "10011100");
  CHECK(m.ToHex() == "9c");
  CHECK(wm::Message::FromBitString("10011100").ToHex() == "9c");
  CHECK(wm::Message::FromHex("A5", 6).ToBitString() == "101001");
  CHECK(wm::Message::FromBitString("1").ToHex() == "8");
  for (const char* hex : {"0", "ff", "0123456789abcdef"}) CHECK(wm::Message::FromHex(hex).ToHex() == hex);
  CHECK(Throws(ErrorCode::kInvalidArgument, [] { wm::Message::FromHex("xyz"); }));
  CHECK(Throws(ErrorCode::kInvalidArgument, [] { wm::Message::FromHex(""); }));
  CHECK(Throws(ErrorCode::kInvalidArgument, [] { wm::Message::FromHex("f", 5); }));
  CHECK(Throws(ErrorCode::kInvalidArgument, [] { wm::Message::FromBitString("012"); }));
}

TEST_CASE("framing splits, pads and cycles chunks") {
  auto f = wm::FrameMessage(wm::Message::FromBitString("0111"), 2, 2);
  CHECK(f.chunks == std::vector<int>{1, 3});
  f = wm::FrameMessage(wm::Message::FromBitString("01"), 3, 2);
  CHECK(f.chunks == std::vector<int>{1, 1, 1});
  f = wm::FrameMessage(wm::Message::FromBitString("011"), 3, 2);
  CHECK(f.chunks == std::vector<int>{1, 2, 1});
  CHECK(f.framing.num_chunks() == 2);
  CHECK(f.framing.message_bits == 3);
  CHECK(Throws(ErrorCode::kCapacityExceeded, [] { wm::FrameMessage(wm::Message::FromBitString("011011"), 2, 2); }));
  CHECK(Throws(ErrorCode::kInvalidArgument, [] { wm::FrameMessage(wm::Message::FromBitString("01"), 0, 2); }));
  CHECK(wm::ChunkBits(2, 2) == std::vector<int>{1, 0});
  CHECK(wm::ChunkValue({1, 0, 1}, 2, 2) == 2);
}

TEST_CASE("majority vote weighs repetitions by confidence") {
  CHECK(wm::MajorityVote({{2, 0.6}, {2, 0.6}, {1, 0.9}}, 4) == 2);
  CHECK(wm::MajorityVote({{2, 0.3}, {2, 0.3}, {1, 0.9}}, 4) == 1);
  double share = 0.0;
  CHECK(wm::MajorityVote({{3, 1.0}}, 4, &share) == 3);
  CHECK(share == 1.0);
}

TEST_CASE("embedding renames only variables and keeps the accounting identity") {
  const nn::ModelBundle& m = UntrainedModel();
  const lang::FunctionUnit before = Java().Parse(kSample);
  const auto result = wm::Embed(kSample, wm::Message::FromHex("b"), m);
  const lang::FunctionUnit after = Java().Parse(result.source);
  const auto& r = result.report;
  CHECK(r.checks.ast_ok);
  CHECK(r.checks.keyword_ok);
  CHECK(after.tree().ShapeSignature() == before.tree().ShapeSignature());
  CHECK(r.bits_embedded == 2 * r.vars_used);
  CHECK(r.tokens == before.CodeTokenCount());
  CHECK(r.bits_per_token() == static_cast<double>(2 * r.vars_used) / static_cast<double>(before.CodeTokenCount()));

  const auto vars_before = lang::ListVariables(before);
  const auto vars_after = lang::ListVariables(after);
  REQUIRE(vars_after.size() == vars_before.size());
  REQUIRE(r.variables.size() == vars_before.size());
  for (std::size_t i = 0; i < vars_before.size(); ++i) {
    CHECK(vars_after[i].ordinal == vars_before[i].ordinal);
    CHECK(vars_after[i].name == r.variables[i].renamed);
    CHECK(r.variables[i].original == vars_before[i].name);
  }
  // Non-identifier tokens are untouched.
  const auto& tb = before.tokens();
  const auto& ta = after.tokens();
  REQUIRE(tb.size() == ta.size());
  for (std::size_t i = 0; i < tb.size(); ++i) {
    if (tb[i].kind != lang::TokenKind::kIdentifier) CHECK(tb[i].text == ta[i].text);
  }
  // Embedding is deterministic.
  CHECK(wm::Embed(kSample, wm::Message::FromHex("b"), m).source == result.source);
}

TEST_CASE("extraction votes with the classifier on every carrier variable") {
  const nn::ModelBundle& m = UntrainedModel();
  const auto embedded = wm::Embed(kSample, wm::Message::FromBitString("1101"), m);
  const wm::ExtractResult ex = wm::Extract(embedded.source, m, embedded.report.framing);
  const lang::FunctionUnit fn = Java().Parse(embedded.source);
  const auto vars = lang::ListVariables(fn);
  REQUIRE(ex.predicted.size() == vars.size());
  std::vector<std::vector<std::pair<int, double>>> votes(2);
  int slot = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const nn::Vector p = nn::ClassifyProbabilities(m, wm::VariableGraph(fn, vars[i], m));
    Eigen::Index best;
    const double conf = p.maxCoeff(&best);
    CHECK(ex.predicted[i] == best);
    CHECK(ex.confidence[i] == doctest::Approx(conf));
    const auto& sk = embedded.report.framing.skipped;
    if (std::find(sk.begin(), sk.end(), vars[i].ordinal) != sk.end()) continue;
    votes[static_cast<std::size_t>(slot++ % 2)].push_back({static_cast<int>(best), conf});
  }
  std::string expected;
  for (const auto& v : votes) {
    for (int bit : wm::ChunkBits(wm::MajorityVote(v, 4), 2)) expected += static_cast<char>('0' + bit);
  }
  CHECK(ex.message.ToBitString() == expected);
  CHECK(ex.chunk_confidence.size() == 2);
}

TEST_CASE("skipped ordinals carry no votes") {
  const nn::ModelBundle& m = UntrainedModel();
  wm::Framing all{2, 2, {}};
  const auto full = wm::Extract(kSample, m, all);
  const auto vars = lang::ListVariables(Java().Parse(kSample));
  REQUIRE(vars.size() >= 3);
  // Skip everything but one variable: the message is that variable's class.
  wm::Framing one{2, 2, {}};
  for (std::size_t i = 1; i < vars.size(); ++i) one.skipped.push_back(vars[i].ordinal);
  const auto single = wm::Extract(kSample, m, one);
  const auto bits = wm::ChunkBits(full.predicted[0], 2);
  CHECK(single.message.bits == bits);
  for (std::size_t i = 0; i < vars.size(); ++i) one.skipped.push_back(vars[0].ordinal);
  CHECK(Throws(ErrorCode::kCapacityExceeded, [&] { wm::Extract(kSample, m, one); }));
}

TEST_CASE("embed and extract reject unusable inputs") {
  const nn::ModelBundle& m = UntrainedModel();
  const char* none = "int f() { return 1; }";
  CHECK(Throws(ErrorCode::kNoVariables, [&] { wm::Embed(none, wm::Message::FromHex("1"), m); }));
  CHECK(Throws(ErrorCode::kNoVariables, [&] { wm::Extract(none, m, wm::Framing{2, 2, {}}); }));
  CHECK(Throws(ErrorCode::kCapacityExceeded, [&] { wm::Embed("int f(int a) { return a; }", wm::Message::FromHex("f"), m); }));
  CHECK(Throws(ErrorCode::kInvalidArgument, [&] { wm::Extract(kSample, m, wm::Framing{2, 3, {}}); }));
}
