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

#include <cmath>

#include "varmark/common/error.hpp"
#include "varmark/eval/metrics.hpp"

using namespace varmark;

TEST_CASE("bit accuracy counts matching positions") {
  CHECK(eval::BitAccuracy({1, 0, 1, 1}, {1, 0, 1, 1}) == 1.0);
  CHECK(eval::BitAccuracy({1, 0, 1, 1}, {0, 1, 0, 0}) == 0.0);
  CHECK(eval::BitAccuracy({1, 0, 1, 1}, {1, 1, 1, 0}) == 0.5);
  try {
    eval::BitAccuracy({1, 0}, {1});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
  }
}

TEST_CASE("bits per token divides embedded bits by tokens") {
  CHECK(eval::BitsPerToken(4, 100) == 0.04);
  CHECK(eval::BitsPerToken(2 * 3, 73) == 6.0 / 73.0);
  CHECK_THROWS_AS(eval::BitsPerToken(4, 0), Error);
}

TEST_CASE("variable similarity proxy orders names sensibly") {
  CHECK(eval::VarSimProxy("count", "count") == doctest::Approx(1.0));
  CHECK(eval::VarSimProxy("abc", "xyz") == 0.0);
  CHECK(eval::VarSimProxy("doc", "document") > eval::VarSimProxy("batch", "token"));
  // Same subtokens: the Jaccard half is full, the trigram half is not.
  CHECK(eval::VarSimProxy("userName", "user_name") > 0.5);
  CHECK(eval::VarSimProxy("userName", "user_name") < 1.0);
  // Hand value: #ab# and #abc# share one of 2 and 3 trigrams, no subtokens.
  const double cosine = 1.0 / std::sqrt(2.0 * 3.0);
  CHECK(eval::VarSimProxy("ab", "abc") == doctest::Approx(0.5 * cosine));
  for (const char* a : {"i", "idx", "maxValue", "tmp_1"}) {
    for (const char* b : {"j", "index", "max", "value"}) {
      const double s = eval::VarSimProxy(a, b);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(s == doctest::Approx(eval::VarSimProxy(b, a)));
    }
  }
}

TEST_CASE("entropy tokens are lowercased and skip comments") {
  const auto t = eval::EntropyTokens("int Foo = 1; // note\n");
  CHECK(t == std::vector<std::string>{"int", "foo", "=", "1", ";"});
}

TEST_CASE("trigram entropy follows add-one smoothing") {
  eval::TrigramModel lm;
  CHECK_THROWS_AS(lm.Entropy(std::vector<std::string>{"a"}), Error);
  lm.Train({{"a", "b"}});
  // Vocabulary {a, b, <unk>}: each step is (1 + 1) / (1 + 3).
  CHECK(lm.Entropy(std::vector<std::string>{"a", "b"}) == doctest::Approx(1.0));
  // Unseen tokens: the start context has one count (1/4), later contexts
  // are unseen (1/3 each).
  CHECK(lm.Entropy(std::vector<std::string>{"q", "r", "s"}) == doctest::Approx((2.0 + 2.0 * std::log2(3.0)) / 3.0));
  CHECK(lm.Entropy(std::vector<std::string>{"r", "q", "s", "q", "r", "s", "t"}) ==
        doctest::Approx((2.0 + 6.0 * std::log2(3.0)) / 7.0));

  eval::TrigramModel seen;
  std::vector<std::vector<std::string>> copies(2000, {"x", "y", "z", "w"});
  seen.Train(copies);
  CHECK(seen.Entropy(std::vector<std::string>{"x", "y", "z", "w"}) < 0.01);

  eval::TrigramModel code;
  code.Train({eval::EntropyTokens("int a = 1; return a;"), eval::EntropyTokens("int b = 2; return b;")});
  CHECK(code.Entropy("int a = 1; return a;") < code.Entropy("return return = ; int a;"));
}
