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

#include "varmark/eval/metrics.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "varmark/common/error.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/subtokens.hpp"

namespace varmark::eval {

namespace {

constexpr const char* kStart = "<s>";
constexpr const char* kUnk = "<unk>";

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::map<std::string, double> Trigrams(std::string_view name) {
  const std::string s = "#" + Lower(name) + "#";
  std::map<std::string, double> out;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) out[s.substr(i, 3)] += 1.0;
  return out;
}

}  // namespace

double BitAccuracy(const std::vector<int>& truth, const std::vector<int>& got) {
  if (truth.size() != got.size() || truth.empty()) {
    Fail(ErrorCode::kLengthMismatch, "bit strings of length " + std::to_string(truth.size()) +
                                         " and " + std::to_string(got.size()));
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) same += truth[i] == got[i] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(truth.size());
}

double BitsPerToken(long bits, long tokens) {
  if (tokens <= 0) Fail(ErrorCode::kInvalidArgument, "token count must be positive");
  return static_cast<double>(bits) / static_cast<double>(tokens);
}

double VarSimProxy(std::string_view a, std::string_view b) {
  const auto ta = Trigrams(a);
  const auto tb = Trigrams(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [g, c] : ta) {
    na += c * c;
    const auto it = tb.find(g);
    if (it != tb.end()) dot += c * it->second;
  }
  for (const auto& [g, c] : tb) nb += c * c;
  const double cosine = na > 0.0 && nb > 0.0 ? dot / std::sqrt(na * nb) : 0.0;

  const auto sa = lang::Subtokenize(a);
  const auto sb = lang::Subtokenize(b);
  const std::set<std::string> xa(sa.begin(), sa.end());
  const std::set<std::string> xb(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (const auto& s : xa) inter += xb.count(s);
  const std::size_t uni = xa.size() + xb.size() - inter;
  const double jaccard = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return 0.5 * cosine + 0.5 * jaccard;
}

std::vector<std::string> EntropyTokens(std::string_view code) {
  const auto& java = lang::LanguageRegistry::Default().Get("java");
  std::vector<std::string> out;
  for (const lang::Token& t : java.Tokenize(code)) {
    if (t.kind == lang::TokenKind::kComment) continue;
    out.push_back(Lower(t.text));
  }
  return out;
}

std::string TrigramModel::Canon(const std::string& token) const {
  return vocab_.count(token) != 0 ? token : std::string(kUnk);
}

void TrigramModel::Train(const std::vector<std::vector<std::string>>& sequences) {
  for (const auto& seq : sequences) {
    for (const auto& t : seq) ++vocab_[t];
  }
  for (const auto& seq : sequences) {
    std::string p2 = kStart, p1 = kStart;
    for (const auto& t : seq) {
      ++trigram_[{p2, p1, t}];
      ++context_[{p2, p1}];
      p2 = p1;
      p1 = t;
    }
  }
}

double TrigramModel::Entropy(const std::vector<std::string>& tokens) const {
  if (!trained()) Fail(ErrorCode::kUntrainedModel, "trigram model has no training data");
  if (tokens.empty()) return 0.0;
  const double v = static_cast<double>(vocab_size());
  double total = 0.0;
  std::string p2 = kStart, p1 = kStart;
  for (const auto& raw : tokens) {
    const std::string t = Canon(raw);
    const auto tri = trigram_.find({p2, p1, t});
    const auto ctx = context_.find({p2, p1});
    const double num = (tri == trigram_.end() ? 0.0 : static_cast<double>(tri->second)) + 1.0;
    const double den = (ctx == context_.end() ? 0.0 : static_cast<double>(ctx->second)) + v;
    total -= std::log2(num / den);
    p2 = p1;
    p1 = t;
  }
  return total / static_cast<double>(tokens.size());
}

}  // namespace varmark::eval
