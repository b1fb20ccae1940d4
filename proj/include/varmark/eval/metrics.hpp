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

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace varmark::eval {

// Fraction of equal positions. Throws LengthMismatch on unequal or empty input.
double BitAccuracy(const std::vector<int>& truth, const std::vector<int>& got);

double BitsPerToken(long bits, long tokens);

// Character-trigram cosine over "#name#" blended 50/50 with the Jaccard index
// of the subtoken sets. A stand-in for a learned similarity model.
double VarSimProxy(std::string_view a, std::string_view b);

// Lowercased code tokens, comments dropped, identifiers kept whole.
std::vector<std::string> EntropyTokens(std::string_view code);

// Token trigram model with add-one smoothing.
class TrigramModel {
 public:
  void Train(const std::vector<std::vector<std::string>>& sequences);
  bool trained() const { return !vocab_.empty(); }
  std::size_t vocab_size() const { return vocab_.size() + 1; }

  // Mean -log2 P(t_i | t_{i-2}, t_{i-1}) with two start symbols of padding.
  // Throws UntrainedModel.
  double Entropy(const std::vector<std::string>& tokens) const;
  double Entropy(std::string_view code) const { return Entropy(EntropyTokens(code)); }

 private:
  std::string Canon(const std::string& token) const;

  std::map<std::string, long> vocab_;
  std::map<std::tuple<std::string, std::string, std::string>, long> trigram_;
  std::map<std::pair<std::string, std::string>, long> context_;
};

}  // namespace varmark::eval
