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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varmark/graph/vocabulary.hpp"
#include "varmark/lang/function_unit.hpp"
#include "varmark/lang/variables.hpp"
#include "varmark/nn/matrix.hpp"

namespace varmark::teacher {

// Per decoding position, (token id, probability) pairs sorted by decreasing
// probability. Each position sums to one.
struct SoftLabel {
  std::vector<std::vector<std::pair<int, double>>> positions;
  int k = 0;

  // Dense 1 x vocab_size row for position t.
  nn::Matrix Dense(std::size_t t, int vocab_size) const;
};

// Keeps the k largest entries (ties to the smaller id) and rescales them to
// sum to one.
std::vector<std::pair<int, double>> TopK(const nn::Vector& dist, int k);

// Only occurrences within this many leading code tokens are labelled.
inline constexpr std::size_t kTeacherTokenLimit = 510;

struct TeacherOptions {
  int max_name_len = 5;
};

// Context-conditioned subtoken model trained on a corpus. Position 0 comes
// from add-one smoothed counts of first subtokens given the code token to
// the left and to the right of an occurrence; later positions come from an
// add-one smoothed subtoken bigram model over variable names.
class CorpusTeacher {
 public:
  // Throws EmptyCorpus.
  static CorpusTeacher Train(const std::vector<lang::FunctionUnit>& corpus,
                             const graph::Vocabulary& vocab, TeacherOptions options = {});

  // Smoothed P(first subtoken | neighbouring tokens) over the vocabulary;
  // specials other than END have zero mass and END is excluded too.
  nn::Vector FirstSubtokenDistribution(std::string_view left, std::string_view right) const;
  // Smoothed P(next | prev) over non-special subtokens plus END.
  nn::Vector BigramDistribution(int prev) const;
  double BigramProb(int prev, int next) const { return BigramDistribution(prev)(next); }

  // Throws NoStatementContext when no occurrence lies within the token limit.
  SoftLabel Labels(const lang::FunctionUnit& fn, const lang::VariableBinding& b, int k) const;

  const graph::Vocabulary& vocab() const { return vocab_; }

 private:
  CorpusTeacher(graph::Vocabulary vocab, TeacherOptions options)
      : vocab_(std::move(vocab)), options_(options) {}

  graph::Vocabulary vocab_;
  TeacherOptions options_;
  std::map<std::string, std::map<int, double>, std::less<>> left_counts_;
  std::map<std::string, std::map<int, double>, std::less<>> right_counts_;
  std::map<int, std::map<int, double>> bigram_counts_;
};

// Labels exported from an external masked language model.
class ExportedLabels {
 public:
  // JSON lines {"fn_id", "var_ordinal", "positions": [[[token, prob]...]...]}.
  // Throws SchemaError on malformed rows, duplicate keys, or positions whose
  // probabilities do not sum to 1 within 1e-4. Out-of-vocabulary tokens are
  // dropped and the rest renormalized.
  static ExportedLabels Load(const std::filesystem::path& path, const graph::Vocabulary& vocab);

  std::optional<SoftLabel> Find(const std::string& fn_id, int ordinal, int k) const;
  std::size_t size() const { return labels_.size(); }

 private:
  std::map<std::pair<std::string, int>, SoftLabel> labels_;
};

// Exported labels first, corpus teacher for everything else.
class LabelSource {
 public:
  LabelSource(const CorpusTeacher* corpus, const ExportedLabels* exported)
      : corpus_(corpus), exported_(exported) {}
  // Throws TeacherUnavailable when neither source can label the variable.
  SoftLabel Labels(const lang::FunctionUnit& fn, const lang::VariableBinding& b, int k) const;

 private:
  const CorpusTeacher* corpus_;
  const ExportedLabels* exported_;
};

}  // namespace varmark::teacher
