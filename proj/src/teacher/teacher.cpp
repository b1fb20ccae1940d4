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

#include "varmark/teacher/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "varmark/common/error.hpp"
#include "varmark/graph/context_graph.hpp"
#include "varmark/lang/subtokens.hpp"

namespace varmark::teacher {

using graph::Vocabulary;

nn::Matrix SoftLabel::Dense(std::size_t t, int vocab_size) const {
  nn::Matrix row = nn::Matrix::Zero(1, vocab_size);
  for (const auto& [id, p] : positions.at(t)) row(0, id) += p;
  return row;
}

std::vector<std::pair<int, double>> TopK(const nn::Vector& dist, int k) {
  std::vector<int> ids(static_cast<std::size_t>(dist.size()));
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return dist(a) > dist(b); });
  std::vector<std::pair<int, double>> out;
  double total = 0.0;
  for (int id : ids) {
    if (static_cast<int>(out.size()) >= k || !(dist(id) > 0.0)) break;
    out.emplace_back(id, dist(id));
    total += dist(id);
  }
  for (auto& [id, p] : out) p /= total;
  return out;
}

namespace {

std::string TokenOrBoundary(const std::vector<const lang::Token*>& code, std::ptrdiff_t i) {
  if (i < 0) return "<s>";
  if (i >= static_cast<std::ptrdiff_t>(code.size())) return "</s>";
  return code[static_cast<std::size_t>(i)]->text;
}

std::vector<const lang::Token*> CodeTokens(const lang::FunctionUnit& fn) {
  std::vector<const lang::Token*> out;
  for (const lang::Token& t : fn.tokens()) {
    if (t.kind != lang::TokenKind::kComment) out.push_back(&t);
  }
  return out;
}

}  // namespace

CorpusTeacher CorpusTeacher::Train(const std::vector<lang::FunctionUnit>& corpus,
                                   const Vocabulary& vocab, TeacherOptions options) {
  if (corpus.empty()) Fail(ErrorCode::kEmptyCorpus, "teacher corpus is empty");
  CorpusTeacher t(vocab, options);
  for (const lang::FunctionUnit& fn : corpus) {
    const auto code = CodeTokens(fn);
    for (const lang::VariableBinding& b : lang::ListVariables(fn)) {
      const std::vector<std::string> subs = lang::Subtokenize(b.name);
      if (subs.empty()) continue;
      const int first = vocab.Id(subs.front());
      if (first >= Vocabulary::kNumSpecials) {
        for (lang::NodeId occ : b.occurrences) {
          const auto idx = static_cast<std::ptrdiff_t>(fn.CodeTokenIndexAt(fn.tree().node(occ).span.begin));
          if (idx >= static_cast<std::ptrdiff_t>(kTeacherTokenLimit)) continue;
          t.left_counts_[TokenOrBoundary(code, idx - 1)][first] += 1.0;
          t.right_counts_[TokenOrBoundary(code, idx + 1)][first] += 1.0;
        }
      }
      std::vector<int> seq;
      for (const std::string& s : subs) {
        if (static_cast<int>(seq.size()) >= options.max_name_len) break;
        seq.push_back(vocab.Id(s));
      }
      seq.push_back(Vocabulary::kEnd);
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i] < Vocabulary::kNumSpecials || seq[i + 1] == Vocabulary::kUnk) continue;
        t.bigram_counts_[seq[i]][seq[i + 1]] += 1.0;
      }
    }
  }
  return t;
}

nn::Vector CorpusTeacher::FirstSubtokenDistribution(std::string_view left,
                                                    std::string_view right) const {
  const int v = vocab_.size();
  const double candidates = static_cast<double>(v - Vocabulary::kNumSpecials);
  nn::Vector out = nn::Vector::Zero(v);
  if (candidates <= 0) return out;
  for (const auto* table : {&left_counts_, &right_counts_}) {
    const auto& key = table == &left_counts_ ? left : right;
    const auto it = table->find(key);
    double n = 0.0;
    if (it != table->end()) {
      for (const auto& [id, c] : it->second) n += c;
    }
    for (int id = Vocabulary::kNumSpecials; id < v; ++id) {
      double c = 0.0;
      if (it != table->end()) {
        const auto f = it->second.find(id);
        if (f != it->second.end()) c = f->second;
      }
      out(id) += 0.5 * (c + 1.0) / (n + candidates);
    }
  }
  return out;
}

nn::Vector CorpusTeacher::BigramDistribution(int prev) const {
  const int v = vocab_.size();
  const double candidates = static_cast<double>(v - Vocabulary::kNumSpecials + 1);
  nn::Vector out = nn::Vector::Zero(v);
  const auto it = bigram_counts_.find(prev);
  double n = 0.0;
  if (it != bigram_counts_.end()) {
    for (const auto& [id, c] : it->second) n += c;
  }
  auto count = [&](int id) {
    if (it == bigram_counts_.end()) return 0.0;
    const auto f = it->second.find(id);
    return f == it->second.end() ? 0.0 : f->second;
  };
  for (int id = Vocabulary::kNumSpecials; id < v; ++id) out(id) = (count(id) + 1.0) / (n + candidates);
  out(Vocabulary::kEnd) = (count(Vocabulary::kEnd) + 1.0) / (n + candidates);
  return out;
}

SoftLabel CorpusTeacher::Labels(const lang::FunctionUnit& fn, const lang::VariableBinding& b,
                                int k) const {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "top-k must be positive");
  if (vocab_.size() <= Vocabulary::kNumSpecials) {
    Fail(ErrorCode::kTeacherUnavailable, "teacher vocabulary is empty");
  }
  const lang::Language& lang = lang::LanguageRegistry::Default().Get(fn.language());
  const auto code = CodeTokens(fn);
  // Per statement, the mean distribution of its occurrences.
  std::vector<lang::NodeId> order;
  std::map<lang::NodeId, std::pair<nn::Vector, int>> per_statement;
  for (lang::NodeId occ : b.occurrences) {
    const auto idx = static_cast<std::ptrdiff_t>(fn.CodeTokenIndexAt(fn.tree().node(occ).span.begin));
    if (idx >= static_cast<std::ptrdiff_t>(kTeacherTokenLimit)) continue;
    const lang::NodeId stmt = graph::EnclosingStatement(fn, occ, lang);
    if (stmt == lang::kNoNode) continue;
    const nn::Vector d = FirstSubtokenDistribution(TokenOrBoundary(code, idx - 1),
                                                   TokenOrBoundary(code, idx + 1));
    auto it = per_statement.find(stmt);
    if (it == per_statement.end()) {
      order.push_back(stmt);
      per_statement.emplace(stmt, std::make_pair(d, 1));
    } else {
      it->second.first += d;
      it->second.second += 1;
    }
  }
  if (order.empty()) {
    Fail(ErrorCode::kNoStatementContext,
         "variable '" + b.name + "' has no statement within the first " +
             std::to_string(kTeacherTokenLimit) + " tokens");
  }
  nn::Vector mean = nn::Vector::Zero(vocab_.size());
  for (lang::NodeId s : order) {
    const auto& [sum, n] = per_statement.at(s);
    mean += sum / static_cast<double>(n);
  }
  mean /= static_cast<double>(order.size());

  SoftLabel label;
  label.k = k;
  label.positions.push_back(TopK(mean, k));
  for (int t = 1; t < options_.max_name_len; ++t) {
    const int prev = label.positions.back().front().first;
    if (prev == Vocabulary::kEnd) break;
    label.positions.push_back(TopK(BigramDistribution(prev), k));
    if (label.positions.back().front().first == Vocabulary::kEnd) break;
  }
  return label;
}

ExportedLabels ExportedLabels::Load(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open label file: " + path.string());
  ExportedLabels store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      const std::string fn_id = j.at("fn_id").get<std::string>();
      const int ordinal = j.at("var_ordinal").get<int>();
      SoftLabel label;
      for (const auto& pos : j.at("positions")) {
        double sum = 0.0;
        std::vector<std::pair<int, double>> kept;
        for (const auto& entry : pos) {
          const std::string tok = entry.at(0).get<std::string>();
          const double p = entry.at(1).get<double>();
          if (!(p >= 0.0) || !std::isfinite(p)) Fail(ErrorCode::kSchemaError, where + "negative probability");
          sum += p;
          const int id = vocab.Id(tok);
          if ((id >= Vocabulary::kNumSpecials || (id == Vocabulary::kEnd && vocab.Contains(tok))) && p > 0.0) {
            kept.emplace_back(id, p);
          }
        }
        if (std::abs(sum - 1.0) > 1e-4) {
          Fail(ErrorCode::kSchemaError, where + "probabilities sum to " + std::to_string(sum));
        }
        if (kept.empty()) break;
        double total = 0.0;
        for (const auto& [id, p] : kept) total += p;
        for (auto& [id, p] : kept) p /= total;
        std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
          return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        label.positions.push_back(std::move(kept));
      }
      if (!store.labels_.emplace(std::make_pair(fn_id, ordinal), std::move(label)).second) {
        Fail(ErrorCode::kSchemaError, where + "duplicate key (" + fn_id + ", " + std::to_string(ordinal) + ")");
      }
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kSchemaError, where + e.what());
    }
  }
  return store;
}

std::optional<SoftLabel> ExportedLabels::Find(const std::string& fn_id, int ordinal, int k) const {
  const auto it = labels_.find({fn_id, ordinal});
  if (it == labels_.end() || it->second.positions.empty()) return std::nullopt;
  SoftLabel out;
  out.k = k;
  for (const auto& pos : it->second.positions) {
    std::vector<std::pair<int, double>> top(pos.begin(), pos.begin() + std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(pos.size())));
    double total = 0.0;
    for (const auto& [id, p] : top) total += p;
    for (auto& [id, p] : top) p /= total;
    out.positions.push_back(std::move(top));
  }
  return out;
}

SoftLabel LabelSource::Labels(const lang::FunctionUnit& fn, const lang::VariableBinding& b,
                              int k) const {
  if (exported_ != nullptr) {
    if (auto found = exported_->Find(fn.id(), b.ordinal, k)) return *found;
  }
  if (corpus_ == nullptr) {
    Fail(ErrorCode::kTeacherUnavailable, "no soft labels for " + fn.id() + "#" + std::to_string(b.ordinal));
  }
  return corpus_->Labels(fn, b, k);
}

}  // namespace varmark::teacher
