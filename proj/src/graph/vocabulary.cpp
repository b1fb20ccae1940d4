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

#include "varmark/graph/vocabulary.hpp"

#include <algorithm>

namespace varmark::graph {

Vocabulary::Vocabulary() {
  for (const char* s : {"<unk>", "<mask>", "<bos>", "<end>"}) Add(s);
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) : Vocabulary() {
  for (const std::string& t : tokens) Add(t);
}

Vocabulary Vocabulary::FromCounts(const std::map<std::string, std::size_t>& counts,
                                  std::size_t min_count, std::size_t max_size) {
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& [token, n] : items) {
    if (n < min_count || static_cast<std::size_t>(vocab.size()) >= max_size) break;
    vocab.Add(token);
  }
  return vocab;
}

int Vocabulary::Add(std::string_view token) {
  const auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

int Vocabulary::Id(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::uint64_t Vocabulary::Hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const std::string& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace varmark::graph
