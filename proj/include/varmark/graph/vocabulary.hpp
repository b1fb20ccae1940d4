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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace varmark::graph {

// Token <-> id table. Ids 0..kNumSpecials-1 are reserved for the special
// symbols below and exist in every vocabulary.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kMask = 1;
  static constexpr int kBos = 2;
  static constexpr int kEnd = 3;
  static constexpr int kNumSpecials = 4;

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& tokens);

  // Most frequent tokens first (ties broken lexicographically), keeping those
  // seen at least `min_count` times, up to `max_size` entries in total.
  static Vocabulary FromCounts(const std::map<std::string, std::size_t>& counts,
                               std::size_t min_count, std::size_t max_size);

  int Add(std::string_view token);
  // kUnk when absent.
  int Id(std::string_view token) const;
  bool Contains(std::string_view token) const;
  const std::string& Token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  // FNV-1a over the token list; identifies a vocabulary in checkpoints.
  std::uint64_t Hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace varmark::graph
