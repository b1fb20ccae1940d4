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
#include <string>
#include <vector>

namespace varmark::lang {

struct CorpusEntry {
  std::string id;
  std::string code;
  std::string language = "java";
};

// JSON lines, one {"id", "code", "language"} object per line.
std::vector<CorpusEntry> ReadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::filesystem::path& path, const std::vector<CorpusEntry>& entries);

}  // namespace varmark::lang
