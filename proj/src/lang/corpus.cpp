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

#include "varmark/lang/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "varmark/common/error.hpp"

namespace varmark::lang {

std::vector<CorpusEntry> ReadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open corpus: " + path.string());
  std::vector<CorpusEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kSchemaError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("code") || !j["code"].is_string()) {
      Fail(ErrorCode::kSchemaError,
           path.string() + ":" + std::to_string(line_no) + ": expected an object with \"code\"");
    }
    CorpusEntry entry;
    entry.code = j["code"].get<std::string>();
    entry.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                       : std::to_string(line_no);
    if (j.contains("language") && j["language"].is_string()) {
      entry.language = j["language"].get<std::string>();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

void WriteCorpus(const std::filesystem::path& path, const std::vector<CorpusEntry>& entries) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIoError, "cannot write corpus: " + path.string());
  for (const CorpusEntry& e : entries) {
    out << nlohmann::json{{"id", e.id}, {"code", e.code}, {"language", e.language}}.dump() << '\n';
  }
}

}  // namespace varmark::lang
