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
#include <string>
#include <vector>

#include "varmark/lang/corpus.hpp"

namespace varmark::synth {

// Deterministic corpus of small Java methods built from templates with
// randomized names, loop styles and optional statements. Ids are
// "synth-<n>".
std::vector<lang::CorpusEntry> GenerateJavaCorpus(std::size_t count, std::uint64_t seed);

// The directory-creation method used as the running example in the docs.
std::string CreateDirExample();

}  // namespace varmark::synth
