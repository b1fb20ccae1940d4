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
#include <vector>

#include "varmark/attacks/attacks.hpp"
#include "varmark/eval/metrics.hpp"
#include "varmark/lang/function_unit.hpp"
#include "varmark/nn/model.hpp"

namespace varmark::eval {

struct AttackRow {
  std::string name;
  double bit_acc = 0.0;
  long bits = 0;
  // Functions whose attacked form differs from the watermarked one.
  int changed = 0;
  // Extraction errors; the missing bits are scored as zeros.
  int extract_failures = 0;
};

struct BenchReport {
  std::uint64_t seed = 0;
  int bits_per_var = 2;
  int functions = 0;
  int embedded = 0;
  // Embed failures by error code name.
  std::map<std::string, int> embed_failures;
  double bit_acc = 0.0;
  long bits = 0;
  // Total embedded bits over total tokens, and the mean of per-function BPT.
  double bpt = 0.0;
  double bpt_function_mean = 0.0;
  double ast_pass_rate = 0.0;
  double keyword_pass_rate = 0.0;
  double entropy_original = 0.0;
  double entropy_watermarked = 0.0;
  double var_sim_proxy = 0.0;
  // Functions whose EmbedReport disagrees with L * vars_used / tokens.
  int bpt_mismatches = 0;
  std::vector<AttackRow> attacks;

  // Wall-clock figures, kept out of ToJson so the report stays reproducible.
  double mean_embed_seconds = 0.0;
  double mean_extract_seconds = 0.0;

  std::string ToJson(int indent = 2) const;
  std::string TimingJson(int indent = 2) const;
  // One row per condition: name,bit_acc,bits,changed,extract_failures.
  std::string ToCsv() const;
};

// No attack, Type I, Type II and Type III at 25/50/75/100 %.
std::vector<attacks::AttackSpec> DefaultAttacks();

struct BenchOptions {
  std::vector<attacks::AttackSpec> attacks = DefaultAttacks();
  std::uint64_t seed = 1;
  int jobs = 1;
  // Caps the number of evaluated functions; 0 means all.
  int limit = 0;
};

// `reference` trains the trigram model (the non-watermarked training split).
BenchReport RunBenchmark(const std::vector<lang::FunctionUnit>& corpus, const nn::ModelBundle& m,
                         const std::vector<lang::FunctionUnit>& reference, const BenchOptions& options = {});

}  // namespace varmark::eval
