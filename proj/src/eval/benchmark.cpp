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

#include "varmark/eval/benchmark.hpp"

#include <chrono>
#include <cstdio>
#include <json.hpp>

#include "varmark/common/error.hpp"
#include "varmark/common/parallel.hpp"
#include "varmark/common/rng.hpp"
#include "varmark/lang/variables.hpp"
#include "varmark/wm/pipeline.hpp"

namespace varmark::eval {

namespace {

using Clock = std::chrono::steady_clock;

struct Tally {
  long matched = 0;
  long total = 0;
  bool changed = false;
  bool failed = false;
};

struct SampleResult {
  bool embedded = false;
  std::string failure;
  long bits = 0;
  long tokens = 0;
  double bpt = 0.0;
  bool bpt_ok = true;
  bool ast_ok = false;
  bool keyword_ok = false;
  double entropy_original = 0.0;
  double entropy_watermarked = 0.0;
  double sim_sum = 0.0;
  int renamed = 0;
  std::vector<Tally> attacks;
  double embed_seconds = 0.0;
  double extract_seconds = 0.0;
};

Tally Score(const std::vector<int>& truth, const std::vector<int>* got) {
  Tally t;
  t.total = static_cast<long>(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int g = got != nullptr && i < got->size() ? (*got)[i] : 0;
    t.matched += g == truth[i] ? 1 : 0;
  }
  return t;
}

// Embeds the largest random message the function can carry, starting from one
// chunk per variable.
wm::EmbedResult EmbedRandom(const lang::FunctionUnit& fn, const nn::ModelBundle& m, Rng& rng,
                            wm::Message& msg) {
  const int bits_per_var = m.config().bits_per_var;
  const auto vars = lang::ListVariables(fn);
  if (vars.empty()) Fail(ErrorCode::kNoVariables, "function has no variables");
  std::vector<int> bits;
  for (std::size_t b = 0; b < vars.size() * static_cast<std::size_t>(bits_per_var); ++b) {
    bits.push_back(static_cast<int>(rng.Index(2)));
  }
  for (std::size_t chunks = vars.size();; --chunks) {
    msg.bits.assign(bits.begin(), bits.begin() + static_cast<long>(chunks) * bits_per_var);
    try {
      return wm::Embed(fn.source(), msg, m);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCapacityExceeded || chunks == 1) throw;
    }
  }
}

SampleResult RunSample(const lang::FunctionUnit& fn, const nn::ModelBundle& m, const TrigramModel& lm,
                       const BenchOptions& options, std::size_t index) {
  SampleResult r;
  Rng rng(DeriveSeed(options.seed, {index}));
  wm::Message msg;
  wm::EmbedResult e;
  const auto t0 = Clock::now();
  try {
    e = EmbedRandom(fn, m, rng, msg);
  } catch (const Error& err) {
    r.failure = std::string(ErrorCodeName(err.code()));
    return r;
  }
  r.embed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  r.embedded = true;
  const wm::EmbedReport& rep = e.report;
  r.bits = rep.bits_embedded;
  r.tokens = static_cast<long>(rep.tokens);
  r.bpt = rep.bits_per_token();
  const long expect_bits = static_cast<long>(m.config().bits_per_var) * rep.vars_used;
  r.bpt_ok = rep.bits_embedded == expect_bits && rep.tokens == fn.CodeTokenCount() &&
             r.bpt == BitsPerToken(expect_bits, static_cast<long>(fn.CodeTokenCount()));
  r.ast_ok = rep.checks.ast_ok;
  r.keyword_ok = rep.checks.keyword_ok;
  r.entropy_original = lm.Entropy(fn.source());
  r.entropy_watermarked = lm.Entropy(e.source);
  for (const auto& v : rep.variables) {
    if (v.skipped) continue;
    r.sim_sum += VarSimProxy(v.original, v.renamed);
    ++r.renamed;
  }
  for (std::size_t a = 0; a < options.attacks.size(); ++a) {
    attacks::AttackSpec spec = options.attacks[a];
    spec.seed = DeriveSeed(options.seed, {index, a + 1});
    const std::string attacked = attacks::ApplyAttack(e.source, spec);
    Tally t;
    const auto t1 = Clock::now();
    try {
      const wm::ExtractResult x = wm::Extract(attacked, m, rep.framing);
      if (spec.type == attacks::AttackType::kNone) {
        r.extract_seconds = std::chrono::duration<double>(Clock::now() - t1).count();
      }
      t = Score(msg.bits, &x.message.bits);
    } catch (const Error&) {
      t = Score(msg.bits, nullptr);
      t.failed = true;
    }
    t.changed = attacked != e.source;
    r.attacks.push_back(t);
  }
  return r;
}

double Ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

std::vector<attacks::AttackSpec> DefaultAttacks() {
  using attacks::AttackSpec;
  using attacks::AttackType;
  std::vector<AttackSpec> out = {AttackSpec{AttackType::kNone}, AttackSpec{AttackType::kTypeI},
                                 AttackSpec{AttackType::kTypeII}};
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    AttackSpec s{AttackType::kTypeIII};
    s.rename_fraction = p;
    out.push_back(s);
  }
  return out;
}

BenchReport RunBenchmark(const std::vector<lang::FunctionUnit>& corpus, const nn::ModelBundle& m,
                         const std::vector<lang::FunctionUnit>& reference, const BenchOptions& options) {
  TrigramModel lm;
  std::vector<std::vector<std::string>> sequences;
  for (const auto& fn : reference) sequences.push_back(EntropyTokens(fn.source()));
  lm.Train(sequences);

  std::size_t n = corpus.size();
  if (options.limit > 0) n = std::min(n, static_cast<std::size_t>(options.limit));
  std::vector<SampleResult> results(n);
  ParallelFor(n, options.jobs, [&](std::size_t i) { results[i] = RunSample(corpus[i], m, lm, options, i); });

  BenchReport rep;
  rep.seed = options.seed;
  rep.bits_per_var = m.config().bits_per_var;
  rep.functions = static_cast<int>(n);
  std::vector<AttackRow> rows(options.attacks.size());
  std::vector<long> matched(options.attacks.size(), 0);
  for (std::size_t a = 0; a < rows.size(); ++a) rows[a].name = options.attacks[a].Name();
  long bits = 0, tokens = 0, renamed = 0, ast = 0, keyword = 0;
  double bpt_sum = 0, h0 = 0, h1 = 0, sim = 0, t_embed = 0, t_extract = 0;
  for (const SampleResult& r : results) {
    if (!r.embedded) {
      ++rep.embed_failures[r.failure];
      continue;
    }
    ++rep.embedded;
    bits += r.bits;
    tokens += r.tokens;
    bpt_sum += r.bpt;
    rep.bpt_mismatches += r.bpt_ok ? 0 : 1;
    ast += r.ast_ok ? 1 : 0;
    keyword += r.keyword_ok ? 1 : 0;
    h0 += r.entropy_original;
    h1 += r.entropy_watermarked;
    sim += r.sim_sum;
    renamed += r.renamed;
    t_embed += r.embed_seconds;
    t_extract += r.extract_seconds;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const Tally& t = r.attacks[a];
      matched[a] += t.matched;
      rows[a].bits += t.total;
      rows[a].changed += t.changed ? 1 : 0;
      rows[a].extract_failures += t.failed ? 1 : 0;
    }
  }
  const double k = rep.embedded;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    rows[a].bit_acc = Ratio(static_cast<double>(matched[a]), static_cast<double>(rows[a].bits));
    if (options.attacks[a].type == attacks::AttackType::kNone) {
      rep.bit_acc = rows[a].bit_acc;
      rep.bits = rows[a].bits;
    }
  }
  rep.attacks = std::move(rows);
  rep.bpt = BitsPerToken(bits, tokens);
  rep.bpt_function_mean = Ratio(bpt_sum, k);
  rep.ast_pass_rate = Ratio(static_cast<double>(ast), k);
  rep.keyword_pass_rate = Ratio(static_cast<double>(keyword), k);
  rep.entropy_original = Ratio(h0, k);
  rep.entropy_watermarked = Ratio(h1, k);
  rep.var_sim_proxy = Ratio(sim, static_cast<double>(renamed));
  rep.mean_embed_seconds = Ratio(t_embed, k);
  rep.mean_extract_seconds = Ratio(t_extract, k);
  return rep;
}

namespace {

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string BenchReport::ToJson(int indent) const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["bits_per_var"] = bits_per_var;
  j["functions"] = functions;
  j["embedded"] = embedded;
  j["embed_failures"] = embed_failures;
  j["bit_acc"] = bit_acc;
  j["bits"] = bits;
  j["bpt"] = bpt;
  j["bpt_function_mean"] = bpt_function_mean;
  j["bpt_mismatches"] = bpt_mismatches;
  j["ast_pass_rate"] = ast_pass_rate;
  j["keyword_pass_rate"] = keyword_pass_rate;
  j["entropy_original"] = entropy_original;
  j["entropy_watermarked"] = entropy_watermarked;
  j["var_sim_proxy"] = var_sim_proxy;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : attacks) {
    nlohmann::ordered_json o;
    o["name"] = r.name;
    o["bit_acc"] = r.bit_acc;
    o["bits"] = r.bits;
    o["changed"] = r.changed;
    o["extract_failures"] = r.extract_failures;
    rows.push_back(o);
  }
  j["attacks"] = rows;
  return j.dump(indent) + "\n";
}

std::string BenchReport::TimingJson(int indent) const {
  nlohmann::ordered_json j;
  j["functions"] = embedded;
  j["mean_embed_seconds"] = mean_embed_seconds;
  j["mean_extract_seconds"] = mean_extract_seconds;
  return j.dump(indent) + "\n";
}

std::string BenchReport::ToCsv() const {
  std::string out = "condition,bit_acc,bits,changed,extract_failures\n";
  for (const auto& r : attacks) {
    out += r.name + "," + Fixed(r.bit_acc) + "," + std::to_string(r.bits) + "," + std::to_string(r.changed) + "," +
           std::to_string(r.extract_failures) + "\n";
  }
  return out;
}

}  // namespace varmark::eval
