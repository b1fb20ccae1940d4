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

// Runs the end-to-end acceptance criteria and prints one PASS/FAIL line per
// criterion. Arguments select criteria by number; the default is all of them.
//
//   acceptance [--work DIR] [--jobs N] [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../support/gradcheck.hpp"
#include "../support/graph_oracle.hpp"
#include "varmark/common/error.hpp"
#include "varmark/common/parallel.hpp"
#include "varmark/eval/benchmark.hpp"
#include "varmark/graph/context_graph.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/variables.hpp"
#include "varmark/synth/java_synth.hpp"
#include "varmark/train/trainer.hpp"
#include "varmark/wm/pipeline.hpp"

using namespace varmark;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

const lang::Language& Java() { return lang::LanguageRegistry::Default().Get("java"); }

std::vector<lang::FunctionUnit> Synthetic(std::size_t n, std::uint64_t seed) {
  std::vector<lang::FunctionUnit> out;
  for (const auto& e : synth::GenerateJavaCorpus(n, seed)) out.push_back(Java().Parse(e.code, e.id));
  return out;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Row(const eval::BenchReport& r, const std::string& name) {
  for (const auto& a : r.attacks) {
    if (a.name == name) return a.bit_acc;
  }
  Fail(ErrorCode::kInvalidArgument, "no benchmark row " + name);
}

void Log(const std::string& line) {
  std::fprintf(stderr, "  .. %s\n", line.c_str());
  std::fflush(stderr);
}

// Shared desk-scale run for criteria 1-5 and 11: 2,000 synthetic functions
// split 1600/200/200, L = 2, dims 128.
class DeskRun {
 public:
  DeskRun(fs::path work, int jobs) : work_(std::move(work)), jobs_(jobs) {}

  const eval::BenchReport& report() {
    Ensure();
    return *report_;
  }
  const nn::ModelBundle& model() {
    Ensure();
    return *model_;
  }
  const std::vector<lang::FunctionUnit>& test() {
    Ensure();
    return test_;
  }
  double train_seconds() {
    Ensure();
    return train_seconds_;
  }
  double best_val() const { return best_val_; }

 private:
  void Ensure() {
    if (report_) return;
    const auto train = Synthetic(1600, 21);
    const auto valid = Synthetic(200, 22);
    test_ = Synthetic(200, 23);
    train::TrainConfig c;
    c.epochs = 30;
    c.warmup_epochs = 8;
    train::TrainOptions o;
    o.jobs = jobs_;
    o.on_epoch = [](const train::EpochMetrics& e) {
      Log(Fmt("desk epoch %d l_wa %.4f l_na %.4f val_bit_acc %.4f", e.epoch, e.l_wa, e.l_na, e.val_bit_acc));
    };
    const auto start = Clock::now();
    train::TrainResult r = train::Train(c, {train, valid, std::nullopt}, o);
    train_seconds_ = Seconds(start);
    for (const auto& e : r.log) {
      if (e.epoch == r.best_epoch) best_val_ = e.val_bit_acc;
    }
    r.model.Save(work_ / "desk.bin");
    model_ = nn::ModelBundle::Load(work_ / "desk.bin");
    eval::BenchOptions bo;
    bo.seed = 5;
    report_ = eval::RunBenchmark(test_, *model_, train, bo);
    std::ofstream(work_ / "desk_report.json") << report_->ToJson() << "\n";
    std::ofstream(work_ / "desk_timings.json") << report_->TimingJson() << "\n";
  }

  fs::path work_;
  int jobs_;
  std::optional<nn::ModelBundle> model_;
  std::optional<eval::BenchReport> report_;
  std::vector<lang::FunctionUnit> test_;
  double train_seconds_ = 0.0;
  double best_val_ = 0.0;
};

Outcome Criterion1(DeskRun& desk) {
  const double acc = Row(desk.report(), "none");
  const double hours = desk.train_seconds() / 3600.0;
  return {acc >= 0.75 && hours <= 2.0,
          Fmt("held-out BitAcc %.4f (>= 0.75), best val %.4f, training %.1f min on %d core(s) (<= 120)", acc,
              desk.best_val(), desk.train_seconds() / 60.0, DefaultJobs())};
}

Outcome Criterion2(DeskRun& desk) {
  const auto& r = desk.report();
  return {r.ast_pass_rate >= 0.98 && r.keyword_pass_rate >= 0.98 && r.embedded > 0,
          Fmt("ast %.4f, keyword %.4f over %d watermarked functions (>= 0.98)", r.ast_pass_rate,
              r.keyword_pass_rate, r.embedded)};
}

Outcome Criterion3(DeskRun& desk) {
  const double none = Row(desk.report(), "none");
  const double t1 = Row(desk.report(), "type1");
  return {std::abs(t1 - none) <= 0.02, Fmt("type I %.4f vs none %.4f, |diff| %.4f (<= 0.02)", t1, none, std::abs(t1 - none))};
}

Outcome Criterion4(DeskRun& desk) {
  const std::vector<double> acc = {Row(desk.report(), "type3@0.25"), Row(desk.report(), "type3@0.50"),
                                   Row(desk.report(), "type3@0.75"), Row(desk.report(), "type3@1.00")};
  bool mono = true;
  for (std::size_t i = 1; i < acc.size(); ++i) mono = mono && acc[i] <= acc[i - 1];
  return {mono && acc.back() >= 0.45 && acc.back() <= 0.55,
          Fmt("rename 25/50/75/100%%: %.4f %.4f %.4f %.4f (non-increasing, last in [0.45, 0.55])", acc[0], acc[1],
              acc[2], acc[3])};
}

// Recomputes every function's accounting from an independent token count.
Outcome Criterion5(DeskRun& desk) {
  const nn::ModelBundle& m = desk.model();
  const int L = m.config().bits_per_var;
  int checked = 0, mismatches = 0;
  long bits = 0, tokens = 0;
  Rng rng(99);
  for (const auto& fn : desk.test()) {
    const int vars = static_cast<int>(lang::ListVariables(fn).size());
    if (vars == 0) continue;
    std::vector<int> msg(static_cast<std::size_t>(L * std::max(1, vars / 2)));
    for (int& b : msg) b = rng.Bernoulli(0.5) ? 1 : 0;
    wm::EmbedResult e;
    try {
      e = wm::Embed(fn.source(), wm::Message{msg}, m);
    } catch (const Error&) {
      continue;
    }
    long count = 0;
    for (const auto& t : Java().Tokenize(fn.source())) count += t.kind != lang::TokenKind::kComment;
    int used = 0;
    for (const auto& v : e.report.variables) used += v.skipped ? 0 : 1;
    const double expected = static_cast<double>(L * used) / static_cast<double>(count);
    const bool ok = e.report.vars_used == used && e.report.bits_embedded == L * used &&
                    static_cast<long>(e.report.tokens) == count && e.report.bits_per_token() == expected;
    mismatches += ok ? 0 : 1;
    bits += L * used;
    tokens += count;
    ++checked;
  }
  const auto& r = desk.report();
  return {checked > 0 && mismatches == 0 && r.bpt_mismatches == 0,
          Fmt("%d functions re-counted, %d mismatches, benchmark mismatches %d; corpus BPT %.4f (recount %.4f)",
              checked, mismatches, r.bpt_mismatches, r.bpt, static_cast<double>(bits) / static_cast<double>(tokens))};
}

Outcome Criterion6(int jobs) {
  const auto train = Synthetic(400, 41);
  const auto valid = Synthetic(100, 42);
  const auto test = Synthetic(150, 43);
  const std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> acc, sim;
  for (double alpha : alphas) {
    double a_sum = 0.0, s_sum = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
      train::TrainConfig c;
      c.feature_dim = c.head_dim = c.decoder_embed = c.decoder_hidden = c.classifier_hidden = 32;
      c.learning_rate = 0.001;
      c.epochs = 26;
      c.warmup_epochs = 6;
      // Every alpha gets the same number of epochs; the last one is kept.
      c.keep_best = 0;
      c.alpha = alpha;
      c.seed = seed;
      train::TrainOptions o;
      o.jobs = jobs;
      const train::TrainResult r = train::Train(c, {train, valid, std::nullopt}, o);
      eval::BenchOptions bo;
      bo.attacks = {attacks::AttackSpec{}};
      bo.seed = 7;
      const eval::BenchReport rep = eval::RunBenchmark(test, r.model, train, bo);
      Log(Fmt("alpha %.1f seed %llu: BitAcc %.4f VarSim-proxy %.4f", alpha, static_cast<unsigned long long>(seed),
              rep.bit_acc, rep.var_sim_proxy));
      a_sum += rep.bit_acc;
      s_sum += rep.var_sim_proxy;
    }
    acc.push_back(a_sum / 3.0);
    sim.push_back(s_sum / 3.0);
  }
  bool ok = true;
  std::string detail = "alpha:BitAcc/VarSim-proxy";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail += Fmt(" %.1f:%.4f/%.4f", alphas[i], acc[i], sim[i]);
    if (i > 0) ok = ok && acc[i] >= acc[i - 1] && sim[i] <= sim[i - 1];
  }
  return {ok, detail + " (BitAcc non-decreasing, VarSim non-increasing)"};
}

Outcome Criterion7() {
  double worst = 0.0;
  std::string worst_name;
  int cases = 0;
  for (const auto& list : {gradcheck::OperationCases(), gradcheck::LayerCases()}) {
    for (const auto& c : list) {
      const double e = c.run();
      ++cases;
      if (e >= worst) worst = e, worst_name = c.name;
    }
  }
  const double st = gradcheck::StraightThroughEncoderGradNorm();
  return {worst < 1e-4 && st > 0.0, Fmt("%d cases, worst rel. error %.2e (%s) (< 1e-4); straight-through encoder "
                                        "gradient norm %.3e (> 0)",
                                        cases, worst, worst_name.c_str(), st)};
}

Outcome Criterion8() {
  int graphs = 0, bad = 0;
  for (const auto& src : oracle::OracleSnippets()) {
    const lang::FunctionUnit fn = Java().Parse(src);
    for (const auto& b : lang::ListVariables(fn)) {
      const auto c = oracle::Compare(graph::BuildContextGraph(fn, b, Java()), oracle::BuildReference(fn, b, Java()));
      bad += c.ok() ? 0 : 1;
      ++graphs;
    }
  }
  return {graphs > 0 && bad == 0 && oracle::OracleSnippets().size() == 5,
          Fmt("%zu snippets, %d variable graphs, %d differ from the reference", oracle::OracleSnippets().size(), graphs,
              bad)};
}

Outcome Criterion9(const fs::path& work, int jobs) {
  const auto train = Synthetic(120, 61);
  const auto valid = Synthetic(30, 62);
  const auto test = Synthetic(40, 63);
  train::TrainConfig c;
  c.feature_dim = c.head_dim = c.decoder_embed = c.decoder_hidden = c.classifier_hidden = 16;
  c.epochs = 4;
  c.warmup_epochs = 2;
  c.seed = 17;
  std::vector<std::string> csv, json;
  for (int run = 0; run < 2; ++run) {
    train::TrainOptions o;
    o.jobs = jobs;
    const train::TrainResult r = train::Train(c, {train, valid, std::nullopt}, o);
    const fs::path path = work / ("determinism_" + std::to_string(run) + ".bin");
    r.model.Save(path);
    eval::BenchOptions bo;
    bo.seed = 3;
    bo.jobs = jobs;
    csv.push_back(train::MetricsCsv(r.log));
    json.push_back(eval::RunBenchmark(test, nn::ModelBundle::Load(path), train, bo).ToJson());
  }
  return {csv[0] == csv[1] && json[0] == json[1],
          Fmt("metrics CSV %s (%zu bytes), BenchReport %s (%zu bytes)", csv[0] == csv[1] ? "identical" : "differs",
              csv[0].size(), json[0] == json[1] ? "identical" : "differs", json[0].size())};
}

Outcome Criterion10() {
  const auto corpus = Synthetic(1800, 71);
  const auto reference = Synthetic(200, 72);
  std::vector<lang::FunctionUnit> fit = reference;
  train::TrainConfig c;
  const nn::ModelBundle m(c.Model(), train::BuildSubtokenVocabulary(fit, c.min_count, c.max_vocab),
                          train::BuildKindVocabulary(fit), 1234);
  eval::BenchOptions bo;
  bo.attacks = {attacks::AttackSpec{}};
  bo.seed = 11;
  const eval::BenchReport r = eval::RunBenchmark(corpus, m, reference, bo);
  return {r.bits >= 10000 && r.bit_acc >= 0.47 && r.bit_acc <= 0.53,
          Fmt("untrained model BitAcc %.4f over %ld bits (>= 10000, in [0.47, 0.53])", r.bit_acc, r.bits)};
}

Outcome Criterion11(DeskRun& desk) {
  const auto& r = desk.report();
  return {r.mean_embed_seconds <= 0.5 && r.mean_extract_seconds <= 0.2,
          Fmt("mean embed %.4f s (<= 0.5), mean extract %.4f s (<= 0.2), batch size 1, model pre-loaded",
              r.mean_embed_seconds, r.mean_extract_seconds)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varmark acceptance criteria"};
  std::string work_dir = (fs::temp_directory_path() / "varmark_acceptance").string();
  int jobs = DefaultJobs();
  std::vector<int> selected;
  app.add_option("--work", work_dir, "Scratch directory");
  app.add_option("--jobs", jobs, "Worker threads for training");
  app.add_option("criteria", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 11; ++i) selected.push_back(i);
  }
  const fs::path work(work_dir);
  fs::create_directories(work);

  static const std::map<int, const char*> kTitles = {
      {1, "desk-scale training accuracy"}, {2, "operational semantics"},   {3, "type I robustness"},
      {4, "type III degradation"},         {5, "capacity accounting"},     {6, "alpha trade-off"},
      {7, "gradient suite"},               {8, "graph oracle"},            {9, "determinism"},
      {10, "random-model baseline"},       {11, "efficiency"},
  };
  DeskRun desk(work, jobs);
  std::ofstream results(work / "acceptance_results.txt");
  const auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    results << line << "\n" << std::flush;
  };
  int failed = 0;
  for (int id : selected) {
    const auto start = Clock::now();
    Outcome o;
    try {
      switch (id) {
        case 1: o = Criterion1(desk); break;
        case 2: o = Criterion2(desk); break;
        case 3: o = Criterion3(desk); break;
        case 4: o = Criterion4(desk); break;
        case 5: o = Criterion5(desk); break;
        case 6: o = Criterion6(jobs); break;
        case 7: o = Criterion7(); break;
        case 8: o = Criterion8(); break;
        case 9: o = Criterion9(work, jobs); break;
        case 10: o = Criterion10(); break;
        case 11: o = Criterion11(desk); break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    emit(Fmt("criterion %2d %s  %s: ", id, o.pass ? "PASS" : "FAIL", kTitles.at(id)) + o.detail +
         Fmt(" [%.0f s]", Seconds(start)));
  }
  emit(Fmt("%zu criteria, %d failed", selected.size(), failed));
  return failed == 0 ? 0 : 1;
}
