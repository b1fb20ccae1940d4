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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "varmark/attacks/attacks.hpp"
#include "varmark/common/error.hpp"
#include "varmark/common/parallel.hpp"
#include "varmark/eval/benchmark.hpp"
#include "varmark/graph/context_graph.hpp"
#include "varmark/lang/corpus.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/synth/java_synth.hpp"
#include "varmark/train/trainer.hpp"
#include "varmark/wm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace varmark;

namespace {

constexpr int kUsageExit = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void RequireFile(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError("missing " + what);
  if (!fs::exists(path)) throw UsageError(what + " not found: " + path);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path);
  out << text;
}

std::vector<lang::FunctionUnit> ParseCorpus(const std::string& path) {
  const auto& registry = lang::LanguageRegistry::Default();
  std::vector<lang::FunctionUnit> out;
  for (const auto& e : lang::ReadCorpus(path)) out.push_back(registry.Get(e.language).Parse(e.code, e.id));
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  int jobs = DefaultJobs();
};

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string corpus, valid, config, labels, out = "model.bin", metrics;
  std::optional<double> alpha;
  std::optional<int> bits_per_var, epochs;
  bool seed_given = false;
};

int CmdTrain(const TrainArgs& a, const Common& c) {
  RequireFile(a.corpus, "training corpus");
  RequireFile(a.valid, "validation corpus");
  train::TrainConfig cfg;
  if (!a.config.empty()) {
    RequireFile(a.config, "config");
    cfg = train::TrainConfig::Load(a.config);
  }
  if (a.seed_given) cfg.seed = c.seed;
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.bits_per_var) cfg.bits_per_var = *a.bits_per_var;
  if (a.epochs) cfg.epochs = *a.epochs;
  cfg.Validate();
  train::TrainInputs inputs{ParseCorpus(a.corpus), ParseCorpus(a.valid), std::nullopt};
  if (!a.labels.empty()) {
    RequireFile(a.labels, "teacher labels");
    inputs.exported_labels = a.labels;
  }
  train::TrainOptions options;
  options.jobs = c.jobs;
  options.on_epoch = [](const train::EpochMetrics& e) {
    std::fprintf(stderr, "epoch %d l_wa %.4f l_na %.4f val_bit_acc %.4f\n", e.epoch, e.l_wa, e.l_na, e.val_bit_acc);
  };
  const train::TrainResult r = train::Train(cfg, inputs, options);
  r.model.Save(a.out);
  const std::string metrics = a.metrics.empty() ? a.out + ".metrics.csv" : a.metrics;
  WriteFile(metrics, train::MetricsCsv(r.log));
  WriteFile(a.out + ".config", "# seed " + std::to_string(cfg.seed) + "\n" + cfg.ToText());
  std::cout << "best epoch " << r.best_epoch << ", samples " << r.samples << ", dropped " << r.dropped
            << ", seed " << cfg.seed << "\n";
  return 0;
}

// ---- embed / extract -------------------------------------------------------

struct EmbedArgs {
  std::string model, input, message, out, report;
  std::optional<int> bits;
};

wm::Message ParseMessage(const std::string& hex, std::optional<int> bits) {
  if (hex.empty()) throw UsageError("missing --message");
  return wm::Message::FromHex(hex, bits);
}

int CmdEmbed(const EmbedArgs& a) {
  RequireFile(a.model, "model");
  RequireFile(a.input, "input");
  const nn::ModelBundle m = nn::ModelBundle::Load(a.model);
  const wm::EmbedResult r = wm::Embed(ReadFile(a.input), ParseMessage(a.message, a.bits), m);
  WriteFile(a.out, r.source);
  WriteFile(a.report.empty() ? a.input + ".wm.json" : a.report, r.report.ToJson(2) + "\n");
  std::fprintf(stderr, "vars used %d, bits %d, bpt %.4f, ast_check %s, keyword_check %s\n", r.report.vars_used,
               r.report.bits_embedded, r.report.bits_per_token(), r.report.checks.ast_ok ? "pass" : "fail",
               r.report.checks.keyword_ok ? "pass" : "fail");
  return 0;
}

struct ExtractArgs {
  std::string model, input, report;
  std::optional<int> bits, bits_per_var;
};

int CmdExtract(const ExtractArgs& a) {
  RequireFile(a.model, "model");
  RequireFile(a.input, "input");
  const nn::ModelBundle m = nn::ModelBundle::Load(a.model);
  wm::Framing framing;
  framing.bits_per_var = m.config().bits_per_var;
  if (!a.report.empty()) {
    RequireFile(a.report, "embed report");
    const auto j = nlohmann::json::parse(ReadFile(a.report));
    const auto& f = j.at("framing");
    framing.message_bits = f.at("message_bits").get<int>();
    framing.bits_per_var = f.at("bits_per_var").get<int>();
    framing.skipped = f.at("skipped").get<std::vector<int>>();
  } else if (a.bits) {
    framing.message_bits = *a.bits;
  } else {
    throw UsageError("extract needs --report or --bits");
  }
  if (a.bits) framing.message_bits = *a.bits;
  if (a.bits_per_var) framing.bits_per_var = *a.bits_per_var;
  if (framing.bits_per_var != m.config().bits_per_var) {
    Fail(ErrorCode::kInvalidArgument, "bits per variable differs from the model's");
  }
  const wm::ExtractResult r = wm::Extract(ReadFile(a.input), m, framing);
  nlohmann::ordered_json j;
  j["message_hex"] = r.message.ToHex();
  j["message_bits"] = r.message.ToBitString();
  j["chunk_confidence"] = r.chunk_confidence;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---- attack ----------------------------------------------------------------

struct AttackArgs {
  std::string input, out, type = "I";
  double rename_frac = 1.0;
};

attacks::AttackType ParseAttackType(const std::string& t) {
  if (t == "none") return attacks::AttackType::kNone;
  if (t == "I" || t == "1") return attacks::AttackType::kTypeI;
  if (t == "II" || t == "2") return attacks::AttackType::kTypeII;
  if (t == "III" || t == "3") return attacks::AttackType::kTypeIII;
  throw UsageError("unknown attack type: " + t);
}

int CmdAttack(const AttackArgs& a, const Common& c) {
  RequireFile(a.input, "corpus");
  auto entries = lang::ReadCorpus(a.input);
  attacks::AttackSpec spec;
  spec.type = ParseAttackType(a.type);
  spec.rename_fraction = a.rename_frac;
  ParallelFor(entries.size(), c.jobs, [&](std::size_t i) {
    attacks::AttackSpec s = spec;
    s.seed = DeriveSeed(c.seed, {i});
    entries[i].code = attacks::ApplyAttack(entries[i].code, s);
  });
  if (a.out.empty() || a.out == "-") {
    const fs::path tmp = fs::temp_directory_path() / ("varmark-attack-" + std::to_string(c.seed) + ".jsonl");
    lang::WriteCorpus(tmp, entries);
    std::cout << ReadFile(tmp.string());
    fs::remove(tmp);
  } else {
    lang::WriteCorpus(a.out, entries);
  }
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model, corpus, reference, out = "bench.json", csv, timings;
  int limit = 0;
};

int CmdEval(const EvalArgs& a, const Common& c) {
  RequireFile(a.model, "model");
  RequireFile(a.corpus, "corpus");
  RequireFile(a.reference, "reference corpus");
  const nn::ModelBundle m = nn::ModelBundle::Load(a.model);
  eval::BenchOptions options;
  options.seed = c.seed;
  // Timings are taken on a single worker.
  options.jobs = 1;
  options.limit = a.limit;
  const eval::BenchReport r = eval::RunBenchmark(ParseCorpus(a.corpus), m, ParseCorpus(a.reference), options);
  WriteFile(a.out, r.ToJson());
  WriteFile(a.csv.empty() ? a.out + ".csv" : a.csv, r.ToCsv());
  WriteFile(a.timings.empty() ? a.out + ".timings.json" : a.timings, r.TimingJson());
  std::cout << r.ToCsv();
  return 0;
}

// ---- graph / synth ---------------------------------------------------------

int CmdGraph(const std::string& input) {
  RequireFile(input, "input");
  const auto& java = lang::LanguageRegistry::Default().Get("java");
  const lang::FunctionUnit fn = java.Parse(ReadFile(input));
  if (fn.HasErrors()) Fail(ErrorCode::kUnparseableInput, "input does not parse");
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& b : lang::ListVariables(fn)) {
    nlohmann::ordered_json item;
    item["variable"] = b.name;
    item["ordinal"] = b.ordinal;
    try {
      item["graph"] = nlohmann::ordered_json::parse(graph::GraphToJson(graph::BuildContextGraph(fn, b, java)));
    } catch (const Error& e) {
      item["error"] = std::string(ErrorCodeName(e.code()));
    }
    out.push_back(item);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct SynthArgs {
  std::string out;
  std::size_t count = 2000;
};

int CmdSynth(const SynthArgs& a, const Common& c) {
  if (a.out.empty()) throw UsageError("missing --out");
  lang::WriteCorpus(a.out, synth::GenerateJavaCorpus(a.count, c.seed));
  return 0;
}

void PrintError(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual watermarking of source code through variable renaming"};
  app.require_subcommand(1);
  Common common;
  bool seed_given = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s; seed_given = true; }, "Random seed");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--corpus", ta.corpus, "Training corpus (JSON lines)");
  train_cmd->add_option("--valid", ta.valid, "Validation corpus (JSON lines)");
  train_cmd->add_option("--config", ta.config, "Hyperparameter file");
  train_cmd->add_option("--labels", ta.labels, "Exported teacher labels (JSON lines)");
  train_cmd->add_option("--model,--out", ta.out, "Checkpoint path");
  train_cmd->add_option("--metrics", ta.metrics, "Metrics CSV path");
  train_cmd->add_option("--alpha", ta.alpha, "Loss weight of the watermark term");
  train_cmd->add_option("--bits-per-var", ta.bits_per_var, "Watermark bits per variable");
  train_cmd->add_option("--epochs", ta.epochs, "Epoch limit");
  add_common(train_cmd);

  EmbedArgs ea;
  auto* embed_cmd = app.add_subcommand("embed", "Watermark one function");
  embed_cmd->add_option("--model", ea.model, "Checkpoint");
  embed_cmd->add_option("input", ea.input, "Java function source");
  embed_cmd->add_option("--message", ea.message, "Message in hex");
  embed_cmd->add_option("--bits", ea.bits, "Message length in bits");
  embed_cmd->add_option("--out", ea.out, "Watermarked source (default stdout)");
  embed_cmd->add_option("--report", ea.report, "Embed report JSON");
  add_common(embed_cmd);

  ExtractArgs xa;
  auto* extract_cmd = app.add_subcommand("extract", "Recover a message");
  extract_cmd->add_option("--model", xa.model, "Checkpoint");
  extract_cmd->add_option("input", xa.input, "Watermarked source");
  extract_cmd->add_option("--report", xa.report, "Embed report holding the framing");
  extract_cmd->add_option("--bits", xa.bits, "Message length in bits");
  extract_cmd->add_option("--bits-per-var", xa.bits_per_var, "Watermark bits per variable");
  add_common(extract_cmd);

  AttackArgs aa;
  auto* attack_cmd = app.add_subcommand("attack", "Transform a corpus");
  attack_cmd->add_option("input", aa.input, "Corpus (JSON lines)");
  attack_cmd->add_option("--out", aa.out, "Output corpus (default stdout)");
  attack_cmd->add_option("--type", aa.type, "none, I, II or III");
  attack_cmd->add_option("--rename-frac", aa.rename_frac, "Type III rename fraction")->check(CLI::Range(0.0, 1.0));
  add_common(attack_cmd);

  EvalArgs va;
  auto* eval_cmd = app.add_subcommand("eval", "Benchmark a model");
  eval_cmd->add_option("--model", va.model, "Checkpoint");
  eval_cmd->add_option("--corpus", va.corpus, "Held-out corpus");
  eval_cmd->add_option("--reference", va.reference, "Training corpus for the 3-gram model");
  eval_cmd->add_option("--out", va.out, "Report JSON");
  eval_cmd->add_option("--csv", va.csv, "Per-condition CSV");
  eval_cmd->add_option("--timings", va.timings, "Timing JSON");
  eval_cmd->add_option("--limit", va.limit, "Evaluate at most this many functions");
  add_common(eval_cmd);

  std::string graph_input;
  auto* graph_cmd = app.add_subcommand("graph", "Dump variable context graphs");
  graph_cmd->add_option("input", graph_input, "Java function source");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic Java corpus");
  synth_cmd->add_option("--count", sa.count, "Number of functions");
  synth_cmd->add_option("--out", sa.out, "Output corpus (JSON lines)");
  add_common(synth_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("UsageError", e.what());
    return kUsageExit;
  }
  ta.seed_given = seed_given;

  try {
    if (*train_cmd) return CmdTrain(ta, common);
    if (*embed_cmd) return CmdEmbed(ea);
    if (*extract_cmd) return CmdExtract(xa);
    if (*attack_cmd) return CmdAttack(aa, common);
    if (*eval_cmd) return CmdEval(va, common);
    if (*graph_cmd) return CmdGraph(graph_input);
    if (*synth_cmd) return CmdSynth(sa, common);
  } catch (const UsageError& e) {
    PrintError("UsageError", e.what());
    return kUsageExit;
  } catch (const Error& e) {
    PrintError(ErrorCodeName(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("InternalError", e.what());
    return 1;
  }
  return 0;
}
