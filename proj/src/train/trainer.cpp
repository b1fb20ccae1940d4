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

#include "varmark/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "varmark/common/error.hpp"
#include "varmark/common/parallel.hpp"
#include "varmark/common/rng.hpp"
#include "varmark/eval/metrics.hpp"
#include "varmark/graph/context_graph.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/subtokens.hpp"
#include "varmark/lang/variables.hpp"
#include "varmark/wm/pipeline.hpp"

namespace varmark::train {

namespace {

// Gradient shards are fixed so the reduction order never depends on --jobs.
constexpr int kShards = 4;

bool IsNameKind(std::string_view kind) { return kind == "identifier" || kind == "type_identifier"; }

}  // namespace

double WatermarkLoss(const nn::Vector& probs, int chunk) {
  if (chunk < 0 || chunk >= probs.size()) Fail(ErrorCode::kIndexOutOfRange, "chunk outside the class range");
  return -std::log(probs(chunk));
}

double NaturalnessLoss(const std::vector<nn::Vector>& student, const teacher::SoftLabel& label) {
  const std::size_t steps = std::min(student.size(), label.positions.size());
  double loss = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    for (const auto& [id, p] : label.positions[t]) {
      if (p > 0.0) loss -= p * std::log(student[t](id));
    }
  }
  return loss;
}

double TotalLoss(double l_wa, double l_na, double alpha) { return alpha * l_wa + (1.0 - alpha) * l_na; }

graph::Vocabulary BuildSubtokenVocabulary(const std::vector<lang::FunctionUnit>& fns, int min_count,
                                          int max_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& fn : fns) {
    const auto& tree = fn.tree();
    for (lang::NodeId id = 0; id < static_cast<lang::NodeId>(tree.size()); ++id) {
      const auto& n = tree.node(id);
      if (!n.IsLeaf() || !IsNameKind(n.kind)) continue;
      for (const auto& s : lang::Subtokenize(fn.Text(id))) ++counts[s];
    }
  }
  return graph::Vocabulary::FromCounts(counts, min_count, max_size);
}

graph::Vocabulary BuildKindVocabulary(const std::vector<lang::FunctionUnit>& fns) {
  std::map<std::string, std::size_t> counts;
  for (const auto& fn : fns) {
    const auto& tree = fn.tree();
    for (lang::NodeId id = 0; id < static_cast<lang::NodeId>(tree.size()); ++id) ++counts[tree.node(id).kind];
  }
  return graph::Vocabulary::FromCounts(counts, 1, 1 << 20);
}

std::vector<TrainSample> BuildSamples(const std::vector<lang::FunctionUnit>& fns, const nn::ModelBundle& m,
                                      const teacher::LabelSource& labels, int top_k, int* dropped) {
  const auto& java = lang::LanguageRegistry::Default().Get("java");
  std::vector<TrainSample> out;
  int lost = 0;
  for (const auto& fn : fns) {
    for (const auto& b : lang::ListVariables(fn)) {
      try {
        TrainSample s;
        s.fn_id = fn.id();
        s.ordinal = b.ordinal;
        s.name = b.name;
        s.graph = graph::EncodeGraph(graph::BuildContextGraph(fn, b, java), m.subtokens(), m.kinds());
        s.label = labels.Labels(fn, b, top_k);
        out.push_back(std::move(s));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyContext && e.code() != ErrorCode::kNoStatementContext &&
            e.code() != ErrorCode::kTeacherUnavailable) {
          throw;
        }
        ++lost;
      }
    }
  }
  if (dropped) *dropped = lost;
  return out;
}

SampleLoss RunSample(const nn::ModelBundle& m, const TrainSample& s, int chunk, double alpha, double tau,
                     std::uint64_t seed, nn::Gradients* grads, bool dropout) {
  Rng rng(seed);
  Rng drop_rng(DeriveSeed(seed, {1}));
  Rng* drop = dropout ? &drop_rng : nullptr;
  const int v = m.subtokens().size();
  const int k = m.config().heads();
  nn::Tape t(grads != nullptr);

  const nn::Var h_embed = nn::EncodeGraph(t, m, "embed", nn::EmbedSideFeatures(t, m, s.graph), s.graph, drop);
  const nn::Var z = nn::SelectHead(t, t.Row(h_embed, s.graph.target), chunk, k);
  const nn::GumbelDecodeResult dec = nn::GumbelDecode(t, m, z, tau, rng, true);

  nn::Var l_na;
  const std::size_t steps = std::min(dec.tokens.size(), s.label.positions.size());
  for (std::size_t i = 0; i < steps; ++i) {
    const nn::Var ce = t.SoftCrossEntropy(dec.logits[i], s.label.Dense(i, v));
    l_na = l_na.valid() ? t.Add(l_na, ce) : ce;
  }
  if (!l_na.valid()) l_na = t.Constant(nn::Matrix::Zero(1, 1));

  const nn::Var x_extract = nn::ExtractSideFeatures(t, m, s.graph, dec.name_embedding);
  const nn::Var h_extract = nn::EncodeGraph(t, m, "extract", x_extract, s.graph, drop);
  const nn::Var logits = nn::ClassifierLogits(t, m, t.Row(h_extract, s.graph.target));
  nn::Matrix onehot = nn::Matrix::Zero(1, m.config().classes());
  onehot(0, chunk) = 1.0;
  const nn::Var l_wa = t.SoftCrossEntropy(logits, onehot);
  const nn::Var total = t.Add(t.Scale(l_wa, alpha), t.Scale(l_na, 1.0 - alpha));

  SampleLoss out{t.scalar(l_wa), t.scalar(l_na), t.scalar(total)};
  if (grads != nullptr && std::isfinite(out.l_t)) t.Backward(total, grads);
  return out;
}

double ClipGradients(nn::Gradients& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& g : grads) g *= scale;
  }
  return norm;
}

Adam::Adam(const nn::ParameterSet& params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(params.ZeroGradients()), v_(params.ZeroGradients()) {}

void Adam::Step(nn::ParameterSet& params, const nn::Gradients& grads) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
    params.at(i).value.array() -=
        lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

ValidationResult ValidateModel(const nn::ModelBundle& m, const std::vector<lang::FunctionUnit>& fns,
                               std::uint64_t seed, int limit) {
  const int bits_per_var = m.config().bits_per_var;
  ValidationResult r;
  long matched = 0, total = 0, renamed = 0;
  double sim = 0.0;
  const std::size_t n = limit > 0 ? std::min(fns.size(), static_cast<std::size_t>(limit)) : fns.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto vars = lang::ListVariables(fns[i]);
    if (vars.empty()) continue;
    ++r.functions;
    Rng rng(DeriveSeed(seed, {i}));
    wm::Message msg;
    for (std::size_t b = 0; b < vars.size() * static_cast<std::size_t>(bits_per_var); ++b) {
      msg.bits.push_back(static_cast<int>(rng.Index(2)));
    }
    try {
      const wm::EmbedResult e = wm::Embed(fns[i].source(), msg, m);
      const wm::ExtractResult x = wm::Extract(e.source, m, e.report.framing);
      for (std::size_t b = 0; b < msg.bits.size(); ++b) matched += msg.bits[b] == x.message.bits[b] ? 1 : 0;
      total += static_cast<long>(msg.bits.size());
      for (const auto& v : e.report.variables) {
        if (v.skipped) continue;
        sim += eval::VarSimProxy(v.original, v.renamed);
        ++renamed;
      }
    } catch (const Error&) {
      ++r.failures;
    }
  }
  r.bit_acc = total > 0 ? static_cast<double>(matched) / static_cast<double>(total) : 0.0;
  r.var_sim = renamed > 0 ? sim / static_cast<double>(renamed) : 0.0;
  return r;
}

std::string MetricsCsv(const std::vector<EpochMetrics>& log) {
  std::string out = "epoch,l_wa,l_na,l_t,val_bit_acc,val_var_sim_proxy\n";
  char buf[256];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", e.epoch, e.l_wa, e.l_na, e.l_t,
                  e.val_bit_acc, e.val_var_sim);
    out += buf;
  }
  return out;
}

std::vector<int> EpochChunks(std::size_t n, int classes, std::uint64_t seed, int epoch) {
  std::vector<int> chunks(n);
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(epoch), 2}));
  for (int& c : chunks) c = static_cast<int>(rng.Index(static_cast<std::size_t>(classes)));
  return chunks;
}

TrainResult Train(const TrainConfig& cfg, const TrainInputs& inputs, const TrainOptions& options) {
  cfg.Validate();
  if (inputs.train.empty()) Fail(ErrorCode::kEmptyCorpus, "no training functions");

  graph::Vocabulary subtokens = BuildSubtokenVocabulary(inputs.train, cfg.min_count, cfg.max_vocab);
  graph::Vocabulary kinds = BuildKindVocabulary(inputs.train);
  TrainResult result{nn::ModelBundle(cfg.Model(), subtokens, kinds, cfg.seed), {}, 0, 0, 0};
  nn::ModelBundle& model = result.model;
  model.set_train_config(cfg.ToText());

  teacher::TeacherOptions topts;
  topts.max_name_len = cfg.max_name_len;
  const teacher::CorpusTeacher corpus_teacher = teacher::CorpusTeacher::Train(inputs.train, subtokens, topts);
  std::optional<teacher::ExportedLabels> exported;
  if (inputs.exported_labels) exported = teacher::ExportedLabels::Load(*inputs.exported_labels, subtokens);
  const teacher::LabelSource labels(&corpus_teacher, exported ? &*exported : nullptr);

  const std::vector<TrainSample> samples = BuildSamples(inputs.train, model, labels, cfg.top_k, &result.dropped);
  if (samples.empty()) Fail(ErrorCode::kEmptyCorpus, "no trainable variables in the training corpus");
  result.samples = static_cast<int>(samples.size());

  Adam adam(model.params(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  const int classes = model.config().classes();
  std::vector<nn::Matrix> best;
  double best_acc = -1.0;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng order_rng(DeriveSeed(cfg.seed, {static_cast<std::uint64_t>(epoch), 1}));
    order_rng.Shuffle(order);
    const std::vector<int> chunks = EpochChunks(samples.size(), classes, cfg.seed, epoch);

    const double alpha = epoch <= cfg.warmup_epochs ? 1.0 : cfg.alpha;
    double sum_wa = 0.0, sum_na = 0.0, sum_t = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::size_t count = end - start;
      std::vector<nn::Gradients> shard_grads(kShards);
      std::vector<SampleLoss> losses(count);
      ParallelFor(kShards, options.jobs, [&](std::size_t shard) {
        shard_grads[shard] = model.params().ZeroGradients();
        const std::size_t lo = start + count * shard / kShards;
        const std::size_t hi = start + count * (shard + 1) / kShards;
        for (std::size_t p = lo; p < hi; ++p) {
          const std::size_t idx = order[p];
          const std::uint64_t seed = DeriveSeed(cfg.seed, {static_cast<std::uint64_t>(epoch), 3, idx});
          losses[p - start] = RunSample(model, samples[idx], chunks[idx], alpha, cfg.tau, seed,
                                        &shard_grads[shard]);
        }
      });
      for (std::size_t p = 0; p < count; ++p) {
        const SampleLoss& l = losses[p];
        if (!std::isfinite(l.l_t)) {
          const TrainSample& s = samples[order[start + p]];
          Fail(ErrorCode::kDivergence, "non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                                           s.fn_id + "#" + std::to_string(s.ordinal) +
                                           " (l_wa=" + std::to_string(l.l_wa) +
                                           ", l_na=" + std::to_string(l.l_na) + ")");
        }
        sum_wa += l.l_wa;
        sum_na += l.l_na;
        sum_t += l.l_t;
      }
      nn::Gradients grads = std::move(shard_grads[0]);
      for (int s = 1; s < kShards; ++s) {
        for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += shard_grads[static_cast<std::size_t>(s)][i];
      }
      for (auto& g : grads) g /= static_cast<double>(count);
      ClipGradients(grads, cfg.clip_norm);
      adam.Step(model.params(), grads);
    }

    const double n = static_cast<double>(samples.size());
    EpochMetrics em;
    em.epoch = epoch;
    em.l_wa = sum_wa / n;
    em.l_na = sum_na / n;
    em.l_t = sum_t / n;
    if (!inputs.valid.empty()) {
      const ValidationResult v = ValidateModel(model, inputs.valid, DeriveSeed(cfg.seed, {0x7a11d}), cfg.valid_limit);
      em.val_bit_acc = v.bit_acc;
      em.val_var_sim = v.var_sim;
    }
    result.log.push_back(em);
    if (options.on_epoch) options.on_epoch(em);

    if (!cfg.keep_best) {
      result.best_epoch = epoch;
      continue;
    }
    if (epoch <= cfg.warmup_epochs && epoch < cfg.epochs) continue;
    if (em.val_bit_acc > best_acc) {
      best_acc = em.val_bit_acc;
      result.best_epoch = epoch;
      since_best = 0;
      best.clear();
      for (std::size_t i = 0; i < model.params().size(); ++i) best.push_back(model.params().at(i).value);
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  for (std::size_t i = 0; i < best.size(); ++i) model.params().at(i).value = best[i];
  model.QuantizeToFloat();
  return result;
}

}  // namespace varmark::train
