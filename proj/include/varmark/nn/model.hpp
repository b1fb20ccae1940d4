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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "varmark/common/rng.hpp"
#include "varmark/graph/features.hpp"
#include "varmark/graph/vocabulary.hpp"
#include "varmark/nn/tape.hpp"

namespace varmark::nn {

struct ModelConfig {
  // Watermark bits per variable; the last attention layer has 2^L heads.
  int bits_per_var = 2;
  // Node feature width F; hidden attention layers concatenate to F.
  int feature_dim = 128;
  // Per-head width F' of the last attention layer.
  int head_dim = 128;
  int gat_layers = 2;
  int decoder_embed = 128;
  int decoder_hidden = 128;
  int classifier_hidden = 128;
  // Maximum subtokens per generated name.
  int max_name_len = 5;
  double attention_dropout = 0.1;
  double leaky_slope = 0.2;

  int heads() const { return 1 << bits_per_var; }
  int classes() const { return 1 << bits_per_var; }
  // Throws InvalidArgument on inconsistent sizes.
  void Validate() const;
};

// All learned parameters plus the vocabularies they are indexed by.
class ModelBundle {
 public:
  ModelBundle(ModelConfig config, graph::Vocabulary subtokens, graph::Vocabulary kinds,
              std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const graph::Vocabulary& subtokens() const { return subtokens_; }
  const graph::Vocabulary& kinds() const { return kinds_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const Parameter& P(std::string_view name) const { return params_.Get(name); }

  // Free-form configuration text carried into checkpoints.
  const std::string& train_config() const { return train_config_; }
  void set_train_config(std::string text) { train_config_ = std::move(text); }

  // Rounds every parameter to 32-bit precision so that a save/load cycle is
  // exact.
  void QuantizeToFloat();

  void Save(const std::filesystem::path& path) const;
  static ModelBundle Load(const std::filesystem::path& path);

  // JSON object describing dims, L, K and vocabulary hashes.
  std::string ConfigEcho() const;

 private:
  ModelBundle(ModelConfig config, graph::Vocabulary subtokens, graph::Vocabulary kinds);
  void Init(std::uint64_t seed);

  ModelConfig config_;
  graph::Vocabulary subtokens_;
  graph::Vocabulary kinds_;
  ParameterSet params_;
  std::string train_config_;
};

// ---- differentiable building blocks ---------------------------------------

EdgeList ToEdgeList(const graph::GraphInput& g);

// Node features for the embedding side: the target is masked.
Var EmbedSideFeatures(Tape& t, const ModelBundle& m, const graph::GraphInput& g);
// Node features for the extraction side. With a valid `name_embedding`
// (1 x F) the target row uses it instead of the target's real subtokens.
Var ExtractSideFeatures(Tape& t, const ModelBundle& m, const graph::GraphInput& g,
                        Var name_embedding = Var{});

// Stacked graph attention over `features`; `side` is "embed" or "extract".
// Returns N x heads*head_dim. Dropout is applied when `dropout_rng` is set.
Var EncodeGraph(Tape& t, const ModelBundle& m, std::string_view side, Var features,
                const graph::GraphInput& g, Rng* dropout_rng);

// One attention layer as in the encoder, exposed for testing.
Var GatLayer(Tape& t, Var x, Var w, Var attn_src, Var attn_dst, Var rel_bias,
             const EdgeList& edges, int heads, double slope, bool relu,
             const std::vector<double>* keep_scale);

Var SelectHead(Tape& t, Var row, int class_index, int heads);

struct DecoderState {
  Var h;
  Var c;
};

DecoderState DecoderInit(Tape& t, const ModelBundle& m, Var z);
// Advances the LSTM with `input` (1 x decoder_embed) and returns the raw
// output logits (1 x V).
Var DecoderStep(Tape& t, const ModelBundle& m, DecoderState& state, Var input);
// Additive mask: special symbols are never emitted and END is not allowed at
// step 0.
Matrix DecoderLogitMask(int vocab_size, int step);

struct GumbelDecodeResult {
  // Masked logits per step.
  std::vector<Var> logits;
  // Straight-through one-hot samples per step.
  std::vector<Var> samples;
  // Sampled ids per step (END included when produced).
  std::vector<int> tokens;
  // Mean extraction-side subtoken embedding of the tokens before END (1 x F).
  Var name_embedding;
};

GumbelDecodeResult GumbelDecode(Tape& t, const ModelBundle& m, Var z, double tau, Rng& rng,
                                bool hard = true);

Var ClassifierLogits(Tape& t, const ModelBundle& m, Var repr);

// ---- inference helpers -----------------------------------------------------

// Target row of the embedding-side encoder (heads*head_dim), no dropout.
Vector EmbedRepresentation(const ModelBundle& m, const graph::GraphInput& g);
// Block [class_index*width, (class_index+1)*width). Throws IndexOutOfRange.
Vector SelectHead(const Vector& h_concat, int class_index, int heads);

struct BeamCandidate {
  std::vector<int> tokens;  // without END
  double log_prob = 0.0;
};

// Up to `width` finished candidates sorted by decreasing log-probability.
// Throws EmptyOutput when the vocabulary has nothing to emit.
std::vector<BeamCandidate> BeamSearch(const ModelBundle& m, const Vector& z, int width,
                                      int max_len);
std::vector<int> GreedyDecode(const ModelBundle& m, const Vector& z, int max_len);
// Log-probability of a complete sequence (END appended unless at max_len).
double SequenceLogProb(const ModelBundle& m, const Vector& z, const std::vector<int>& tokens,
                       int max_len);

// Classifier probabilities for a graph whose target carries its real name.
Vector ClassifyProbabilities(const ModelBundle& m, const graph::GraphInput& g);

// Zero-weight classifier gives the uniform distribution; exposed for tests.
Vector Softmax(const Vector& logits);

}  // namespace varmark::nn
