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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varmark/graph/features.hpp"
#include "varmark/graph/vocabulary.hpp"
#include "varmark/lang/function_unit.hpp"
#include "varmark/nn/model.hpp"
#include "varmark/teacher/teacher.hpp"
#include "varmark/train/config.hpp"

namespace varmark::train {

// -log p[chunk].
double WatermarkLoss(const nn::Vector& probs, int chunk);
// -sum_t sum_w label_t(w) log student_t(w) over the positions both define.
double NaturalnessLoss(const std::vector<nn::Vector>& student, const teacher::SoftLabel& label);
double TotalLoss(double l_wa, double l_na, double alpha);

// Subtokens of identifier and type names in `fns`, most frequent first.
graph::Vocabulary BuildSubtokenVocabulary(const std::vector<lang::FunctionUnit>& fns,
                                          int min_count, int max_size);
// Every syntax node kind in `fns`.
graph::Vocabulary BuildKindVocabulary(const std::vector<lang::FunctionUnit>& fns);

struct TrainSample {
  std::string fn_id;
  int ordinal = 0;
  std::string name;
  graph::GraphInput graph;
  teacher::SoftLabel label;
};

// One sample per variable with a usable context and label; the number of
// variables dropped is stored in `dropped`.
std::vector<TrainSample> BuildSamples(const std::vector<lang::FunctionUnit>& fns,
                                      const nn::ModelBundle& m,
                                      const teacher::LabelSource& labels, int top_k,
                                      int* dropped = nullptr);

struct SampleLoss {
  double l_wa = 0.0;
  double l_na = 0.0;
  double l_t = 0.0;
};

// Full embed -> decode -> extract pass for one sample. Gumbel noise and
// attention dropout come from `seed`. Gradients of l_t are added to `grads`
// when it is non-null.
SampleLoss RunSample(const nn::ModelBundle& m, const TrainSample& s, int chunk, double alpha,
                     double tau, std::uint64_t seed, nn::Gradients* grads, bool dropout = true);

// Watermark chunk of every sample for one epoch, uniform over [0, classes).
std::vector<int> EpochChunks(std::size_t n, int classes, std::uint64_t seed, int epoch);

// Scales `grads` to at most `max_norm` in global L2 norm; returns the norm
// before scaling.
double ClipGradients(nn::Gradients& grads, double max_norm);

class Adam {
 public:
  Adam(const nn::ParameterSet& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void Step(nn::ParameterSet& params, const nn::Gradients& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  nn::Gradients m_;
  nn::Gradients v_;
};

struct ValidationResult {
  double bit_acc = 0.0;
  double var_sim = 0.0;
  int functions = 0;
  int failures = 0;
};

// Embeds a seeded random message in every function and extracts it again.
ValidationResult ValidateModel(const nn::ModelBundle& m, const std::vector<lang::FunctionUnit>& fns,
                               std::uint64_t seed, int limit);

struct EpochMetrics {
  int epoch = 0;
  double l_wa = 0.0;
  double l_na = 0.0;
  double l_t = 0.0;
  double val_bit_acc = 0.0;
  double val_var_sim = 0.0;
};

std::string MetricsCsv(const std::vector<EpochMetrics>& log);

struct TrainInputs {
  std::vector<lang::FunctionUnit> train;
  std::vector<lang::FunctionUnit> valid;
  // JSON-lines teacher labels; the corpus teacher covers the rest.
  std::optional<std::filesystem::path> exported_labels;
};

struct TrainOptions {
  int jobs = 1;
  std::function<void(const EpochMetrics&)> on_epoch;
};

struct TrainResult {
  nn::ModelBundle model;
  std::vector<EpochMetrics> log;
  int best_epoch = 0;
  int samples = 0;
  int dropped = 0;
};

// Throws EmptyCorpus, Divergence, SchemaError.
TrainResult Train(const TrainConfig& cfg, const TrainInputs& inputs, const TrainOptions& options = {});

}  // namespace varmark::train
