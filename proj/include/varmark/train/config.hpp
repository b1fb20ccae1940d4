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

#include "varmark/nn/model.hpp"

namespace varmark::train {

struct TrainConfig {
  // Weight of the watermark loss against the naturalness loss.
  double alpha = 0.6;
  // Epochs trained with alpha = 1 before switching to `alpha`.
  int warmup_epochs = 8;
  double learning_rate = 0.00025;
  int batch_size = 32;
  int epochs = 50;
  // Gumbel-softmax temperature.
  double tau = 0.5;
  int bits_per_var = 2;
  std::uint64_t seed = 1;
  int feature_dim = 128;
  int head_dim = 128;
  int gat_layers = 2;
  int decoder_embed = 128;
  int decoder_hidden = 128;
  int classifier_hidden = 128;
  int max_name_len = 5;
  double attention_dropout = 0.1;
  // Teacher labels keep the top_k tokens per position.
  int top_k = 20;
  int patience = 10;
  // 1 restores the post-warm-up epoch with the best validation BitAcc and
  // stops after `patience` epochs without improvement; 0 trains every epoch
  // and keeps the last one.
  int keep_best = 1;
  double clip_norm = 5.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Validation functions used for BitAcc after each epoch (0 = all).
  int valid_limit = 200;
  int max_vocab = 5000;
  int min_count = 1;

  // Throws InvalidArgument.
  void Validate() const;
  nn::ModelConfig Model() const;

  // "key = value" lines in a fixed order.
  std::string ToText() const;
  // Unknown keys and malformed values throw InvalidArgument; '#' starts a
  // comment.
  static TrainConfig Parse(std::string_view text);
  static TrainConfig Load(const std::filesystem::path& path);
};

}  // namespace varmark::train
