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

#include "varmark/train/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "varmark/common/error.hpp"

namespace varmark::train {

namespace {

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    Fail(ErrorCode::kInvalidArgument, "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string Format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, std::string_view)> set;
};

template <typename T>
Field MakeField(const char* key, T TrainConfig::*member) {
  return Field{[member](const TrainConfig& c) {
                 if constexpr (std::is_floating_point_v<T>) {
                   return Format(c.*member);
                 } else {
                   return std::to_string(c.*member);
                 }
               },
               [member, key](TrainConfig& c, std::string_view v) { c.*member = ParseNumber<T>(key, v); }};
}

const std::vector<std::pair<std::string, Field>>& Fields() {
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"alpha", MakeField("alpha", &TrainConfig::alpha)},
      {"warmup_epochs", MakeField("warmup_epochs", &TrainConfig::warmup_epochs)},
      {"learning_rate", MakeField("learning_rate", &TrainConfig::learning_rate)},
      {"batch_size", MakeField("batch_size", &TrainConfig::batch_size)},
      {"epochs", MakeField("epochs", &TrainConfig::epochs)},
      {"tau", MakeField("tau", &TrainConfig::tau)},
      {"bits_per_var", MakeField("bits_per_var", &TrainConfig::bits_per_var)},
      {"seed", MakeField("seed", &TrainConfig::seed)},
      {"feature_dim", MakeField("feature_dim", &TrainConfig::feature_dim)},
      {"head_dim", MakeField("head_dim", &TrainConfig::head_dim)},
      {"gat_layers", MakeField("gat_layers", &TrainConfig::gat_layers)},
      {"decoder_embed", MakeField("decoder_embed", &TrainConfig::decoder_embed)},
      {"decoder_hidden", MakeField("decoder_hidden", &TrainConfig::decoder_hidden)},
      {"classifier_hidden", MakeField("classifier_hidden", &TrainConfig::classifier_hidden)},
      {"max_name_len", MakeField("max_name_len", &TrainConfig::max_name_len)},
      {"attention_dropout", MakeField("attention_dropout", &TrainConfig::attention_dropout)},
      {"top_k", MakeField("top_k", &TrainConfig::top_k)},
      {"patience", MakeField("patience", &TrainConfig::patience)},
      {"keep_best", MakeField("keep_best", &TrainConfig::keep_best)},
      {"clip_norm", MakeField("clip_norm", &TrainConfig::clip_norm)},
      {"adam_beta1", MakeField("adam_beta1", &TrainConfig::adam_beta1)},
      {"adam_beta2", MakeField("adam_beta2", &TrainConfig::adam_beta2)},
      {"adam_eps", MakeField("adam_eps", &TrainConfig::adam_eps)},
      {"valid_limit", MakeField("valid_limit", &TrainConfig::valid_limit)},
      {"max_vocab", MakeField("max_vocab", &TrainConfig::max_vocab)},
      {"min_count", MakeField("min_count", &TrainConfig::min_count)},
  };
  return fields;
}

}  // namespace

void TrainConfig::Validate() const {
  auto bad = [](const std::string& msg) { Fail(ErrorCode::kInvalidArgument, msg); };
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must be in [0, 1]");
  if (warmup_epochs < 0) bad("warmup_epochs must be >= 0");
  if (!(tau > 0.0)) bad("tau must be positive");
  if (!(learning_rate > 0.0)) bad("learning_rate must be positive");
  if (bits_per_var < 1) bad("bits_per_var must be >= 1");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (epochs < 1) bad("epochs must be >= 1");
  if (top_k < 1) bad("top_k must be >= 1");
  if (patience < 1) bad("patience must be >= 1");
  if (keep_best != 0 && keep_best != 1) bad("keep_best must be 0 or 1");
  if (!(clip_norm > 0.0)) bad("clip_norm must be positive");
  if (valid_limit < 0) bad("valid_limit must be >= 0");
  if (max_vocab < 1 || min_count < 1) bad("vocabulary limits must be >= 1");
  Model().Validate();
}

nn::ModelConfig TrainConfig::Model() const {
  nn::ModelConfig m;
  m.bits_per_var = bits_per_var;
  m.feature_dim = feature_dim;
  m.head_dim = head_dim;
  m.gat_layers = gat_layers;
  m.decoder_embed = decoder_embed;
  m.decoder_hidden = decoder_hidden;
  m.classifier_hidden = classifier_hidden;
  m.max_name_len = max_name_len;
  m.attention_dropout = attention_dropout;
  return m;
}

std::string TrainConfig::ToText() const {
  std::string out;
  for (const auto& [key, field] : Fields()) out += key + " = " + field.get(*this) + "\n";
  return out;
}

TrainConfig TrainConfig::Parse(std::string_view text) {
  std::map<std::string, const Field*, std::less<>> by_key;
  for (const auto& [key, field] : Fields()) by_key.emplace(key, &field);
  TrainConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const auto it = by_key.find(key);
    if (it == by_key.end()) Fail(ErrorCode::kInvalidArgument, "unknown config key '" + std::string(key) + "'");
    it->second->set(c, Trim(line.substr(eq + 1)));
  }
  c.Validate();
  return c;
}

TrainConfig TrainConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

}  // namespace varmark::train
