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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "varmark/graph/features.hpp"
#include "varmark/lang/checks.hpp"
#include "varmark/lang/subtokens.hpp"
#include "varmark/lang/variables.hpp"
#include "varmark/nn/model.hpp"

namespace varmark::wm {

struct Message {
  std::vector<int> bits;

  // Hex digits, most significant bit first. `bits` keeps only the leading
  // bits for messages that are not a multiple of four long.
  static Message FromHex(std::string_view hex, std::optional<int> bits = std::nullopt);
  // A string of '0' and '1'.
  static Message FromBitString(std::string_view bits);
  std::string ToHex() const;
  std::string ToBitString() const;
  std::size_t size() const { return bits.size(); }
};

// Out-of-band descriptor shared by embedder and extractor.
struct Framing {
  int message_bits = 0;
  int bits_per_var = 2;
  // Ordinals of variables left untouched during embedding.
  std::vector<int> skipped;

  int num_chunks() const { return (message_bits + bits_per_var - 1) / bits_per_var; }
};

struct FramedMessage {
  // One chunk value per variable, cycling through the message chunks.
  std::vector<int> chunks;
  Framing framing;
};

int ChunkValue(const std::vector<int>& bits, std::size_t offset, int bits_per_var);
std::vector<int> ChunkBits(int value, int bits_per_var);

// Pads to a multiple of L and assigns chunks cyclically. Throws
// CapacityExceeded when num_vars * L is below the message length and
// InvalidArgument when num_vars < 1.
FramedMessage FrameMessage(const Message& msg, int num_vars, int bits_per_var);

struct EmbedOptions {
  int beam_width = 8;
  // Defaults to the model's maximum name length.
  int max_name_len = 0;
  lang::NamingStyle style = lang::NamingStyle::kCamel;
};

struct VariableRecord {
  int ordinal = 0;
  std::string original;
  std::string renamed;
  // Chunk value and bits carried; -1 and empty when skipped.
  int chunk = -1;
  std::string chunk_bits;
  int beam_rank = -1;
  bool skipped = false;
};

struct EmbedReport {
  std::vector<VariableRecord> variables;
  int vars_used = 0;
  int bits_embedded = 0;
  std::size_t tokens = 0;
  Framing framing;
  lang::CheckReport checks;

  double bits_per_token() const {
    return tokens == 0 ? 0.0 : static_cast<double>(bits_embedded) / static_cast<double>(tokens);
  }
  std::string ToJson(int indent = -1) const;
};

struct EmbedResult {
  std::string source;
  EmbedReport report;
};

// Model input for one variable of `fn`.
graph::GraphInput VariableGraph(const lang::FunctionUnit& fn, const lang::VariableBinding& b,
                                const nn::ModelBundle& m);

// Throws NoVariables, CapacityExceeded, UnparseableInput.
EmbedResult Embed(std::string_view source, const Message& msg, const nn::ModelBundle& m,
                  const EmbedOptions& options = {});

struct ExtractResult {
  Message message;
  // Vote share of the winning value per message chunk.
  std::vector<double> chunk_confidence;
  // Per variable in appearance order (skipped variables included).
  std::vector<int> predicted;
  std::vector<double> confidence;
};

// Throws NoVariables, CapacityExceeded, UnparseableInput.
ExtractResult Extract(std::string_view source, const nn::ModelBundle& m, const Framing& framing);

// Confidence-weighted vote: votes[i] = (value, confidence).
int MajorityVote(const std::vector<std::pair<int, double>>& votes, int classes, double* share = nullptr);

}  // namespace varmark::wm
