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

#include "varmark/wm/pipeline.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "varmark/graph/context_graph.hpp"

namespace varmark::wm {

namespace {

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string BitsToString(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += b != 0 ? '1' : '0';
  return s;
}

const lang::Language& Java() { return lang::LanguageRegistry::Default().Get("java"); }

}  // namespace

Message Message::FromHex(std::string_view hex, std::optional<int> bits) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) Fail(ErrorCode::kInvalidArgument, "empty message");
  Message m;
  for (char c : hex) {
    const int d = HexDigit(c);
    if (d < 0) Fail(ErrorCode::kInvalidArgument, std::string("bad hex digit '") + c + "'");
    for (int k = 3; k >= 0; --k) m.bits.push_back((d >> k) & 1);
  }
  if (bits) {
    if (*bits < 1 || *bits > static_cast<int>(m.bits.size())) {
      Fail(ErrorCode::kInvalidArgument, "--bits must be in [1, " + std::to_string(m.bits.size()) + "]");
    }
    m.bits.resize(static_cast<std::size_t>(*bits));
  }
  return m;
}

Message Message::FromBitString(std::string_view bits) {
  if (bits.empty()) Fail(ErrorCode::kInvalidArgument, "empty message");
  Message m;
  for (char c : bits) {
    if (c != '0' && c != '1') Fail(ErrorCode::kInvalidArgument, "bit strings use only 0 and 1");
    m.bits.push_back(c - '0');
  }
  return m;
}

std::string Message::ToHex() const {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int d = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      d = (d << 1) | (i + k < bits.size() ? bits[i + k] : 0);
    }
    out += kDigits[d];
  }
  return out;
}

std::string Message::ToBitString() const { return BitsToString(bits); }

int ChunkValue(const std::vector<int>& bits, std::size_t offset, int bits_per_var) {
  int v = 0;
  for (int k = 0; k < bits_per_var; ++k) {
    const std::size_t i = offset + static_cast<std::size_t>(k);
    v = (v << 1) | (i < bits.size() ? bits[i] : 0);
  }
  return v;
}

std::vector<int> ChunkBits(int value, int bits_per_var) {
  std::vector<int> out;
  for (int k = bits_per_var - 1; k >= 0; --k) out.push_back((value >> k) & 1);
  return out;
}

FramedMessage FrameMessage(const Message& msg, int num_vars, int bits_per_var) {
  if (num_vars < 1) Fail(ErrorCode::kInvalidArgument, "framing needs at least one variable");
  if (bits_per_var < 1) Fail(ErrorCode::kInvalidArgument, "bits per variable must be >= 1");
  if (msg.bits.empty()) Fail(ErrorCode::kInvalidArgument, "empty message");
  FramedMessage f;
  f.framing.message_bits = static_cast<int>(msg.size());
  f.framing.bits_per_var = bits_per_var;
  const int n = f.framing.num_chunks();
  if (num_vars < n) {
    Fail(ErrorCode::kCapacityExceeded,
         std::to_string(msg.size()) + " bits need " + std::to_string(n) + " variables, have " +
             std::to_string(num_vars));
  }
  for (int i = 0; i < num_vars; ++i) {
    f.chunks.push_back(ChunkValue(msg.bits, static_cast<std::size_t>((i % n) * bits_per_var), bits_per_var));
  }
  return f;
}

std::string EmbedReport::ToJson(int indent) const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json vars = nlohmann::ordered_json::array();
  for (const auto& v : variables) {
    vars.push_back({{"ordinal", v.ordinal},
                    {"original", v.original},
                    {"renamed", v.renamed},
                    {"chunk_bits", v.chunk_bits},
                    {"beam_rank", v.beam_rank},
                    {"skipped", v.skipped}});
  }
  j["variables"] = vars;
  j["vars_used"] = vars_used;
  j["bits_embedded"] = bits_embedded;
  j["tokens"] = tokens;
  j["bpt"] = bits_per_token();
  j["framing"] = {{"message_bits", framing.message_bits},
                  {"bits_per_var", framing.bits_per_var},
                  {"skipped", framing.skipped}};
  j["checks"] = {{"ast_ok", checks.ast_ok}, {"keyword_ok", checks.keyword_ok}};
  return j.dump(indent);
}

graph::GraphInput VariableGraph(const lang::FunctionUnit& fn, const lang::VariableBinding& b,
                                const nn::ModelBundle& m) {
  const graph::ContextGraph g = graph::BuildContextGraph(fn, b, Java());
  return graph::EncodeGraph(g, m.subtokens(), m.kinds());
}

EmbedResult Embed(std::string_view source, const Message& msg, const nn::ModelBundle& m,
                  const EmbedOptions& options) {
  const lang::Language& java = Java();
  lang::FunctionUnit fn = java.Parse(source);
  const std::vector<lang::VariableBinding> original = lang::ListVariables(fn);
  if (original.empty()) Fail(ErrorCode::kNoVariables, "function declares no variables");
  const int bits_per_var = m.config().bits_per_var;
  const FramedMessage framed = FrameMessage(msg, static_cast<int>(original.size()), bits_per_var);
  const int n_chunks = framed.framing.num_chunks();
  const int max_len = options.max_name_len > 0 ? options.max_name_len : m.config().max_name_len;

  EmbedResult result;
  EmbedReport& report = result.report;
  report.framing = framed.framing;
  std::set<std::string> assigned;
  int next_chunk = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const std::vector<lang::VariableBinding> bindings = lang::ListVariables(fn);
    const lang::VariableBinding& b = bindings[i];
    VariableRecord rec;
    rec.ordinal = b.ordinal;
    rec.original = original[i].name;
    const int chunk = ChunkValue(msg.bits, static_cast<std::size_t>((next_chunk % n_chunks) * bits_per_var),
                                 bits_per_var);
    const graph::GraphInput g = VariableGraph(fn, b, m);
    const nn::Vector z = nn::SelectHead(nn::EmbedRepresentation(m, g), chunk, m.config().heads());
    const auto beams = nn::BeamSearch(m, z, options.beam_width, max_len);
    for (std::size_t r = 0; r < beams.size(); ++r) {
      std::vector<std::string> pieces;
      for (int id : beams[r].tokens) pieces.push_back(m.subtokens().Token(id));
      if (pieces.empty()) continue;
      const std::string name = lang::RenderName(pieces, options.style);
      if (!java.IsLegalIdentifier(name) || java.IsProtected(name)) continue;
      if (lang::Subtokenize(name) != pieces) continue;
      if (name != b.name && assigned.count(name) != 0) continue;
      if (name != b.name && lang::CheckRename(fn, bindings, b, name, java)) continue;
      rec.renamed = name;
      rec.beam_rank = static_cast<int>(r);
      break;
    }
    if (rec.beam_rank < 0) {
      rec.skipped = true;
      rec.renamed = b.name;
      report.framing.skipped.push_back(b.ordinal);
    } else {
      rec.chunk = chunk;
      rec.chunk_bits = BitsToString(ChunkBits(chunk, bits_per_var));
      assigned.insert(rec.renamed);
      if (rec.renamed != b.name) fn = lang::RenameVariable(fn, b, rec.renamed, java);
      ++next_chunk;
      ++report.vars_used;
    }
    report.variables.push_back(std::move(rec));
  }
  if (next_chunk < n_chunks) {
    Fail(ErrorCode::kCapacityExceeded,
         "only " + std::to_string(next_chunk) + " of " + std::to_string(n_chunks) +
             " chunks could be embedded");
  }
  report.bits_embedded = report.vars_used * bits_per_var;
  report.tokens = fn.CodeTokenCount();
  result.source = fn.source();
  report.checks = lang::CheckWatermarked(source, result.source, "java");
  return result;
}

int MajorityVote(const std::vector<std::pair<int, double>>& votes, int classes, double* share) {
  std::vector<double> score(static_cast<std::size_t>(classes), 0.0);
  double total = 0.0;
  for (const auto& [value, conf] : votes) {
    score[static_cast<std::size_t>(value)] += conf;
    total += conf;
  }
  const auto best = std::max_element(score.begin(), score.end()) - score.begin();
  if (share) *share = total > 0.0 ? score[static_cast<std::size_t>(best)] / total : 0.0;
  return static_cast<int>(best);
}

ExtractResult Extract(std::string_view source, const nn::ModelBundle& m, const Framing& framing) {
  const lang::FunctionUnit fn = Java().Parse(source);
  const std::vector<lang::VariableBinding> bindings = lang::ListVariables(fn);
  if (bindings.empty()) Fail(ErrorCode::kNoVariables, "function declares no variables");
  if (framing.bits_per_var != m.config().bits_per_var) {
    Fail(ErrorCode::kInvalidArgument, "framing bits per variable differs from the model");
  }
  const int n_chunks = framing.num_chunks();
  if (n_chunks < 1) Fail(ErrorCode::kInvalidArgument, "framing has no message bits");
  const std::set<int> skipped(framing.skipped.begin(), framing.skipped.end());

  ExtractResult r;
  std::vector<std::vector<std::pair<int, double>>> votes(static_cast<std::size_t>(n_chunks));
  int slot = 0;
  for (const auto& b : bindings) {
    const nn::Vector p = nn::ClassifyProbabilities(m, VariableGraph(fn, b, m));
    Eigen::Index best = 0;
    const double conf = p.maxCoeff(&best);
    r.predicted.push_back(static_cast<int>(best));
    r.confidence.push_back(conf);
    if (skipped.count(b.ordinal) != 0) continue;
    votes[static_cast<std::size_t>(slot % n_chunks)].emplace_back(static_cast<int>(best), conf);
    ++slot;
  }
  if (slot < n_chunks) {
    Fail(ErrorCode::kCapacityExceeded, "fewer carrier variables than message chunks");
  }
  for (int c = 0; c < n_chunks; ++c) {
    double share = 0.0;
    const int value = MajorityVote(votes[static_cast<std::size_t>(c)], m.config().classes(), &share);
    r.chunk_confidence.push_back(share);
    for (int bit : ChunkBits(value, framing.bits_per_var)) r.message.bits.push_back(bit);
  }
  r.message.bits.resize(static_cast<std::size_t>(framing.message_bits));
  return r;
}

}  // namespace varmark::wm
