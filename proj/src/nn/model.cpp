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

#include "varmark/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "varmark/common/error.hpp"

namespace varmark::nn {

namespace {

constexpr char kMagic[8] = {'V', 'A', 'R', 'M', 'A', 'R', 'K', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr double kMasked = -1e9;
const char* const kSides[] = {"embed", "extract"};

std::uint64_t NameHash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Matrix Xavier(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-a, a);
  return m;
}

Matrix Gaussian(int rows, int cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.Normal();
  return m;
}

std::string LayerName(std::string_view side, int layer, std::string_view what) {
  return std::string(side) + ".gat" + std::to_string(layer) + "." + std::string(what);
}

template <typename T>
void WritePod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) Fail(ErrorCode::kSchemaError, "truncated checkpoint");
  return v;
}

std::string HexHash(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace

void ModelConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, std::string("invalid model config: ") + what);
  };
  require(bits_per_var >= 1 && bits_per_var <= 8, "bits_per_var must be in [1, 8]");
  require(feature_dim > 0 && head_dim > 0, "dims must be positive");
  require(feature_dim % heads() == 0, "feature_dim must be divisible by 2^bits_per_var");
  require(gat_layers >= 1, "gat_layers must be >= 1");
  require(decoder_embed > 0 && decoder_hidden > 0 && classifier_hidden > 0, "dims must be positive");
  require(max_name_len >= 1, "max_name_len must be >= 1");
  require(attention_dropout >= 0.0 && attention_dropout < 1.0, "dropout must be in [0, 1)");
}

ModelBundle::ModelBundle(ModelConfig config, graph::Vocabulary subtokens, graph::Vocabulary kinds)
    : config_(config), subtokens_(std::move(subtokens)), kinds_(std::move(kinds)) {
  config_.Validate();
}

ModelBundle::ModelBundle(ModelConfig config, graph::Vocabulary subtokens, graph::Vocabulary kinds,
                         std::uint64_t seed)
    : ModelBundle(config, std::move(subtokens), std::move(kinds)) {
  Init(seed);
}

void ModelBundle::Init(std::uint64_t seed) {
  const ModelConfig& c = config_;
  const int k = c.heads();
  const int v = subtokens_.size();
  auto rng_for = [&](const std::string& name) { return Rng(DeriveSeed(seed, {NameHash(name)})); };
  auto add_xavier = [&](const std::string& name, int rows, int cols) {
    Rng rng = rng_for(name);
    params_.Add(name, Xavier(rows, cols, rng));
  };
  auto add_gauss = [&](const std::string& name, int rows, int cols) {
    Rng rng = rng_for(name);
    params_.Add(name, Gaussian(rows, cols, 0.1, rng));
  };
  auto add_zero = [&](const std::string& name, int rows, int cols) {
    params_.Add(name, Matrix::Zero(rows, cols));
  };
  for (const char* side : kSides) {
    add_gauss(std::string(side) + ".kind", kinds_.size(), c.feature_dim);
    add_gauss(std::string(side) + ".sub", v, c.feature_dim);
    for (int l = 0; l < c.gat_layers; ++l) {
      const int out = l + 1 < c.gat_layers ? c.feature_dim / k : c.head_dim;
      add_xavier(LayerName(side, l, "W"), c.feature_dim, k * out);
      add_xavier(LayerName(side, l, "a_src"), 1, k * out);
      add_xavier(LayerName(side, l, "a_dst"), 1, k * out);
      add_zero(LayerName(side, l, "rel_bias"), k, 6);
    }
  }
  const int h = c.decoder_hidden;
  add_gauss("dec.embed", v, c.decoder_embed);
  add_xavier("dec.Wx", c.decoder_embed, 4 * h);
  add_xavier("dec.Wh", h, 4 * h);
  Matrix bias = Matrix::Zero(1, 4 * h);
  bias.middleCols(h, h).setOnes();
  params_.Add("dec.b", std::move(bias));
  add_xavier("dec.h0.W", c.head_dim, h);
  add_zero("dec.h0.b", 1, h);
  add_xavier("dec.c0.W", c.head_dim, h);
  add_zero("dec.c0.b", 1, h);
  add_xavier("dec.out.W", h, v);
  add_zero("dec.out.b", 1, v);
  add_xavier("cls.W1", k * c.head_dim, c.classifier_hidden);
  add_zero("cls.b1", 1, c.classifier_hidden);
  add_xavier("cls.W2", c.classifier_hidden, c.classes());
  add_zero("cls.b2", 1, c.classes());
}

void ModelBundle::QuantizeToFloat() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Matrix& m = params_.at(i).value;
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      m.data()[j] = static_cast<double>(static_cast<float>(m.data()[j]));
    }
  }
}

std::string ModelBundle::ConfigEcho() const {
  const ModelConfig& c = config_;
  nlohmann::json j{
      {"format_version", kFormatVersion},
      {"bits_per_var", c.bits_per_var},
      {"heads", c.heads()},
      {"feature_dim", c.feature_dim},
      {"head_dim", c.head_dim},
      {"gat_layers", c.gat_layers},
      {"decoder_embed", c.decoder_embed},
      {"decoder_hidden", c.decoder_hidden},
      {"classifier_hidden", c.classifier_hidden},
      {"max_name_len", c.max_name_len},
      {"attention_dropout", c.attention_dropout},
      {"leaky_slope", c.leaky_slope},
      {"subtoken_vocab_size", subtokens_.size()},
      {"subtoken_vocab_hash", HexHash(subtokens_.Hash())},
      {"kind_vocab_size", kinds_.size()},
      {"kind_vocab_hash", HexHash(kinds_.Hash())},
  };
  return j.dump();
}

void ModelBundle::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot write checkpoint: " + path.string());
  nlohmann::json header = nlohmann::json::parse(ConfigEcho());
  header["train_config"] = train_config_;
  std::vector<std::string> sub(subtokens_.tokens().begin() + graph::Vocabulary::kNumSpecials,
                               subtokens_.tokens().end());
  std::vector<std::string> kinds(kinds_.tokens().begin() + graph::Vocabulary::kNumSpecials,
                                 kinds_.tokens().end());
  header["subtokens"] = sub;
  header["kinds"] = kinds;
  const std::string text = header.dump();
  out.write(kMagic, sizeof(kMagic));
  WritePod<std::uint32_t>(out, kFormatVersion);
  WritePod<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(params_.size()));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Parameter& p = params_.at(i);
    WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rows()));
    WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.cols()));
    for (Eigen::Index j = 0; j < p.value.size(); ++j) {
      WritePod<float>(out, static_cast<float>(p.value.data()[j]));
    }
  }
  if (!out) Fail(ErrorCode::kIoError, "failed writing checkpoint: " + path.string());
}

ModelBundle ModelBundle::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open checkpoint: " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    Fail(ErrorCode::kSchemaError, "not a checkpoint: " + path.string());
  }
  const auto version = ReadPod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    Fail(ErrorCode::kSchemaError, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = ReadPod<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) Fail(ErrorCode::kSchemaError, "truncated checkpoint header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(text);
    ModelConfig c;
    c.bits_per_var = h.at("bits_per_var");
    c.feature_dim = h.at("feature_dim");
    c.head_dim = h.at("head_dim");
    c.gat_layers = h.at("gat_layers");
    c.decoder_embed = h.at("decoder_embed");
    c.decoder_hidden = h.at("decoder_hidden");
    c.classifier_hidden = h.at("classifier_hidden");
    c.max_name_len = h.at("max_name_len");
    c.attention_dropout = h.at("attention_dropout");
    c.leaky_slope = h.at("leaky_slope");
    graph::Vocabulary sub(h.at("subtokens").get<std::vector<std::string>>());
    graph::Vocabulary kinds(h.at("kinds").get<std::vector<std::string>>());
    if (HexHash(sub.Hash()) != h.at("subtoken_vocab_hash").get<std::string>() ||
        HexHash(kinds.Hash()) != h.at("kind_vocab_hash").get<std::string>()) {
      Fail(ErrorCode::kSchemaError, "vocabulary hash mismatch in checkpoint");
    }
    ModelBundle bundle(c, std::move(sub), std::move(kinds));
    bundle.Init(0);
    bundle.train_config_ = h.value("train_config", "");
    const auto count = ReadPod<std::uint32_t>(in);
    if (count != bundle.params_.size()) Fail(ErrorCode::kSchemaError, "parameter count mismatch");
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto name_len = ReadPod<std::uint32_t>(in);
      std::string name(name_len, '\0');
      in.read(name.data(), name_len);
      const auto rows = ReadPod<std::uint32_t>(in);
      const auto cols = ReadPod<std::uint32_t>(in);
      if (!bundle.params_.Has(name)) Fail(ErrorCode::kSchemaError, "unexpected tensor " + name);
      Matrix& m = bundle.params_.Get(name).value;
      if (m.rows() != rows || m.cols() != cols) Fail(ErrorCode::kSchemaError, "shape mismatch for " + name);
      for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = static_cast<double>(ReadPod<float>(in));
    }
    return bundle;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kSchemaError, std::string("bad checkpoint header: ") + e.what());
  }
}

// ---- building blocks ------------------------------------------------------

EdgeList ToEdgeList(const graph::GraphInput& g) {
  return EdgeList{g.edge_src, g.edge_dst, g.edge_rel};
}

Var EmbedSideFeatures(Tape& t, const ModelBundle& m, const graph::GraphInput& g) {
  std::vector<std::vector<int>> lists = g.subtokens;
  lists[static_cast<std::size_t>(g.target)] = {graph::Vocabulary::kMask};
  const Var kind = t.GatherRows(t.Param(m.P("embed.kind")), g.kind_ids);
  const Var sub = t.BagMean(t.Param(m.P("embed.sub")), lists);
  return t.Add(kind, sub);
}

Var ExtractSideFeatures(Tape& t, const ModelBundle& m, const graph::GraphInput& g,
                        Var name_embedding) {
  std::vector<std::vector<int>> lists = g.subtokens;
  lists[static_cast<std::size_t>(g.target)] =
      name_embedding.valid() ? std::vector<int>{} : g.target_subtokens;
  const Var kind = t.GatherRows(t.Param(m.P("extract.kind")), g.kind_ids);
  const Var sub = t.BagMean(t.Param(m.P("extract.sub")), lists);
  Var x = t.Add(kind, sub);
  if (name_embedding.valid()) x = t.AddToRow(x, g.target, name_embedding);
  return x;
}

Var GatLayer(Tape& t, Var x, Var w, Var attn_src, Var attn_dst, Var rel_bias,
             const EdgeList& edges, int heads, double slope, bool relu,
             const std::vector<double>* keep_scale) {
  const Var hw = t.MatMul(x, w);
  const Var agg = t.GraphAttention(hw, attn_src, attn_dst, rel_bias, edges, heads, slope, keep_scale);
  return relu ? t.Relu(agg) : agg;
}

Var EncodeGraph(Tape& t, const ModelBundle& m, std::string_view side, Var features,
                const graph::GraphInput& g, Rng* dropout_rng) {
  const ModelConfig& c = m.config();
  const EdgeList edges = ToEdgeList(g);
  const int k = c.heads();
  Var x = features;
  for (int l = 0; l < c.gat_layers; ++l) {
    std::vector<double> keep;
    if (dropout_rng != nullptr && c.attention_dropout > 0.0) {
      keep.resize(edges.size() * static_cast<std::size_t>(k));
      const double scale = 1.0 / (1.0 - c.attention_dropout);
      for (double& v : keep) v = dropout_rng->Bernoulli(c.attention_dropout) ? 0.0 : scale;
    }
    x = GatLayer(t, x, t.Param(m.P(LayerName(side, l, "W"))),
                 t.Param(m.P(LayerName(side, l, "a_src"))),
                 t.Param(m.P(LayerName(side, l, "a_dst"))),
                 t.Param(m.P(LayerName(side, l, "rel_bias"))), edges, k, c.leaky_slope, true,
                 keep.empty() ? nullptr : &keep);
  }
  return x;
}

Var SelectHead(Tape& t, Var row, int class_index, int heads) {
  const auto cols = static_cast<int>(t.value(row).cols());
  if (class_index < 0 || class_index >= heads) {
    Fail(ErrorCode::kIndexOutOfRange, "chunk " + std::to_string(class_index) + " has no head");
  }
  const int width = cols / heads;
  return t.SliceCols(row, class_index * width, width);
}

DecoderState DecoderInit(Tape& t, const ModelBundle& m, Var z) {
  DecoderState s;
  s.h = t.AddRow(t.MatMul(z, t.Param(m.P("dec.h0.W"))), t.Param(m.P("dec.h0.b")));
  s.c = t.AddRow(t.MatMul(z, t.Param(m.P("dec.c0.W"))), t.Param(m.P("dec.c0.b")));
  return s;
}

Var DecoderStep(Tape& t, const ModelBundle& m, DecoderState& state, Var input) {
  const int h = m.config().decoder_hidden;
  const Var gates = t.AddRow(t.Add(t.MatMul(input, t.Param(m.P("dec.Wx"))),
                                   t.MatMul(state.h, t.Param(m.P("dec.Wh")))),
                             t.Param(m.P("dec.b")));
  const Var i = t.Sigmoid(t.SliceCols(gates, 0, h));
  const Var f = t.Sigmoid(t.SliceCols(gates, h, h));
  const Var g = t.Tanh(t.SliceCols(gates, 2 * h, h));
  const Var o = t.Sigmoid(t.SliceCols(gates, 3 * h, h));
  state.c = t.Add(t.Mul(f, state.c), t.Mul(i, g));
  state.h = t.Mul(o, t.Tanh(state.c));
  return t.AddRow(t.MatMul(state.h, t.Param(m.P("dec.out.W"))), t.Param(m.P("dec.out.b")));
}

Matrix DecoderLogitMask(int vocab_size, int step) {
  Matrix mask = Matrix::Zero(1, vocab_size);
  mask(0, graph::Vocabulary::kUnk) = kMasked;
  mask(0, graph::Vocabulary::kMask) = kMasked;
  mask(0, graph::Vocabulary::kBos) = kMasked;
  if (step == 0) mask(0, graph::Vocabulary::kEnd) = kMasked;
  return mask;
}

GumbelDecodeResult GumbelDecode(Tape& t, const ModelBundle& m, Var z, double tau, Rng& rng,
                                bool hard) {
  const int v = m.subtokens().size();
  const int max_len = m.config().max_name_len;
  GumbelDecodeResult r;
  DecoderState state = DecoderInit(t, m, z);
  const Var dec_embed = t.Param(m.P("dec.embed"));
  const Var ext_sub = t.Param(m.P("extract.sub"));
  Var input = t.GatherRows(dec_embed, {graph::Vocabulary::kBos});
  Matrix one(1, 1);
  one(0, 0) = 1.0;
  Var alive = t.Constant(one);
  Var num;
  Var den;
  bool ended = false;
  for (int step = 0; step < max_len; ++step) {
    const Var logits = t.Add(DecoderStep(t, m, state, input), t.Constant(DecoderLogitMask(v, step)));
    Matrix noise(1, v);
    for (int j = 0; j < v; ++j) noise(0, j) = rng.Gumbel();
    const Var y = t.GumbelSoftmax(logits, noise, tau, hard);
    r.logits.push_back(logits);
    r.samples.push_back(y);
    Eigen::Index best = 0;
    t.value(y).row(0).maxCoeff(&best);
    if (!ended) r.tokens.push_back(static_cast<int>(best));
    if (best == graph::Vocabulary::kEnd) ended = true;
    const Var keep = t.Mul(alive, t.OneMinus(t.Element(y, graph::Vocabulary::kEnd)));
    const Var emb = t.ScaleBy(t.MatMul(y, ext_sub), keep);
    num = num.valid() ? t.Add(num, emb) : emb;
    den = den.valid() ? t.Add(den, keep) : keep;
    alive = keep;
    input = t.MatMul(y, dec_embed);
  }
  r.name_embedding = t.ScaleBy(num, t.Reciprocal(den));
  return r;
}

Var ClassifierLogits(Tape& t, const ModelBundle& m, Var repr) {
  if (t.value(repr).cols() != m.P("cls.W1").value.rows()) {
    Fail(ErrorCode::kDimensionMismatch, "classifier input width");
  }
  const Var hidden = t.Relu(t.AddRow(t.MatMul(repr, t.Param(m.P("cls.W1"))), t.Param(m.P("cls.b1"))));
  return t.AddRow(t.MatMul(hidden, t.Param(m.P("cls.W2"))), t.Param(m.P("cls.b2")));
}

// ---- inference ------------------------------------------------------------

Vector EmbedRepresentation(const ModelBundle& m, const graph::GraphInput& g) {
  Tape t(false);
  const Var enc = EncodeGraph(t, m, "embed", EmbedSideFeatures(t, m, g), g, nullptr);
  return t.value(enc).row(g.target).transpose();
}

Vector SelectHead(const Vector& h_concat, int class_index, int heads) {
  if (heads <= 0 || class_index < 0 || class_index >= heads) {
    Fail(ErrorCode::kIndexOutOfRange, "chunk " + std::to_string(class_index) + " has no head");
  }
  const Eigen::Index width = h_concat.size() / heads;
  return h_concat.segment(class_index * width, width);
}

namespace {

Vector LogSoftmax(const Matrix& row) {
  const double mx = row.maxCoeff();
  const double lse = mx + std::log((row.array() - mx).exp().sum());
  return (row.array() - lse).matrix().transpose();
}

struct Hyp {
  std::vector<int> tokens;
  double log_prob = 0.0;
  Matrix h;
  Matrix c;
};

}  // namespace

std::vector<BeamCandidate> BeamSearch(const ModelBundle& m, const Vector& z, int width,
                                      int max_len) {
  const int v = m.subtokens().size();
  if (v <= graph::Vocabulary::kNumSpecials) Fail(ErrorCode::kEmptyOutput, "vocabulary has no subtokens");
  if (width < 1) Fail(ErrorCode::kInvalidArgument, "beam width must be >= 1");
  const Matrix& dec_embed = m.P("dec.embed").value;
  Tape t0(false);
  const DecoderState s0 = DecoderInit(t0, m, t0.Constant(z.transpose()));
  std::vector<Hyp> alive{Hyp{{}, 0.0, t0.value(s0.h), t0.value(s0.c)}};
  std::vector<BeamCandidate> finished;
  for (int step = 0; step <= max_len && !alive.empty(); ++step) {
    struct Cand {
      double score;
      std::size_t hyp;
      int token;
    };
    std::vector<Cand> cands;
    std::vector<Hyp> stepped(alive.size());
    for (std::size_t hi = 0; hi < alive.size(); ++hi) {
      Tape t(false);
      DecoderState s{t.Constant(alive[hi].h), t.Constant(alive[hi].c)};
      const int prev = alive[hi].tokens.empty() ? graph::Vocabulary::kBos : alive[hi].tokens.back();
      Matrix mask = DecoderLogitMask(v, step);
      if (step == max_len) {
        mask.setConstant(kMasked);
        mask(0, graph::Vocabulary::kEnd) = 0.0;
      }
      const Var logits = t.Add(DecoderStep(t, m, s, t.Constant(dec_embed.row(prev))), t.Constant(mask));
      const Vector logp = LogSoftmax(t.value(logits));
      stepped[hi].h = t.value(s.h);
      stepped[hi].c = t.value(s.c);
      for (int j = 0; j < v; ++j) {
        if (mask(0, j) < 0.0) continue;
        cands.push_back(Cand{alive[hi].log_prob + logp(j), hi, j});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.hyp != b.hyp) return a.hyp < b.hyp;
      return a.token < b.token;
    });
    std::vector<Hyp> next;
    for (const Cand& cand : cands) {
      if (cand.token == graph::Vocabulary::kEnd) {
        finished.push_back(BeamCandidate{alive[cand.hyp].tokens, cand.score});
      } else if (static_cast<int>(next.size()) < width) {
        Hyp h{alive[cand.hyp].tokens, cand.score, stepped[cand.hyp].h, stepped[cand.hyp].c};
        h.tokens.push_back(cand.token);
        next.push_back(std::move(h));
      }
    }
    alive = std::move(next);
    if (static_cast<int>(finished.size()) >= width && !alive.empty()) {
      std::vector<double> scores;
      for (const auto& f : finished) scores.push_back(f.log_prob);
      std::nth_element(scores.begin(), scores.begin() + (width - 1), scores.end(), std::greater<>());
      if (alive.front().log_prob <= scores[static_cast<std::size_t>(width - 1)]) break;
    }
  }
  std::stable_sort(finished.begin(), finished.end(), [](const BeamCandidate& a, const BeamCandidate& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.tokens < b.tokens;
  });
  if (static_cast<int>(finished.size()) > width) finished.resize(static_cast<std::size_t>(width));
  return finished;
}

std::vector<int> GreedyDecode(const ModelBundle& m, const Vector& z, int max_len) {
  const auto beams = BeamSearch(m, z, 1, max_len);
  return beams.empty() ? std::vector<int>{} : beams.front().tokens;
}

double SequenceLogProb(const ModelBundle& m, const Vector& z, const std::vector<int>& tokens,
                       int max_len) {
  const int v = m.subtokens().size();
  Tape t(false);
  DecoderState s = DecoderInit(t, m, t.Constant(z.transpose()));
  const Matrix& dec_embed = m.P("dec.embed").value;
  double total = 0.0;
  int prev = graph::Vocabulary::kBos;
  for (std::size_t step = 0; step <= tokens.size(); ++step) {
    Matrix mask = DecoderLogitMask(v, static_cast<int>(step));
    if (static_cast<int>(step) == max_len) {
      mask.setConstant(kMasked);
      mask(0, graph::Vocabulary::kEnd) = 0.0;
    }
    const Var logits = t.Add(DecoderStep(t, m, s, t.Constant(dec_embed.row(prev))), t.Constant(mask));
    const Vector logp = LogSoftmax(t.value(logits));
    const int tok = step < tokens.size() ? tokens[step] : graph::Vocabulary::kEnd;
    total += logp(tok);
    prev = tok;
  }
  return total;
}

Vector ClassifyProbabilities(const ModelBundle& m, const graph::GraphInput& g) {
  Tape t(false);
  const Var enc = EncodeGraph(t, m, "extract", ExtractSideFeatures(t, m, g), g, nullptr);
  const Var logits = ClassifierLogits(t, m, t.Row(enc, g.target));
  return Softmax(t.value(logits).row(0).transpose());
}

Vector Softmax(const Vector& logits) {
  const double mx = logits.maxCoeff();
  Vector e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

}  // namespace varmark::nn
