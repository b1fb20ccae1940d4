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

// Central-difference gradient checks for tape operations and model layers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "varmark/common/rng.hpp"
#include "varmark/graph/vocabulary.hpp"
#include "varmark/nn/model.hpp"
#include "varmark/train/trainer.hpp"

namespace varmark::gradcheck {

using nn::Matrix;
using nn::Tape;
using nn::Var;

inline Matrix Random(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(lo, hi);
  return m;
}

// Scalar loss built from the current parameter values.
using LossFn = std::function<Var(Tape&)>;

// Below 1e-5 in magnitude the comparison is effectively absolute: central
// differences carry about 1e-11 of rounding noise at h = 1e-5.
inline double RelError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-5});
}

// Largest relative error between backprop and central differences over up to
// `per_param` entries of each parameter.
inline double MaxRelError(nn::ParameterSet& ps, const LossFn& loss, int per_param = 24, double h = 1e-5) {
  nn::Gradients grads = ps.ZeroGradients();
  {
    Tape t;
    t.Backward(loss(t), &grads);
  }
  auto eval = [&] {
    Tape t(false);
    return t.scalar(loss(t));
  };
  double worst = 0.0;
  for (std::size_t p = 0; p < ps.size(); ++p) {
    Matrix& value = ps.at(p).value;
    const Eigen::Index n = value.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / per_param);
    for (Eigen::Index i = 0; i < n; i += stride) {
      const double saved = value.data()[i];
      value.data()[i] = saved + h;
      const double up = eval();
      value.data()[i] = saved - h;
      const double down = eval();
      value.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, RelError(grads[p].data()[i], numeric));
    }
  }
  return worst;
}

// Weighted sum of an output, so that every output entry matters.
inline Var Project(Tape& t, Var out, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix& v = t.value(out);
  return t.Sum(t.Mul(out, t.Constant(Random(static_cast<int>(v.rows()), static_cast<int>(v.cols()), rng))));
}

struct Case {
  std::string name;
  std::function<double()> run;
};

// One case per tape operation, each on fresh random inputs.
inline std::vector<Case> OperationCases() {
  std::vector<Case> cases;
  auto unary = [&](std::string name, std::function<Var(Tape&, Var)> op, double lo = -1.0, double hi = 1.0) {
    cases.push_back({name, [op, lo, hi, name] {
                       Rng rng(std::hash<std::string>{}(name));
                       nn::ParameterSet ps;
                       const auto& a = ps.Add("a", Random(3, 4, rng, lo, hi));
                       return MaxRelError(ps, [&](Tape& t) { return Project(t, op(t, t.Param(a)), 7); });
                     }});
  };
  auto binary = [&](std::string name, std::function<Var(Tape&, Var, Var)> op, int ar, int ac, int br, int bc) {
    cases.push_back({name, [=] {
                       Rng rng(std::hash<std::string>{}(name));
                       nn::ParameterSet ps;
                       const auto& a = ps.Add("a", Random(ar, ac, rng));
                       const auto& b = ps.Add("b", Random(br, bc, rng));
                       return MaxRelError(ps, [&](Tape& t) { return Project(t, op(t, t.Param(a), t.Param(b)), 7); });
                     }});
  };
  binary("matmul", [](Tape& t, Var a, Var b) { return t.MatMul(a, b); }, 3, 4, 4, 2);
  binary("add", [](Tape& t, Var a, Var b) { return t.Add(a, b); }, 3, 4, 3, 4);
  binary("sub", [](Tape& t, Var a, Var b) { return t.Sub(a, b); }, 3, 4, 3, 4);
  binary("mul", [](Tape& t, Var a, Var b) { return t.Mul(a, b); }, 3, 4, 3, 4);
  binary("add_row", [](Tape& t, Var a, Var b) { return t.AddRow(a, b); }, 3, 4, 1, 4);
  binary("scale_by", [](Tape& t, Var a, Var b) { return t.ScaleBy(a, b); }, 3, 4, 1, 1);
  binary("concat_cols", [](Tape& t, Var a, Var b) { return t.ConcatCols({a, b, a}); }, 3, 4, 3, 2);
  binary("concat_rows", [](Tape& t, Var a, Var b) { return t.ConcatRows({a, b}); }, 3, 4, 2, 4);
  binary("add_to_row", [](Tape& t, Var a, Var b) { return t.AddToRow(a, 1, b); }, 3, 4, 1, 4);
  binary("soft_cross_entropy_logits", [](Tape& t, Var a, Var b) {
    Matrix target(2, 4);
    target << 0.1, 0.2, 0.3, 0.4, 0.0, 1.0, 0.0, 0.0;
    return t.Add(t.SoftCrossEntropy(a, target), t.Sum(b));
  }, 2, 4, 1, 1);
  unary("scale", [](Tape& t, Var a) { return t.Scale(a, -2.5); });
  unary("add_scalar", [](Tape& t, Var a) { return t.AddScalar(a, 0.75); });
  unary("one_minus", [](Tape& t, Var a) { return t.OneMinus(a); });
  unary("reciprocal", [](Tape& t, Var a) { return t.Reciprocal(a); }, 0.5, 2.0);
  unary("relu", [](Tape& t, Var a) { return t.Relu(a); });
  unary("leaky_relu", [](Tape& t, Var a) { return t.LeakyRelu(a, 0.2); });
  unary("sigmoid", [](Tape& t, Var a) { return t.Sigmoid(a); });
  unary("tanh", [](Tape& t, Var a) { return t.Tanh(a); });
  unary("exp", [](Tape& t, Var a) { return t.Exp(a); });
  unary("log", [](Tape& t, Var a) { return t.Log(a); }, 0.5, 2.0);
  unary("sum", [](Tape& t, Var a) { return t.Sum(a); });
  unary("element", [](Tape& t, Var a) { return t.Element(t.Row(a, 1), 2); });
  unary("slice_cols", [](Tape& t, Var a) { return t.SliceCols(a, 1, 2); });
  unary("row", [](Tape& t, Var a) { return t.Row(a, 2); });
  unary("gather_rows", [](Tape& t, Var a) { return t.GatherRows(a, {2, 0, 2, 1}); });
  unary("bag_mean", [](Tape& t, Var a) { return t.BagMean(a, {{0, 1}, {}, {2, 2, 1}}); });
  unary("softmax_rows", [](Tape& t, Var a) { return t.SoftmaxRows(a); });
  unary("log_softmax_rows", [](Tape& t, Var a) { return t.LogSoftmaxRows(a); });
  unary("gumbel_softmax_soft", [](Tape& t, Var a) {
    Rng rng(5);
    Matrix noise(3, 4);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = rng.Gumbel();
    return t.GumbelSoftmax(a, noise, 0.5, false);
  });
  cases.push_back({"graph_attention", [] {
                     Rng rng(11);
                     nn::ParameterSet ps;
                     const int heads = 2, width = 3, nodes = 5;
                     const auto& h = ps.Add("h", Random(nodes, heads * width, rng));
                     const auto& as = ps.Add("as", Random(1, heads * width, rng));
                     const auto& ad = ps.Add("ad", Random(1, heads * width, rng));
                     const auto& rb = ps.Add("rb", Random(heads, 6, rng));
                     nn::EdgeList e{{0, 1, 2, 3, 4, 1, 2, 0}, {1, 2, 3, 4, 0, 0, 1, 0}, {0, 1, 0, 3, 4, 3, 4, 2}};
                     std::vector<double> keep;
                     for (std::size_t i = 0; i < e.size() * heads; ++i) keep.push_back(i % 3 == 0 ? 0.0 : 1.25);
                     return MaxRelError(ps, [&](Tape& t) {
                       return Project(t, t.GraphAttention(t.Param(h), t.Param(as), t.Param(ad), t.Param(rb), e, heads,
                                                          0.2, &keep), 3);
                     });
                   }});
  return cases;
}

// Model small enough for exhaustive finite differences.
inline nn::ModelBundle TinyModel(std::uint64_t seed = 3) {
  nn::ModelConfig c;
  c.bits_per_var = 2;
  c.feature_dim = 8;
  c.head_dim = 4;
  c.gat_layers = 2;
  c.decoder_embed = 5;
  c.decoder_hidden = 6;
  c.classifier_hidden = 5;
  c.max_name_len = 3;
  c.attention_dropout = 0.0;
  graph::Vocabulary subtokens({"count", "index", "total", "value", "sum", "item"});
  graph::Vocabulary kinds({"identifier", "binary_expression", "expression_statement", "+", "="});
  nn::ModelBundle m(c, subtokens, kinds, seed);
  // Non-zero biases so that their gradients are exercised.
  Rng rng(seed + 1);
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    auto& p = m.params().at(i);
    if (p.value.isZero()) p.value = Random(static_cast<int>(p.value.rows()), static_cast<int>(p.value.cols()), rng, -0.3, 0.3);
  }
  return m;
}

// Random connected 5-node graph with reverse edges and a target self loop.
inline graph::GraphInput RandomGraph(std::uint64_t seed, int kinds = 9, int subtokens = 10) {
  Rng rng(seed);
  graph::GraphInput g;
  const int n = 5;
  for (int i = 0; i < n; ++i) {
    g.kind_ids.push_back(static_cast<int>(rng.Index(static_cast<std::uint64_t>(kinds))));
    std::vector<int> subs;
    if (rng.Bernoulli(0.6)) subs.push_back(4 + static_cast<int>(rng.Index(static_cast<std::uint64_t>(subtokens - 4))));
    g.subtokens.push_back(subs);
  }
  g.target = 2;
  g.target_subtokens = {4, 6};
  g.subtokens[2] = g.target_subtokens;
  auto add = [&](int s, int d, int r) {
    g.edge_src.push_back(s);
    g.edge_dst.push_back(d);
    g.edge_rel.push_back(r);
  };
  for (int i = 1; i < n; ++i) {
    const int parent = static_cast<int>(rng.Index(static_cast<std::uint64_t>(i)));
    add(parent, i, 0);
    add(i, parent, 3);
  }
  add(0, 4, 1);
  add(4, 0, 4);
  add(2, 2, 2);
  add(2, 2, 5);
  return g;
}

// Soft-sample counterpart of the training forward pass; differentiable end
// to end, so finite differences apply.
inline Var SoftPipelineLoss(Tape& t, const nn::ModelBundle& m, const graph::GraphInput& g, int chunk,
                            double alpha) {
  Rng rng(17);
  const int v = m.subtokens().size();
  const Var h = nn::EncodeGraph(t, m, "embed", nn::EmbedSideFeatures(t, m, g), g, nullptr);
  const Var z = nn::SelectHead(t, t.Row(h, g.target), chunk, m.config().heads());
  const nn::GumbelDecodeResult dec = nn::GumbelDecode(t, m, z, 0.5, rng, false);
  Matrix label = Matrix::Zero(1, v);
  label(0, 5) = 0.7;
  label(0, 6) = 0.3;
  const Var l_na = t.SoftCrossEntropy(dec.logits[0], label);
  const Var x = nn::ExtractSideFeatures(t, m, g, dec.name_embedding);
  const Var logits = nn::ClassifierLogits(t, m, t.Row(nn::EncodeGraph(t, m, "extract", x, g, nullptr), g.target));
  Matrix onehot = Matrix::Zero(1, m.config().classes());
  onehot(0, chunk) = 1.0;
  return t.Add(t.Scale(t.SoftCrossEntropy(logits, onehot), alpha), t.Scale(l_na, 1.0 - alpha));
}

inline std::vector<Case> LayerCases() {
  std::vector<Case> cases;
  cases.push_back({"gat_layer", [] {
                     Rng rng(21);
                     nn::ParameterSet ps;
                     const auto& x = ps.Add("x", Random(5, 6, rng));
                     const auto& w = ps.Add("w", Random(6, 8, rng));
                     const auto& as = ps.Add("as", Random(1, 8, rng));
                     const auto& ad = ps.Add("ad", Random(1, 8, rng));
                     const auto& rb = ps.Add("rb", Random(4, 6, rng));
                     const nn::EdgeList e = nn::ToEdgeList(RandomGraph(4));
                     return MaxRelError(ps, [&](Tape& t) {
                       return Project(t, nn::GatLayer(t, t.Param(x), t.Param(w), t.Param(as), t.Param(ad), t.Param(rb),
                                                      e, 4, 0.2, true, nullptr), 5);
                     });
                   }});
  auto model_case = [&](std::string name, std::function<Var(Tape&, const nn::ModelBundle&, const graph::GraphInput&)> f) {
    cases.push_back({name, [f, name] {
                       nn::ModelBundle m = TinyModel();
                       const graph::GraphInput g = RandomGraph(std::hash<std::string>{}(name), m.kinds().size(),
                                                               m.subtokens().size());
                       return MaxRelError(m.params(), [&](Tape& t) { return f(t, m, g); }, 12);
                     }});
  };
  model_case("embed_encoder", [](Tape& t, const nn::ModelBundle& m, const graph::GraphInput& g) {
    return Project(t, nn::EncodeGraph(t, m, "embed", nn::EmbedSideFeatures(t, m, g), g, nullptr), 1);
  });
  model_case("extract_encoder", [](Tape& t, const nn::ModelBundle& m, const graph::GraphInput& g) {
    return Project(t, nn::EncodeGraph(t, m, "extract", nn::ExtractSideFeatures(t, m, g), g, nullptr), 2);
  });
  model_case("decoder_lstm", [](Tape& t, const nn::ModelBundle& m, const graph::GraphInput&) {
    Rng rng(8);
    const Var z = t.Constant(Random(1, m.config().head_dim, rng));
    nn::DecoderState s = nn::DecoderInit(t, m, z);
    Var input = t.GatherRows(t.Param(m.P("dec.embed")), {graph::Vocabulary::kBos});
    Var total;
    for (int step = 0; step < 3; ++step) {
      const Var logits = nn::DecoderStep(t, m, s, input);
      const Var p = Project(t, t.LogSoftmaxRows(logits), 30 + static_cast<std::uint64_t>(step));
      total = total.valid() ? t.Add(total, p) : p;
      input = t.MatMul(t.SoftmaxRows(logits), t.Param(m.P("dec.embed")));
    }
    return total;
  });
  model_case("gumbel_decoder", [](Tape& t, const nn::ModelBundle& m, const graph::GraphInput&) {
    Rng rng(9);
    const Var z = t.Constant(Random(1, m.config().head_dim, rng));
    const nn::GumbelDecodeResult dec = nn::GumbelDecode(t, m, z, 0.5, rng, false);
    return Project(t, dec.name_embedding, 4);
  });
  model_case("classifier", [](Tape& t, const nn::ModelBundle& m, const graph::GraphInput&) {
    Rng rng(10);
    const Var repr = t.Constant(Random(1, m.config().heads() * m.config().head_dim, rng));
    Matrix onehot = Matrix::Zero(1, m.config().classes());
    onehot(0, 1) = 1.0;
    return t.SoftCrossEntropy(nn::ClassifierLogits(t, m, repr), onehot);
  });
  model_case("full_soft_pipeline", [](Tape& t, const nn::ModelBundle& m, const graph::GraphInput& g) {
    return SoftPipelineLoss(t, m, g, 3, 0.6);
  });
  return cases;
}

// Training step at alpha = 1 with hard straight-through samples: the
// embedding-side encoder only receives gradient through the extraction loss.
inline double StraightThroughEncoderGradNorm() {
  nn::ModelBundle m = TinyModel();
  train::TrainSample s;
  s.graph = RandomGraph(12, m.kinds().size(), m.subtokens().size());
  s.label.k = 1;
  s.label.positions = {{{5, 1.0}}};
  nn::Gradients grads = m.params().ZeroGradients();
  train::RunSample(m, s, 2, 1.0, 0.5, 99, &grads, false);
  double sq = 0.0;
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    if (m.params().at(i).name.rfind("embed.", 0) == 0) sq += grads[i].squaredNorm();
  }
  return std::sqrt(sq);
}

}  // namespace varmark::gradcheck
