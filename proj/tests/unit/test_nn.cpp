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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

#include "../support/gradcheck.hpp"
#include "varmark/common/error.hpp"
#include "varmark/nn/model.hpp"
#include "varmark/train/trainer.hpp"

using namespace varmark;
using nn::Matrix;
using nn::Var;
using nn::Vector;

TEST_CASE("tape operations match central differences") {
  for (const auto& c : gradcheck::OperationCases()) {
    CAPTURE(c.name);
    CHECK(c.run() < 1e-4);
  }
}

TEST_CASE("model layers match central differences") {
  for (const auto& c : gradcheck::LayerCases()) {
    CAPTURE(c.name);
    CHECK(c.run() < 1e-4);
  }
}

TEST_CASE("straight-through samples carry the watermark loss into the embedding encoder") {
  CHECK(gradcheck::StraightThroughEncoderGradNorm() > 1e-8);
}

TEST_CASE("hard gumbel softmax is one-hot forward and soft backward") {
  nn::ParameterSet ps;
  Matrix logits(1, 4);
  logits << 0.3, -0.2, 1.5, 0.1;
  const auto& p = ps.Add("logits", logits);
  const Matrix noise = Matrix::Zero(1, 4);
  Matrix weights(1, 4);
  weights << 1.0, 2.0, 3.0, 4.0;
  nn::Gradients hard_grads = ps.ZeroGradients();
  nn::Gradients soft_grads = ps.ZeroGradients();
  {
    nn::Tape t;
    const nn::Var y = t.GumbelSoftmax(t.Param(p), noise, 0.5, true);
    CHECK(t.value(y)(0, 2) == 1.0);
    CHECK(t.value(y).sum() == 1.0);
    t.Backward(t.Sum(t.Mul(y, t.Constant(weights))), &hard_grads);
  }
  {
    nn::Tape t;
    const nn::Var y = t.GumbelSoftmax(t.Param(p), noise, 0.5, false);
    t.Backward(t.Sum(t.Mul(y, t.Constant(weights))), &soft_grads);
  }
  CHECK((hard_grads[0] - soft_grads[0]).norm() < 1e-12);
  CHECK(hard_grads[0].norm() > 0.0);
}

TEST_CASE("graph attention with zero logits averages incoming messages") {
  nn::Tape t(false);
  Matrix h(3, 2);
  h << 1, 2, 3, 4, 5, 6;
  const auto zero = [&](int cols) { return t.Constant(Matrix::Zero(1, cols)); };
  const nn::EdgeList e{{0, 1, 2, 0, 1}, {2, 2, 2, 0, 1}, {0, 0, 0, 2, 2}};
  const nn::Var out = t.GraphAttention(t.Constant(h), zero(2), zero(2), zero(6), e, 1, 0.2, nullptr);
  CHECK(t.value(out)(2, 0) == doctest::Approx(3.0));
  CHECK(t.value(out)(2, 1) == doctest::Approx(4.0));
  CHECK(t.value(out)(0, 0) == doctest::Approx(1.0));

  const nn::EdgeList isolated{{0, 1}, {2, 2}, {0, 0}};
  try {
    t.GraphAttention(t.Constant(h), zero(2), zero(2), zero(6), isolated, 1, 0.2, nullptr);
    FAIL("expected IsolatedNode");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kIsolatedNode);
  }
}

namespace {

// Exhaustive reference: log-probability of every sequence of up to max_len
// subtokens, scored step by step with the decoder cell.
std::vector<std::pair<double, std::vector<int>>> Enumerate(const nn::ModelBundle& m, const Vector& z, int max_len) {
  const int v = m.subtokens().size();
  std::vector<std::pair<double, std::vector<int>>> out;
  std::function<void(std::vector<int>&)> walk = [&](std::vector<int>& prefix) {
    nn::Tape t(false);
    nn::DecoderState s = nn::DecoderInit(t, m, t.Constant(z.transpose()));
    const Matrix& embed = m.P("dec.embed").value;
    double lp = 0.0;
    int prev = graph::Vocabulary::kBos;
    std::vector<double> last;
    for (std::size_t step = 0; step <= prefix.size(); ++step) {
      const Matrix logits = t.value(nn::DecoderStep(t, m, s, t.Constant(embed.row(prev))));
      std::vector<int> allowed;
      for (int j = graph::Vocabulary::kNumSpecials; j < v; ++j) allowed.push_back(j);
      if (step > 0) allowed.push_back(graph::Vocabulary::kEnd);
      if (static_cast<int>(step) == max_len) allowed = {graph::Vocabulary::kEnd};
      double mx = -1e300;
      for (int j : allowed) mx = std::max(mx, logits(0, j));
      double z_sum = 0.0;
      for (int j : allowed) z_sum += std::exp(logits(0, j) - mx);
      last.assign(static_cast<std::size_t>(v), -1e300);
      for (int j : allowed) last[static_cast<std::size_t>(j)] = logits(0, j) - mx - std::log(z_sum);
      if (step < prefix.size()) {
        lp += last[static_cast<std::size_t>(prefix[step])];
        prev = prefix[step];
      }
    }
    if (!prefix.empty()) out.push_back({lp + last[graph::Vocabulary::kEnd], prefix});
    if (static_cast<int>(prefix.size()) == max_len) return;
    for (int j = graph::Vocabulary::kNumSpecials; j < v; ++j) {
      prefix.push_back(j);
      walk(prefix);
      prefix.pop_back();
    }
  };
  std::vector<int> empty;
  walk(empty);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  return out;
}

}  // namespace

TEST_CASE("beam search agrees with exhaustive enumeration") {
  const nn::ModelBundle m = gradcheck::TinyModel(5);
  Rng rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    Vector z(m.config().head_dim);
    for (int i = 0; i < z.size(); ++i) z(i) = rng.Uniform(-2.0, 2.0);
    const int max_len = 3;
    const auto all = Enumerate(m, z, max_len);
    double mass = 0.0;
    for (const auto& s : all) mass += std::exp(s.first);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

    const auto full = nn::BeamSearch(m, z, static_cast<int>(all.size()), max_len);
    REQUIRE(full.size() == all.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
      CHECK(full[i].tokens == all[i].second);
      CHECK(full[i].log_prob == doctest::Approx(all[i].first).epsilon(1e-9));
    }
    for (int width : {1, 2, 4}) {
      const auto beams = nn::BeamSearch(m, z, width, max_len);
      REQUIRE(!beams.empty());
      CHECK(beams.front().log_prob <= all.front().first + 1e-12);
      for (const auto& b : beams) {
        CHECK(b.log_prob == doctest::Approx(nn::SequenceLogProb(m, z, b.tokens, max_len)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("beam search rejects a vocabulary without subtokens") {
  nn::ModelConfig c;
  c.feature_dim = 4;
  c.head_dim = 2;
  c.decoder_embed = 2;
  c.decoder_hidden = 2;
  c.classifier_hidden = 2;
  const nn::ModelBundle m(c, graph::Vocabulary(), graph::Vocabulary({"identifier"}), 1);
  CHECK_THROWS_AS(nn::BeamSearch(m, Vector::Zero(2), 3, 3), Error);
}

TEST_CASE("head selection picks the chunk's block") {
  Vector h(8);
  h << 0, 1, 2, 3, 4, 5, 6, 7;
  const Vector block = nn::SelectHead(h, 2, 4);
  CHECK(block.size() == 2);
  CHECK(block(0) == 4.0);
  CHECK(block(1) == 5.0);
  CHECK_THROWS_AS(nn::SelectHead(h, 4, 4), Error);
  CHECK_THROWS_AS(nn::SelectHead(h, -1, 4), Error);
}

TEST_CASE("zero classifier weights give uniform probabilities") {
  nn::ModelBundle m = gradcheck::TinyModel();
  for (const char* name : {"cls.W2", "cls.b2"}) m.params().Get(name).value.setZero();
  const Vector p = nn::ClassifyProbabilities(m, gradcheck::RandomGraph(1));
  for (int i = 0; i < p.size(); ++i) CHECK(p(i) == doctest::Approx(0.25));
}

TEST_CASE("quantized checkpoints survive a save/load cycle exactly") {
  nn::ModelBundle m = gradcheck::TinyModel(7);
  m.QuantizeToFloat();
  m.set_train_config("alpha = 0.6\n");
  const auto path = std::filesystem::temp_directory_path() / "varmark_unit_ckpt.bin";
  m.Save(path);
  const nn::ModelBundle back = nn::ModelBundle::Load(path);
  std::filesystem::remove(path);
  REQUIRE(back.params().size() == m.params().size());
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    CHECK(back.params().at(i).name == m.params().at(i).name);
    CHECK(back.params().at(i).value == m.params().at(i).value);
  }
  CHECK(back.train_config() == m.train_config());
  CHECK(back.subtokens().Hash() == m.subtokens().Hash());
  CHECK(back.ConfigEcho() == m.ConfigEcho());
}

TEST_CASE("model configuration rejects inconsistent sizes") {
  nn::ModelConfig c;
  c.feature_dim = 10;
  c.bits_per_var = 2;
  CHECK_THROWS_AS(c.Validate(), Error);
}

namespace {

// Plain-loop attention layer used as the reference for GatLayer.
Matrix ReferenceGat(const Matrix& x, const Matrix& w, const Matrix& a_src, const Matrix& a_dst,
                    const Matrix& bias, const nn::EdgeList& e, int heads, double slope, bool relu) {
  const Matrix h = x * w;
  const int width = static_cast<int>(h.cols()) / heads;
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (int i = 0; i < h.rows(); ++i) {
    for (int k = 0; k < heads; ++k) {
      std::vector<double> logit;
      std::vector<int> from;
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (e.dst[j] != i) continue;
        double s = 0.0;
        for (int d = 0; d < width; ++d) {
          s += a_dst(0, k * width + d) * h(i, k * width + d) + a_src(0, k * width + d) * h(e.src[j], k * width + d);
        }
        logit.push_back((s > 0 ? s : slope * s) + bias(k, e.rel[j]));
        from.push_back(e.src[j]);
      }
      double z = 0.0;
      for (double l : logit) z += std::exp(l);
      for (std::size_t j = 0; j < from.size(); ++j) {
        for (int d = 0; d < width; ++d) out(i, k * width + d) += std::exp(logit[j]) / z * h(from[j], k * width + d);
      }
    }
  }
  return relu ? Matrix(out.cwiseMax(0.0)) : out;
}

}  // namespace

TEST_CASE("a lone node with a self-loop maps to W h") {
  nn::Tape t(false);
  Matrix x(1, 2), w(2, 2);
  x << 0.5, -1.5;
  w << 1, 2, 3, 4;
  const nn::EdgeList loop{{0}, {0}, {2}};
  const Var out = nn::GatLayer(t, t.Constant(x), t.Constant(w), t.Constant(Matrix::Constant(1, 2, 0.7)),
                               t.Constant(Matrix::Constant(1, 2, -0.3)), t.Constant(Matrix::Zero(1, 6)), loop, 1,
                               0.2, false, nullptr);
  CHECK((t.value(out) - x * w).norm() < 1e-15);
}

TEST_CASE("attention on a three-node path matches the reference arithmetic") {
  Matrix x(3, 2), w(2, 2), a_src(1, 2), a_dst(1, 2), bias(1, 6);
  x << 1.0, 0.0, 0.5, -1.0, -0.25, 2.0;
  w << 0.5, -1.0, 1.5, 0.25;
  a_src << 0.3, -0.7;
  a_dst << 1.1, 0.4;
  bias << 0.0, 0.5, 0.1, 0.0, -0.5, 0.2;
  // 0 - 1 - 2 with AST edges both ways and self-loops.
  const nn::EdgeList e{{0, 1, 1, 2, 0, 1, 2}, {1, 0, 2, 1, 0, 1, 2}, {0, 3, 0, 3, 2, 2, 2}};
  nn::Tape t(false);
  const Var out = nn::GatLayer(t, t.Constant(x), t.Constant(w), t.Constant(a_src), t.Constant(a_dst),
                               t.Constant(bias), e, 1, 0.2, false, nullptr);
  const Matrix expected = ReferenceGat(x, w, a_src, a_dst, bias, e, 1, 0.2, false);
  CHECK((t.value(out) - expected).cwiseAbs().maxCoeff() < 1e-12);

  // Hand value for node 0 (neighbours 1 via AST reverse, 0 via self-loop).
  const Matrix h = x * w;
  const auto leaky = [](double s) { return s > 0 ? s : 0.2 * s; };
  const double l1 = leaky(a_dst.row(0).dot(h.row(0)) + a_src.row(0).dot(h.row(1))) + bias(0, 3);
  const double l0 = leaky(a_dst.row(0).dot(h.row(0)) + a_src.row(0).dot(h.row(0))) + bias(0, 2);
  const double p1 = std::exp(l1) / (std::exp(l1) + std::exp(l0));
  CHECK(t.value(out)(0, 0) == doctest::Approx(p1 * h(1, 0) + (1 - p1) * h(0, 0)).epsilon(1e-12));
}

TEST_CASE("multi-head attention matches the reference on random graphs") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 6, heads = 3, width = 2, in = 4;
    const auto rnd = [&](int r, int c) {
      Matrix m(r, c);
      for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-1.0, 1.0);
      return m;
    };
    nn::EdgeList e;
    for (int i = 0; i < n; ++i) {
      e.src.push_back(i), e.dst.push_back(i), e.rel.push_back(2);
      for (int j = 0; j < n; ++j) {
        if (i != j && rng.Bernoulli(0.4)) e.src.push_back(j), e.dst.push_back(i), e.rel.push_back(static_cast<int>(rng.Index(6)));
      }
    }
    const Matrix x = rnd(n, in), w = rnd(in, heads * width), as = rnd(1, heads * width), ad = rnd(1, heads * width),
                 b = rnd(heads, 6);
    nn::Tape t(false);
    const Var out = nn::GatLayer(t, t.Constant(x), t.Constant(w), t.Constant(as), t.Constant(ad), t.Constant(b), e,
                                 heads, 0.2, true, nullptr);
    CHECK((t.value(out) - ReferenceGat(x, w, as, ad, b, e, heads, 0.2, true)).cwiseAbs().maxCoeff() < 1e-12);

    // Relabel nodes with a permutation; outputs permute the same way.
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.Shuffle(perm);
    Matrix px(n, in);
    for (int i = 0; i < n; ++i) px.row(perm[i]) = x.row(i);
    nn::EdgeList pe = e;
    for (std::size_t j = 0; j < e.size(); ++j) pe.src[j] = perm[e.src[j]], pe.dst[j] = perm[e.dst[j]];
    nn::Tape t2(false);
    const Var pout = nn::GatLayer(t2, t2.Constant(px), t2.Constant(w), t2.Constant(as), t2.Constant(ad),
                                  t2.Constant(b), pe, heads, 0.2, true, nullptr);
    for (int i = 0; i < n; ++i) CHECK((t2.value(pout).row(perm[i]) - t.value(out).row(i)).norm() < 1e-12);
  }
}

TEST_CASE("head blocks reassemble the concatenated representation") {
  Vector h(12);
  for (int i = 0; i < 12; ++i) h(i) = i * 0.5 - 2.0;
  Vector joined(12);
  for (int k = 0; k < 4; ++k) joined.segment(3 * k, 3) = nn::SelectHead(h, k, 4);
  CHECK(joined == h);
}

TEST_CASE("low temperature gumbel samples collapse to the perturbed argmax") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix logits(1, 5), noise(1, 5);
    for (int j = 0; j < 5; ++j) logits(0, j) = rng.Uniform(-2, 2), noise(0, j) = rng.Gumbel();
    nn::Tape t(false);
    const Matrix y = t.value(t.GumbelSoftmax(t.Constant(logits), noise, 1e-3, false));
    Eigen::Index best;
    (logits + noise).row(0).maxCoeff(&best);
    CHECK(y(0, best) > 0.999);
    CHECK(y.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const Matrix flat = t.value(t.GumbelSoftmax(t.Constant(logits), noise, 1e4, false));
    CHECK((flat.array() - 0.2).abs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("forward passes are deterministic and distributions normalized") {
  const nn::ModelBundle m = gradcheck::TinyModel(11);
  const auto g = gradcheck::RandomGraph(12, m.kinds().size(), m.subtokens().size());
  CHECK(nn::EmbedRepresentation(m, g) == nn::EmbedRepresentation(m, g));
  const Vector p = nn::ClassifyProbabilities(m, g);
  CHECK(p.size() == 4);
  CHECK(std::abs(p.sum() - 1.0) < 1e-6);
  nn::Tape t(false);
  nn::DecoderState s = nn::DecoderInit(t, m, t.Constant(nn::SelectHead(nn::EmbedRepresentation(m, g), 1, 4).transpose()));
  const Matrix logits = t.value(nn::DecoderStep(t, m, s, t.Constant(m.P("dec.embed").value.row(graph::Vocabulary::kBos))));
  const Vector probs = nn::Softmax(Vector(logits.row(0).transpose()));
  CHECK(std::abs(probs.sum() - 1.0) < 1e-6);
}

TEST_CASE("classifier separates four synthetic clusters") {
  nn::ModelBundle m = gradcheck::TinyModel(21);
  const int dim = static_cast<int>(m.P("cls.W1").value.rows());
  Rng rng(22);
  std::vector<Vector> centres(4, Vector(dim));
  for (auto& c : centres) {
    for (int i = 0; i < dim; ++i) c(i) = rng.Uniform(-3, 3);
  }
  std::vector<std::pair<Vector, int>> data;
  for (int i = 0; i < 200; ++i) {
    const int label = i % 4;
    Vector x = centres[static_cast<std::size_t>(label)];
    for (int d = 0; d < dim; ++d) x(d) += 0.3 * rng.Normal();
    data.push_back({x, label});
  }
  train::Adam adam(m.params(), 0.02);
  for (int step = 0; step < 300; ++step) {
    nn::Gradients grads = m.params().ZeroGradients();
    nn::Tape t;
    std::vector<Var> losses;
    for (const auto& [x, label] : data) {
      Matrix target = Matrix::Zero(1, 4);
      target(0, label) = 1.0;
      losses.push_back(t.SoftCrossEntropy(nn::ClassifierLogits(t, m, t.Constant(x.transpose())), target));
    }
    Var total = losses[0];
    for (std::size_t i = 1; i < losses.size(); ++i) total = t.Add(total, losses[i]);
    t.Backward(t.Scale(total, 1.0 / static_cast<double>(losses.size())), &grads);
    adam.Step(m.params(), grads);
  }
  int correct = 0;
  for (const auto& [x, label] : data) {
    nn::Tape t(false);
    Eigen::Index best;
    t.value(nn::ClassifierLogits(t, m, t.Constant(x.transpose()))).row(0).maxCoeff(&best);
    correct += best == label;
  }
  CHECK(correct == static_cast<int>(data.size()));
}
