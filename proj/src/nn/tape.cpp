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

#include "varmark/nn/tape.hpp"

#include <cmath>
#include <limits>

#include "varmark/common/error.hpp"

namespace varmark::nn {

// ---- ParameterSet ---------------------------------------------------------

Parameter& ParameterSet::Add(std::string name, Matrix init) {
  if (index_.count(name) != 0) Fail(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  const std::size_t i = params_.size();
  params_.push_back(Parameter{name, std::move(init), static_cast<int>(i)});
  index_.emplace(std::move(name), i);
  return params_.back();
}

Parameter& ParameterSet::Get(std::string_view name) {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) Fail(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(name));
  return params_[it->second];
}

const Parameter& ParameterSet::Get(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->Get(name);
}

bool ParameterSet::Has(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

Gradients ParameterSet::ZeroGradients() const {
  Gradients g;
  g.reserve(params_.size());
  for (const Parameter& p : params_) g.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  return g;
}

std::size_t ParameterSet::ScalarCount() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

// ---- Tape plumbing --------------------------------------------------------

namespace {

void RequireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    Fail(ErrorCode::kDimensionMismatch,
         std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
             " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

Matrix RowSoftmax(const Matrix& a) {
  Matrix y(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double m = a.row(r).maxCoeff();
    y.row(r) = (a.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

Matrix RowLogSoftmax(const Matrix& a) {
  Matrix y(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double m = a.row(r).maxCoeff();
    const double lse = m + std::log((a.row(r).array() - m).exp().sum());
    y.row(r) = (a.row(r).array() - lse).matrix();
  }
  return y;
}

}  // namespace

Var Tape::Constant(Matrix value) { return Push(std::move(value), false, nullptr); }

Var Tape::Param(const Parameter& p) {
  const auto cached = param_nodes_.find(&p.value);
  if (cached != param_nodes_.end()) return cached->second;
  Node n;
  n.ref = &p.value;
  n.param_index = p.index;
  n.needs_grad = record_;
  nodes_.push_back(std::move(n));
  const Var v{static_cast<int>(nodes_.size()) - 1};
  param_nodes_.emplace(&p.value, v);
  return v;
}

const Matrix& Tape::value(Var v) const {
  const Node& n = nodes_[static_cast<std::size_t>(v.id)];
  return n.ref != nullptr ? *n.ref : n.value;
}

Matrix& Tape::G(Var v) {
  Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (n.sink != nullptr) return *n.sink;
  if (n.grad.size() == 0) {
    const Matrix& val = value(v);
    n.grad = Matrix::Zero(val.rows(), val.cols());
  }
  return n.grad;
}

Var Tape::Push(Matrix value, bool needs_grad, std::function<void()> backward) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = record_ && needs_grad;
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::Backward(Var loss, Gradients* grads) {
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) Fail(ErrorCode::kDimensionMismatch, "loss must be 1x1");
  for (Node& n : nodes_) {
    n.grad.resize(0, 0);
    n.sink = n.param_index >= 0 && grads != nullptr ? &(*grads)[static_cast<std::size_t>(n.param_index)] : nullptr;
  }
  G(loss)(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.sink != nullptr || n.grad.size() == 0 || !n.needs_grad) continue;
    if (n.backward) n.backward();
  }
}

// ---- elementwise and linear ops -------------------------------------------

Var Tape::MatMul(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (A.cols() != B.rows()) {
    Fail(ErrorCode::kDimensionMismatch, "MatMul: " + std::to_string(A.cols()) + " vs " +
                                            std::to_string(B.rows()));
  }
  Matrix y = A * B;
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a) || Needs(b), [this, a, b, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a).noalias() += dy * value(b).transpose();
    if (Needs(b)) G(b).noalias() += value(a).transpose() * dy;
  });
}

Var Tape::Add(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Add");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) + value(b), Needs(a) || Needs(b), [this, a, b, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a) += dy;
    if (Needs(b)) G(b) += dy;
  });
}

Var Tape::Sub(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Sub");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) - value(b), Needs(a) || Needs(b), [this, a, b, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a) += dy;
    if (Needs(b)) G(b) -= dy;
  });
}

Var Tape::Mul(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Mul");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseProduct(value(b)), Needs(a) || Needs(b), [this, a, b, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a) += dy.cwiseProduct(value(b));
    if (Needs(b)) G(b) += dy.cwiseProduct(value(a));
  });
}

Var Tape::AddRow(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (B.rows() != 1 || B.cols() != A.cols()) Fail(ErrorCode::kDimensionMismatch, "AddRow");
  Matrix y = A.rowwise() + B.row(0);
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a) || Needs(b), [this, a, b, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a) += dy;
    if (Needs(b)) G(b) += dy.colwise().sum();
  });
}

Var Tape::Scale(Var a, double s) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) * s, Needs(a), [this, a, s, out] {
    G(a) += nodes_[static_cast<std::size_t>(out.id)].grad * s;
  });
}

Var Tape::ScaleBy(Var a, Var s) {
  if (value(s).size() != 1) Fail(ErrorCode::kDimensionMismatch, "ScaleBy expects a 1x1 scale");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) * value(s)(0, 0), Needs(a) || Needs(s), [this, a, s, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a) += dy * value(s)(0, 0);
    if (Needs(s)) G(s)(0, 0) += dy.cwiseProduct(value(a)).sum();
  });
}

Var Tape::AddScalar(Var a, double s) {
  Var out{static_cast<int>(nodes_.size())};
  return Push((value(a).array() + s).matrix(), Needs(a), [this, a, out] {
    G(a) += nodes_[static_cast<std::size_t>(out.id)].grad;
  });
}

Var Tape::OneMinus(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push((1.0 - value(a).array()).matrix(), Needs(a), [this, a, out] {
    G(a) -= nodes_[static_cast<std::size_t>(out.id)].grad;
  });
}

Var Tape::Reciprocal(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseInverse(), Needs(a), [this, a, out] {
    const Node& o = nodes_[static_cast<std::size_t>(out.id)];
    G(a) -= o.grad.cwiseProduct(o.value.cwiseProduct(o.value));
  });
}

Var Tape::Relu(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseMax(0.0), Needs(a), [this, a, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    G(a) += (value(a).array() > 0.0).select(dy, 0.0).matrix();
  });
}

Var Tape::LeakyRelu(Var a, double slope) {
  const Matrix& A = value(a);
  Matrix y = (A.array() > 0.0).select(A, A * slope);
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a), [this, a, slope, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    G(a) += (value(a).array() > 0.0).select(dy, dy * slope).matrix();
  });
}

Var Tape::Sigmoid(Var a) {
  Matrix y = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a), [this, a, out] {
    const Node& o = nodes_[static_cast<std::size_t>(out.id)];
    G(a) += (o.grad.array() * o.value.array() * (1.0 - o.value.array())).matrix();
  });
}

Var Tape::Tanh(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().tanh().matrix(), Needs(a), [this, a, out] {
    const Node& o = nodes_[static_cast<std::size_t>(out.id)];
    G(a) += (o.grad.array() * (1.0 - o.value.array().square())).matrix();
  });
}

Var Tape::Exp(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().exp().matrix(), Needs(a), [this, a, out] {
    const Node& o = nodes_[static_cast<std::size_t>(out.id)];
    G(a) += o.grad.cwiseProduct(o.value);
  });
}

Var Tape::Log(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().log().matrix(), Needs(a), [this, a, out] {
    G(a) += nodes_[static_cast<std::size_t>(out.id)].grad.cwiseQuotient(value(a));
  });
}

Var Tape::Sum(Var a) {
  Matrix y(1, 1);
  y(0, 0) = value(a).sum();
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a), [this, a, out] {
    G(a).array() += nodes_[static_cast<std::size_t>(out.id)].grad(0, 0);
  });
}

Var Tape::Element(Var a, int j) {
  const Matrix& A = value(a);
  if (A.rows() != 1 || j < 0 || j >= A.cols()) Fail(ErrorCode::kIndexOutOfRange, "Element");
  Matrix y(1, 1);
  y(0, 0) = A(0, j);
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a), [this, a, j, out] {
    G(a)(0, j) += nodes_[static_cast<std::size_t>(out.id)].grad(0, 0);
  });
}

// ---- shape ops ------------------------------------------------------------

Var Tape::ConcatCols(const std::vector<Var>& parts) {
  const Eigen::Index rows = value(parts.front()).rows();
  Eigen::Index cols = 0;
  bool needs = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) Fail(ErrorCode::kDimensionMismatch, "ConcatCols");
    cols += value(p).cols();
    needs = needs || Needs(p);
  }
  Matrix y(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    y.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), needs, [this, parts, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    Eigen::Index at = 0;
    for (Var p : parts) {
      const Eigen::Index c = value(p).cols();
      if (Needs(p)) G(p) += dy.middleCols(at, c);
      at += c;
    }
  });
}

Var Tape::ConcatRows(const std::vector<Var>& parts) {
  const Eigen::Index cols = value(parts.front()).cols();
  Eigen::Index rows = 0;
  bool needs = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) Fail(ErrorCode::kDimensionMismatch, "ConcatRows");
    rows += value(p).rows();
    needs = needs || Needs(p);
  }
  Matrix y(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    y.middleRows(at, value(p).rows()) = value(p);
    at += value(p).rows();
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), needs, [this, parts, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    Eigen::Index at = 0;
    for (Var p : parts) {
      const Eigen::Index r = value(p).rows();
      if (Needs(p)) G(p) += dy.middleRows(at, r);
      at += r;
    }
  });
}

Var Tape::SliceCols(Var a, int start, int len) {
  const Matrix& A = value(a);
  if (start < 0 || len < 0 || start + len > A.cols()) Fail(ErrorCode::kIndexOutOfRange, "SliceCols");
  Var out{static_cast<int>(nodes_.size())};
  return Push(A.middleCols(start, len), Needs(a), [this, a, start, len, out] {
    G(a).middleCols(start, len) += nodes_[static_cast<std::size_t>(out.id)].grad;
  });
}

Var Tape::Row(Var a, int i) {
  const Matrix& A = value(a);
  if (i < 0 || i >= A.rows()) Fail(ErrorCode::kIndexOutOfRange, "Row");
  Var out{static_cast<int>(nodes_.size())};
  return Push(A.row(i), Needs(a), [this, a, i, out] {
    G(a).row(i) += nodes_[static_cast<std::size_t>(out.id)].grad;
  });
}

Var Tape::GatherRows(Var table, const std::vector<int>& ids) {
  const Matrix& T = value(table);
  Matrix y(static_cast<Eigen::Index>(ids.size()), T.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= T.rows()) Fail(ErrorCode::kIndexOutOfRange, "GatherRows");
    y.row(static_cast<Eigen::Index>(r)) = T.row(ids[r]);
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(table), [this, table, ids, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    Matrix& g = G(table);
    for (std::size_t r = 0; r < ids.size(); ++r) g.row(ids[r]) += dy.row(static_cast<Eigen::Index>(r));
  });
}

Var Tape::BagMean(Var table, const std::vector<std::vector<int>>& lists) {
  const Matrix& T = value(table);
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(lists.size()), T.cols());
  for (std::size_t r = 0; r < lists.size(); ++r) {
    if (lists[r].empty()) continue;
    for (int id : lists[r]) {
      if (id < 0 || id >= T.rows()) Fail(ErrorCode::kIndexOutOfRange, "BagMean");
      y.row(static_cast<Eigen::Index>(r)) += T.row(id);
    }
    y.row(static_cast<Eigen::Index>(r)) /= static_cast<double>(lists[r].size());
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(table), [this, table, lists, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    Matrix& g = G(table);
    for (std::size_t r = 0; r < lists.size(); ++r) {
      if (lists[r].empty()) continue;
      const double w = 1.0 / static_cast<double>(lists[r].size());
      for (int id : lists[r]) g.row(id) += w * dy.row(static_cast<Eigen::Index>(r));
    }
  });
}

Var Tape::AddToRow(Var a, int i, Var row) {
  const Matrix& A = value(a);
  const Matrix& R = value(row);
  if (i < 0 || i >= A.rows()) Fail(ErrorCode::kIndexOutOfRange, "AddToRow");
  if (R.rows() != 1 || R.cols() != A.cols()) Fail(ErrorCode::kDimensionMismatch, "AddToRow");
  Matrix y = A;
  y.row(i) += R.row(0);
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(a) || Needs(row), [this, a, i, row, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    if (Needs(a)) G(a) += dy;
    if (Needs(row)) G(row) += dy.row(i);
  });
}

// ---- softmax family -------------------------------------------------------

Var Tape::SoftmaxRows(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(RowSoftmax(value(a)), Needs(a), [this, a, out] {
    const Node& o = nodes_[static_cast<std::size_t>(out.id)];
    Matrix& g = G(a);
    for (Eigen::Index r = 0; r < o.value.rows(); ++r) {
      const double dot = o.grad.row(r).dot(o.value.row(r));
      g.row(r) += (o.value.row(r).array() * (o.grad.row(r).array() - dot)).matrix();
    }
  });
}

Var Tape::LogSoftmaxRows(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(RowLogSoftmax(value(a)), Needs(a), [this, a, out] {
    const Node& o = nodes_[static_cast<std::size_t>(out.id)];
    Matrix& g = G(a);
    for (Eigen::Index r = 0; r < o.value.rows(); ++r) {
      const double total = o.grad.row(r).sum();
      g.row(r) += (o.grad.row(r).array() - o.value.row(r).array().exp() * total).matrix();
    }
  });
}

Var Tape::SoftCrossEntropy(Var logits, const Matrix& target) {
  RequireSameShape(value(logits), target, "SoftCrossEntropy");
  const Matrix logp = RowLogSoftmax(value(logits));
  Matrix y(1, 1);
  y(0, 0) = 0.0;
  for (Eigen::Index r = 0; r < target.rows(); ++r) {
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
      if (target(r, c) != 0.0) y(0, 0) -= target(r, c) * logp(r, c);
    }
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(logits), [this, logits, target, logp, out] {
    const double dy = nodes_[static_cast<std::size_t>(out.id)].grad(0, 0);
    Matrix& g = G(logits);
    for (Eigen::Index r = 0; r < target.rows(); ++r) {
      const double mass = target.row(r).sum();
      g.row(r) += dy * (logp.row(r).array().exp() * mass - target.row(r).array()).matrix();
    }
  });
}

Var Tape::GumbelSoftmax(Var logits, const Matrix& noise, double tau, bool hard) {
  RequireSameShape(value(logits), noise, "GumbelSoftmax");
  if (!(tau > 0.0)) Fail(ErrorCode::kInvalidArgument, "Gumbel temperature must be positive");
  const Matrix soft = RowSoftmax((value(logits) + noise) / tau);
  Matrix y = soft;
  if (hard) {
    y.setZero();
    for (Eigen::Index r = 0; r < soft.rows(); ++r) {
      Eigen::Index best = 0;
      soft.row(r).maxCoeff(&best);
      y(r, best) = 1.0;
    }
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(y), Needs(logits), [this, logits, soft, tau, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    Matrix& g = G(logits);
    for (Eigen::Index r = 0; r < soft.rows(); ++r) {
      const double dot = dy.row(r).dot(soft.row(r));
      g.row(r) += (soft.row(r).array() * (dy.row(r).array() - dot) / tau).matrix();
    }
  });
}

// ---- graph attention ------------------------------------------------------

Var Tape::GraphAttention(Var h, Var attn_src, Var attn_dst, Var rel_bias, const EdgeList& edges,
                         int heads, double slope, const std::vector<double>* keep_scale) {
  const Matrix& H = value(h);
  const Matrix& As = value(attn_src);
  const Matrix& Ad = value(attn_dst);
  const Matrix& B = value(rel_bias);
  const Eigen::Index n = H.rows();
  if (heads <= 0 || H.cols() % heads != 0) Fail(ErrorCode::kDimensionMismatch, "GraphAttention heads");
  const Eigen::Index width = H.cols() / heads;
  if (As.rows() != 1 || As.cols() != H.cols() || Ad.rows() != 1 || Ad.cols() != H.cols() ||
      B.rows() != heads) {
    Fail(ErrorCode::kDimensionMismatch, "GraphAttention parameters");
  }
  const std::size_t e_count = edges.size();
  if (keep_scale != nullptr && keep_scale->size() != e_count * static_cast<std::size_t>(heads)) {
    Fail(ErrorCode::kDimensionMismatch, "GraphAttention dropout mask");
  }
  // Incoming edge lists.
  std::vector<std::vector<int>> incoming(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < e_count; ++e) {
    if (edges.src[e] < 0 || edges.src[e] >= n || edges.dst[e] < 0 || edges.dst[e] >= n ||
        edges.rel[e] < 0 || edges.rel[e] >= B.cols()) {
      Fail(ErrorCode::kIndexOutOfRange, "GraphAttention edge");
    }
    incoming[static_cast<std::size_t>(edges.dst[e])].push_back(static_cast<int>(e));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (incoming[static_cast<std::size_t>(i)].empty()) {
      Fail(ErrorCode::kIsolatedNode, "node " + std::to_string(i) + " has no neighbours");
    }
  }
  // Per-node, per-head scores.
  Matrix s_src(n, heads), s_dst(n, heads);
  for (int k = 0; k < heads; ++k) {
    s_src.col(k) = H.middleCols(k * width, width) * As.middleCols(k * width, width).transpose();
    s_dst.col(k) = H.middleCols(k * width, width) * Ad.middleCols(k * width, width).transpose();
  }
  // Edge pre-activations and normalized coefficients (edges x heads).
  Matrix pre(static_cast<Eigen::Index>(e_count), heads);
  Matrix alpha(static_cast<Eigen::Index>(e_count), heads);
  for (std::size_t e = 0; e < e_count; ++e) {
    for (int k = 0; k < heads; ++k) {
      pre(static_cast<Eigen::Index>(e), k) = s_dst(edges.dst[e], k) + s_src(edges.src[e], k);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& in = incoming[static_cast<std::size_t>(i)];
    for (int k = 0; k < heads; ++k) {
      double m = -std::numeric_limits<double>::infinity();
      for (int e : in) {
        const double p = pre(e, k);
        const double l = (p > 0.0 ? p : slope * p) + B(k, edges.rel[static_cast<std::size_t>(e)]);
        alpha(e, k) = l;
        m = std::max(m, l);
      }
      double z = 0.0;
      for (int e : in) {
        alpha(e, k) = std::exp(alpha(e, k) - m);
        z += alpha(e, k);
      }
      for (int e : in) alpha(e, k) /= z;
    }
  }
  Matrix used = alpha;
  if (keep_scale != nullptr) {
    for (std::size_t e = 0; e < e_count; ++e) {
      for (int k = 0; k < heads; ++k) {
        used(static_cast<Eigen::Index>(e), k) *= (*keep_scale)[e * static_cast<std::size_t>(heads) + static_cast<std::size_t>(k)];
      }
    }
  }
  Matrix y = Matrix::Zero(n, H.cols());
  for (std::size_t e = 0; e < e_count; ++e) {
    for (int k = 0; k < heads; ++k) {
      y.block(edges.dst[e], k * width, 1, width) +=
          used(static_cast<Eigen::Index>(e), k) * H.block(edges.src[e], k * width, 1, width);
    }
  }
  std::vector<double> keep = keep_scale != nullptr ? *keep_scale : std::vector<double>{};
  Var out{static_cast<int>(nodes_.size())};
  const bool needs = Needs(h) || Needs(attn_src) || Needs(attn_dst) || Needs(rel_bias);
  return Push(std::move(y), needs,
              [this, h, attn_src, attn_dst, rel_bias, edges, incoming, heads, width, slope, pre,
               alpha, used, keep, out] {
    const Matrix& dy = nodes_[static_cast<std::size_t>(out.id)].grad;
    const Matrix& H = value(h);
    const Matrix& As = value(attn_src);
    const Matrix& Ad = value(attn_dst);
    const std::size_t e_count = edges.size();
    const Eigen::Index n = H.rows();
    Matrix dH = Matrix::Zero(n, H.cols());
    Matrix d_alpha(static_cast<Eigen::Index>(e_count), heads);
    for (std::size_t e = 0; e < e_count; ++e) {
      const auto ei = static_cast<Eigen::Index>(e);
      for (int k = 0; k < heads; ++k) {
        const auto d_row = dy.block(edges.dst[e], k * width, 1, width);
        const auto h_row = H.block(edges.src[e], k * width, 1, width);
        double d_used = d_row.cwiseProduct(h_row).sum();
        dH.block(edges.src[e], k * width, 1, width) += used(ei, k) * d_row;
        if (!keep.empty()) d_used *= keep[e * static_cast<std::size_t>(heads) + static_cast<std::size_t>(k)];
        d_alpha(ei, k) = d_used;
      }
    }
    Matrix d_src = Matrix::Zero(n, heads), d_dst = Matrix::Zero(n, heads);
    Matrix d_bias = Matrix::Zero(heads, value(rel_bias).cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& in = incoming[static_cast<std::size_t>(i)];
      for (int k = 0; k < heads; ++k) {
        double dot = 0.0;
        for (int e : in) dot += alpha(e, k) * d_alpha(e, k);
        for (int e : in) {
          const double dl = alpha(e, k) * (d_alpha(e, k) - dot);
          d_bias(k, edges.rel[static_cast<std::size_t>(e)]) += dl;
          const double dp = pre(e, k) > 0.0 ? dl : slope * dl;
          d_dst(i, k) += dp;
          d_src(edges.src[static_cast<std::size_t>(e)], k) += dp;
        }
      }
    }
    Matrix d_as = Matrix::Zero(1, H.cols()), d_ad = Matrix::Zero(1, H.cols());
    for (int k = 0; k < heads; ++k) {
      const auto block = H.middleCols(k * width, width);
      dH.middleCols(k * width, width).noalias() += d_src.col(k) * As.middleCols(k * width, width);
      dH.middleCols(k * width, width).noalias() += d_dst.col(k) * Ad.middleCols(k * width, width);
      d_as.middleCols(k * width, width).noalias() += d_src.col(k).transpose() * block;
      d_ad.middleCols(k * width, width).noalias() += d_dst.col(k).transpose() * block;
    }
    if (Needs(h)) G(h) += dH;
    if (Needs(attn_src)) G(attn_src) += d_as;
    if (Needs(attn_dst)) G(attn_dst) += d_ad;
    if (Needs(rel_bias)) G(rel_bias) += d_bias;
  });
}

}  // namespace varmark::nn
