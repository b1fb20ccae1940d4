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

#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "varmark/nn/matrix.hpp"

namespace varmark::nn {

struct Parameter {
  std::string name;
  Matrix value;
  int index = -1;
};

// Gradient buffers, one per parameter, indexed by Parameter::index.
using Gradients = std::vector<Matrix>;

class ParameterSet {
 public:
  Parameter& Add(std::string name, Matrix init);
  Parameter& Get(std::string_view name);
  const Parameter& Get(std::string_view name) const;
  bool Has(std::string_view name) const;
  std::size_t size() const { return params_.size(); }
  Parameter& at(std::size_t i) { return params_[i]; }
  const Parameter& at(std::size_t i) const { return params_[i]; }
  Gradients ZeroGradients() const;
  std::size_t ScalarCount() const;

 private:
  std::deque<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Directed edges for graph attention; messages flow src -> dst.
struct EdgeList {
  std::vector<int> src;
  std::vector<int> dst;
  std::vector<int> rel;
  std::size_t size() const { return src.size(); }
};

// Records operations on matrices and replays them backwards. A tape built
// with record = false only computes values.
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  Var Param(const Parameter& p);

  const Matrix& value(Var v) const;
  double scalar(Var v) const { return value(v)(0, 0); }
  // Gradient of the last Backward() with respect to `v` (empty if unused).
  // For parameters after Backward() with a gradient buffer this is the
  // buffer entry itself.
  const Matrix& grad(Var v) const {
    const Node& n = nodes_[static_cast<std::size_t>(v.id)];
    return n.sink != nullptr ? *n.sink : n.grad;
  }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 for a 1x1 loss and accumulates parameter
  // gradients into `grads` (may be null).
  void Backward(Var loss, Gradients* grads);

  Var MatMul(Var a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  // a (n x m) plus row vector b (1 x m) on every row.
  Var AddRow(Var a, Var b);
  Var Scale(Var a, double s);
  // a times a 1x1 variable.
  Var ScaleBy(Var a, Var s);
  Var AddScalar(Var a, double s);
  Var OneMinus(Var a);
  Var Reciprocal(Var a);
  Var Relu(Var a);
  Var LeakyRelu(Var a, double slope);
  Var Sigmoid(Var a);
  Var Tanh(Var a);
  Var Exp(Var a);
  Var Log(Var a);
  Var Sum(Var a);
  // Column `j` of a 1 x n row, as 1x1.
  Var Element(Var a, int j);
  Var ConcatCols(const std::vector<Var>& parts);
  Var ConcatRows(const std::vector<Var>& parts);
  Var SliceCols(Var a, int start, int len);
  Var Row(Var a, int i);
  Var GatherRows(Var table, const std::vector<int>& ids);
  // Row r is the mean of table rows lists[r], zero when the list is empty.
  Var BagMean(Var table, const std::vector<std::vector<int>>& lists);
  Var AddToRow(Var a, int i, Var row);
  Var SoftmaxRows(Var a);
  Var LogSoftmaxRows(Var a);
  // -sum(target .* log_softmax(logits)), summed over rows.
  Var SoftCrossEntropy(Var logits, const Matrix& target);
  // softmax((logits + noise) / tau); with `hard` the value is the one-hot
  // argmax while gradients follow the soft sample.
  Var GumbelSoftmax(Var logits, const Matrix& noise, double tau, bool hard);
  // Multi-head additive attention over `edges`. h holds all heads side by
  // side (N x heads*width); attn_src/attn_dst are 1 x heads*width; rel_bias
  // is heads x relations. keep_scale (edges*heads, row-major by edge) holds
  // dropout multipliers or is null. Returns the aggregated messages.
  Var GraphAttention(Var h, Var attn_src, Var attn_dst, Var rel_bias, const EdgeList& edges,
                     int heads, double slope, const std::vector<double>* keep_scale);

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;
    Matrix grad;
    // Parameter gradients accumulate straight into the caller's buffer.
    Matrix* sink = nullptr;
    int param_index = -1;
    bool needs_grad = false;
    std::function<void()> backward;
  };

  bool Needs(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].needs_grad; }
  Matrix& G(Var v);
  Var Push(Matrix value, bool needs_grad, std::function<void()> backward);

  bool record_;
  std::deque<Node> nodes_;
  // One node per parameter so its gradient is accumulated once.
  std::unordered_map<const Matrix*, Var> param_nodes_;
};

}  // namespace varmark::nn
