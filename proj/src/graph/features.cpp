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

#include "varmark/graph/features.hpp"

#include "varmark/common/error.hpp"
#include "varmark/lang/subtokens.hpp"

namespace varmark::graph {

GraphInput EncodeGraph(const ContextGraph& g, const Vocabulary& subtokens,
                       const Vocabulary& kinds) {
  GraphInput in;
  in.target = g.target;
  in.kind_ids.reserve(g.nodes.size());
  in.subtokens.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    in.kind_ids.push_back(kinds.Id(n.kind));
    if (n.is_name) {
      for (const std::string& s : lang::Subtokenize(n.text)) in.subtokens[i].push_back(subtokens.Id(s));
    }
  }
  in.target_subtokens = in.subtokens[static_cast<std::size_t>(g.target)];
  in.edge_src.reserve(g.edges.size());
  for (const GraphEdge& e : g.edges) {
    in.edge_src.push_back(e.src);
    in.edge_dst.push_back(e.dst);
    in.edge_rel.push_back(static_cast<int>(e.rel));
  }
  return in;
}

nn::Matrix Featurize(const GraphInput& g, const nn::Matrix& kind_table,
                     const nn::Matrix& subtoken_table, bool mask_target) {
  if (kind_table.cols() != subtoken_table.cols()) {
    Fail(ErrorCode::kDimensionMismatch, "kind and subtoken tables differ in width");
  }
  const int n = g.num_nodes();
  nn::Matrix out(n, kind_table.cols());
  auto check = [](int id, const nn::Matrix& table) {
    if (id < 0 || id >= table.rows()) {
      Fail(ErrorCode::kDimensionMismatch, "embedding id " + std::to_string(id) + " out of range");
    }
  };
  for (int i = 0; i < n; ++i) {
    check(g.kind_ids[static_cast<std::size_t>(i)], kind_table);
    out.row(i) = kind_table.row(g.kind_ids[static_cast<std::size_t>(i)]);
    std::vector<int> subs = g.subtokens[static_cast<std::size_t>(i)];
    if (i == g.target) {
      subs = mask_target ? std::vector<int>{Vocabulary::kMask} : g.target_subtokens;
    }
    if (subs.empty()) continue;
    nn::RowVector mean = nn::RowVector::Zero(subtoken_table.cols());
    for (int s : subs) {
      check(s, subtoken_table);
      mean += subtoken_table.row(s);
    }
    out.row(i) += mean / static_cast<double>(subs.size());
  }
  return out;
}

}  // namespace varmark::graph
