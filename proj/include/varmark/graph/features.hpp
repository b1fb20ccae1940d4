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

#include <vector>

#include "varmark/graph/context_graph.hpp"
#include "varmark/graph/vocabulary.hpp"
#include "varmark/nn/matrix.hpp"

namespace varmark::graph {

// Integer view of a context graph, ready for the encoders.
struct GraphInput {
  std::vector<int> kind_ids;
  // Subtoken ids per node; empty for nodes that only carry a kind.
  std::vector<std::vector<int>> subtokens;
  int target = 0;
  // Subtokens of the target's current name.
  std::vector<int> target_subtokens;
  std::vector<int> edge_src;
  std::vector<int> edge_dst;
  std::vector<int> edge_rel;

  int num_nodes() const { return static_cast<int>(kind_ids.size()); }
};

GraphInput EncodeGraph(const ContextGraph& g, const Vocabulary& subtokens,
                       const Vocabulary& kinds);

// Row i = kind_table[kind_i] + mean(subtoken_table[s] for s in subtokens_i).
// With `mask_target` the target's subtokens are replaced by the MASK symbol;
// otherwise the target uses its name subtokens. Throws DimensionMismatch.
nn::Matrix Featurize(const GraphInput& g, const nn::Matrix& kind_table,
                     const nn::Matrix& subtoken_table, bool mask_target);

}  // namespace varmark::graph
