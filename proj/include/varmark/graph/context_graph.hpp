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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "varmark/lang/function_unit.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/variables.hpp"

namespace varmark::graph {

enum class Relation : std::uint8_t {
  kAst = 0,
  kNextToken = 1,
  kSelfLoop = 2,
  kAstRev = 3,
  kNextTokenRev = 4,
  kSelfLoopRev = 5,
};
inline constexpr int kNumRelations = 6;

std::string_view RelationName(Relation r);
Relation Reverse(Relation r);

struct GraphNode {
  std::string kind;
  // Token text for leaves, empty otherwise. The target carries the current
  // variable name.
  std::string text;
  bool is_leaf = false;
  bool is_target = false;
  // Identifier-like leaf whose text feeds subtoken features.
  bool is_name = false;
  // Syntax node this graph node came from (first occurrence for the target).
  lang::NodeId source_node = lang::kNoNode;
};

struct GraphEdge {
  int src = 0;
  int dst = 0;
  Relation rel = Relation::kAst;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
  friend auto operator<=>(const GraphEdge& a, const GraphEdge& b) {
    if (a.src != b.src) return a.src <=> b.src;
    if (a.dst != b.dst) return a.dst <=> b.dst;
    return static_cast<int>(a.rel) <=> static_cast<int>(b.rel);
  }
};

struct ContextGraph {
  std::vector<GraphNode> nodes;
  // Sorted by (src, dst, rel), no duplicates.
  std::vector<GraphEdge> edges;
  int target = 0;
  // Statements whose subtrees make up the graph, in source order.
  std::vector<lang::NodeId> statements;
  // Statements dropped by the size cap.
  std::size_t dropped_statements = 0;

  std::size_t size() const { return nodes.size(); }
};

struct GraphOptions {
  std::size_t max_nodes = 512;
};

// Smallest enclosing statement of `id`, or kNoNode.
lang::NodeId EnclosingStatement(const lang::FunctionUnit& fn, lang::NodeId id,
                                const lang::Language& lang);

// Merges the pruned statement subtrees around every occurrence of `b` at a
// single target node. Nested statements, blocks and class bodies are not
// part of a statement's subtree. Throws EmptyContext.
ContextGraph BuildContextGraph(const lang::FunctionUnit& fn, const lang::VariableBinding& b,
                               const lang::Language& lang, const GraphOptions& options = {});
ContextGraph BuildContextGraph(const lang::FunctionUnit& fn, const lang::VariableBinding& b);

// {"nodes": [{"id", "kind", "text", "target"}...], "edges": [[s, d, "REL"]...],
//  "target": id}
std::string GraphToJson(const ContextGraph& g, int indent = -1);

}  // namespace varmark::graph
