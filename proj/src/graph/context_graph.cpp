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

#include "varmark/graph/context_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <json.hpp>

#include "varmark/common/error.hpp"

namespace varmark::graph {

using lang::FunctionUnit;
using lang::NodeId;
using lang::SyntaxNode;

std::string_view RelationName(Relation r) {
  switch (r) {
    case Relation::kAst: return "AST";
    case Relation::kNextToken: return "NEXT_TOKEN";
    case Relation::kSelfLoop: return "SELF_LOOP";
    case Relation::kAstRev: return "AST_REV";
    case Relation::kNextTokenRev: return "NEXT_TOKEN_REV";
    case Relation::kSelfLoopRev: return "SELF_LOOP_REV";
  }
  return "?";
}

Relation Reverse(Relation r) {
  const int v = static_cast<int>(r);
  return static_cast<Relation>(v < 3 ? v + 3 : v - 3);
}

NodeId EnclosingStatement(const FunctionUnit& fn, NodeId id, const lang::Language& lang) {
  const auto& tree = fn.tree();
  for (NodeId cur = tree.node(id).parent; cur != lang::kNoNode; cur = tree.node(cur).parent) {
    if (lang.IsStatementKind(tree.node(cur).kind)) return cur;
  }
  return lang::kNoNode;
}

namespace {

bool IsBarrier(const SyntaxNode& n, const lang::Language& lang) {
  return lang.IsStatementKind(n.kind) || n.kind == "block" || n.kind == "class_body";
}

// Pre-order nodes of the statement subtree, stopping at barriers.
std::vector<NodeId> PrunedSubtree(const FunctionUnit& fn, NodeId stmt, const lang::Language& lang) {
  const auto& tree = fn.tree();
  std::vector<NodeId> out;
  std::vector<NodeId> stack{stmt};
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    const auto& kids = tree.node(cur).children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (!IsBarrier(tree.node(*it), lang)) stack.push_back(*it);
    }
  }
  return out;
}

// Keeps the ancestors of every occurrence, then fills breadth-first up to
// `cap` nodes. The result stays connected.
std::vector<NodeId> TruncateSubtree(const FunctionUnit& fn, NodeId stmt,
                                    const std::vector<NodeId>& nodes,
                                    const std::set<NodeId>& occurrences, std::size_t cap) {
  const auto& tree = fn.tree();
  const std::set<NodeId> member(nodes.begin(), nodes.end());
  std::set<NodeId> keep;
  for (NodeId occ : occurrences) {
    if (member.count(occ) == 0) continue;
    for (NodeId cur = occ; cur != lang::kNoNode; cur = tree.node(cur).parent) {
      keep.insert(cur);
      if (cur == stmt) break;
    }
  }
  std::deque<NodeId> queue{stmt};
  while (!queue.empty() && keep.size() < cap) {
    const NodeId cur = queue.front();
    queue.pop_front();
    keep.insert(cur);
    for (NodeId c : tree.node(cur).children) {
      if (member.count(c) != 0) queue.push_back(c);
    }
  }
  std::vector<NodeId> out;
  for (NodeId n : nodes) {
    if (keep.count(n) != 0) out.push_back(n);
  }
  return out;
}

}  // namespace

ContextGraph BuildContextGraph(const FunctionUnit& fn, const lang::VariableBinding& b) {
  return BuildContextGraph(fn, b, lang::LanguageRegistry::Default().Get(fn.language()));
}

ContextGraph BuildContextGraph(const FunctionUnit& fn, const lang::VariableBinding& b,
                               const lang::Language& lang, const GraphOptions& options) {
  const auto& tree = fn.tree();
  if (b.occurrences.empty()) Fail(ErrorCode::kEmptyContext, "binding has no occurrences");
  std::set<NodeId> occurrences(b.occurrences.begin(), b.occurrences.end());

  std::vector<NodeId> statements;
  for (NodeId occ : b.occurrences) {
    const NodeId stmt = EnclosingStatement(fn, occ, lang);
    if (stmt == lang::kNoNode) {
      Fail(ErrorCode::kEmptyContext, "occurrence of '" + b.name + "' outside any statement");
    }
    if (std::find(statements.begin(), statements.end(), stmt) == statements.end()) {
      statements.push_back(stmt);
    }
  }
  std::sort(statements.begin(), statements.end(), [&](NodeId x, NodeId y) {
    return tree.node(x).span.begin < tree.node(y).span.begin;
  });

  std::map<NodeId, std::vector<NodeId>> subtrees;
  for (NodeId s : statements) subtrees[s] = PrunedSubtree(fn, s, lang);
  auto merged_size = [&](const std::vector<NodeId>& stmts) {
    std::size_t total = 0, occ = 0;
    for (NodeId s : stmts) {
      total += subtrees[s].size();
      for (NodeId n : subtrees[s]) occ += occurrences.count(n);
    }
    return total - occ + 1;
  };

  ContextGraph g;
  std::size_t dropped = 0;
  if (merged_size(statements) > options.max_nodes) {
    // Drop statements farthest (in code tokens) from the first occurrence.
    const std::size_t anchor = fn.CodeTokenIndexAt(tree.node(b.occurrences.front()).span.begin);
    const NodeId anchor_stmt = EnclosingStatement(fn, b.occurrences.front(), lang);
    auto distance = [&](NodeId s) {
      const std::size_t lo = fn.CodeTokenIndexAt(tree.node(s).span.begin);
      const std::size_t hi = fn.CodeTokenIndexAt(tree.node(s).span.end);
      if (anchor < lo) return lo - anchor;
      if (anchor >= hi) return anchor - hi + 1;
      return std::size_t{0};
    };
    std::vector<NodeId> by_distance = statements;
    std::stable_sort(by_distance.begin(), by_distance.end(),
                     [&](NodeId x, NodeId y) { return distance(x) < distance(y); });
    std::vector<NodeId> kept{anchor_stmt};
    for (NodeId s : by_distance) {
      if (s == anchor_stmt) continue;
      std::vector<NodeId> trial = kept;
      trial.push_back(s);
      if (merged_size(trial) <= options.max_nodes) kept = std::move(trial);
    }
    dropped = statements.size() - kept.size();
    std::sort(kept.begin(), kept.end(), [&](NodeId x, NodeId y) {
      return tree.node(x).span.begin < tree.node(y).span.begin;
    });
    statements = std::move(kept);
    if (merged_size(statements) > options.max_nodes) {
      subtrees[anchor_stmt] =
          TruncateSubtree(fn, anchor_stmt, subtrees[anchor_stmt], occurrences, options.max_nodes);
    }
  }
  g.statements = statements;
  g.dropped_statements = dropped;

  std::map<NodeId, int> index;
  int target = -1;
  for (NodeId s : statements) {
    for (NodeId n : subtrees[s]) {
      const SyntaxNode& node = tree.node(n);
      if (occurrences.count(n) != 0) {
        if (target < 0) {
          target = static_cast<int>(g.nodes.size());
          g.nodes.push_back(GraphNode{node.kind, std::string(fn.Text(n)), true, true, true, n});
        }
        index[n] = target;
        continue;
      }
      index[n] = static_cast<int>(g.nodes.size());
      GraphNode gn;
      gn.kind = node.kind;
      gn.is_leaf = node.IsLeaf();
      gn.is_name = node.token >= 0 && (node.kind == "identifier" || node.kind == "type_identifier");
      if (node.token >= 0) gn.text = std::string(fn.Text(n));
      gn.source_node = n;
      g.nodes.push_back(std::move(gn));
    }
  }
  g.target = target;

  std::set<GraphEdge> edges;
  auto add = [&](int s, int d, Relation r) {
    edges.insert(GraphEdge{s, d, r});
    edges.insert(GraphEdge{d, s, Reverse(r)});
  };
  for (NodeId s : statements) {
    const std::vector<NodeId>& nodes = subtrees[s];
    const std::set<NodeId> member(nodes.begin(), nodes.end());
    NodeId prev_leaf = lang::kNoNode;
    for (NodeId n : nodes) {
      const SyntaxNode& node = tree.node(n);
      if (n != s && member.count(node.parent) != 0) add(index[node.parent], index[n], Relation::kAst);
      if (node.token >= 0) {
        if (prev_leaf != lang::kNoNode && index[prev_leaf] != index[n]) {
          add(index[prev_leaf], index[n], Relation::kNextToken);
        }
        prev_leaf = n;
      }
    }
  }
  add(target, target, Relation::kSelfLoop);
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

std::string GraphToJson(const ContextGraph& g, int indent) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    nodes.push_back({{"id", i}, {"kind", n.kind}, {"text", n.text}, {"target", n.is_target}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const GraphEdge& e : g.edges) {
    edges.push_back({e.src, e.dst, std::string(RelationName(e.rel))});
  }
  nlohmann::json j{{"nodes", nodes}, {"edges", edges}, {"target", g.target}};
  return j.dump(indent);
}

}  // namespace varmark::graph
