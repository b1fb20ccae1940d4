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

// Brute-force reference for variable context graphs. Nodes are keyed by
// syntax node id, with -1 standing for the merged target.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "varmark/graph/context_graph.hpp"
#include "varmark/lang/language.hpp"
#include "varmark/lang/variables.hpp"

namespace varmark::oracle {

struct RefNode {
  std::string kind;
  std::string text;
  friend bool operator==(const RefNode&, const RefNode&) = default;
};

struct RefGraph {
  std::map<lang::NodeId, RefNode> nodes;
  std::set<std::tuple<lang::NodeId, lang::NodeId, int>> edges;
};

inline constexpr lang::NodeId kTargetKey = -1;

inline bool IsBarrierKind(const std::string& kind, const lang::Language& lang) {
  return lang.IsStatementKind(kind) || kind == "block" || kind == "class_body";
}

// Whether `n` lies in the subtree of statement `s` without crossing a
// nested statement, block or class body.
inline bool InStatement(const lang::SyntaxTree& tree, lang::NodeId s, lang::NodeId n,
                        const lang::Language& lang) {
  for (lang::NodeId cur = n; cur != lang::kNoNode; cur = tree.node(cur).parent) {
    if (cur == s) return true;
    if (IsBarrierKind(tree.node(cur).kind, lang)) return false;
  }
  return false;
}

inline RefGraph BuildReference(const lang::FunctionUnit& fn, const lang::VariableBinding& b,
                               const lang::Language& lang) {
  const auto& tree = fn.tree();
  const std::set<lang::NodeId> occ(b.occurrences.begin(), b.occurrences.end());
  std::set<lang::NodeId> statements;
  for (lang::NodeId o : b.occurrences) {
    lang::NodeId cur = tree.node(o).parent;
    while (cur != lang::kNoNode && !lang.IsStatementKind(tree.node(cur).kind)) cur = tree.node(cur).parent;
    statements.insert(cur);
  }
  auto key = [&](lang::NodeId n) { return occ.count(n) ? kTargetKey : n; };
  RefGraph g;
  for (lang::NodeId s : statements) {
    std::vector<std::pair<std::uint32_t, lang::NodeId>> leaves;
    for (lang::NodeId n = 0; n < static_cast<lang::NodeId>(tree.size()); ++n) {
      if (!InStatement(tree, s, n, lang)) continue;
      const auto& node = tree.node(n);
      const std::string text = node.token >= 0 ? std::string(fn.Text(n)) : "";
      g.nodes[key(n)] = RefNode{node.kind, text};
      if (n != s && InStatement(tree, s, node.parent, lang)) {
        g.edges.insert({key(node.parent), key(n), 0});
        g.edges.insert({key(n), key(node.parent), 3});
      }
      if (node.token >= 0) leaves.push_back({node.span.begin, n});
    }
    std::sort(leaves.begin(), leaves.end());
    for (std::size_t i = 1; i < leaves.size(); ++i) {
      const lang::NodeId a = key(leaves[i - 1].second);
      const lang::NodeId c = key(leaves[i].second);
      if (a == c) continue;
      g.edges.insert({a, c, 1});
      g.edges.insert({c, a, 4});
    }
  }
  g.edges.insert({kTargetKey, kTargetKey, 2});
  g.edges.insert({kTargetKey, kTargetKey, 5});
  return g;
}

// Re-keys a built graph by syntax node id for comparison.
inline RefGraph Rekey(const graph::ContextGraph& g) {
  RefGraph out;
  std::vector<lang::NodeId> keys;
  for (const auto& n : g.nodes) {
    const lang::NodeId k = n.is_target ? kTargetKey : n.source_node;
    keys.push_back(k);
    out.nodes[k] = RefNode{n.kind, n.text};
  }
  for (const auto& e : g.edges) {
    out.edges.insert({keys[static_cast<std::size_t>(e.src)], keys[static_cast<std::size_t>(e.dst)],
                      static_cast<int>(e.rel)});
  }
  return out;
}

struct GraphComparison {
  bool nodes_match = false;
  bool edges_match = false;
  bool reverse_complete = false;
  bool single_target = false;
  bool ok() const { return nodes_match && edges_match && reverse_complete && single_target; }
};

inline GraphComparison Compare(const graph::ContextGraph& built, const RefGraph& ref) {
  GraphComparison c;
  int targets = 0;
  for (const auto& n : built.nodes) targets += n.is_target ? 1 : 0;
  c.single_target = targets == 1 && built.nodes[static_cast<std::size_t>(built.target)].is_target;
  const RefGraph got = Rekey(built);
  // Re-keying collapses duplicates, so the sizes must agree as well.
  c.nodes_match = got.nodes == ref.nodes && built.nodes.size() == ref.nodes.size();
  c.edges_match = got.edges == ref.edges && built.edges.size() == ref.edges.size();
  c.reverse_complete = true;
  for (const auto& e : built.edges) {
    const graph::GraphEdge rev{e.dst, e.src, graph::Reverse(e.rel)};
    if (!std::binary_search(built.edges.begin(), built.edges.end(), rev)) c.reverse_complete = false;
  }
  return c;
}

// Hand-written functions covering loops, branches, nested blocks, several
// occurrences per statement and parameters.
inline std::vector<std::string> OracleSnippets() {
  return {
      "int sum(int[] values) {\n"
      "  int total = 0;\n"
      "  for (int i = 0; i < values.length; i++) {\n"
      "    total += values[i];\n"
      "  }\n"
      "  return total;\n"
      "}\n",
      "String join(List<String> parts, String sep) {\n"
      "  StringBuilder sb = new StringBuilder();\n"
      "  for (String p : parts) {\n"
      "    if (sb.length() > 0) sb.append(sep);\n"
      "    sb.append(p);\n"
      "  }\n"
      "  return sb.toString();\n"
      "}\n",
      "static int gcd(int a, int b) {\n"
      "  while (b != 0) {\n"
      "    int t = a % b;\n"
      "    a = b;\n"
      "    b = t;\n"
      "  }\n"
      "  return a;\n"
      "}\n",
      "boolean check(int code) {\n"
      "  int limit = code * code + code;\n"
      "  switch (code) {\n"
      "    case 1: return limit > 2;\n"
      "    default: break;\n"
      "  }\n"
      "  if (limit > 10 && code < limit) { return true; } else { limit = 0; }\n"
      "  return limit == code;\n"
      "}\n",
      "void copy(File src, File dst) throws IOException {\n"
      "  try (InputStream in = new FileInputStream(src)) {\n"
      "    byte[] buffer = new byte[4096];\n"
      "    int n;\n"
      "    while ((n = in.read(buffer)) > 0) { System.out.println(n); }\n"
      "  } catch (IOException e) {\n"
      "    throw e;\n"
      "  }\n"
      "}\n",
  };
}

}  // namespace varmark::oracle
