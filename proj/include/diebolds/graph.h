// Copyright 2026 The Diebolds Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef DIEBOLDS_GRAPH_H_
#define DIEBOLDS_GRAPH_H_

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "diebolds/corpus.h"
#include "diebolds/kb.h"
#include "diebolds/simstring.h"

namespace diebolds {

enum class NodeKind { kPair, kList };

struct ListKey {
  CorpusKind corpus = CorpusKind::kTarget;
  std::string doc_id;
  int sentence = 0;
  int ordinal = 0;

  auto operator<=>(const ListKey &) const = default;
};

struct NodeId {
  NodeKind kind = NodeKind::kPair;
  PairKey pair;  // set for pair nodes
  ListKey list;  // set for list nodes

  static NodeId for_pair(PairKey key);
  static NodeId for_list(ListKey key);

  std::string to_string() const;
  auto operator<=>(const NodeId &) const = default;
};

enum class EdgeType { kL, kS, kN };

char edge_type_code(EdgeType t);

struct Edge {
  int a = 0;
  int b = 0;
  EdgeType type = EdgeType::kL;
  double weight = 1.0;
};

struct Provenance {
  CorpusKind corpus = CorpusKind::kTarget;
  std::string doc_id;
  std::string location;

  auto operator<=>(const Provenance &) const = default;
};

// Undirected graph over pair and list nodes with typed, weighted edges.
// Node indices are dense; call canonicalize() to order them by NodeId.
class PropGraph {
 public:
  int add_node(const NodeId &id);
  void add_provenance(int node, Provenance p);

  // Adds an undirected edge. Self edges are ignored and at most one edge per
  // (a, b, type) is kept, with the larger weight. Returns true if inserted.
  bool add_edge(int a, int b, EdgeType type, double weight);

  int size() const { return static_cast<int>(nodes_.size()); }
  const NodeId &node(int i) const { return nodes_[i]; }
  const std::vector<NodeId> &nodes() const { return nodes_; }
  std::optional<int> find(const NodeId &id) const;

  // Resolves a (subject, NP) pair to its node, following merges.
  std::optional<int> find_pair(const PairKey &key) const;
  void add_alias(const PairKey &key, int node);
  const std::map<PairKey, int> &aliases() const { return aliases_; }

  const std::vector<Provenance> &provenance(int node) const {
    return provenance_[node];
  }
  bool from_corpus(int node, CorpusKind kind) const;

  std::vector<Edge> edges() const;
  size_t edge_count() const { return edges_.size(); }
  size_t edge_count(EdgeType type) const;
  bool has_edge(int a, int b, EdgeType type) const;

  // Drops all edges of one type.
  void remove_edges(EdgeType type);

  // Reorders nodes by NodeId so serialisation is deterministic.
  void canonicalize();

 private:
  using EdgeKey = std::tuple<int, int, EdgeType>;

  std::vector<NodeId> nodes_;
  std::map<NodeId, int> index_;
  std::vector<std::vector<Provenance>> provenance_;
  std::map<EdgeKey, double> edges_;
  std::map<PairKey, int> aliases_;
};

// One pair node per distinct (subject, NP), one list node per coordinate
// list or singleton, and an L edge from each item to its list.
PropGraph build_bipartite(const Corpus &corpus);

// Section title (matched case-insensitively) to the relation it discusses.
using SectionMap = std::map<std::string, Relation>;

SectionMap default_section_map();
SectionMap load_section_map(const std::string &path);
void write_section_map(std::ostream &out, const SectionMap &map);

struct SectionEdgeReport {
  int added = 0;
  int cross_document = 0;
  int within_document = 0;
  std::map<std::string, int> skipped_sections;  // title -> sentences
};

// S edges between pair nodes of whitelisted sections: same section title in
// two documents with matching NP strings, and NPs sharing a section of one
// document (each NP linked to at most `cap` others by document order).
SectionEdgeReport add_section_edges(PropGraph &graph, const Corpus &structured,
                                    const SectionMap &section_map,
                                    const TokenStats &stats, int cap = 10);

// Bag of context words per pair node: every word of each sentence holding
// the NP except the NP tokens themselves, TFIDF weighted across all bags.
std::unordered_map<int, ContextBOW> build_contexts(
    const PropGraph &graph, const std::vector<const Corpus *> &corpora);

// N edges between pair nodes of different corpora whose contexts have cosine
// >= min_sim. Candidates are taken greedily by decreasing similarity and an
// edge is kept only while both endpoints have fewer than `cap` N edges.
int add_neighbor_edges(PropGraph &graph,
                       const std::unordered_map<int, ContextBOW> &contexts,
                       double min_sim = 0.5, int cap = 10);

// Candidate N edges by exhaustive comparison, before capping. Exposed so the
// blocked candidate generation can be checked against it.
struct NeighborCandidate {
  int a;
  int b;
  double sim;
};
std::vector<NeighborCandidate> neighbor_candidates(
    const PropGraph &graph, const std::unordered_map<int, ContextBOW> &contexts,
    double min_sim, bool exhaustive);

// Combines two graphs, collapsing pair nodes whose subjects and NP strings
// both name_match (transitively).
PropGraph merge_matching_nodes(const PropGraph &target,
                               const PropGraph &structured,
                               const TokenStats &stats);

// Collapses matching pair nodes inside a single graph.
PropGraph merge_matching_nodes(const PropGraph &graph, const TokenStats &stats);

// Serialisation: nodes, edges and pair aliases as TSV.
void write_graph(const PropGraph &graph, std::ostream &nodes,
                 std::ostream &edges, std::ostream &aliases);
PropGraph read_graph(std::istream &nodes, std::istream &edges,
                     std::istream &aliases);

}  // namespace diebolds

#endif  // DIEBOLDS_GRAPH_H_
