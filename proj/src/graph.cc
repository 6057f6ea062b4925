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


#include "diebolds/graph.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "json.hpp"

namespace diebolds {
namespace {

bool has_alnum(const std::string &s) {
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

NodeId NodeId::for_pair(PairKey key) {
  NodeId id;
  id.kind = NodeKind::kPair;
  id.pair = std::move(key);
  return id;
}

NodeId NodeId::for_list(ListKey key) {
  NodeId id;
  id.kind = NodeKind::kList;
  id.list = std::move(key);
  return id;
}

std::string NodeId::to_string() const {
  if (kind == NodeKind::kPair) return "pair:" + pair.subject + "|" + pair.np;
  return "list:" + std::string(corpus_kind_name(list.corpus)) + "/" +
         list.doc_id + "/" + std::to_string(list.sentence) + "/" +
         std::to_string(list.ordinal);
}

char edge_type_code(EdgeType t) {
  switch (t) {
    case EdgeType::kL: return 'L';
    case EdgeType::kS: return 'S';
    case EdgeType::kN: return 'N';
  }
  return '?';
}

int PropGraph::add_node(const NodeId &id) {
  auto it = index_.find(id);
  if (it != index_.end()) return it->second;
  const int idx = size();
  nodes_.push_back(id);
  provenance_.emplace_back();
  index_.emplace(id, idx);
  return idx;
}

void PropGraph::add_provenance(int node, Provenance p) {
  provenance_.at(node).push_back(std::move(p));
}

bool PropGraph::add_edge(int a, int b, EdgeType type, double weight) {
  if (a == b) return false;
  if (!(weight > 0 && weight <= 1)) {
    throw Error("edge weight must lie in (0, 1]");
  }
  if (a > b) std::swap(a, b);
  auto [it, inserted] = edges_.emplace(EdgeKey{a, b, type}, weight);
  if (!inserted) it->second = std::max(it->second, weight);
  return inserted;
}

std::optional<int> PropGraph::find(const NodeId &id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> PropGraph::find_pair(const PairKey &key) const {
  auto it = aliases_.find(key);
  if (it != aliases_.end()) return it->second;
  return find(NodeId::for_pair(key));
}

void PropGraph::add_alias(const PairKey &key, int node) {
  aliases_[key] = node;
}

bool PropGraph::from_corpus(int node, CorpusKind kind) const {
  for (const Provenance &p : provenance_[node]) {
    if (p.corpus == kind) return true;
  }
  return false;
}

std::vector<Edge> PropGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto &[key, w] : edges_) {
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
  }
  return out;
}

size_t PropGraph::edge_count(EdgeType type) const {
  size_t n = 0;
  for (const auto &entry : edges_) {
    if (std::get<2>(entry.first) == type) ++n;
  }
  return n;
}

bool PropGraph::has_edge(int a, int b, EdgeType type) const {
  if (a > b) std::swap(a, b);
  return edges_.count(EdgeKey{a, b, type}) > 0;
}

void PropGraph::remove_edges(EdgeType type) {
  std::erase_if(edges_, [type](const auto &entry) {
    return std::get<2>(entry.first) == type;
  });
}

void PropGraph::canonicalize() {
  std::vector<int> order(nodes_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return nodes_[a] < nodes_[b]; });
  std::vector<int> remap(nodes_.size());
  for (size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<int>(i);

  std::vector<NodeId> nodes;
  std::vector<std::vector<Provenance>> provenance;
  for (int old : order) {
    nodes.push_back(std::move(nodes_[old]));
    auto prov = std::move(provenance_[old]);
    std::sort(prov.begin(), prov.end());
    prov.erase(std::unique(prov.begin(), prov.end()), prov.end());
    provenance.push_back(std::move(prov));
  }
  std::map<EdgeKey, double> edges;
  for (const auto &[key, w] : edges_) {
    int a = remap[std::get<0>(key)], b = remap[std::get<1>(key)];
    if (a > b) std::swap(a, b);
    edges.emplace(EdgeKey{a, b, std::get<2>(key)}, w);
  }
  for (auto &entry : aliases_) entry.second = remap[entry.second];
  nodes_ = std::move(nodes);
  provenance_ = std::move(provenance);
  edges_ = std::move(edges);
  index_.clear();
  for (int i = 0; i < size(); ++i) index_.emplace(nodes_[i], i);
}

PropGraph build_bipartite(const Corpus &corpus) {
  PropGraph g;
  for (const SentenceLists &sl : extract_corpus_lists(corpus)) {
    const Document &doc = corpus.documents[sl.ref.document];
    const std::string subject = to_lower(doc.subject);
    for (size_t k = 0; k < sl.lists.size(); ++k) {
      const CoordList &list = sl.lists[k];
      if (std::all_of(list.items.begin(), list.items.end(),
                      [&](const Mention &m) { return is_self_mention(doc, m); })) {
        continue;
      }
      const int list_node = g.add_node(NodeId::for_list(
          {corpus.kind, doc.doc_id, sl.ref.sentence, static_cast<int>(k)}));
      g.add_provenance(list_node, {corpus.kind, doc.doc_id,
                                   "s" + std::to_string(sl.ref.sentence) +
                                       "#" + std::to_string(k)});
      for (const Mention &m : list.items) {
        if (is_self_mention(doc, m)) continue;
        PairKey key{subject, m.normalized};
        const int pair_node = g.add_node(NodeId::for_pair(key));
        g.add_alias(key, pair_node);
        g.add_provenance(pair_node,
                         {corpus.kind, doc.doc_id,
                          "s" + std::to_string(sl.ref.sentence) + ":" +
                              std::to_string(m.start) + "-" +
                              std::to_string(m.end)});
        g.add_edge(pair_node, list_node, EdgeType::kL, 1.0);
      }
    }
  }
  g.canonicalize();
  return g;
}

SectionMap default_section_map() {
  return {
      // Structured drug pages.
      {"uses", Relation::kUsedToTreat},
      {"side effects", Relation::kSideEffects},
      {"prevention uses", Relation::kConditionsThisMayPrevent},
      // Structured disease pages.
      {"symptoms", Relation::kSymptoms},
      {"causes", Relation::kCauses},
      {"risk factors", Relation::kRiskFactors},
      {"treatments and drugs", Relation::kTreatments},
      {"prevention", Relation::kPreventionFactors},
  };
}

SectionMap load_section_map(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open section map '" + path + "'");
  SectionMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    auto rel = cols.size() == 2 ? parse_relation(trim(cols[1])) : std::nullopt;
    if (!rel) {
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": expected <section title> TAB <relation>");
    }
    map[to_lower(trim(cols[0]))] = *rel;
  }
  return map;
}

void write_section_map(std::ostream &out, const SectionMap &map) {
  for (const auto &[title, rel] : map) {
    out << title << '\t' << relation_name(rel) << '\n';
  }
}

SectionEdgeReport add_section_edges(PropGraph &graph, const Corpus &structured,
                                    const SectionMap &section_map,
                                    const TokenStats &stats, int cap) {
  SectionEdgeReport report;
  SectionMap lowered;
  for (const auto &[title, rel] : section_map) lowered[to_lower(trim(title))] = rel;

  struct Occurrence {
    int doc;
    int node;
    std::string np;
    auto operator<=>(const Occurrence &) const = default;
  };
  std::map<std::string, std::set<Occurrence>> by_title;
  std::map<std::pair<int, std::string>, std::vector<int>> by_doc_section;

  for (size_t d = 0; d < structured.documents.size(); ++d) {
    const Document &doc = structured.documents[d];
    const std::string subject = to_lower(doc.subject);
    for (const Sentence &s : doc.sentences) {
      const std::string title = to_lower(trim(s.section_title));
      if (lowered.count(title) == 0) {
        ++report.skipped_sections[s.section_title];
        continue;
      }
      auto &ordered = by_doc_section[{static_cast<int>(d), title}];
      for (const Mention &m : chunk_nps(s)) {
        auto node = graph.find_pair({subject, m.normalized});
        if (!node) continue;
        by_title[title].insert({static_cast<int>(d), *node, m.normalized});
        if (std::find(ordered.begin(), ordered.end(), *node) == ordered.end()) {
          ordered.push_back(*node);
        }
      }
    }
  }

  // Same section title, two documents, matching NP strings.
  for (const auto &[title, occurrences] : by_title) {
    std::map<std::string, std::vector<const Occurrence *>> by_np;
    for (const Occurrence &o : occurrences) by_np[o.np].push_back(&o);
    std::vector<std::string> nps;
    for (const auto &entry : by_np) nps.push_back(entry.first);
    NameIndex index(nps, stats);
    for (size_t i = 0; i < nps.size(); ++i) {
      for (const auto &hit : index.find(nps[i])) {
        if (hit.index < static_cast<int>(i)) continue;
        for (const Occurrence *x : by_np[nps[i]]) {
          for (const Occurrence *y : by_np[nps[hit.index]]) {
            if (x->doc == y->doc) continue;
            if (graph.add_edge(x->node, y->node, EdgeType::kS, 1.0)) {
              ++report.added;
              ++report.cross_document;
            }
          }
        }
      }
    }
  }

  // NPs sharing a section of one document, banded by document order.
  for (const auto &[where, nodes] : by_doc_section) {
    const int m = static_cast<int>(nodes.size());
    const int reach = (m - 1 <= cap) ? m : cap / 2;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m && j - i <= reach; ++j) {
        if (graph.add_edge(nodes[i], nodes[j], EdgeType::kS, 1.0)) {
          ++report.added;
          ++report.within_document;
        }
      }
    }
  }
  return report;
}

std::unordered_map<int, ContextBOW> build_contexts(
    const PropGraph &graph, const std::vector<const Corpus *> &corpora) {
  std::map<int, std::map<std::string, int>> counts;
  for (const Corpus *corpus : corpora) {
    for (const Document &doc : corpus->documents) {
      const std::string subject = to_lower(doc.subject);
      const std::vector<std::string> name = split_whitespace(subject);
      const std::set<std::string> own(name.begin(), name.end());
      for (const Sentence &s : doc.sentences) {
        std::vector<std::string> words;
        for (const Token &t : s.tokens) words.push_back(to_lower(t.text));
        for (const Mention &m : chunk_nps(s)) {
          auto node = graph.find_pair({subject, m.normalized});
          if (!node) continue;
          auto &bag = counts[*node];
          for (int i = 1; i <= s.size(); ++i) {
            if (i >= m.start && i <= m.end) continue;
            if (!has_alnum(words[i - 1])) continue;
            if (own.count(words[i - 1])) continue;
            ++bag[words[i - 1]];
          }
        }
      }
    }
  }
  TokenStats stats;
  for (const auto &[node, bag] : counts) {
    std::vector<std::string> words;
    for (const auto &entry : bag) words.push_back(entry.first);
    stats.add_document(words);
  }
  std::unordered_map<int, ContextBOW> out;
  for (const auto &[node, bag] : counts) {
    ContextBOW bow;
    bow.owner = graph.node(node).to_string();
    for (const auto &[word, tf] : bag) {
      double w = tf * stats.idf(word);
      if (w > 0) bow.weights[word] = w;
    }
    out.emplace(node, std::move(bow));
  }
  return out;
}

std::vector<NeighborCandidate> neighbor_candidates(
    const PropGraph &graph, const std::unordered_map<int, ContextBOW> &contexts,
    double min_sim, bool exhaustive) {
  std::vector<int> target_side, structured_side;
  for (const auto &entry : contexts) {
    const int node = entry.first;
    if (graph.node(node).kind != NodeKind::kPair) continue;
    if (graph.from_corpus(node, CorpusKind::kTarget)) target_side.push_back(node);
    if (graph.from_corpus(node, CorpusKind::kStructured)) {
      structured_side.push_back(node);
    }
  }
  std::sort(target_side.begin(), target_side.end());
  std::sort(structured_side.begin(), structured_side.end());

  std::set<std::pair<int, int>> pairs;
  if (exhaustive) {
    for (int t : target_side) {
      for (int s : structured_side) {
        if (t != s) pairs.insert({std::min(t, s), std::max(t, s)});
      }
    }
  } else {
    std::unordered_map<std::string, std::vector<int>> postings;
    for (int s : structured_side) {
      for (const auto &entry : contexts.at(s).weights) {
        postings[entry.first].push_back(s);
      }
    }
    for (int t : target_side) {
      std::set<int> seen;
      for (const auto &entry : contexts.at(t).weights) {
        auto it = postings.find(entry.first);
        if (it == postings.end()) continue;
        seen.insert(it->second.begin(), it->second.end());
      }
      for (int s : seen) {
        if (t != s) pairs.insert({std::min(t, s), std::max(t, s)});
      }
    }
  }

  std::vector<NeighborCandidate> out;
  for (const auto &[a, b] : pairs) {
    double sim = context_cosine(contexts.at(a), contexts.at(b));
    if (sim > 0 && sim >= min_sim) out.push_back({a, b, sim});
  }
  std::sort(out.begin(), out.end(),
            [](const NeighborCandidate &x, const NeighborCandidate &y) {
              if (x.sim != y.sim) return x.sim > y.sim;
              if (x.a != y.a) return x.a < y.a;
              return x.b < y.b;
            });
  return out;
}

int add_neighbor_edges(PropGraph &graph,
                       const std::unordered_map<int, ContextBOW> &contexts,
                       double min_sim, int cap) {
  std::vector<int> degree(graph.size(), 0);
  for (const Edge &e : graph.edges()) {
    if (e.type != EdgeType::kN) continue;
    ++degree[e.a];
    ++degree[e.b];
  }
  int added = 0;
  for (const auto &c : neighbor_candidates(graph, contexts, min_sim, false)) {
    if (degree[c.a] >= cap || degree[c.b] >= cap) continue;
    if (graph.add_edge(c.a, c.b, EdgeType::kN, std::min(1.0, c.sim))) {
      ++degree[c.a];
      ++degree[c.b];
      ++added;
    }
  }
  return added;
}

PropGraph merge_matching_nodes(const PropGraph &graph,
                               const TokenStats &stats) {
  const int n = graph.size();
  DisjointSets sets(n);

  std::map<std::string, std::vector<int>> by_np;
  for (int i = 0; i < n; ++i) {
    if (graph.node(i).kind == NodeKind::kPair) {
      by_np[graph.node(i).pair.np].push_back(i);
    }
  }
  std::vector<std::string> nps;
  for (const auto &entry : by_np) nps.push_back(entry.first);
  NameIndex np_index(nps, stats);

  std::map<std::pair<std::string, std::string>, bool> subject_cache;
  auto subjects_match = [&](const std::string &a, const std::string &b) {
    if (a == b) return true;
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = subject_cache.find(key);
    if (it != subject_cache.end()) return it->second;
    bool m = names_match(a, b, stats);
    subject_cache.emplace(key, m);
    return m;
  };

  for (size_t i = 0; i < nps.size(); ++i) {
    for (const auto &hit : np_index.find(nps[i])) {
      if (hit.index < static_cast<int>(i)) continue;
      for (int x : by_np[nps[i]]) {
        for (int y : by_np[nps[hit.index]]) {
          if (x == y) continue;
          if (subjects_match(graph.node(x).pair.subject,
                             graph.node(y).pair.subject)) {
            sets.unite(x, y);
          }
        }
      }
    }
  }

  // Each component is represented by its smallest NodeId.
  std::vector<int> rep(n);
  for (int i = 0; i < n; ++i) rep[i] = i;
  for (int i = 0; i < n; ++i) {
    int root = sets.find(i);
    if (graph.node(i) < graph.node(rep[root])) rep[root] = i;
  }
  PropGraph out;
  std::vector<int> remap(n);
  for (int i = 0; i < n; ++i) {
    remap[i] = out.add_node(graph.node(rep[sets.find(i)]));
    for (const Provenance &p : graph.provenance(i)) {
      out.add_provenance(remap[i], p);
    }
  }
  for (const auto &[key, node] : graph.aliases()) {
    out.add_alias(key, remap[node]);
  }
  for (int i = 0; i < n; ++i) {
    if (graph.node(i).kind == NodeKind::kPair) {
      out.add_alias(graph.node(i).pair, remap[i]);
    }
  }
  for (const Edge &e : graph.edges()) {
    out.add_edge(remap[e.a], remap[e.b], e.type, e.weight);
  }
  out.canonicalize();
  return out;
}

PropGraph merge_matching_nodes(const PropGraph &target,
                               const PropGraph &structured,
                               const TokenStats &stats) {
  PropGraph combined;
  for (const PropGraph *g : {&target, &structured}) {
    std::vector<int> remap(g->size());
    for (int i = 0; i < g->size(); ++i) {
      remap[i] = combined.add_node(g->node(i));
      for (const Provenance &p : g->provenance(i)) {
        combined.add_provenance(remap[i], p);
      }
    }
    for (const auto &[key, node] : g->aliases()) {
      combined.add_alias(key, remap[node]);
    }
    for (const Edge &e : g->edges()) {
      combined.add_edge(remap[e.a], remap[e.b], e.type, e.weight);
    }
  }
  return merge_matching_nodes(combined, stats);
}

void write_graph(const PropGraph &graph, std::ostream &nodes,
                 std::ostream &edges, std::ostream &aliases) {
  for (int i = 0; i < graph.size(); ++i) {
    const NodeId &id = graph.node(i);
    nlohmann::json prov = nlohmann::json::array();
    for (const Provenance &p : graph.provenance(i)) {
      prov.push_back({std::string(corpus_kind_name(p.corpus)), p.doc_id,
                      p.location});
    }
    nodes << i << '\t';
    if (id.kind == NodeKind::kPair) {
      nodes << "pair\t" << id.pair.subject << '\t' << id.pair.np;
    } else {
      nodes << "list\t" << corpus_kind_name(id.list.corpus) << ':'
            << id.list.doc_id << '\t' << id.list.sentence << '.'
            << id.list.ordinal;
    }
    nodes << '\t' << prov.dump() << '\n';
  }
  for (const Edge &e : graph.edges()) {
    edges << e.a << '\t' << e.b << '\t' << edge_type_code(e.type) << '\t'
          << format_double(e.weight) << '\n';
  }
  for (const auto &[key, node] : graph.aliases()) {
    aliases << key.subject << '\t' << key.np << '\t' << node << '\n';
  }
}

PropGraph read_graph(std::istream &nodes, std::istream &edges,
                     std::istream &aliases) {
  PropGraph g;
  std::string line;
  int lineno = 0;
  auto bad = [&](const char *file) {
    return Error(std::string(file) + " line " + std::to_string(lineno) +
                 ": malformed");
  };
  while (std::getline(nodes, line)) {
    ++lineno;
    auto cols = split(line, '\t');
    if (cols.size() != 5) throw bad("nodes");
    NodeId id;
    if (cols[1] == "pair") {
      id = NodeId::for_pair({cols[2], cols[3]});
    } else if (cols[1] == "list") {
      auto colon = cols[2].find(':');
      auto dot = cols[3].find('.');
      if (colon == std::string::npos || dot == std::string::npos) {
        throw bad("nodes");
      }
      auto kind = parse_corpus_kind(cols[2].substr(0, colon));
      if (!kind) throw bad("nodes");
      id = NodeId::for_list({*kind, cols[2].substr(colon + 1),
                             std::stoi(cols[3].substr(0, dot)),
                             std::stoi(cols[3].substr(dot + 1))});
    } else {
      throw bad("nodes");
    }
    const int idx = g.add_node(id);
    if (idx != std::stoi(cols[0])) throw bad("nodes");
    for (const auto &p : nlohmann::json::parse(cols[4])) {
      auto kind = parse_corpus_kind(p.at(0).get<std::string>());
      if (!kind) throw bad("nodes");
      g.add_provenance(idx, {*kind, p.at(1).get<std::string>(),
                             p.at(2).get<std::string>()});
    }
  }
  lineno = 0;
  while (std::getline(edges, line)) {
    ++lineno;
    auto cols = split(line, '\t');
    if (cols.size() != 4 || cols[2].size() != 1) throw bad("edges");
    EdgeType type;
    switch (cols[2][0]) {
      case 'L': type = EdgeType::kL; break;
      case 'S': type = EdgeType::kS; break;
      case 'N': type = EdgeType::kN; break;
      default: throw bad("edges");
    }
    const int a = std::stoi(cols[0]), b = std::stoi(cols[1]);
    if (a < 0 || b < 0 || a >= g.size() || b >= g.size()) throw bad("edges");
    g.add_edge(a, b, type, parse_double(cols[3]));
  }
  lineno = 0;
  while (std::getline(aliases, line)) {
    ++lineno;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw bad("aliases");
    const int node = std::stoi(cols[2]);
    if (node < 0 || node >= g.size()) throw bad("aliases");
    g.add_alias({cols[0], cols[1]}, node);
  }
  return g;
}

}  // namespace diebolds
