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

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "diebolds/graph.h"
#include "doctest.h"
#include "test_util.h"

namespace diebolds {
namespace {

using testing::make_doc;
using testing::make_sentence;

int count_kind(const PropGraph &g, NodeKind kind) {
  int n = 0;
  for (const NodeId &id : g.nodes()) n += id.kind == kind;
  return n;
}

Corpus one_doc(CorpusKind kind, const std::string &subject,
               std::vector<Sentence> sentences, const std::string &id = "d1") {
  Corpus c;
  c.kind = kind;
  c.documents.push_back(make_doc(id, subject, std::move(sentences)));
  return c;
}

TEST_CASE("bipartite graph of one list") {
  Corpus c = one_doc(CorpusKind::kTarget, "Meloxicam",
                     {make_sentence("It/PRP causes/VBZ nausea/NN ,/, "
                                    "vomiting/NN ,/, and/CC rash/NN")});
  PropGraph g = build_bipartite(c);
  CHECK(count_kind(g, NodeKind::kPair) == 3);
  CHECK(count_kind(g, NodeKind::kList) == 1);
  CHECK(g.edge_count(EdgeType::kL) == 3);
  CHECK(g.edge_count() == 3);
  REQUIRE(g.find_pair({"meloxicam", "vomiting"}));
}

TEST_CASE("two drugs with three lists and four mentions") {
  Corpus c;
  c.documents.push_back(make_doc(
      "a", "Alpha",
      {make_sentence("It/PRP causes/VBZ nausea/NN ,/, vomiting/NN ,/, or/CC "
                     "rash/NN"),
       make_sentence("Headache/NN may/MD occur/VB"),
       make_sentence("Rash/NN is/VBZ rare/JJ")}));
  c.documents.push_back(make_doc(
      "b", "Beta",
      {make_sentence("It/PRP causes/VBZ nausea/NN and/CC insomnia/NN"),
       make_sentence("Some/DT report/VBP fatigue/NN or/CC tremor/NN"),
       make_sentence("Rash/NN was/VBD seen/VBN"),
       make_sentence("Nausea/NN may/MD persist/VB")}));
  PropGraph g = build_bipartite(c);
  // Pairs: alpha {nausea, vomiting, rash, headache}, beta {nausea, insomnia,
  // fatigue, tremor, rash}; lists: 3 coordinate + 4 singletons.
  CHECK(count_kind(g, NodeKind::kPair) == 9);
  CHECK(count_kind(g, NodeKind::kList) == 7);
  CHECK(g.edge_count(EdgeType::kL) == 11);
  CHECK(*g.find_pair({"alpha", "nausea"}) != *g.find_pair({"beta", "nausea"}));
}

TEST_CASE("subject self mentions stay out of the graph") {
  Corpus c = one_doc(CorpusKind::kTarget, "Meloxicam",
                     {make_sentence("Meloxicam/NNP causes/VBZ rash/NN"),
                      make_sentence("Meloxicam/NNP works/VBZ")});
  PropGraph g = build_bipartite(c);
  CHECK_FALSE(g.find_pair({"meloxicam", "meloxicam"}));
  CHECK(count_kind(g, NodeKind::kList) == 1);
}

TEST_CASE("edge bookkeeping") {
  PropGraph g;
  int a = g.add_node(NodeId::for_pair({"s", "a"}));
  int b = g.add_node(NodeId::for_pair({"s", "b"}));
  CHECK(g.add_edge(a, b, EdgeType::kN, 0.3));
  CHECK_FALSE(g.add_edge(b, a, EdgeType::kN, 0.7));
  CHECK(g.edges()[0].weight == 0.7);
  CHECK_FALSE(g.add_edge(a, a, EdgeType::kS, 1.0));
  CHECK(g.add_edge(a, b, EdgeType::kS, 1.0));
  CHECK(g.edge_count() == 2);
  CHECK_THROWS_AS(g.add_edge(a, b, EdgeType::kL, 0.0), Error);
  CHECK_THROWS_AS(g.add_edge(a, b, EdgeType::kL, 1.5), Error);
  g.remove_edges(EdgeType::kN);
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge(b, a, EdgeType::kS));
}

Corpus structured(std::vector<std::tuple<std::string, std::string, std::string>>
                      docs) {
  Corpus c;
  c.kind = CorpusKind::kStructured;
  int i = 0;
  for (auto &[subject, section, text] : docs) {
    c.documents.push_back(make_doc("s" + std::to_string(i++), subject,
                                   {make_sentence(text, section)}));
  }
  return c;
}

TokenStats np_stats(const PropGraph &g) {
  std::vector<std::string> names;
  for (const NodeId &id : g.nodes()) {
    if (id.kind == NodeKind::kPair) {
      names.push_back(id.pair.np);
      names.push_back(id.pair.subject);
    }
  }
  return TokenStats::from_strings(names);
}

TEST_CASE("cross document section edge") {
  Corpus c = structured({{"Meloxicam", "Side Effects", "Vomiting/NN may/MD occur/VB"},
                         {"Fluphenazine", "Side Effects", "Vomiting/NN may/MD occur/VB"}});
  PropGraph g = build_bipartite(c);
  auto report = add_section_edges(g, c, default_section_map(), np_stats(g));
  CHECK(report.added == 1);
  CHECK(report.cross_document == 1);
  CHECK(g.has_edge(*g.find_pair({"meloxicam", "vomiting"}),
                   *g.find_pair({"fluphenazine", "vomiting"}), EdgeType::kS));
}

TEST_CASE("within document section edge") {
  Corpus c = structured({{"Meloxicam", "Side Effects",
                          "Vomiting/NN and/CC stomach/NN upset/NN occur/VBP"}});
  PropGraph g = build_bipartite(c);
  auto report = add_section_edges(g, c, default_section_map(), np_stats(g));
  CHECK(report.added == 1);
  CHECK(report.within_document == 1);
}

TEST_CASE("different sections give no section edge") {
  Corpus c = structured({{"Meloxicam", "Side Effects", "Vomiting/NN may/MD occur/VB"},
                         {"Fluphenazine", "Uses", "Vomiting/NN is/VBZ treated/VBN"}});
  PropGraph g = build_bipartite(c);
  auto report = add_section_edges(g, c, default_section_map(), np_stats(g));
  CHECK(report.added == 0);
  CHECK(g.edge_count(EdgeType::kS) == 0);
}

TEST_CASE("unknown sections are skipped and counted") {
  Corpus c = structured({{"Meloxicam", "Overdose", "Vomiting/NN may/MD occur/VB"},
                         {"Fluphenazine", "Overdose", "Vomiting/NN may/MD occur/VB"}});
  PropGraph g = build_bipartite(c);
  auto report = add_section_edges(g, c, default_section_map(), np_stats(g));
  CHECK(report.added == 0);
  CHECK(report.skipped_sections.at("Overdose") == 2);
}

TEST_CASE("within document section edges respect the cap") {
  std::vector<Sentence> sentences;
  for (int i = 0; i < 30; ++i) {
    sentences.push_back(make_sentence("term" + std::to_string(i) +
                                          "/NN may/MD occur/VB",
                                      "Side Effects"));
  }
  Corpus c = one_doc(CorpusKind::kStructured, "Meloxicam", sentences);
  PropGraph g = build_bipartite(c);
  for (int cap : {4, 10}) {
    PropGraph h = g;
    add_section_edges(h, c, default_section_map(), np_stats(h), cap);
    std::vector<int> degree(h.size(), 0);
    for (const Edge &e : h.edges()) {
      if (e.type != EdgeType::kS) continue;
      ++degree[e.a];
      ++degree[e.b];
      CHECK(e.weight == 1.0);
    }
    CHECK(*std::max_element(degree.begin(), degree.end()) <= cap);
    CHECK(h.edge_count(EdgeType::kS) > 0);
  }
}

// Pair nodes on either side of the corpus divide with hand-set contexts.
struct ContextFixture {
  PropGraph graph;
  std::unordered_map<int, ContextBOW> contexts;
};

ContextFixture random_contexts(testing::Gen &gen, int n) {
  ContextFixture f;
  for (int i = 0; i < n; ++i) {
    int node = f.graph.add_node(NodeId::for_pair({"s", "np" + std::to_string(i)}));
    CorpusKind kind = gen.chance(0.5) ? CorpusKind::kTarget : CorpusKind::kStructured;
    f.graph.add_provenance(node, {kind, "d", ""});
    if (gen.chance(0.15)) f.graph.add_provenance(node, {CorpusKind::kStructured, "d2", ""});
    ContextBOW bow;
    int words = 1 + gen.below(4);
    for (int k = 0; k < words; ++k) {
      bow.weights["w" + std::to_string(gen.below(5))] = gen.uniform(0.1, 2);
    }
    f.contexts[node] = bow;
  }
  return f;
}

std::set<std::pair<int, int>> brute_force_neighbors(const ContextFixture &f,
                                                    double min_sim, int cap) {
  struct Cand { double sim; int a, b; };
  std::vector<Cand> cands;
  const int n = f.graph.size();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      bool cross =
          (f.graph.from_corpus(a, CorpusKind::kTarget) &&
           f.graph.from_corpus(b, CorpusKind::kStructured)) ||
          (f.graph.from_corpus(b, CorpusKind::kTarget) &&
           f.graph.from_corpus(a, CorpusKind::kStructured));
      if (!cross) continue;
      double sim = context_cosine(f.contexts.at(a), f.contexts.at(b));
      if (sim > 0 && sim >= min_sim) cands.push_back({sim, a, b});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand &x, const Cand &y) {
    return std::tie(y.sim, x.a, x.b) < std::tie(x.sim, y.a, y.b);
  });
  std::vector<int> degree(n, 0);
  std::set<std::pair<int, int>> out;
  for (const Cand &c : cands) {
    if (degree[c.a] >= cap || degree[c.b] >= cap) continue;
    ++degree[c.a];
    ++degree[c.b];
    out.insert({c.a, c.b});
  }
  return out;
}

TEST_CASE("neighbor edges equal the exhaustive oracle") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    ContextFixture f = random_contexts(gen, 10);
    for (auto [min_sim, cap] : {std::pair{0.5, 10}, std::pair{0.3, 2}, std::pair{0.9, 1}}) {
      PropGraph g = f.graph;
      int added = add_neighbor_edges(g, f.contexts, min_sim, cap);
      std::set<std::pair<int, int>> got;
      for (const Edge &e : g.edges()) {
        CHECK(e.type == EdgeType::kN);
        CHECK(e.weight > 0);
        CHECK(e.weight <= 1);
        got.insert({e.a, e.b});
      }
      CHECK(added == static_cast<int>(got.size()));
      CHECK(got == brute_force_neighbors(f, min_sim, cap));

      auto blocked = neighbor_candidates(f.graph, f.contexts, min_sim, false);
      auto full = neighbor_candidates(f.graph, f.contexts, min_sim, true);
      REQUIRE(blocked.size() == full.size());
      for (size_t i = 0; i < full.size(); ++i) {
        CHECK(blocked[i].a == full[i].a);
        CHECK(blocked[i].b == full[i].b);
      }
    }
  }
}

TEST_CASE("identical contexts give weight one, orthogonal none") {
  PropGraph g;
  int t = g.add_node(NodeId::for_pair({"s", "a"}));
  int s = g.add_node(NodeId::for_pair({"s", "b"}));
  int o = g.add_node(NodeId::for_pair({"s", "c"}));
  g.add_provenance(t, {CorpusKind::kTarget, "d", ""});
  g.add_provenance(s, {CorpusKind::kStructured, "e", ""});
  g.add_provenance(o, {CorpusKind::kStructured, "e", ""});
  std::unordered_map<int, ContextBOW> ctx = {
      {t, {"t", {{"x", 1}, {"y", 2}}}},
      {s, {"s", {{"x", 1}, {"y", 2}}}},
      {o, {"o", {{"z", 1}}}},
  };
  CHECK(add_neighbor_edges(g, ctx, 0.5, 10) == 1);
  REQUIRE(g.has_edge(t, s, EdgeType::kN));
  CHECK(g.edges()[0].weight == doctest::Approx(1.0));
  CHECK_FALSE(g.has_edge(t, o, EdgeType::kN));
}

TEST_CASE("contexts skip the NP and the subject name") {
  Corpus c = one_doc(CorpusKind::kTarget, "Meloxicam",
                     {make_sentence("Meloxicam/NNP may/MD cause/VB rash/NN ./."),
                      make_sentence("Take/VB it/PRP with/IN food/NN")});
  PropGraph g = build_bipartite(c);
  auto ctx = build_contexts(g, {&c});
  const ContextBOW &rash = ctx.at(*g.find_pair({"meloxicam", "rash"}));
  CHECK(rash.weights.count("may") == 1);
  CHECK(rash.weights.count("cause") == 1);
  CHECK(rash.weights.count("rash") == 0);
  CHECK(rash.weights.count("meloxicam") == 0);
  CHECK(rash.weights.count(".") == 0);
  CHECK(rash.weights.at("may") == doctest::Approx(std::log(2.0)));
}

TEST_CASE("merging matching pairs across corpora") {
  Corpus t = one_doc(CorpusKind::kTarget, "Meloxicam",
                     {make_sentence("It/PRP causes/VBZ vomiting/NN and/CC rash/NN")});
  Corpus s = one_doc(CorpusKind::kStructured, "meloxicam",
                     {make_sentence("Vomiting/NN may/MD occur/VB", "Side Effects")},
                     "m1");
  PropGraph gt = build_bipartite(t), gs = build_bipartite(s);
  TokenStats stats = TokenStats::from_strings({"meloxicam", "vomiting", "rash"});
  PropGraph m = merge_matching_nodes(gt, gs, stats);
  CHECK(m.size() == gt.size() + gs.size() - 1);
  int v = *m.find_pair({"meloxicam", "vomiting"});
  CHECK(m.from_corpus(v, CorpusKind::kTarget));
  CHECK(m.from_corpus(v, CorpusKind::kStructured));
  int degree = 0;
  for (const Edge &e : m.edges()) degree += (e.a == v || e.b == v);
  CHECK(degree == 2);
  CHECK(m.edge_count() == gt.edge_count() + gs.edge_count());

  PropGraph again = merge_matching_nodes(m, stats);
  CHECK(again.nodes() == m.nodes());
  CHECK(again.edge_count() == m.edge_count());
}

TEST_CASE("no matching pairs is a disjoint union") {
  Corpus t = one_doc(CorpusKind::kTarget, "Alpha",
                     {make_sentence("It/PRP causes/VBZ rash/NN")});
  Corpus s = one_doc(CorpusKind::kStructured, "Beta",
                     {make_sentence("Rash/NN may/MD occur/VB", "Side Effects")}, "b");
  TokenStats stats = TokenStats::from_strings({"alpha", "beta", "rash"});
  PropGraph m = merge_matching_nodes(build_bipartite(t), build_bipartite(s), stats);
  CHECK(m.size() == 4);
  CHECK(m.edge_count() == 2);
}

TEST_CASE("merging closes transitive chains") {
  // xqvorbil ~ xqvorbilant ~ qxvorbilant while the ends do not match.
  TokenStats stats =
      TokenStats::from_strings({"xqvorbil", "xqvorbilant", "qxvorbilant"});
  REQUIRE(names_match("xqvorbil", "xqvorbilant", stats));
  REQUIRE(names_match("xqvorbilant", "qxvorbilant", stats));
  REQUIRE_FALSE(names_match("xqvorbil", "qxvorbilant", stats));
  PropGraph g;
  for (const char *np : {"xqvorbil", "xqvorbilant", "qxvorbilant"}) {
    int n = g.add_node(NodeId::for_pair({"s", np}));
    g.add_alias({"s", np}, n);
  }
  PropGraph m = merge_matching_nodes(g, stats);
  CHECK(m.size() == 1);
  CHECK(*m.find_pair({"s", "xqvorbil"}) == *m.find_pair({"s", "qxvorbilant"}));
}

// Pairwise match closure by repeated relaxation, independent of the
// index and union-find used by the library.
std::vector<int> closure_classes(const std::vector<PairKey> &keys,
                                 const TokenStats &stats) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> cls(n);
  std::iota(cls.begin(), cls.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (cls[i] == cls[j]) continue;
        bool subj = keys[i].subject == keys[j].subject ||
                    soft_tfidf(keys[i].subject, keys[j].subject, stats) >= 0.8;
        if (subj && soft_tfidf(keys[i].np, keys[j].np, stats) >= 0.8) {
          int lo = std::min(cls[i], cls[j]);
          cls[i] = cls[j] = lo;
          changed = true;
        }
      }
    }
  }
  return cls;
}

TEST_CASE("merge partition equals the pairwise closure") {
  testing::Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> bases;
    for (int i = 0; i < 5; ++i) bases.push_back(gen.word(6, 9));
    std::vector<PairKey> keys;
    std::set<PairKey> seen;
    for (int i = 0; i < 25; ++i) {
      std::string np = bases[gen.below(5)];
      int edits = gen.below(3);
      for (int k = 0; k < edits; ++k) np += static_cast<char>('a' + gen.below(26));
      if (gen.chance(0.3)) np = bases[gen.below(5)] + " " + np;
      PairKey key{gen.chance(0.5) ? "alpha" : "alphas", np};
      if (seen.insert(key).second) keys.push_back(key);
    }
    std::vector<std::string> names;
    for (const PairKey &k : keys) {
      names.push_back(k.np);
      names.push_back(k.subject);
    }
    TokenStats stats = TokenStats::from_strings(names);
    PropGraph g;
    for (const PairKey &k : keys) g.add_alias(k, g.add_node(NodeId::for_pair(k)));
    PropGraph m = merge_matching_nodes(g, stats);
    auto cls = closure_classes(keys, stats);
    for (size_t i = 0; i < keys.size(); ++i) {
      for (size_t j = i + 1; j < keys.size(); ++j) {
        bool same_oracle = cls[i] == cls[j];
        bool same_merged = *m.find_pair(keys[i]) == *m.find_pair(keys[j]);
        CHECK(same_oracle == same_merged);
      }
    }
  }
}

TEST_CASE("graph serialisation round trips") {
  Corpus c = one_doc(CorpusKind::kTarget, "Meloxicam",
                     {make_sentence("It/PRP causes/VBZ nausea/NN ,/, "
                                    "vomiting/NN ,/, and/CC rash/NN")});
  PropGraph g = build_bipartite(c);
  g.add_edge(0, 1, EdgeType::kN, 0.25);
  std::ostringstream n1, e1, a1;
  write_graph(g, n1, e1, a1);
  std::istringstream n2(n1.str()), e2(e1.str()), a2(a1.str());
  PropGraph back = read_graph(n2, e2, a2);
  std::ostringstream n3, e3, a3;
  write_graph(back, n3, e3, a3);
  CHECK(n1.str() == n3.str());
  CHECK(e1.str() == e3.str());
  CHECK(a1.str() == a3.str());
}

TEST_CASE("L edges are bipartite, S and N join pairs") {
  testing::Gen gen(8);
  ContextFixture f = random_contexts(gen, 12);
  add_neighbor_edges(f.graph, f.contexts, 0.3, 5);
  for (const Edge &e : f.graph.edges()) {
    const NodeId &a = f.graph.node(e.a), &b = f.graph.node(e.b);
    if (e.type == EdgeType::kL) {
      CHECK(a.kind != b.kind);
    } else {
      CHECK(a.kind == NodeKind::kPair);
      CHECK(b.kind == NodeKind::kPair);
    }
  }
}

}  // namespace
}  // namespace diebolds
