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


#include "diebolds/propagate.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace diebolds {
namespace {

std::vector<Relation> sorted_by_name(std::vector<Relation> rels) {
  std::sort(rels.begin(), rels.end(), [](Relation a, Relation b) {
    return relation_name(a) < relation_name(b);
  });
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  return rels;
}

}  // namespace

void PropConfig::validate() const {
  if (!(alpha > 0 && alpha <= 1)) throw Error("alpha must lie in (0, 1]");
  if (!(tol > 0)) throw Error("tol must be positive");
  if (max_iter < 1) throw Error("max_iter must be at least 1");
}

std::vector<SeedVector> make_seed_vectors(const PropGraph &graph,
                                          const std::vector<Seed> &seeds) {
  std::map<Relation, std::map<NodeId, double>> counts;
  for (const Seed &s : seeds) {
    auto node = graph.find_pair(s.node);
    if (!node) {
      throw Error("seed node not in graph: " +
                  NodeId::for_pair(s.node).to_string());
    }
    counts[s.relation][graph.node(*node)] += 1.0;
  }
  std::vector<SeedVector> out;
  for (auto &[rel, r] : counts) {
    double total = 0;
    for (const auto &entry : r) total += entry.second;
    for (auto &entry : r) entry.second /= total;
    out.push_back({rel, std::move(r)});
  }
  return out;
}

TransitionMatrix::TransitionMatrix(const PropGraph &graph) : n_(graph.size()) {
  std::vector<std::map<int, double>> columns(n_);
  for (const Edge &e : graph.edges()) {
    columns[e.a][e.b] += e.weight;
    columns[e.b][e.a] += e.weight;
  }
  offsets_.assign(n_ + 1, 0);
  dangling_.assign(n_, false);
  for (int j = 0; j < n_; ++j) {
    double degree = 0;
    for (const auto &entry : columns[j]) degree += entry.second;
    dangling_[j] = degree == 0;
    for (const auto &[i, w] : columns[j]) {
      rows_.push_back(i);
      values_.push_back(w / degree);
    }
    offsets_[j + 1] = static_cast<int>(rows_.size());
  }
}

double TransitionMatrix::entry(int i, int j) const {
  for (int k = offsets_[j]; k < offsets_[j + 1]; ++k) {
    if (rows_[k] == i) return values_[k];
  }
  return 0.0;
}

double TransitionMatrix::apply(const std::vector<double> &v,
                               std::vector<double> &out) const {
  out.assign(n_, 0.0);
  double dangling_mass = 0;
  for (int j = 0; j < n_; ++j) {
    if (dangling_[j]) {
      dangling_mass += v[j];
      continue;
    }
    const double vj = v[j];
    if (vj == 0) continue;
    for (int k = offsets_[j]; k < offsets_[j + 1]; ++k) {
      out[rows_[k]] += values_[k] * vj;
    }
  }
  return dangling_mass;
}

std::optional<size_t> ScoreTable::class_index(Relation r) const {
  for (size_t c = 0; c < classes.size(); ++c) {
    if (classes[c] == r) return c;
  }
  return std::nullopt;
}

const std::vector<double> &ScoreTable::of(Relation r) const {
  auto c = class_index(r);
  if (!c) throw Error("no scores for class " + std::string(relation_name(r)));
  return scores[*c];
}

ScoreTable mrw(const PropGraph &graph, const std::vector<SeedVector> &seeds,
               const PropConfig &config) {
  config.validate();
  const int n = graph.size();
  TransitionMatrix walk(graph);

  std::vector<Relation> rels;
  for (const SeedVector &s : seeds) rels.push_back(s.relation);
  ScoreTable table;
  table.nodes = graph.nodes();
  table.classes = sorted_by_name(rels);

  for (Relation rel : table.classes) {
    std::vector<double> r(n, 0.0);
    for (const SeedVector &s : seeds) {
      if (s.relation != rel) continue;
      for (const auto &[id, p] : s.r) {
        auto node = graph.find(id);
        if (!node) throw Error("seed node not in graph: " + id.to_string());
        if (p < 0) throw Error("negative seed weight for " + id.to_string());
        r[*node] += p;
      }
    }
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    if (total <= 0) {
      throw Error("empty seed vector for " + std::string(relation_name(rel)));
    }
    for (double &x : r) x /= total;

    std::vector<double> v = r, next, walked;
    int iter = 0;
    bool converged = false;
    while (iter < config.max_iter) {
      ++iter;
      const double lost = walk.apply(v, walked);
      next.resize(n);
      double change = 0;
      for (int i = 0; i < n; ++i) {
        next[i] = config.alpha * r[i] +
                  (1 - config.alpha) * (walked[i] + lost * r[i]);
        change += std::abs(next[i] - v[i]);
      }
      v.swap(next);
      if (change < config.tol) {
        converged = true;
        break;
      }
    }
    table.scores.push_back(std::move(v));
    table.iterations.push_back(iter);
    table.converged.push_back(converged);
  }
  return table;
}

std::vector<std::optional<Relation>> assign_labels(const ScoreTable &scores) {
  const size_t n = scores.nodes.size();
  std::vector<std::optional<Relation>> labels(n);
  for (size_t i = 0; i < n; ++i) {
    double best = 0;
    for (size_t c = 0; c < scores.classes.size(); ++c) {
      if (scores.scores[c][i] > best) {
        best = scores.scores[c][i];
        labels[i] = scores.classes[c];
      }
    }
  }
  return labels;
}

std::vector<int> top_n(const ScoreTable &scores, Relation relation, int n,
                       std::optional<CorpusKind> corpus) {
  if (n < 1) throw Error("top_n needs n >= 1");
  const auto &v = scores.of(relation);
  std::vector<int> lists;
  for (size_t i = 0; i < scores.nodes.size(); ++i) {
    const NodeId &id = scores.nodes[i];
    if (id.kind == NodeKind::kList && v[i] > 0 &&
        (!corpus || id.list.corpus == *corpus)) {
      lists.push_back(static_cast<int>(i));
    }
  }
  auto better = [&](int a, int b) {
    if (v[a] != v[b]) return v[a] > v[b];
    return scores.nodes[a] < scores.nodes[b];
  };
  if (static_cast<int>(lists.size()) > n) {
    std::partial_sort(lists.begin(), lists.begin() + n, lists.end(), better);
    lists.resize(n);
  } else {
    std::sort(lists.begin(), lists.end(), better);
  }
  return lists;
}

void write_scores(std::ostream &out, const ScoreTable &scores) {
  for (size_t c = 0; c < scores.classes.size(); ++c) {
    out << "# " << relation_name(scores.classes[c]) << '\t'
        << scores.iterations[c] << '\t'
        << (scores.converged[c] ? "converged" : "not-converged") << '\n';
  }
  for (size_t c = 0; c < scores.classes.size(); ++c) {
    const auto &v = scores.scores[c];
    std::vector<size_t> order;
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (v[a] != v[b]) return v[a] > v[b];
      return a < b;
    });
    for (size_t i : order) {
      out << relation_name(scores.classes[c]) << '\t' << i << '\t'
          << format_double(v[i]) << '\n';
    }
  }
}

ScoreTable read_scores(std::istream &in, const PropGraph &graph) {
  ScoreTable table;
  table.nodes = graph.nodes();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "scores line " + std::to_string(lineno);
    if (line.rfind("# ", 0) == 0) {
      auto cols = split(line.substr(2), '\t');
      auto rel = cols.size() == 3 ? parse_relation(cols[0]) : std::nullopt;
      if (!rel) throw Error(where + ": malformed header");
      table.classes.push_back(*rel);
      table.iterations.push_back(std::stoi(cols[1]));
      table.converged.push_back(cols[2] == "converged");
      table.scores.emplace_back(graph.size(), 0.0);
      continue;
    }
    auto cols = split(line, '\t');
    auto rel = cols.size() == 3 ? parse_relation(cols[0]) : std::nullopt;
    if (!rel) throw Error(where + ": malformed");
    auto c = table.class_index(*rel);
    const int node = std::stoi(cols[1]);
    if (!c || node < 0 || node >= graph.size()) throw Error(where + ": bad ref");
    table.scores[*c][node] = parse_double(cols[2]);
  }
  return table;
}

}  // namespace diebolds
