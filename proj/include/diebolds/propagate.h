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


#ifndef DIEBOLDS_PROPAGATE_H_
#define DIEBOLDS_PROPAGATE_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "diebolds/graph.h"
#include "diebolds/kb.h"

namespace diebolds {

struct PropConfig {
  double alpha = 0.1;  // restart probability
  double tol = 1e-8;   // L1 change between iterations
  int max_iter = 200;

  void validate() const;
};

// Personalisation vector of one class.
struct SeedVector {
  Relation relation = Relation::kSideEffects;
  std::map<NodeId, double> r;
};

// One seed vector per relation present in `seeds`, uniform over the seed
// occurrences (a node seeded twice weighs twice). Seeds are resolved through
// the graph's pair aliases; an unknown pair is an error.
std::vector<SeedVector> make_seed_vectors(const PropGraph &graph,
                                          const std::vector<Seed> &seeds);

// Column-stochastic walk operator S D^-1 in compressed column form. Columns
// of isolated nodes are zero and flagged dangling.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(const PropGraph &graph);

  int size() const { return n_; }
  bool dangling(int j) const { return dangling_[j]; }
  double entry(int i, int j) const;

  // out = S D^-1 v; returns the mass sitting on dangling nodes.
  double apply(const std::vector<double> &v, std::vector<double> &out) const;

 private:
  int n_ = 0;
  std::vector<int> offsets_;
  std::vector<int> rows_;
  std::vector<double> values_;
  std::vector<bool> dangling_;
};

struct ScoreTable {
  std::vector<NodeId> nodes;
  std::vector<Relation> classes;             // ordered by relation name
  std::vector<std::vector<double>> scores;   // [class][node]
  std::vector<int> iterations;
  std::vector<bool> converged;

  std::optional<size_t> class_index(Relation r) const;
  const std::vector<double> &of(Relation r) const;
};

// MultiRankWalk: per class, power iteration of v = a r + (1 - a) S D^-1 v
// from v = r, with the mass of dangling nodes returned through r.
ScoreTable mrw(const PropGraph &graph, const std::vector<SeedVector> &seeds,
               const PropConfig &config = {});

// Argmax class per node; ties go to the class whose name sorts first, and
// nodes scoring zero everywhere stay unlabelled.
std::vector<std::optional<Relation>> assign_labels(const ScoreTable &scores);

// The n highest scoring list nodes of one class (positive scores only),
// descending, ties by NodeId.
std::vector<int> top_n(const ScoreTable &scores, Relation relation, int n,
                       std::optional<CorpusKind> corpus = std::nullopt);

void write_scores(std::ostream &out, const ScoreTable &scores);
ScoreTable read_scores(std::istream &in, const PropGraph &graph);

}  // namespace diebolds

#endif  // DIEBOLDS_PROPAGATE_H_
