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


#ifndef DIEBOLDS_CLASSIFY_H_
#define DIEBOLDS_CLASSIFY_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "diebolds/corpus.h"
#include "diebolds/features.h"

namespace diebolds {

// Binary linear classifier with a logistic calibration of its margin.
struct LinearModel {
  Relation relation = Relation::kSideEffects;
  std::map<std::string, double> weights;
  double bias = 0;
  double calib_scale = 1;   // a > 0
  double calib_offset = 0;  // b

  double margin(const FeatureVector &x) const;
  // 1 / (1 + exp(-(a * margin + b))), kept strictly inside (0, 1).
  double probability(double margin) const;
};

// Feature vectors and, per relation, the indices of its positive and
// negative examples.
struct TrainingSet {
  std::vector<std::string> keys;
  std::vector<FeatureVector> vectors;
  std::map<Relation, std::vector<int>> positives;
  std::map<Relation, std::vector<int>> negatives;

  int add(std::string key, FeatureVector vector);
  // Throws if a relation has an index both among positives and negatives.
  void validate() const;
};

// Negatives of each relation are the positives of all other relations plus
// an equal-size sample (without replacement, fixed by rng_seed) of `pool`.
// Examples are identified by key; an example positive for a relation is
// never among that relation's negatives.
TrainingSet build_training_set(
    const std::map<Relation, std::vector<std::pair<std::string, FeatureVector>>>
        &positives,
    const std::vector<std::pair<std::string, FeatureVector>> &pool,
    uint64_t rng_seed);

struct TrainOptions {
  double reg_lambda = 1e-4;
  int epochs = 20;
  uint64_t rng_seed = 1;
  double holdout_fraction = 0.1;
};

// Per relation, L2-regularised hinge loss minimised by stochastic
// subgradient descent (Pegasos step sizes, projection, and averaging of the
// epoch-end iterates over the second half of training) on a fixed
// permutation per epoch, followed by a Platt fit on a held-out 10%.
std::vector<LinearModel> train(const TrainingSet &data,
                               const TrainOptions &options = {});

// Platt scaling of margins to probabilities (labels are +1 / -1).
// Returns {a, b} with p = 1 / (1 + exp(-(a m + b))).
std::pair<double, double> fit_platt(const std::vector<double> &margins,
                                    const std::vector<int> &labels);

struct Prediction {
  std::optional<Relation> relation;  // empty means "other"
  double score = 0;

  std::string label() const;
};

Prediction predict(const std::vector<LinearModel> &models,
                   const FeatureVector &vector);

struct TripleKey {
  std::string subject;
  Relation relation;
  std::string object;
  auto operator<=>(const TripleKey &) const = default;
};

// Extracted facts, each with its best score.
class TripleStore {
 public:
  // Keeps the maximum score of duplicate triples.
  void add(const std::string &subject, Relation relation,
           const std::string &object, double score);
  const std::map<TripleKey, double> &triples() const { return triples_; }
  size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

 private:
  std::map<TripleKey, double> triples_;
};

// Classifies every list (or, with mentions_only, every NP on its own) and
// breaks positive lists into per-item triples. Only models of the document's
// domain take part.
TripleStore extract_triples(const std::vector<LinearModel> &models,
                            const Corpus &corpus, const FeatureFilter &filter,
                            int window = kDefaultWindow,
                            bool mentions_only = false);

void write_models(std::ostream &out, const std::vector<LinearModel> &models);
std::vector<LinearModel> read_models(std::istream &in);

void write_triple_store(std::ostream &out, const TripleStore &store);
TripleStore read_triple_store(std::istream &in);

}  // namespace diebolds

#endif  // DIEBOLDS_CLASSIFY_H_
