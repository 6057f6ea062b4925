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


#ifndef DIEBOLDS_FEATURES_H_
#define DIEBOLDS_FEATURES_H_

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "diebolds/corpus.h"

namespace diebolds {

// Sparse feature vector keyed by "kind=value" ids. Presence features carry
// weight 1.
struct FeatureVector {
  std::map<std::string, double> items;

  bool has(const std::string &id) const { return items.count(id) > 0; }
  bool operator==(const FeatureVector &) const = default;
};

inline constexpr int kDefaultWindow = 2;
inline constexpr size_t kAffixLength = 3;

// Features of a mention or list, computed the same way for both:
//   npTok, prefix, suffix      tokens of the items and their affixes
//   sentTok                    sentence tokens outside the target span
//   ctxTok, ctxBigram          tokens/bigrams within `window` of the span,
//                              tagged left: or right:
//   depVerb, depMod, depPath   closest verb ancestor of the list head, its
//                              other dependents, and the label path to it
FeatureVector featurize(const CoordList &target, const Sentence &sentence,
                        int window = kDefaultWindow);
FeatureVector featurize(const CoordList &target, const Corpus &corpus,
                        int window = kDefaultWindow);

struct FeatureFilter {
  std::set<std::string> kept_vocabulary;
  bool drop_singletons = true;
  double drop_top_fraction = 0.05;
};

// Drops features present in exactly one vector and the
// ceil(drop_top_fraction * |vocabulary|) most frequent ones (frequency is
// the number of vectors holding the feature; ties by id).
FeatureFilter fit_filter(const std::vector<FeatureVector> &vectors,
                         double drop_top_fraction = 0.05);

FeatureVector apply_filter(const FeatureFilter &filter,
                           const FeatureVector &vector);

void write_filter(std::ostream &out, const FeatureFilter &filter);
FeatureFilter read_filter(std::istream &in);

// "label id:weight id:weight ..." lines.
void write_sparse(std::ostream &out, const std::string &label,
                  const FeatureVector &vector);
// Parses one sparse line into its label and vector.
std::pair<std::string, FeatureVector> parse_sparse(const std::string &line);

}  // namespace diebolds

#endif  // DIEBOLDS_FEATURES_H_
