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


// Synthetic entity-centric corpora with planted relation facts.

#ifndef DIEBOLDS_SYNTHDATA_H_
#define DIEBOLDS_SYNTHDATA_H_

#include <cstdint>
#include <string>
#include <vector>

#include "diebolds/corpus.h"
#include "diebolds/evaluate.h"
#include "diebolds/kb.h"

namespace diebolds {

struct SynthSpec {
  int n_target_docs = 200;
  int n_structured_docs = 50;
  std::vector<Relation> relations{kAllRelations.begin(), kAllRelations.end()};
  int facts_per_doc = 8;
  double list_rate = 0.9;       // chance a fact is rendered inside a list
  double ambiguity_rate = 0.3;  // chance a fact object comes from the shared pool
  double noise_rate = 0.2;      // chance of a spurious mention per planted fact
  double kb_coverage = 0.1;     // chance a true fact is in the KB
  double structured_overlap = 0.7;
  double generic_cue_rate = 0.5;  // fact sentences with a relation-neutral cue
  int vocab_per_relation = 120;
  double vocab_skew = 1.0;  // Zipf exponent of object frequencies
  double bullet_rate = 0.5;  // structured sections rendered as bullet lines
  int shared_terms = 30;
  uint64_t rng_seed = 1;

  // Throws on probabilities outside [0,1] or non-positive sizes.
  void validate() const;
};

struct SynthData {
  Corpus target;
  Corpus structured;
  std::vector<Triple> kb;
  GoldSet gold;
  // Every true fact of every subject, expressed in the target or not.
  std::vector<Triple> facts;
  // One entry per fact mention planted in the target corpus, in order.
  std::vector<Triple> planted;
};

SynthData generate(const SynthSpec &spec);

// Writes target.jsonl, structured.jsonl, kb.tsv, gold.tsv and facts.tsv
// into dir.
void write_synth(const SynthData &data, const std::string &dir);

}  // namespace diebolds

#endif  // DIEBOLDS_SYNTHDATA_H_
