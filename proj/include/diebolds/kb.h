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


#ifndef DIEBOLDS_KB_H_
#define DIEBOLDS_KB_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "diebolds/common.h"
#include "diebolds/corpus.h"
#include "diebolds/simstring.h"

namespace diebolds {

struct Triple {
  std::string subject;
  Relation relation = Relation::kSideEffects;
  std::string object;

  auto operator<=>(const Triple &) const = default;
};

// Identity of a pair node: the document subject and the NP string, both
// lowercased.
struct PairKey {
  std::string subject;
  std::string np;

  auto operator<=>(const PairKey &) const = default;
};

struct Seed {
  PairKey node;
  Relation relation = Relation::kSideEffects;

  auto operator<=>(const Seed &) const = default;
};

struct SeedSplit {
  std::vector<Seed> development;
  std::vector<Seed> validation;
  uint64_t rng_seed = 0;
};

// Objects longer than this, or containing a comma, are treated as KB noise.
inline constexpr size_t kMaxObjectLength = 60;

// Reads subject<TAB>relation<TAB>object lines; '#' lines are comments.
std::vector<Triple> parse_triples(std::istream &in);
std::vector<Triple> load_triples(const std::string &path);
void write_triples(std::ostream &out, const std::vector<Triple> &triples);

// Matches triples against a chunked corpus: the subject must name_match a
// document subject and the object a mention of that same document.
// Returns the distinct seeds, sorted.
std::vector<Seed> generate_seeds(const std::vector<Triple> &triples,
                                 const Corpus &corpus,
                                 const TokenStats &stats);

// Per-relation shuffle and split; the development side gets
// floor(n * ratio) seeds of each relation.
SeedSplit split_seeds(const std::vector<Seed> &seeds, double ratio,
                      uint64_t rng_seed);

void write_seeds(std::ostream &out, const std::vector<Seed> &seeds);
std::vector<Seed> parse_seeds(std::istream &in);

}  // namespace diebolds

#endif  // DIEBOLDS_KB_H_
