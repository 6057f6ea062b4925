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

#include <set>
#include <sstream>

#include "diebolds/kb.h"
#include "diebolds/synthdata.h"
#include "doctest.h"
#include "test_util.h"

namespace diebolds {
namespace {

using testing::make_doc;
using testing::make_sentence;

TokenStats stats_for(const Corpus &corpus, const std::vector<Triple> &kb) {
  std::vector<std::string> names;
  for (const Document &d : corpus.documents) names.push_back(d.subject);
  for (const SentenceLists &sl : extract_corpus_lists(corpus)) {
    for (const CoordList &l : sl.lists) {
      for (const Mention &m : l.items) names.push_back(m.normalized);
    }
  }
  for (const Triple &t : kb) names.push_back(t.object);
  return TokenStats::from_strings(names);
}

TEST_CASE("load_triples filters noisy objects") {
  std::string long_obj(61, 'x');
  std::string exact(60, 'y');
  std::istringstream in(
      "# comment\n"
      "meloxicam\tside_effects\tstomach bleeding\n"
      "meloxicam\tside_effects\t" + long_obj + "\n"
      "meloxicam\tside_effects\t" + exact + "\n"
      "meloxicam\tside_effects\tnausea, vomiting\n");
  auto triples = parse_triples(in);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0] == Triple{"meloxicam", Relation::kSideEffects,
                             "stomach bleeding"});
  CHECK(triples[1].object == exact);
}

TEST_CASE("load_triples reports bad lines") {
  std::istringstream in("a\tside_effects\tb\nmeloxicam\tadverse\tx\n");
  CHECK_THROWS_WITH_AS(parse_triples(in), doctest::Contains("line 2"), Error);
  std::istringstream cols("a\tb\n");
  CHECK_THROWS_AS(parse_triples(cols), Error);
}

TEST_CASE("seeds from a matching document") {
  Corpus c;
  c.documents.push_back(make_doc(
      "d1", "Meloxicam",
      {make_sentence("It/PRP raises/VBZ the/DT risk/NN of/IN stomach/NN "
                     "bleeding/NN")}));
  c.documents.push_back(make_doc(
      "d2", "Fluphenazine", {make_sentence("It/PRP causes/VBZ rash/NN")}));
  std::vector<Triple> kb = {
      {"meloxicam", Relation::kSideEffects, "stomach bleeding"},
      {"unknownium", Relation::kSideEffects, "rash"},
      {"meloxicam", Relation::kSideEffects, "rash"},
  };
  auto seeds = generate_seeds(kb, c, stats_for(c, kb));
  REQUIRE(seeds.size() == 1);
  CHECK(seeds[0].node == PairKey{"meloxicam", "stomach bleeding"});
  CHECK(seeds[0].relation == Relation::kSideEffects);
}

// Exhaustive (triple, document, mention) scan.
std::set<Seed> brute_force_seeds(const std::vector<Triple> &kb,
                                 const Corpus &corpus,
                                 const TokenStats &stats) {
  std::set<Seed> out;
  auto lists = extract_corpus_lists(corpus);
  for (const Triple &t : kb) {
    for (const SentenceLists &sl : lists) {
      const Document &doc = corpus.documents[sl.ref.document];
      if (soft_tfidf(t.subject, doc.subject, stats) < 0.8) continue;
      for (const CoordList &l : sl.lists) {
        for (const Mention &m : l.items) {
          if (soft_tfidf(t.object, m.normalized, stats) >= 0.8) {
            out.insert(Seed{{to_lower(doc.subject), m.normalized}, t.relation});
          }
        }
      }
    }
  }
  return out;
}

TEST_CASE("planted object mentions give exactly that many seeds") {
  testing::Gen g(5);
  Corpus c;
  std::vector<Triple> kb;
  int planted = 0;
  std::set<std::string> used;
  auto fresh = [&] {
    std::string w;
    do w = g.word(6, 9); while (!used.insert(w).second);
    return w;
  };
  for (int d = 0; d < 12; ++d) {
    std::string subject = fresh();
    std::vector<Sentence> sentences;
    for (int s = 0; s < 4; ++s) {
      std::string obj = fresh();
      sentences.push_back(make_sentence(subject + "/NNP causes/VBZ " + obj +
                                        "/NN ./."));
      if (g.chance(0.5)) {
        kb.push_back({subject, Relation::kSideEffects, obj});
        ++planted;
      }
    }
    c.documents.push_back(make_doc("d" + std::to_string(d), subject,
                                   std::move(sentences)));
  }
  // Objects absent from the corpus contribute nothing.
  kb.push_back({c.documents[0].subject, Relation::kSideEffects, fresh()});
  TokenStats stats = stats_for(c, kb);
  auto seeds = generate_seeds(kb, c, stats);
  CHECK(static_cast<int>(seeds.size()) == planted);
  CHECK(std::set<Seed>(seeds.begin(), seeds.end()) ==
        brute_force_seeds(kb, c, stats));
}

TEST_CASE("seed generation equals the exhaustive scan on synthetic data") {
  SynthSpec spec;
  spec.n_target_docs = 20;
  spec.n_structured_docs = 4;
  spec.kb_coverage = 0.6;
  spec.rng_seed = 9;
  SynthData data = generate(spec);
  TokenStats stats = stats_for(data.target, data.kb);
  auto seeds = generate_seeds(data.kb, data.target, stats);
  CHECK_FALSE(seeds.empty());
  CHECK(std::set<Seed>(seeds.begin(), seeds.end()) ==
        brute_force_seeds(data.kb, data.target, stats));
}

std::vector<Seed> numbered_seeds(int n, Relation r) {
  std::vector<Seed> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(Seed{{"s", "np" + std::to_string(i)}, r});
  }
  return out;
}

TEST_CASE("split_seeds") {
  auto seeds = numbered_seeds(100, Relation::kCauses);
  SeedSplit a = split_seeds(seeds, 0.9, 1);
  CHECK(a.development.size() == 90);
  CHECK(a.validation.size() == 10);
  SeedSplit b = split_seeds(seeds, 0.9, 1);
  CHECK(a.development == b.development);
  CHECK(a.validation == b.validation);
  SeedSplit c = split_seeds(seeds, 0.9, 2);
  CHECK(c.validation != a.validation);

  std::set<Seed> all(a.development.begin(), a.development.end());
  for (const Seed &s : a.validation) CHECK(all.insert(s).second);
  CHECK(all == std::set<Seed>(seeds.begin(), seeds.end()));

  SeedSplit big = split_seeds(numbered_seeds(1524, Relation::kTreatments), 0.9, 3);
  CHECK(big.development.size() == 1371);
  CHECK(big.validation.size() == 153);

  CHECK_THROWS_AS(split_seeds(seeds, 1.0, 1), Error);
  CHECK_THROWS_AS(split_seeds(seeds, 0.0, 1), Error);
}

TEST_CASE("split_seeds keeps lone seeds in development") {
  take_warnings();
  auto seeds = numbered_seeds(1, Relation::kCauses);
  auto more = numbered_seeds(10, Relation::kSymptoms);
  seeds.insert(seeds.end(), more.begin(), more.end());
  SeedSplit s = split_seeds(seeds, 0.9, 1);
  CHECK(s.development.size() == 10);
  CHECK(s.validation.size() == 1);
  CHECK(s.validation[0].relation == Relation::kSymptoms);
  CHECK(take_warnings().size() == 1);
}

TEST_CASE("seed files round trip") {
  auto seeds = numbered_seeds(3, Relation::kRiskFactors);
  std::ostringstream out;
  write_seeds(out, seeds);
  std::istringstream in(out.str());
  CHECK(parse_seeds(in) == seeds);
}

}  // namespace
}  // namespace diebolds
