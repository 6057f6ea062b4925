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

#include <map>
#include <set>
#include <sstream>

#include "diebolds/graph.h"
#include "diebolds/synthdata.h"
#include "doctest.h"
#include "test_util.h"

namespace diebolds {
namespace {

std::string corpus_text(const Corpus &c) {
  std::ostringstream out;
  write_corpus(out, c);
  return out.str();
}

// Lowercased token stream of a document, space separated and padded.
std::string doc_text(const Document &d) {
  std::string s = " ";
  for (const Sentence &sent : d.sentences) {
    for (const Token &t : sent.tokens) s += to_lower(t.text) + " ";
  }
  return s;
}

SynthSpec small_spec() {
  SynthSpec spec;
  spec.n_target_docs = 40;
  spec.n_structured_docs = 10;
  return spec;
}

TEST_CASE("generation is deterministic") {
  SynthData a = generate(small_spec());
  SynthData b = generate(small_spec());
  CHECK(corpus_text(a.target) == corpus_text(b.target));
  CHECK(corpus_text(a.structured) == corpus_text(b.structured));
  CHECK(a.kb == b.kb);
  CHECK(a.planted == b.planted);

  const std::string d1 = testing::scratch_dir("synth-a");
  const std::string d2 = testing::scratch_dir("synth-b");
  write_synth(a, d1);
  write_synth(b, d2);
  for (const char *f : {"target.jsonl", "structured.jsonl", "kb.tsv", "gold.tsv",
                        "facts.tsv"}) {
    CHECK(testing::slurp(d1 + "/" + f) == testing::slurp(d2 + "/" + f));
    CHECK_FALSE(testing::slurp(d1 + "/" + f).empty());
  }

  SynthSpec other = small_spec();
  other.rng_seed = 2;
  CHECK(corpus_text(generate(other).target) != corpus_text(a.target));
}

TEST_CASE("noiseless facts appear verbatim") {
  SynthSpec spec = small_spec();
  spec.noise_rate = 0;
  spec.ambiguity_rate = 0;
  SynthData data = generate(spec);
  std::map<std::string, std::string> text;
  for (const Document &d : data.target.documents) text[d.subject] = doc_text(d);
  REQUIRE_FALSE(data.planted.empty());
  for (const Triple &t : data.planted) {
    REQUIRE(text.count(t.subject));
    CHECK(text[t.subject].find(" " + t.object + " ") != std::string::npos);
  }
}

TEST_CASE("gold facts are present in the target text") {
  SynthData data = generate(small_spec());
  std::map<std::string, std::string> text;
  for (const Document &d : data.target.documents) text[d.subject] = doc_text(d);
  for (const auto &[query, objects] : data.gold.queries()) {
    REQUIRE(text.count(query.first));
    for (const std::string &o : objects) {
      CHECK(text[query.first].find(" " + o + " ") != std::string::npos);
    }
  }
}

TEST_CASE("without noise the kb only holds true facts") {
  SynthSpec spec = small_spec();
  spec.noise_rate = 0;
  SynthData data = generate(spec);
  std::set<Triple> facts(data.facts.begin(), data.facts.end());
  REQUIRE_FALSE(data.kb.empty());
  for (const Triple &t : data.kb) CHECK(facts.count(t));
}

TEST_CASE("structured section titles come from the default map") {
  SynthData data = generate(small_spec());
  const SectionMap map = default_section_map();
  int seen = 0;
  for (const Document &d : data.structured.documents) {
    for (const Sentence &s : d.sentences) {
      if (s.section_title.empty() || s.section_title == "overview") continue;
      CHECK(map.count(to_lower(s.section_title)));
      ++seen;
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("ambiguity rate is reproduced") {
  SynthSpec spec;
  spec.ambiguity_rate = 0.3;
  SynthData data = generate(spec);
  std::map<std::string, std::set<Relation>> relations_of;
  for (const Triple &t : data.facts) relations_of[t.object].insert(t.relation);
  REQUIRE(data.planted.size() >= 1000);
  int shared = 0;
  for (const Triple &t : data.planted) shared += relations_of[t.object].size() >= 2;
  const double rate = static_cast<double>(shared) / data.planted.size();
  CHECK(rate > 0.25);
  CHECK(rate < 0.35);
}

TEST_CASE("invalid specs are rejected") {
  SynthSpec spec;
  spec.noise_rate = 1.5;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = SynthSpec{};
  spec.n_target_docs = 0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = SynthSpec{};
  spec.relations.clear();
  CHECK_THROWS_AS(generate(spec), Error);
}

}  // namespace
}  // namespace diebolds
