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


#include "diebolds/kb.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>

namespace diebolds {

std::vector<Triple> parse_triples(std::istream &in) {
  std::vector<Triple> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (cols.size() != 3) {
      throw Error(where + "expected 3 tab-separated columns, got " +
                  std::to_string(cols.size()));
    }
    auto rel = parse_relation(trim(cols[1]));
    if (!rel) throw Error(where + "unknown relation '" + cols[1] + "'");
    Triple t{trim(cols[0]), *rel, trim(cols[2])};
    if (t.subject.empty() || t.object.empty()) {
      throw Error(where + "empty subject or object");
    }
    if (t.object.size() > kMaxObjectLength ||
        t.object.find(',') != std::string::npos) {
      continue;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Triple> load_triples(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open KB file '" + path + "'");
  try {
    return parse_triples(in);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

void write_triples(std::ostream &out, const std::vector<Triple> &triples) {
  for (const Triple &t : triples) {
    out << t.subject << '\t' << relation_name(t.relation) << '\t' << t.object
        << '\n';
  }
}

std::vector<Seed> generate_seeds(const std::vector<Triple> &triples,
                                 const Corpus &corpus,
                                 const TokenStats &stats) {
  std::vector<std::string> subjects;
  for (const Document &doc : corpus.documents) {
    subjects.push_back(to_lower(doc.subject));
  }
  // Distinct mention strings, each with the documents that contain it.
  std::map<std::string, std::set<int>> mention_docs;
  for (const SentenceLists &sl : extract_corpus_lists(corpus)) {
    for (const CoordList &list : sl.lists) {
      for (const Mention &m : list.items) {
        mention_docs[m.normalized].insert(sl.ref.document);
      }
    }
  }
  std::vector<std::string> mention_strings;
  std::vector<const std::set<int> *> mention_postings;
  for (const auto &[s, docs] : mention_docs) {
    mention_strings.push_back(s);
    mention_postings.push_back(&docs);
  }
  NameIndex subject_index(subjects, stats);
  NameIndex mention_index(mention_strings, stats);

  std::set<Seed> seeds;
  for (const Triple &t : triples) {
    auto subject_hits = subject_index.find(t.subject);
    if (subject_hits.empty()) continue;
    std::set<int> docs;
    for (const auto &hit : subject_hits) docs.insert(hit.index);
    for (const auto &hit : mention_index.find(t.object)) {
      for (int d : *mention_postings[hit.index]) {
        if (docs.count(d) == 0) continue;
        seeds.insert(Seed{{subjects[d], mention_strings[hit.index]},
                          t.relation});
      }
    }
  }
  return {seeds.begin(), seeds.end()};
}

SeedSplit split_seeds(const std::vector<Seed> &seeds, double ratio,
                      uint64_t rng_seed) {
  if (!(ratio > 0 && ratio < 1)) {
    throw Error("split ratio must lie in (0, 1)");
  }
  std::map<Relation, std::vector<Seed>> by_relation;
  for (const Seed &s : seeds) by_relation[s.relation].push_back(s);
  SeedSplit split;
  split.rng_seed = rng_seed;
  std::mt19937_64 rng(rng_seed);
  for (auto &[rel, group] : by_relation) {
    std::sort(group.begin(), group.end());
    if (group.size() < 2) {
      warn("relation " + std::string(relation_name(rel)) + " has " +
           std::to_string(group.size()) +
           " seed(s); all go to the development set");
      split.development.insert(split.development.end(), group.begin(),
                               group.end());
      continue;
    }
    std::shuffle(group.begin(), group.end(), rng);
    const size_t dev = static_cast<size_t>(
        std::floor(static_cast<double>(group.size()) * ratio + 1e-9));
    split.development.insert(split.development.end(), group.begin(),
                             group.begin() + dev);
    split.validation.insert(split.validation.end(), group.begin() + dev,
                            group.end());
  }
  return split;
}

void write_seeds(std::ostream &out, const std::vector<Seed> &seeds) {
  for (const Seed &s : seeds) {
    out << s.node.subject << '\t' << s.node.np << '\t'
        << relation_name(s.relation) << '\n';
  }
}

std::vector<Seed> parse_seeds(std::istream &in) {
  std::vector<Seed> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    auto rel = cols.size() == 3 ? parse_relation(cols[2]) : std::nullopt;
    if (!rel) {
      throw Error("seed file line " + std::to_string(lineno) + ": malformed");
    }
    out.push_back(Seed{{cols[0], cols[1]}, *rel});
  }
  return out;
}

}  // namespace diebolds
