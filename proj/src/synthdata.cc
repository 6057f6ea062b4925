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


#include "diebolds/synthdata.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "diebolds/graph.h"
#include "diebolds/simstring.h"

namespace diebolds {
namespace {

// Tiny RNG wrapper with platform-independent draws.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return uniform() < p; }
  // Uniform in [0, n).
  size_t below(size_t n) { return static_cast<size_t>(uniform() * n) % n; }
  template <typename T>
  const T &pick(const std::vector<T> &v) { return v[below(v.size())]; }
  template <typename T>
  void shuffle(std::vector<T> &v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

struct Template {
  std::vector<std::pair<std::string, std::string>> parts;  // text, pos
};

Template parse_template(const std::string &text) {
  Template t;
  for (const std::string &w : split_whitespace(text)) {
    if (w == "{S}" || w == "{L}") {
      t.parts.push_back({w, ""});
      continue;
    }
    size_t slash = w.rfind('/');
    t.parts.push_back({w.substr(0, slash), w.substr(slash + 1)});
  }
  return t;
}

const std::map<Relation, std::vector<std::string>> &target_cues() {
  static const auto *cues = new std::map<Relation, std::vector<std::string>>{
      {Relation::kUsedToTreat,
       {"{S} is/VBZ used/VBN to/TO treat/VB {L} ./.",
        "It/PRP treats/VBZ {L} ./.",
        "{S} relieves/VBZ {L} ./."}},
      {Relation::kConditionsThisMayPrevent,
       {"{S} may/MD prevent/VB {L} ./.",
        "It/PRP protects/VBZ against/IN {L} ./.",
        "Taking/VBG {S} helps/VBZ avoid/VB {L} ./."}},
      {Relation::kSideEffects,
       {"{S} commonly/RB causes/VBZ {L} ./.",
        "{S} may/MD cause/VB {L} ./.",
        "You/PRP may/MD experience/VB {L} after/IN taking/VBG {S} ./."}},
      {Relation::kTreatments,
       {"{S} is/VBZ treated/VBN with/IN {L} ./.",
        "It/PRP responds/VBZ to/TO {L} ./.",
        "{S} is/VBZ often/RB managed/VBN with/IN {L} ./."}},
      {Relation::kSymptoms,
       {"{S} typically/RB produces/VBZ {L} ./.",
        "It/PRP often/RB begins/VBZ with/IN {L} ./.",
        "{S} usually/RB presents/VBZ with/IN {L} ./."}},
      {Relation::kRiskFactors,
       {"{S} is/VBZ more/RBR likely/JJ with/IN {L} ./.",
        "You/PRP are/VBP more/RBR likely/JJ to/TO develop/VB {S} if/IN you/PRP "
        "have/VBP {L} ./.",
        "{L} make/VBP {S} more/RBR likely/JJ ./."}},
      {Relation::kCauses,
       {"{S} is/VBZ caused/VBN by/IN {L} ./.",
        "{S} can/MD result/VB from/IN {L} ./.",
        "{L} can/MD trigger/VB {S} ./."}},
      {Relation::kPreventionFactors,
       {"You/PRP can/MD avoid/VB {S} with/IN {L} ./.",
        "{S} is/VBZ preventable/JJ with/IN {L} ./.",
        "{L} may/MD help/VB prevent/VB {S} ./."}},
  };
  return *cues;
}

const std::map<Relation, std::vector<std::string>> &structured_cues() {
  static const auto *cues = new std::map<Relation, std::vector<std::string>>{
      {Relation::kUsedToTreat,
       {"{S} is/VBZ used/VBN for/IN {L} ./.",
        "It/PRP is/VBZ also/RB approved/VBN for/IN {L} ./."}},
      {Relation::kConditionsThisMayPrevent,
       {"{S} is/VBZ also/RB used/VBN to/TO prevent/VB {L} ./.",
        "It/PRP can/MD prevent/VB {L} ./."}},
      {Relation::kSideEffects,
       {"{S} can/MD cause/VB {L} ./.",
        "{L} may/MD also/RB occur/VB ./."}},
      {Relation::kTreatments,
       {"It/PRP is/VBZ treated/VBN with/IN {L} ./.",
        "{L} are/VBP also/RB used/VBN ./."}},
      {Relation::kSymptoms,
       {"It/PRP can/MD produce/VB {L} ./.",
        "{L} may/MD also/RB develop/VB ./."}},
      {Relation::kRiskFactors,
       {"It/PRP is/VBZ more/RBR common/JJ with/IN {L} ./.",
        "{L} also/RB increase/VBP it/PRP ./."}},
      {Relation::kCauses,
       {"{S} is/VBZ caused/VBN by/IN {L} ./.",
        "It/PRP can/MD also/RB follow/VB {L} ./."}},
      {Relation::kPreventionFactors,
       {"It/PRP is/VBZ avoided/VBN with/IN {L} ./.",
        "{L} can/MD help/VB ./."}},
  };
  return *cues;
}

const std::vector<std::string> &generic_cues(Domain d) {
  static const std::vector<std::string> drug = {
      "{S} is/VBZ often/RB mentioned/VBN with/IN {L} ./.",
      "{S} is/VBZ sometimes/RB linked/VBN with/IN {L} ./."};
  static const std::vector<std::string> disease = {
      "{S} is/VBZ often/RB associated/VBN with/IN {L} ./.",
      "{L} are/VBP often/RB discussed/VBN with/IN {S} ./."};
  return d == Domain::kDrug ? drug : disease;
}

const std::vector<std::string> &noise_cues(Domain d) {
  static const std::vector<std::string> drug = {
      "Check/VB with/IN us/PRP first/RB if/IN you/PRP have/VBP {L} ./.",
      "Do/VBP not/RB take/VB {S} if/IN you/PRP have/VBP {L} ./.",
      "{S} has/VBZ not/RB been/VBN studied/VBN with/IN {L} ./."};
  static const std::vector<std::string> disease = {
      "{L} is/VBZ not/RB related/VBN to/TO {S} ./.",
      "It/PRP is/VBZ important/JJ to/TO rule/VB out/RP {L} ./.",
      "{L} are/VBP sometimes/RB checked/VBN first/RB ./."};
  return d == Domain::kDrug ? drug : disease;
}

const std::vector<std::string> &fillers(Domain d) {
  static const std::vector<std::string> drug = {
      "Take/VB {S} with/IN a/DT glass/NN of/IN water/NN ./.",
      "Store/VB the/DT tablets/NNS at/IN room/NN temperature/NN ./.",
      "Ask/VB your/PRP$ pharmacist/NN about/IN the/DT correct/JJ dose/NN ./.",
      "Keep/VB this/DT medicine/NN away/RB from/IN children/NNS ./."};
  static const std::vector<std::string> disease = {
      "{S} affects/VBZ many/JJ people/NNS ./.",
      "See/VB a/DT doctor/NN for/IN an/DT exam/NN ./.",
      "The/DT condition/NN can/MD last/VB for/IN weeks/NNS ./.",
      "Early/JJ diagnosis/NN improves/VBZ the/DT outcome/NN ./."};
  return d == Domain::kDrug ? drug : disease;
}

std::string intro(Domain d) {
  return d == Domain::kDrug ? "{S} is/VBZ a/DT prescription/NN drug/NN ./."
                            : "{S} is/VBZ a/DT common/JJ condition/NN ./.";
}

// Pseudo-words whose pairwise Jaro-Winkler similarity stays below the inner
// SoftTFIDF threshold, so distinct terms never match each other.
class WordFactory {
 public:
  explicit WordFactory(Rng &rng) : rng_(rng) {
    std::set<std::string> reserved;
    auto reserve = [&](const std::vector<std::string> &texts) {
      for (const std::string &t : texts) {
        for (const auto &[text, pos] : parse_template(t).parts) {
          if (!pos.empty()) reserved.insert(to_lower(text));
        }
      }
    };
    for (const auto *table : {&target_cues(), &structured_cues()}) {
      for (const auto &entry : *table) reserve(entry.second);
    }
    for (Domain d : {Domain::kDrug, Domain::kDisease}) {
      reserve(generic_cues(d));
      reserve(noise_cues(d));
      reserve(fillers(d));
      reserve({intro(d)});
    }
    words_.assign(reserved.begin(), reserved.end());
  }

  std::string next() {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    while (true) {
      std::string w;
      const int syllables = 2 + static_cast<int>(rng_.below(2));
      for (int i = 0; i < syllables; ++i) {
        w += consonants[rng_.below(consonants.size())];
        w += vowels[rng_.below(vowels.size())];
      }
      if (rng_.chance(0.5)) w += consonants[rng_.below(consonants.size())];
      bool ok = true;
      for (const std::string &other : words_) {
        if (jaro_winkler(w, other) >= 0.88) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      words_.push_back(w);
      return w;
    }
  }

  std::string term() {
    std::string t = next();
    if (rng_.chance(0.6)) t += " " + next();
    return t;
  }

 private:
  Rng &rng_;
  std::vector<std::string> words_;
};

struct Fact {
  Relation relation;
  std::string object;
};

class Builder {
 public:
  Builder(Rng &rng, std::string subject) : rng_(rng), subject_(std::move(subject)) {}

  // Appends a sentence rendered from a template with the given list items.
  void add(const std::string &text, const std::vector<std::string> &items,
           const std::string &section) {
    Sentence s;
    s.section_title = section;
    auto push = [&](const std::string &text, const std::string &pos) {
      Token t;
      t.index = static_cast<int>(s.tokens.size()) + 1;
      t.text = text;
      t.pos = pos;
      s.tokens.push_back(std::move(t));
    };
    for (const auto &[text, pos] : parse_template(text).parts) {
      if (text == "{S}") {
        std::string name = subject_;
        name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
        push(name, "NNP");
      } else if (text == "{L}") {
        const bool oxford = rng_.chance(0.5);
        const std::string conj = rng_.chance(0.2) ? "or" : "and";
        for (size_t i = 0; i < items.size(); ++i) {
          if (i > 0 && items.size() > 2) push(",", ",");
          if (i + 1 == items.size() && items.size() > 1) {
            if (items.size() > 2 && !oxford) s.tokens.pop_back();
            push(conj, "CC");
          }
          for (const std::string &w : split_whitespace(items[i])) push(w, "NN");
        }
      } else {
        push(text, pos);
      }
    }
    sentences.push_back(std::move(s));
  }

  std::vector<Sentence> sentences;

 private:
  Rng &rng_;
  std::string subject_;
};

// Splits items into groups: with probability list_rate an item starts a list
// of 2-4 items, otherwise it stands alone.
std::vector<std::vector<std::string>> group_items(std::vector<std::string> items,
                                                  double list_rate, Rng &rng) {
  std::vector<std::vector<std::string>> groups;
  size_t i = 0;
  while (i < items.size()) {
    size_t size = 1;
    if (items.size() - i >= 2 && rng.chance(list_rate)) {
      size = std::min(items.size() - i, 2 + rng.below(3));
    }
    groups.emplace_back(items.begin() + i, items.begin() + i + size);
    i += size;
  }
  return groups;
}

}  // namespace

void SynthSpec::validate() const {
  for (double p : {list_rate, ambiguity_rate, noise_rate, kb_coverage,
                   structured_overlap, generic_cue_rate, bullet_rate}) {
    if (!(p >= 0 && p <= 1)) throw Error("synth spec: probabilities must lie in [0,1]");
  }
  if (n_target_docs < 1 || n_structured_docs < 0 || facts_per_doc < 1 ||
      vocab_per_relation < 1 || shared_terms < 0 || vocab_skew < 0) {
    throw Error("synth spec: sizes must be positive");
  }
  if (relations.empty()) throw Error("synth spec: no relations");
}

SynthData generate(const SynthSpec &spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  WordFactory words(rng);

  std::vector<Relation> relations = spec.relations;
  std::sort(relations.begin(), relations.end());
  relations.erase(std::unique(relations.begin(), relations.end()), relations.end());
  std::map<Domain, std::vector<Relation>> by_domain;
  for (Relation r : relations) by_domain[relation_domain(r)].push_back(r);
  std::vector<Domain> domains;
  for (const auto &entry : by_domain) domains.push_back(entry.first);

  // Relation-specific vocabularies plus a pool of terms shared by two
  // relations.
  std::map<Relation, std::vector<std::string>> own, shared;
  for (Relation r : relations) {
    for (int i = 0; i < spec.vocab_per_relation; ++i) own[r].push_back(words.term());
  }
  for (int i = 0; i < spec.shared_terms; ++i) {
    const std::string term = words.term();
    const size_t n = relations.size();
    const size_t a = i % n;
    shared[relations[a]].push_back(term);
    if (n > 1) shared[relations[(a + 1 + rng.below(n - 1)) % n]].push_back(term);
  }
  std::vector<double> cumulative;
  for (int i = 0; i < spec.vocab_per_relation; ++i) {
    const double w = 1.0 / std::pow(i + 1.0, spec.vocab_skew);
    cumulative.push_back(w + (cumulative.empty() ? 0.0 : cumulative.back()));
  }
  auto draw_object = [&](Relation r) {
    if (!shared[r].empty() && rng.chance(spec.ambiguity_rate)) return rng.pick(shared[r]);
    const double u = rng.uniform() * cumulative.back();
    size_t i = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    return own[r][std::min(i, own[r].size() - 1)];
  };
  auto draw_facts = [&](Domain d, int n, std::set<std::string> &used) {
    std::vector<Fact> facts;
    for (int attempt = 0; static_cast<int>(facts.size()) < n && attempt < 50 * n;
         ++attempt) {
      Relation r = rng.pick(by_domain[d]);
      std::string o = draw_object(r);
      if (used.insert(o).second) facts.push_back({r, o});
    }
    return facts;
  };

  SynthData data;
  data.target.kind = CorpusKind::kTarget;
  data.structured.kind = CorpusKind::kStructured;
  std::set<Triple> kb, facts;

  struct Subject {
    std::string name;
    Domain domain;
    std::vector<Fact> facts;
    std::set<std::string> used;
  };
  std::vector<Subject> target_subjects;
  for (int i = 0; i < spec.n_target_docs; ++i) {
    Subject s{words.next(), domains[i % domains.size()], {}, {}};
    s.facts = draw_facts(s.domain, spec.facts_per_doc, s.used);
    target_subjects.push_back(std::move(s));
  }

  for (size_t i = 0; i < target_subjects.size(); ++i) {
    Subject &s = target_subjects[i];
    Builder b(rng, s.name);
    const std::string section = "overview";
    std::vector<std::pair<std::string, std::vector<std::string>>> body;

    std::map<Relation, std::vector<std::string>> per_relation;
    for (const Fact &f : s.facts) {
      facts.insert({s.name, f.relation, f.object});
      per_relation[f.relation].push_back(f.object);
      data.gold.add(s.name, f.relation, f.object);
      if (rng.chance(spec.kb_coverage)) kb.insert({s.name, f.relation, f.object});
    }
    for (auto &[r, objects] : per_relation) {
      rng.shuffle(objects);
      for (auto &group : group_items(objects, spec.list_rate, rng)) {
        const auto &pool = rng.chance(spec.generic_cue_rate) ? generic_cues(s.domain)
                                                             : target_cues().at(r);
        for (const std::string &o : group) data.planted.push_back({s.name, r, o});
        body.push_back({rng.pick(pool), group});
      }
    }

    // Spurious mentions: the KB claims a fact the page only mentions in
    // passing.
    std::vector<std::string> spurious;
    for (size_t k = 0; k < s.facts.size(); ++k) {
      if (!rng.chance(spec.noise_rate)) continue;
      Relation r = rng.pick(by_domain[s.domain]);
      std::string o = draw_object(r);
      if (!s.used.insert(o).second) continue;
      spurious.push_back(o);
      kb.insert({s.name, r, o});
    }
    for (auto &group : group_items(spurious, spec.list_rate, rng)) {
      body.push_back({rng.pick(noise_cues(s.domain)), group});
    }
    const auto &filler = fillers(s.domain);
    for (int k = 0; k < 2; ++k) body.push_back({rng.pick(filler), {}});
    rng.shuffle(body);

    b.add(intro(s.domain), {}, section);
    for (const auto &[text, items] : body) b.add(text, items, section);
    char id[32];
    std::snprintf(id, sizeof(id), "t%04zu", i + 1);
    data.target.documents.push_back({id, s.name, s.domain, std::move(b.sentences)});
  }

  // Structured pages: some describe target subjects, the rest new ones.
  std::vector<size_t> order(target_subjects.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const int overlap = std::min<int>(
      static_cast<int>(std::lround(spec.structured_overlap * spec.n_structured_docs)),
      spec.n_target_docs);
  std::map<Relation, std::string> section_of;
  for (const auto &[title, r] : default_section_map()) section_of[r] = title;
  for (int i = 0; i < spec.n_structured_docs; ++i) {
    Subject s;
    if (i < overlap) {
      s = target_subjects[order[i]];
      std::vector<Fact> extra = draw_facts(s.domain, std::max(1, spec.facts_per_doc / 4), s.used);
      for (const Fact &f : extra) {
        if (rng.chance(spec.kb_coverage)) kb.insert({s.name, f.relation, f.object});
      }
      s.facts.insert(s.facts.end(), extra.begin(), extra.end());
    } else {
      s.name = words.next();
      s.domain = domains[i % domains.size()];
      s.facts = draw_facts(s.domain, spec.facts_per_doc, s.used);
      for (const Fact &f : s.facts) {
        if (rng.chance(spec.kb_coverage)) kb.insert({s.name, f.relation, f.object});
      }
    }
    std::map<Relation, std::vector<std::string>> per_relation;
    for (const Fact &f : s.facts) {
      facts.insert({s.name, f.relation, f.object});
      per_relation[f.relation].push_back(f.object);
    }
    Builder b(rng, s.name);
    for (auto &[r, objects] : per_relation) {
      rng.shuffle(objects);
      const auto &cues = structured_cues().at(r);
      if (rng.chance(spec.bullet_rate)) {
        for (const std::string &o : objects) b.add("{L}", {o}, section_of.at(r));
        continue;
      }
      for (size_t k = 0; k < objects.size(); k += 5) {
        std::vector<std::string> group(objects.begin() + k,
                                       objects.begin() + std::min(objects.size(), k + 5));
        b.add(rng.pick(cues), group, section_of.at(r));
      }
    }
    char id[32];
    std::snprintf(id, sizeof(id), "s%04d", i + 1);
    data.structured.documents.push_back({id, s.name, s.domain, std::move(b.sentences)});
  }

  data.kb.assign(kb.begin(), kb.end());
  data.facts.assign(facts.begin(), facts.end());
  return data;
}

void write_synth(const SynthData &data, const std::string &dir) {
  std::filesystem::create_directories(dir);
  save_corpus(dir + "/target.jsonl", data.target);
  save_corpus(dir + "/structured.jsonl", data.structured);
  std::ofstream kb(dir + "/kb.tsv");
  write_triples(kb, data.kb);
  std::ofstream gold(dir + "/gold.tsv");
  write_gold(gold, data.gold);
  std::ofstream facts(dir + "/facts.tsv");
  write_triples(facts, data.facts);
  if (!kb || !gold || !facts) throw Error("cannot write synthetic data to '" + dir + "'");
}

}  // namespace diebolds
