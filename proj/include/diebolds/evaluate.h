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


#ifndef DIEBOLDS_EVALUATE_H_
#define DIEBOLDS_EVALUATE_H_

#include <array>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "diebolds/classify.h"
#include "diebolds/simstring.h"

namespace diebolds {

// Lowercases, maps '_' to ' ' and collapses whitespace.
std::string normalize_value(std::string_view s);

// Gold facts; subjects and objects stored normalised.
class GoldSet {
 public:
  void add(const std::string &subject, Relation relation,
           const std::string &object);

  using Query = std::pair<std::string, Relation>;
  const std::map<Query, std::set<std::string>> &queries() const {
    return queries_;
  }
  size_t size() const;

 private:
  std::map<Query, std::set<std::string>> queries_;
};

GoldSet load_gold(const std::string &path);
GoldSet parse_gold(std::istream &in);
void write_gold(std::ostream &out, const GoldSet &gold);

struct QueryResult {
  std::string subject;
  Relation relation;
  int predicted = 0;
  int gold = 0;
  int matched = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct IrReport {
  std::vector<QueryResult> queries;
  double precision = 0;  // micro: pooled counts
  double recall = 0;
  double f1 = 0;
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  std::array<double, 11> interpolated_precision{};
};

// Interpolated precision at recall 0.0, 0.1, ..., 1.0 for a ranking given
// as relevance flags; total_relevant is the number of gold items.
std::array<double, 11> pr_curve_11pt(const std::vector<bool> &ranked_relevance,
                                     int total_relevant);

// Per (subject, relation) gold query, predicted objects are matched one to
// one against gold objects with names_match; the curve pools all
// predictions of all queries by score.
IrReport ir_eval(const TripleStore &triples, const GoldSet &gold,
                 const TokenStats &stats);

// Same, restricted to the given queries; queries without gold objects are
// skipped with a warning.
IrReport ir_eval(const TripleStore &triples, const GoldSet &gold,
                 const TokenStats &stats,
                 const std::vector<GoldSet::Query> &queries);

// Conjunctive queries over extracted triples, written
//   q1(Answer) :- used_to_treat(daonil, Answer), side_effects(Z, Answer).
// Capitalised terms are variables; other terms are constants, either bare
// or double quoted.
struct Term {
  bool is_variable = false;
  std::string value;
};

struct Atom {
  Relation relation = Relation::kSideEffects;
  Term subject;
  Term object;
};

struct ConjunctiveQuery {
  std::string id;
  std::string answer_variable;
  std::vector<Atom> body;
};

ConjunctiveQuery parse_query(const std::string &rule);
std::vector<ConjunctiveQuery> load_queries(const std::string &path);

struct Answer {
  std::string value;
  double score = 0;
};

// Join over the store. Each answer is scored by the minimum score of the
// triples grounding the body (best grounding wins); descending score, ties
// by answer string.
std::vector<Answer> answer_query(const ConjunctiveQuery &query,
                                 const TripleStore &store);

struct QaReport {
  int questions = 0;
  double mrr = 0;
  double map = 0;
  double recall = 0;        // mean per-question recall
  double micro_recall = 0;  // pooled over all gold answers
};

using QaGold = std::map<std::string, std::set<std::string>>;

QaGold load_qa_gold(const std::string &path);

// Averages over the questions in `gold`.
QaReport qa_eval(const std::map<std::string, std::vector<std::string>> &answers,
                 const QaGold &gold);

}  // namespace diebolds

#endif  // DIEBOLDS_EVALUATE_H_
