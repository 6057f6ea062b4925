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


#include "diebolds/evaluate.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <tuple>

namespace diebolds {
namespace {

double safe_div(double a, double b) { return b > 0 ? a / b : 0.0; }

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

struct ScoredObject {
  std::string object;
  double score;
};

// Greedy one-to-one matching by decreasing similarity. Returns, per
// prediction, whether it was matched.
std::vector<bool> match_predictions(const std::vector<ScoredObject> &predicted,
                                    const std::vector<std::string> &gold,
                                    const TokenStats &stats) {
  struct Candidate {
    double sim;
    size_t p;
    size_t g;
  };
  std::vector<Candidate> candidates;
  for (size_t p = 0; p < predicted.size(); ++p) {
    for (size_t g = 0; g < gold.size(); ++g) {
      double sim = soft_tfidf(predicted[p].object, gold[g], stats);
      if (sim >= kNameMatchThreshold) candidates.push_back({sim, p, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate &a, const Candidate &b) {
              if (a.sim != b.sim) return a.sim > b.sim;
              if (a.p != b.p) return a.p < b.p;
              return a.g < b.g;
            });
  std::vector<bool> p_used(predicted.size(), false), g_used(gold.size(), false);
  for (const Candidate &c : candidates) {
    if (p_used[c.p] || g_used[c.g]) continue;
    p_used[c.p] = g_used[c.g] = true;
  }
  return p_used;
}

class RuleParser {
 public:
  explicit RuleParser(const std::string &text) : s_(text) {}

  ConjunctiveQuery parse() {
    ConjunctiveQuery q;
    q.id = identifier();
    expect('(');
    std::vector<Term> head = terms();
    expect(')');
    if (head.size() != 1) fail("the head must have exactly one argument");
    skip_space();
    if (s_.compare(pos_, 2, ":-") != 0) fail("expected ':-'");
    pos_ += 2;
    while (true) {
      std::string rel_name = identifier();
      auto rel = parse_relation(rel_name);
      if (!rel) fail("unknown relation '" + rel_name + "'");
      expect('(');
      std::vector<Term> args = terms();
      expect(')');
      if (args.size() != 2) fail("relation atoms take two arguments");
      q.body.push_back({*rel, args[0], args[1]});
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '.') ++pos_;
    skip_space();
    if (pos_ != s_.size()) fail("trailing input");

    if (!head[0].is_variable) fail("unbound answer variable: head is a constant");
    q.answer_variable = head[0].value;
    bool bound = false;
    for (const Atom &a : q.body) {
      for (const Term *t : {&a.subject, &a.object}) {
        if (t->is_variable && t->value == q.answer_variable) bound = true;
      }
    }
    if (!bound) fail("unbound answer variable " + q.answer_variable);
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string &msg) {
    throw Error("query '" + s_ + "': " + msg);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_space();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected an identifier");
    return s_.substr(start, pos_ - start);
  }

  std::vector<Term> terms() {
    std::vector<Term> out;
    while (true) {
      skip_space();
      Term t;
      if (pos_ < s_.size() && s_[pos_] == '"') {
        size_t end = s_.find('"', pos_ + 1);
        if (end == std::string::npos) fail("unterminated string");
        t.value = normalize_value(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
      } else {
        size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')') ++pos_;
        std::string raw = trim(s_.substr(start, pos_ - start));
        if (raw.empty()) fail("empty argument");
        t.is_variable = std::isupper(static_cast<unsigned char>(raw[0]));
        t.value = t.is_variable ? raw : normalize_value(raw);
      }
      out.push_back(std::move(t));
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      return out;
    }
  }

  std::string s_;
  size_t pos_ = 0;
};

}  // namespace

std::string normalize_value(std::string_view s) {
  std::string lower = to_lower(s);
  for (char &c : lower) {
    if (c == '_') c = ' ';
  }
  return join(split_whitespace(lower), " ");
}

void GoldSet::add(const std::string &subject, Relation relation,
                  const std::string &object) {
  queries_[{normalize_value(subject), relation}].insert(normalize_value(object));
}

size_t GoldSet::size() const {
  size_t n = 0;
  for (const auto &entry : queries_) n += entry.second.size();
  return n;
}

GoldSet parse_gold(std::istream &in) {
  GoldSet gold;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    auto rel = cols.size() == 3 ? parse_relation(trim(cols[1])) : std::nullopt;
    if (!rel) {
      throw Error("gold line " + std::to_string(lineno) +
                  ": expected subject<TAB>relation<TAB>object");
    }
    gold.add(cols[0], *rel, cols[2]);
  }
  return gold;
}

void write_gold(std::ostream &out, const GoldSet &gold) {
  for (const auto &[query, objects] : gold.queries()) {
    for (const std::string &o : objects) {
      out << query.first << '\t' << relation_name(query.second) << '\t' << o
          << '\n';
    }
  }
}

GoldSet load_gold(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gold file '" + path + "'");
  return parse_gold(in);
}

std::array<double, 11> pr_curve_11pt(const std::vector<bool> &ranked_relevance,
                                     int total_relevant) {
  std::array<double, 11> curve{};
  if (total_relevant <= 0) return curve;
  // best_from[k]: max precision at any rank >= k (ranks are 1-based).
  const int n = static_cast<int>(ranked_relevance.size());
  std::vector<int> hits(n + 1, 0);
  for (int k = 1; k <= n; ++k) hits[k] = hits[k - 1] + (ranked_relevance[k - 1] ? 1 : 0);
  for (int level = 0; level <= 10; ++level) {
    double best = 0;
    for (int k = 1; k <= n; ++k) {
      // recall >= level / 10, compared exactly in integers.
      if (hits[k] * 10 >= level * total_relevant) {
        best = std::max(best, static_cast<double>(hits[k]) / k);
      }
    }
    curve[level] = best;
  }
  return curve;
}

IrReport ir_eval(const TripleStore &triples, const GoldSet &gold,
                 const TokenStats &stats,
                 const std::vector<GoldSet::Query> &queries) {
  std::map<GoldSet::Query, std::vector<ScoredObject>> predicted;
  for (const auto &[key, score] : triples.triples()) {
    predicted[{normalize_value(key.subject), key.relation}].push_back(
        {normalize_value(key.object), score});
  }

  IrReport report;
  struct Ranked {
    double score;
    std::string subject;
    Relation relation;
    std::string object;
    bool relevant;
  };
  std::vector<Ranked> pooled;
  int total_pred = 0, total_gold = 0, total_matched = 0;
  for (const GoldSet::Query &q : queries) {
    auto git = gold.queries().find(q);
    if (git == gold.queries().end() || git->second.empty()) {
      warn("query (" + q.first + ", " + std::string(relation_name(q.second)) +
           ") has no gold objects; excluded");
      continue;
    }
    std::vector<std::string> gold_objects(git->second.begin(), git->second.end());
    std::vector<ScoredObject> preds;
    auto pit = predicted.find(q);
    if (pit != predicted.end()) preds = pit->second;
    std::sort(preds.begin(), preds.end(), [](const ScoredObject &a, const ScoredObject &b) {
      if (a.score != b.score) return a.score > b.score;
      return a.object < b.object;
    });
    std::vector<bool> matched = match_predictions(preds, gold_objects, stats);

    QueryResult r;
    r.subject = q.first;
    r.relation = q.second;
    r.predicted = static_cast<int>(preds.size());
    r.gold = static_cast<int>(gold_objects.size());
    r.matched = static_cast<int>(std::count(matched.begin(), matched.end(), true));
    r.precision = safe_div(r.matched, r.predicted);
    r.recall = safe_div(r.matched, r.gold);
    r.f1 = f1_of(r.precision, r.recall);
    report.queries.push_back(r);
    total_pred += r.predicted;
    total_gold += r.gold;
    total_matched += r.matched;
    for (size_t i = 0; i < preds.size(); ++i) {
      pooled.push_back({preds[i].score, q.first, q.second, preds[i].object,
                        static_cast<bool>(matched[i])});
    }
  }
  report.precision = safe_div(total_matched, total_pred);
  report.recall = safe_div(total_matched, total_gold);
  report.f1 = f1_of(report.precision, report.recall);
  if (!report.queries.empty()) {
    for (const QueryResult &r : report.queries) {
      report.macro_precision += r.precision;
      report.macro_recall += r.recall;
      report.macro_f1 += r.f1;
    }
    const double n = static_cast<double>(report.queries.size());
    report.macro_precision /= n;
    report.macro_recall /= n;
    report.macro_f1 /= n;
  }
  std::sort(pooled.begin(), pooled.end(), [](const Ranked &a, const Ranked &b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.subject, a.relation, a.object) <
           std::tie(b.subject, b.relation, b.object);
  });
  std::vector<bool> relevance;
  for (const Ranked &r : pooled) relevance.push_back(r.relevant);
  report.interpolated_precision = pr_curve_11pt(relevance, total_gold);
  return report;
}

IrReport ir_eval(const TripleStore &triples, const GoldSet &gold,
                 const TokenStats &stats) {
  std::vector<GoldSet::Query> queries;
  for (const auto &entry : gold.queries()) queries.push_back(entry.first);
  return ir_eval(triples, gold, stats, queries);
}

ConjunctiveQuery parse_query(const std::string &rule) {
  return RuleParser(trim(rule)).parse();
}

std::vector<ConjunctiveQuery> load_queries(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open query file '" + path + "'");
  std::vector<ConjunctiveQuery> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    out.push_back(parse_query(line));
  }
  return out;
}

std::vector<Answer> answer_query(const ConjunctiveQuery &query,
                                 const TripleStore &store) {
  struct Fact {
    std::string subject;
    std::string object;
    double score;
  };
  std::map<Relation, std::vector<Fact>> by_relation;
  for (const auto &[key, score] : store.triples()) {
    by_relation[key.relation].push_back(
        {normalize_value(key.subject), normalize_value(key.object), score});
  }

  std::map<std::string, double> best;
  std::map<std::string, std::string> binding;
  std::function<void(size_t, double)> solve = [&](size_t i, double score) {
    if (i == query.body.size()) {
      const std::string &ans = binding.at(query.answer_variable);
      auto [it, inserted] = best.emplace(ans, score);
      if (!inserted) it->second = std::max(it->second, score);
      return;
    }
    const Atom &atom = query.body[i];
    auto facts = by_relation.find(atom.relation);
    if (facts == by_relation.end()) return;
    for (const Fact &f : facts->second) {
      std::vector<std::string> newly_bound;
      bool ok = true;
      for (auto [term, value] : {std::pair{&atom.subject, &f.subject},
                                 std::pair{&atom.object, &f.object}}) {
        if (!term->is_variable) {
          ok = term->value == *value;
        } else {
          auto it = binding.find(term->value);
          if (it == binding.end()) {
            binding.emplace(term->value, *value);
            newly_bound.push_back(term->value);
          } else {
            ok = it->second == *value;
          }
        }
        if (!ok) break;
      }
      if (ok) solve(i + 1, std::min(score, f.score));
      for (const std::string &v : newly_bound) binding.erase(v);
    }
  };
  solve(0, 1.0);

  std::vector<Answer> answers;
  for (const auto &[value, score] : best) answers.push_back({value, score});
  std::sort(answers.begin(), answers.end(), [](const Answer &a, const Answer &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.value < b.value;
  });
  return answers;
}

QaGold load_qa_gold(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open QA answers file '" + path + "'");
  QaGold gold;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) {
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": expected question<TAB>answer");
    }
    gold[trim(cols[0])].insert(normalize_value(cols[1]));
  }
  return gold;
}

QaReport qa_eval(const std::map<std::string, std::vector<std::string>> &answers,
                 const QaGold &gold) {
  if (gold.empty()) throw Error("qa_eval needs at least one question");
  QaReport report;
  int gold_total = 0, retrieved_total = 0;
  for (const auto &[id, expected] : gold) {
    ++report.questions;
    std::vector<std::string> ranked;
    auto it = answers.find(id);
    if (it != answers.end()) ranked = it->second;
    std::set<std::string> seen;
    int hits = 0;
    double precision_sum = 0, rr = 0;
    int rank = 0;
    for (const std::string &raw : ranked) {
      const std::string a = normalize_value(raw);
      if (!seen.insert(a).second) continue;
      ++rank;
      if (!expected.count(a)) continue;
      ++hits;
      precision_sum += static_cast<double>(hits) / rank;
      if (rr == 0) rr = 1.0 / rank;
    }
    const double n_gold = static_cast<double>(expected.size());
    report.mrr += rr;
    report.map += n_gold > 0 ? precision_sum / n_gold : 0;
    report.recall += n_gold > 0 ? hits / n_gold : 0;
    gold_total += static_cast<int>(expected.size());
    retrieved_total += hits;
  }
  report.mrr /= report.questions;
  report.map /= report.questions;
  report.recall /= report.questions;
  report.micro_recall = safe_div(retrieved_total, gold_total);
  return report;
}

}  // namespace diebolds
