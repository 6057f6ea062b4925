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


#include "diebolds/simstring.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "diebolds/common.h"

namespace diebolds {

TokenStats TokenStats::from_strings(const std::vector<std::string> &strings) {
  TokenStats stats;
  for (const std::string &s : strings) stats.add_document(similarity_tokens(s));
  return stats;
}

void TokenStats::add_document(const std::vector<std::string> &tokens) {
  std::set<std::string> distinct(tokens.begin(), tokens.end());
  for (const std::string &t : distinct) ++doc_freq_[t];
  ++n_docs_;
}

double TokenStats::idf(const std::string &token) const {
  auto it = doc_freq_.find(token);
  if (it == doc_freq_.end()) return std::log(static_cast<double>(n_docs_) + 1);
  return std::log(static_cast<double>(n_docs_) / it->second);
}

int TokenStats::doc_freq(const std::string &token) const {
  auto it = doc_freq_.find(token);
  return it == doc_freq_.end() ? 0 : it->second;
}

std::vector<std::string> similarity_tokens(std::string_view s) {
  return split_whitespace(to_lower(s));
}

double jaro_winkler(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
  const int window = std::max(0, std::max(la, lb) / 2 - 1);
  std::vector<bool> a_matched(la, false), b_matched(lb, false);
  int matches = 0;
  for (int i = 0; i < la; ++i) {
    const int lo = std::max(0, i - window), hi = std::min(lb - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (!b_matched[j] && a[i] == b[j]) {
        a_matched[i] = b_matched[j] = true;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;
  int half_transpositions = 0;
  for (int i = 0, j = 0; i < la; ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double m = matches;
  const double jaro =
      (m / la + m / lb + (m - half_transpositions / 2.0) / m) / 3.0;
  int prefix = 0;
  while (prefix < 4 && prefix < la && prefix < lb && a[prefix] == b[prefix]) {
    ++prefix;
  }
  return jaro + prefix * 0.1 * (1.0 - jaro);
}

std::vector<std::pair<std::string, double>> tfidf_vector(
    std::string_view s, const TokenStats &stats) {
  std::map<std::string, int> tf;
  for (const std::string &t : similarity_tokens(s)) ++tf[t];
  std::vector<std::pair<std::string, double>> vec;
  double norm = 0;
  for (const auto &[tok, count] : tf) {
    double w = count * stats.idf(tok);
    vec.emplace_back(tok, w);
    norm += w * w;
  }
  if (norm == 0) {
    // Every token is in every string: fall back to raw term frequencies.
    for (auto &[tok, w] : vec) {
      w = tf[tok];
      norm += w * w;
    }
  }
  norm = std::sqrt(norm);
  for (auto &entry : vec) entry.second /= norm;
  return vec;
}

namespace {

using WeightedTokens = std::vector<std::pair<std::string, double>>;

double directed_soft_tfidf(const WeightedTokens &s, const WeightedTokens &t,
                           double inner_threshold) {
  double score = 0;
  for (const auto &[w, ws] : s) {
    double best = -1;
    double best_weight = 0;
    for (const auto &[v, wt] : t) {
      double sim = jaro_winkler(w, v);
      if (sim > best) {
        best = sim;
        best_weight = wt;
      }
    }
    if (best >= inner_threshold) score += ws * best_weight * best;
  }
  return score;
}

}  // namespace

double soft_tfidf(std::string_view a, std::string_view b,
                  const TokenStats &stats, double inner_threshold) {
  WeightedTokens va = tfidf_vector(a, stats);
  WeightedTokens vb = tfidf_vector(b, stats);
  if (va.empty() || vb.empty()) {
    throw Error("soft_tfidf: empty token sequence");
  }
  double score = 0.5 * (directed_soft_tfidf(va, vb, inner_threshold) +
                        directed_soft_tfidf(vb, va, inner_threshold));
  return std::clamp(score, 0.0, 1.0);
}

double context_cosine(const ContextBOW &x, const ContextBOW &y) {
  double dot = 0, nx = 0, ny = 0;
  for (const auto &[tok, w] : x.weights) {
    nx += w * w;
    auto it = y.weights.find(tok);
    if (it != y.weights.end()) dot += w * it->second;
  }
  for (const auto &entry : y.weights) ny += entry.second * entry.second;
  if (nx == 0 || ny == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(nx) * std::sqrt(ny)), 0.0, 1.0);
}

bool names_match(std::string_view a, std::string_view b,
                 const TokenStats &stats) {
  return soft_tfidf(a, b, stats) >= kNameMatchThreshold;
}

NameIndex::NameIndex(std::vector<std::string> strings, const TokenStats &stats,
                     double inner_threshold)
    : strings_(std::move(strings)),
      stats_(stats),
      inner_threshold_(inner_threshold) {
  for (int i = 0; i < static_cast<int>(strings_.size()); ++i) {
    std::set<std::string> toks;
    for (auto &t : similarity_tokens(strings_[i])) toks.insert(t);
    for (const std::string &t : toks) {
      auto &plist = postings_[t];
      if (plist.empty()) vocab_by_length_[t.size()].push_back(t);
      plist.push_back(i);
    }
  }
}

const std::vector<std::string> &NameIndex::similar_tokens(
    const std::string &tok) const {
  auto it = cache_.find(tok);
  if (it != cache_.end()) return it->second;
  // The prefix boost is at most 0.4 * (1 - jaro), so reaching the threshold
  // needs jaro >= (t - 0.4) / 0.6, and jaro <= (2 + shorter / longer) / 3
  // bounds the length ratio of the two tokens.
  std::vector<std::string> similar;
  const double ratio =
      std::max(0.0, 3.0 * (inner_threshold_ - 0.4) / 0.6 - 2.0) - 1e-9;
  const double len = static_cast<double>(tok.size());
  const size_t lo = ratio > 0 ? static_cast<size_t>(std::ceil(len * ratio)) : 0;
  const size_t hi = ratio > 0 ? static_cast<size_t>(std::floor(len / ratio))
                              : std::numeric_limits<size_t>::max();
  for (auto bucket = vocab_by_length_.lower_bound(lo);
       bucket != vocab_by_length_.end() && bucket->first <= hi; ++bucket) {
    for (const std::string &v : bucket->second) {
      if (jaro_winkler(tok, v) >= inner_threshold_) similar.push_back(v);
    }
  }
  return cache_.emplace(tok, std::move(similar)).first->second;
}

std::vector<NameIndex::Hit> NameIndex::find(std::string_view query,
                                            double threshold) const {
  std::set<int> candidates;
  for (const std::string &tok : similarity_tokens(query)) {
    for (const std::string &v : similar_tokens(tok)) {
      const auto &plist = postings_.at(v);
      candidates.insert(plist.begin(), plist.end());
    }
  }
  std::vector<Hit> hits;
  for (int c : candidates) {
    double score = soft_tfidf(query, strings_[c], stats_, inner_threshold_);
    if (score >= threshold) hits.push_back({c, score});
  }
  return hits;
}

}  // namespace diebolds
