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


#ifndef DIEBOLDS_SIMSTRING_H_
#define DIEBOLDS_SIMSTRING_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace diebolds {

inline constexpr double kDefaultInnerThreshold = 0.9;
inline constexpr double kNameMatchThreshold = 0.8;

// Document-frequency table for TFIDF weighting. A "document" here is one
// candidate name string (or one context bag, for context similarity).
class TokenStats {
 public:
  TokenStats() = default;

  // Counts each distinct lowercased whitespace token once per string.
  static TokenStats from_strings(const std::vector<std::string> &strings);

  void add_document(const std::vector<std::string> &tokens);

  // ln(n_docs / df); unseen tokens get ln(n_docs + 1).
  double idf(const std::string &token) const;

  int n_docs() const { return n_docs_; }
  int doc_freq(const std::string &token) const;
  const std::unordered_map<std::string, int> &doc_freqs() const {
    return doc_freq_;
  }

 private:
  std::unordered_map<std::string, int> doc_freq_;
  int n_docs_ = 0;
};

// Sparse TFIDF bag of words describing the contexts of one pair node.
struct ContextBOW {
  std::string owner;
  std::map<std::string, double> weights;
};

// Lowercases and splits on whitespace.
std::vector<std::string> similarity_tokens(std::string_view s);

double jaro_winkler(std::string_view a, std::string_view b);

// L2-normalised TFIDF vector of a string, sorted by token.
std::vector<std::pair<std::string, double>> tfidf_vector(
    std::string_view s, const TokenStats &stats);

// Symmetrised SoftTFIDF, clamped to [0, 1]. Throws if either string has no
// tokens.
double soft_tfidf(std::string_view a, std::string_view b,
                  const TokenStats &stats,
                  double inner_threshold = kDefaultInnerThreshold);

double context_cosine(const ContextBOW &x, const ContextBOW &y);

bool names_match(std::string_view a, std::string_view b,
                 const TokenStats &stats);

// Blocking index for names_match over a fixed set of strings: candidates must
// share a token pair whose Jaro-Winkler similarity reaches the inner
// threshold, so no matching string is ever missed.
class NameIndex {
 public:
  NameIndex(std::vector<std::string> strings, const TokenStats &stats,
            double inner_threshold = kDefaultInnerThreshold);

  struct Hit {
    int index;
    double score;
  };

  // All indexed strings with soft_tfidf(query, s) >= threshold, by index.
  std::vector<Hit> find(std::string_view query,
                        double threshold = kNameMatchThreshold) const;

  const std::string &string(int index) const { return strings_[index]; }
  int size() const { return static_cast<int>(strings_.size()); }

 private:
  const std::vector<std::string> &similar_tokens(const std::string &tok) const;

  std::vector<std::string> strings_;
  TokenStats stats_;
  double inner_threshold_;
  std::unordered_map<std::string, std::vector<int>> postings_;
  std::map<size_t, std::vector<std::string>> vocab_by_length_;
  mutable std::unordered_map<std::string, std::vector<std::string>> cache_;
};

}  // namespace diebolds

#endif  // DIEBOLDS_SIMSTRING_H_
