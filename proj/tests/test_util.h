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

#ifndef DIEBOLDS_TESTS_TEST_UTIL_H_
#define DIEBOLDS_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diebolds/common.h"
#include "diebolds/corpus.h"

namespace diebolds::testing {

// "word/TAG word/TAG ..." with optional "@head:label" suffixes, e.g.
// "aspirin/NN@3:COORD".
inline Sentence make_sentence(const std::string &tagged,
                              const std::string &section = "") {
  Sentence s;
  s.section_title = section;
  int index = 0;
  for (const std::string &part : split_whitespace(tagged)) {
    Token t;
    t.index = ++index;
    std::string body = part;
    auto at = body.rfind('@');
    if (at != std::string::npos) {
      std::string dep = body.substr(at + 1);
      body = body.substr(0, at);
      auto colon = dep.find(':');
      t.head = std::stoi(dep.substr(0, colon));
      if (colon != std::string::npos) t.deplabel = dep.substr(colon + 1);
    }
    auto slash = body.rfind('/');
    t.text = body.substr(0, slash);
    t.pos = body.substr(slash + 1);
    s.tokens.push_back(std::move(t));
  }
  return s;
}

inline Document make_doc(const std::string &id, const std::string &subject,
                         std::vector<Sentence> sentences,
                         Domain domain = Domain::kDrug) {
  Document d;
  d.doc_id = id;
  d.subject = subject;
  d.domain = domain;
  d.sentences = std::move(sentences);
  return d;
}

inline std::vector<std::string> surfaces(const CoordList &list) {
  std::vector<std::string> out;
  for (const Mention &m : list.items) out.push_back(m.surface);
  return out;
}

// Fresh empty directory under the system temp dir.
inline std::string scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("diebolds-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  int below(int n) {
    return static_cast<int>(
        std::uniform_int_distribution<int>(0, n - 1)(rng_));
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  bool chance(double p) { return uniform(0, 1) < p; }
  std::string word(int min_len = 3, int max_len = 8) {
    static const char *letters = "abcdefghijklmnopqrstuvwxyz";
    int len = min_len + below(max_len - min_len + 1);
    std::string w;
    for (int i = 0; i < len; ++i) w += letters[below(26)];
    return w;
  }
  std::mt19937_64 &engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace diebolds::testing

#endif  // DIEBOLDS_TESTS_TEST_UTIL_H_
