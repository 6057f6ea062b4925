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


#include "diebolds/features.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace diebolds {
namespace {

// Feature values never contain whitespace so the sparse format stays
// splittable.
std::string feature_value(std::string_view text) {
  std::string v = to_lower(text);
  for (char &c : v) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return v;
}

bool is_verb(const std::string &pos) { return pos.rfind("VB", 0) == 0; }

void add(FeatureVector &fv, const std::string &kind, const std::string &value) {
  fv.items[kind + "=" + value] = 1.0;
}

void add_dependency_features(FeatureVector &fv, const CoordList &target,
                             const Sentence &s) {
  int cur = target.head_token();
  std::vector<std::string> path;
  int verb = 0;
  int child_on_path = cur;
  for (int steps = 0; steps < s.size(); ++steps) {
    const Token &t = s.token(cur);
    path.push_back(t.deplabel.empty() ? "_" : t.deplabel);
    const int parent = t.head.value_or(0);
    if (parent == 0) break;
    if (is_verb(s.token(parent).pos)) {
      verb = parent;
      child_on_path = cur;
      break;
    }
    cur = parent;
  }
  if (verb == 0) return;
  add(fv, "depVerb", feature_value(s.token(verb).text));
  add(fv, "depPath", join(path, "_"));
  for (const Token &t : s.tokens) {
    if (t.head != verb || t.index == child_on_path) continue;
    add(fv, "depMod", feature_value(t.text));
  }
}

}  // namespace

FeatureVector featurize(const CoordList &target, const Sentence &sentence,
                        int window) {
  if (target.items.empty()) throw Error("featurize: empty list");
  for (const Mention &m : target.items) {
    if (m.start < 1 || m.end > sentence.size() || m.start > m.end) {
      throw Error("featurize: mention span outside its sentence");
    }
  }
  FeatureVector fv;
  for (const Mention &m : target.items) {
    for (int i = m.start; i <= m.end; ++i) {
      const std::string tok = feature_value(sentence.token(i).text);
      add(fv, "npTok", tok);
      if (tok.size() < kAffixLength) {
        add(fv, "prefix", tok);
        add(fv, "suffix", tok);
      } else {
        add(fv, "prefix", tok.substr(0, kAffixLength));
        add(fv, "suffix", tok.substr(tok.size() - kAffixLength));
      }
    }
  }
  const int first = target.first_token(), last = target.head_token();
  for (const Token &t : sentence.tokens) {
    if (t.index >= first && t.index <= last) continue;
    add(fv, "sentTok", feature_value(t.text));
  }
  const int left_lo = std::max(1, first - window);
  for (int i = left_lo; i < first; ++i) {
    add(fv, "ctxTok", "left:" + feature_value(sentence.token(i).text));
    if (i + 1 < first) {
      add(fv, "ctxBigram",
          "left:" + feature_value(sentence.token(i).text) + "_" +
              feature_value(sentence.token(i + 1).text));
    }
  }
  const int right_hi = std::min(sentence.size(), last + window);
  for (int i = last + 1; i <= right_hi; ++i) {
    add(fv, "ctxTok", "right:" + feature_value(sentence.token(i).text));
    if (i + 1 <= right_hi) {
      add(fv, "ctxBigram",
          "right:" + feature_value(sentence.token(i).text) + "_" +
              feature_value(sentence.token(i + 1).text));
    }
  }
  if (sentence.has_dependencies()) add_dependency_features(fv, target, sentence);
  return fv;
}

FeatureVector featurize(const CoordList &target, const Corpus &corpus,
                        int window) {
  return featurize(target, resolve(corpus, target.ref), window);
}

FeatureFilter fit_filter(const std::vector<FeatureVector> &vectors,
                         double drop_top_fraction) {
  if (!(drop_top_fraction >= 0 && drop_top_fraction < 1)) {
    throw Error("drop_top_fraction must lie in [0, 1)");
  }
  FeatureFilter filter;
  filter.drop_top_fraction = drop_top_fraction;
  std::unordered_map<std::string, int> freq;
  for (const FeatureVector &v : vectors) {
    for (const auto &entry : v.items) ++freq[entry.first];
  }
  std::vector<std::pair<std::string, int>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const size_t drop_top = static_cast<size_t>(
      std::ceil(drop_top_fraction * static_cast<double>(ranked.size()) - 1e-9));
  for (size_t i = drop_top; i < ranked.size(); ++i) {
    if (ranked[i].second > 1) filter.kept_vocabulary.insert(ranked[i].first);
  }
  if (!ranked.empty() && filter.kept_vocabulary.empty()) {
    warn("feature filter kept no features");
  }
  return filter;
}

FeatureVector apply_filter(const FeatureFilter &filter,
                           const FeatureVector &vector) {
  FeatureVector out;
  for (const auto &entry : vector.items) {
    if (filter.kept_vocabulary.count(entry.first)) out.items.insert(entry);
  }
  return out;
}

void write_filter(std::ostream &out, const FeatureFilter &filter) {
  out << "# drop_top_fraction\t" << format_double(filter.drop_top_fraction)
      << '\n';
  for (const std::string &id : filter.kept_vocabulary) out << id << '\n';
}

FeatureFilter read_filter(std::istream &in) {
  FeatureFilter filter;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# drop_top_fraction\t", 0) == 0) {
      filter.drop_top_fraction = parse_double(line.substr(20));
    } else if (!line.empty()) {
      filter.kept_vocabulary.insert(line);
    }
  }
  return filter;
}

void write_sparse(std::ostream &out, const std::string &label,
                  const FeatureVector &vector) {
  out << label;
  for (const auto &[id, w] : vector.items) out << ' ' << id << ':' << format_double(w);
  out << '\n';
}

std::pair<std::string, FeatureVector> parse_sparse(const std::string &line) {
  auto fields = split_whitespace(line);
  if (fields.empty()) throw Error("empty sparse feature line");
  FeatureVector fv;
  for (size_t i = 1; i < fields.size(); ++i) {
    auto colon = fields[i].rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw Error("malformed sparse feature '" + fields[i] + "'");
    }
    fv.items[fields[i].substr(0, colon)] =
        parse_double(std::string_view(fields[i]).substr(colon + 1));
  }
  return {fields[0], std::move(fv)};
}

}  // namespace diebolds
