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


#include "diebolds/classify.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

namespace diebolds {
namespace {

constexpr char kBiasFeature[] = "__bias__";
constexpr double kMinProbability = 1e-12;

struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;
  double sq_norm = 0;
};

double dot(const std::vector<double> &w, const SparseRow &x) {
  double s = 0;
  for (size_t k = 0; k < x.index.size(); ++k) s += w[x.index[k]] * x.value[k];
  return s;
}

double platt_objective(const std::vector<double> &f,
                       const std::vector<double> &t, double A, double B) {
  double fval = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    const double fApB = f[i] * A + B;
    if (fApB >= 0) {
      fval += t[i] * fApB + std::log1p(std::exp(-fApB));
    } else {
      fval += (t[i] - 1) * fApB + std::log1p(std::exp(fApB));
    }
  }
  return fval;
}

}  // namespace

double LinearModel::margin(const FeatureVector &x) const {
  double m = bias;
  for (const auto &[id, v] : x.items) {
    auto it = weights.find(id);
    if (it != weights.end()) m += it->second * v;
  }
  return m;
}

double LinearModel::probability(double m) const {
  const double p = 1.0 / (1.0 + std::exp(-(calib_scale * m + calib_offset)));
  return std::clamp(p, kMinProbability, 1.0 - kMinProbability);
}

int TrainingSet::add(std::string key, FeatureVector vector) {
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return static_cast<int>(i);
  }
  keys.push_back(std::move(key));
  vectors.push_back(std::move(vector));
  return static_cast<int>(keys.size()) - 1;
}

void TrainingSet::validate() const {
  for (const auto &[rel, pos] : positives) {
    auto it = negatives.find(rel);
    if (it == negatives.end()) continue;
    std::set<int> p(pos.begin(), pos.end());
    for (int n : it->second) {
      if (p.count(n)) {
        throw Error("example " + keys[n] + " is both positive and negative for " +
                    std::string(relation_name(rel)));
      }
    }
  }
}

TrainingSet build_training_set(
    const std::map<Relation, std::vector<std::pair<std::string, FeatureVector>>>
        &positives,
    const std::vector<std::pair<std::string, FeatureVector>> &pool,
    uint64_t rng_seed) {
  TrainingSet set;
  std::unordered_map<std::string, int> index;
  auto add = [&](const std::string &key, const FeatureVector &v) {
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    set.keys.push_back(key);
    set.vectors.push_back(v);
    const int i = static_cast<int>(set.keys.size()) - 1;
    index.emplace(key, i);
    return i;
  };
  for (const auto &[rel, examples] : positives) {
    auto &pos = set.positives[rel];
    for (const auto &[key, v] : examples) pos.push_back(add(key, v));
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  }
  std::vector<int> pool_idx;
  for (const auto &[key, v] : pool) pool_idx.push_back(add(key, v));

  std::mt19937_64 rng(rng_seed);
  for (const auto &[rel, pos] : set.positives) {
    std::set<int> own(pos.begin(), pos.end());
    std::set<int> neg;
    for (const auto &[other, other_pos] : set.positives) {
      if (other == rel) continue;
      for (int i : other_pos) {
        if (!own.count(i)) neg.insert(i);
      }
    }
    std::vector<int> candidates;
    for (int i : pool_idx) {
      if (!own.count(i) && !neg.count(i)) candidates.push_back(i);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const size_t take = std::min(candidates.size(), pos.size());
    neg.insert(candidates.begin(), candidates.begin() + take);
    set.negatives[rel] = {neg.begin(), neg.end()};
  }
  set.validate();
  return set;
}

std::pair<double, double> fit_platt(const std::vector<double> &margins,
                                    const std::vector<int> &labels) {
  double prior1 = 0, prior0 = 0;
  for (int y : labels) (y > 0 ? prior1 : prior0) += 1;
  const double hi = (prior1 + 1) / (prior1 + 2), lo = 1 / (prior0 + 2);
  std::vector<double> t(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) t[i] = labels[i] > 0 ? hi : lo;

  double A = 0, B = std::log((prior0 + 1) / (prior1 + 1));
  double fval = platt_objective(margins, t, A, B);
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = 1e-12, h22 = 1e-12, h21 = 0, g1 = 0, g2 = 0;
    for (size_t i = 0; i < margins.size(); ++i) {
      const double fApB = margins[i] * A + B;
      double p, q;
      if (fApB >= 0) {
        p = std::exp(-fApB) / (1 + std::exp(-fApB));
        q = 1 / (1 + std::exp(-fApB));
      } else {
        p = 1 / (1 + std::exp(fApB));
        q = std::exp(fApB) / (1 + std::exp(fApB));
      }
      const double d2 = p * q;
      h11 += margins[i] * margins[i] * d2;
      h22 += d2;
      h21 += margins[i] * d2;
      const double d1 = t[i] - p;
      g1 += margins[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1;
    while (step >= 1e-10) {
      const double nA = A + step * dA, nB = B + step * dB;
      const double nf = platt_objective(margins, t, nA, nB);
      if (nf < fval + 1e-4 * step * gd) {
        A = nA;
        B = nB;
        fval = nf;
        break;
      }
      step /= 2;
    }
    if (step < 1e-10) break;
  }
  return {-A, -B};
}

std::vector<LinearModel> train(const TrainingSet &data,
                               const TrainOptions &options) {
  data.validate();
  if (!(options.reg_lambda > 0)) throw Error("reg_lambda must be positive");
  if (options.epochs < 1) throw Error("epochs must be at least 1");
  std::vector<LinearModel> models;
  for (Relation rel : kAllRelations) {
    auto pit = data.positives.find(rel);
    if (pit == data.positives.end()) continue;
    if (pit->second.empty()) {
      warn("no positive examples for " + std::string(relation_name(rel)) +
           "; model omitted");
      continue;
    }
    std::vector<int> examples = pit->second;
    std::vector<int> labels(examples.size(), 1);
    auto nit = data.negatives.find(rel);
    if (nit != data.negatives.end()) {
      examples.insert(examples.end(), nit->second.begin(), nit->second.end());
      labels.resize(examples.size(), -1);
    }

    // Dense feature indices for this problem; slot 0 is the bias.
    std::map<std::string, int> feature_index{{kBiasFeature, 0}};
    std::vector<SparseRow> rows;
    for (int e : examples) {
      for (const auto &entry : data.vectors[e].items) {
        feature_index.emplace(entry.first, 0);
      }
    }
    {
      int k = 0;
      for (auto &entry : feature_index) entry.second = k++;
    }
    const int bias_slot = feature_index.at(kBiasFeature);
    for (int e : examples) {
      SparseRow row;
      row.index.push_back(bias_slot);
      row.value.push_back(1.0);
      for (const auto &[id, v] : data.vectors[e].items) {
        row.index.push_back(feature_index.at(id));
        row.value.push_back(v);
      }
      for (double v : row.value) row.sq_norm += v * v;
      rows.push_back(std::move(row));
    }

    std::mt19937_64 rng(options.rng_seed * 1000003ULL +
                        static_cast<uint64_t>(rel));
    std::vector<int> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    size_t holdout = static_cast<size_t>(
        std::floor(options.holdout_fraction * static_cast<double>(rows.size())));
    if (holdout < 2) holdout = 0;
    std::vector<int> held(order.begin(), order.begin() + holdout);
    std::vector<int> fit(order.begin() + holdout, order.end());

    // Pegasos with w = scale * u.
    const int dim = static_cast<int>(feature_index.size());
    const double lambda = options.reg_lambda;
    std::vector<double> u(dim, 0.0), average(dim, 0.0);
    double scale = 1, u_sq = 0;
    long long t = 0;
    int averaged = 0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      std::shuffle(fit.begin(), fit.end(), rng);
      for (int i : fit) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const SparseRow &x = rows[i];
        const double y = labels[i];
        const double m = y * scale * dot(u, x);
        const double shrink = 1.0 - 1.0 / static_cast<double>(t);
        if (shrink <= 0) {
          std::fill(u.begin(), u.end(), 0.0);
          scale = 1;
          u_sq = 0;
        } else {
          scale *= shrink;
        }
        if (m < 1) {
          const double c = eta * y / scale;
          u_sq += 2 * c * dot(u, x) + c * c * x.sq_norm;
          for (size_t k = 0; k < x.index.size(); ++k) {
            u[x.index[k]] += c * x.value[k];
          }
        }
        const double w_norm = scale * std::sqrt(std::max(u_sq, 0.0));
        const double radius = 1.0 / std::sqrt(lambda);
        if (w_norm > radius) scale *= radius / w_norm;
        if (scale < 1e-100) {
          for (double &v : u) v *= scale;
          u_sq *= scale * scale;
          scale = 1;
        }
      }
      if (epoch >= options.epochs / 2) {
        for (int k = 0; k < dim; ++k) average[k] += scale * u[k];
        ++averaged;
      }
    }
    for (double &v : average) v /= averaged;

    LinearModel model;
    model.relation = rel;
    for (const auto &[id, k] : feature_index) {
      if (k == bias_slot) {
        model.bias = average[k];
      } else if (average[k] != 0) {
        model.weights[id] = average[k];
      }
    }

    auto calibrate = [&](const std::vector<int> &idx) {
      std::vector<double> margins;
      std::vector<int> y;
      bool has_pos = false, has_neg = false;
      for (int i : idx) {
        margins.push_back(model.margin(data.vectors[examples[i]]));
        y.push_back(labels[i]);
        (labels[i] > 0 ? has_pos : has_neg) = true;
      }
      if (!has_pos || !has_neg) return false;
      auto [a, b] = fit_platt(margins, y);
      if (!(a > 0) || !std::isfinite(a) || !std::isfinite(b)) return false;
      model.calib_scale = a;
      model.calib_offset = b;
      return true;
    };
    if (!calibrate(held)) {
      std::vector<int> all(order.begin(), order.end());
      std::sort(all.begin(), all.end());
      if (!calibrate(all)) {
        model.calib_scale = 1;
        model.calib_offset = 0;
      }
    }
    models.push_back(std::move(model));
  }
  return models;
}

std::string Prediction::label() const {
  return relation ? std::string(relation_name(*relation)) : "other";
}

Prediction predict(const std::vector<LinearModel> &models,
                   const FeatureVector &vector) {
  Prediction best;
  double best_positive = -1;
  double max_prob = 0;
  for (const LinearModel &m : models) {
    const double margin = m.margin(vector);
    const double p = m.probability(margin);
    max_prob = std::max(max_prob, p);
    if (margin <= 0) continue;
    if (p > best_positive ||
        (p == best_positive &&
         relation_name(m.relation) < relation_name(*best.relation))) {
      best_positive = p;
      best.relation = m.relation;
      best.score = p;
    }
  }
  if (!best.relation) {
    best.score = std::clamp(1.0 - max_prob, kMinProbability,
                            1.0 - kMinProbability);
  }
  return best;
}

void TripleStore::add(const std::string &subject, Relation relation,
                      const std::string &object, double score) {
  auto [it, inserted] = triples_.emplace(TripleKey{subject, relation, object},
                                         score);
  if (!inserted) it->second = std::max(it->second, score);
}

TripleStore extract_triples(const std::vector<LinearModel> &models,
                            const Corpus &corpus, const FeatureFilter &filter,
                            int window, bool mentions_only) {
  std::map<Domain, std::vector<LinearModel>> by_domain;
  for (const LinearModel &m : models) {
    by_domain[relation_domain(m.relation)].push_back(m);
  }
  TripleStore store;
  for (const SentenceLists &sl : extract_corpus_lists(corpus, mentions_only)) {
    const Document &doc = corpus.documents[sl.ref.document];
    const Sentence &sentence = doc.sentences[sl.ref.sentence];
    const std::vector<LinearModel> &candidates = by_domain[doc.domain];
    if (candidates.empty()) continue;
    for (const CoordList &list : sl.lists) {
      Prediction p = predict(candidates,
                             apply_filter(filter, featurize(list, sentence, window)));
      if (!p.relation) continue;
      for (const Mention &m : list.items) {
        if (is_self_mention(doc, m)) continue;
        store.add(doc.subject, *p.relation, m.normalized, p.score);
      }
    }
  }
  return store;
}

void write_models(std::ostream &out, const std::vector<LinearModel> &models) {
  for (const LinearModel &m : models) {
    out << "model\t" << relation_name(m.relation) << '\t'
        << format_double(m.bias) << '\t' << format_double(m.calib_scale) << '\t'
        << format_double(m.calib_offset) << '\t' << m.weights.size() << '\n';
    for (const auto &[id, w] : m.weights) {
      out << id << '\t' << format_double(w) << '\n';
    }
  }
}

std::vector<LinearModel> read_models(std::istream &in) {
  std::vector<LinearModel> models;
  std::string line;
  int lineno = 0;
  size_t pending = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cols = split(line, '\t');
    const std::string where = "model file line " + std::to_string(lineno);
    if (pending == 0) {
      auto rel = (cols.size() == 6 && cols[0] == "model")
                     ? parse_relation(cols[1])
                     : std::nullopt;
      if (!rel) throw Error(where + ": expected a model header");
      LinearModel m;
      m.relation = *rel;
      m.bias = parse_double(cols[2]);
      m.calib_scale = parse_double(cols[3]);
      m.calib_offset = parse_double(cols[4]);
      pending = std::stoul(cols[5]);
      models.push_back(std::move(m));
      continue;
    }
    if (cols.size() != 2) throw Error(where + ": expected feature<TAB>weight");
    models.back().weights[cols[0]] = parse_double(cols[1]);
    --pending;
  }
  if (pending != 0) throw Error("model file truncated");
  return models;
}

void write_triple_store(std::ostream &out, const TripleStore &store) {
  for (const auto &[key, score] : store.triples()) {
    out << key.subject << '\t' << relation_name(key.relation) << '\t'
        << key.object << '\t' << format_double(score) << '\n';
  }
}

TripleStore read_triple_store(std::istream &in) {
  TripleStore store;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    auto rel = cols.size() == 4 ? parse_relation(cols[1]) : std::nullopt;
    if (!rel) {
      throw Error("triple store line " + std::to_string(lineno) +
                  ": malformed");
    }
    store.add(cols[0], *rel, cols[2], parse_double(cols[3]));
  }
  return store;
}

}  // namespace diebolds
