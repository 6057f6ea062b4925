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

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "diebolds/classify.h"
#include "doctest.h"
#include "test_util.h"

namespace diebolds {
namespace {

using testing::Gen;
using testing::make_doc;
using testing::make_sentence;

FeatureVector fv(std::initializer_list<std::pair<const std::string, double>> items) {
  FeatureVector v;
  v.items = items;
  return v;
}

// One relation, explicit positives and negatives.
TrainingSet binary_set(const std::vector<FeatureVector> &pos,
                       const std::vector<FeatureVector> &neg,
                       Relation rel = Relation::kSideEffects) {
  TrainingSet set;
  for (const auto &v : pos) {
    set.keys.push_back("p" + std::to_string(set.keys.size()));
    set.vectors.push_back(v);
    set.positives[rel].push_back(static_cast<int>(set.keys.size()) - 1);
  }
  for (const auto &v : neg) {
    set.keys.push_back("n" + std::to_string(set.keys.size()));
    set.vectors.push_back(v);
    set.negatives[rel].push_back(static_cast<int>(set.keys.size()) - 1);
  }
  return set;
}

double plain_margin(const LinearModel &m, const FeatureVector &x) {
  double s = m.bias;
  for (const auto &[id, v] : x.items) {
    if (m.weights.count(id)) s += m.weights.at(id) * v;
  }
  return s;
}

TEST_CASE("separable toy set is learned exactly") {
  std::vector<FeatureVector> pos, neg;
  for (int i = 0; i < 10; ++i) {
    pos.push_back(fv({{"ctxTok=left:include", 1}, {"npTok=w" + std::to_string(i), 1}}));
    neg.push_back(fv({{"ctxTok=left:take", 1}, {"npTok=v" + std::to_string(i), 1}}));
  }
  TrainOptions opt;
  opt.holdout_fraction = 0;
  auto models = train(binary_set(pos, neg), opt);
  REQUIRE(models.size() == 1);
  int correct = 0;
  for (const auto &v : pos) correct += models[0].margin(v) > 0;
  for (const auto &v : neg) correct += models[0].margin(v) < 0;
  CHECK(correct == 20);
  CHECK(models[0].weights.at("ctxTok=left:include") > 0);
  CHECK(models[0].weights.at("ctxTok=left:take") < 0);
  double lo = 1, hi = 0;
  for (const auto &v : pos) lo = std::min(lo, models[0].probability(models[0].margin(v)));
  for (const auto &v : neg) hi = std::max(hi, models[0].probability(models[0].margin(v)));
  CHECK(lo > hi);
}

TEST_CASE("identical vectors with both labels") {
  FeatureVector x = fv({{"npTok=same", 1}});
  auto models = train(binary_set({x, x, x}, {x, x, x}));
  REQUIRE(models.size() == 1);
  CHECK(std::isfinite(models[0].margin(x)));
  const double p = models[0].probability(models[0].margin(x));
  CHECK(p > 0);
  CHECK(p < 1);
}

// Symmetric 2-D data: every positive x has a negative -x, so the
// max-margin separator passes through the origin.
TEST_CASE("2-D direction matches the max-margin separator") {
  Gen gen(7);
  for (int trial = 0; trial < 5; ++trial) {
    const double theta = gen.uniform(0, 2 * std::numbers::pi);
    const double ux = std::cos(theta), uy = std::sin(theta);
    std::vector<std::pair<double, double>> points;
    while (points.size() < 10) {
      const double x = gen.uniform(-3, 3), y = gen.uniform(-3, 3);
      if (x * ux + y * uy > 0.5) points.emplace_back(x, y);
    }
    std::vector<FeatureVector> pos, neg;
    for (auto [x, y] : points) {
      pos.push_back(fv({{"x", x}, {"y", y}}));
      neg.push_back(fv({{"x", -x}, {"y", -y}}));
    }
    TrainOptions opt;
    opt.holdout_fraction = 0;
    opt.reg_lambda = 1e-2;
    opt.epochs = 2000;
    opt.rng_seed = trial + 1;
    auto models = train(binary_set(pos, neg), opt);
    REQUIRE(models.size() == 1);

    double best = -1e9, best_angle = 0;
    for (int k = 0; k < 36000; ++k) {
      const double a = k * std::numbers::pi / 18000;
      double m = 1e9;
      for (auto [x, y] : points) m = std::min(m, x * std::cos(a) + y * std::sin(a));
      if (m > best) {
        best = m;
        best_angle = a;
      }
    }
    const double wx = models[0].weights.count("x") ? models[0].weights.at("x") : 0;
    const double wy = models[0].weights.count("y") ? models[0].weights.at("y") : 0;
    const double got = std::atan2(wy, wx);
    double diff = std::abs(got - best_angle);
    diff = std::min(diff, 2 * std::numbers::pi - diff);
    CHECK(diff * 180 / std::numbers::pi < 5.0);
  }
}

TEST_CASE("predict agrees with a one-vs-rest oracle") {
  Gen gen(11);
  const std::vector<Relation> rels = {Relation::kUsedToTreat,
                                      Relation::kSideEffects,
                                      Relation::kConditionsThisMayPrevent};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LinearModel> models;
    for (Relation r : rels) {
      LinearModel m;
      m.relation = r;
      m.bias = gen.uniform(-1, 1);
      for (int f = 0; f < 6; ++f) {
        if (gen.chance(0.7)) m.weights["f" + std::to_string(f)] = gen.uniform(-2, 2);
      }
      m.calib_scale = gen.uniform(0.2, 3);
      m.calib_offset = gen.uniform(-1, 1);
      models.push_back(m);
    }
    FeatureVector x;
    for (int f = 0; f < 6; ++f) {
      if (gen.chance(0.5)) x.items["f" + std::to_string(f)] = 1;
    }
    std::optional<Relation> want;
    double want_p = -1, max_p = 0;
    for (const LinearModel &m : models) {
      const double margin = plain_margin(m, x);
      const double p =
          1 / (1 + std::exp(-(m.calib_scale * margin + m.calib_offset)));
      max_p = std::max(max_p, p);
      if (margin > 0 && p > want_p) {
        want_p = p;
        want = m.relation;
      }
    }
    Prediction got = predict(models, x);
    CHECK(got.relation == want);
    if (want) {
      CHECK(got.score == doctest::Approx(want_p).epsilon(1e-12));
    } else {
      CHECK(got.label() == "other");
      CHECK(got.score == doctest::Approx(1 - max_p).epsilon(1e-12));
    }
  }
}

TEST_CASE("memorised training example scores high and zero vector is other") {
  FeatureVector a = fv({{"npTok=nausea", 1}, {"ctxTok=left:include", 1}});
  FeatureVector b = fv({{"npTok=arthritis", 1}, {"ctxTok=left:treat", 1}});
  TrainingSet set;
  set.keys = {"a", "b"};
  set.vectors = {a, b};
  set.positives[Relation::kSideEffects] = {0};
  set.negatives[Relation::kSideEffects] = {1};
  set.positives[Relation::kUsedToTreat] = {1};
  set.negatives[Relation::kUsedToTreat] = {0};
  auto models = train(set);
  Prediction p = predict(models, a);
  REQUIRE(p.relation);
  CHECK(*p.relation == Relation::kSideEffects);
  CHECK(p.score > 0.5);

  LinearModel neg;
  neg.bias = -1;
  Prediction none = predict({neg}, FeatureVector{});
  CHECK(none.label() == "other");
  CHECK(none.score > 0.5);
}

TEST_CASE("training set negatives") {
  std::map<Relation, std::vector<std::pair<std::string, FeatureVector>>> pos;
  pos[Relation::kSideEffects] = {{"nausea", fv({{"a", 1}})},
                                 {"rash", fv({{"b", 1}})},
                                 {"shared", fv({{"c", 1}})}};
  pos[Relation::kUsedToTreat] = {{"pain", fv({{"d", 1}})},
                                 {"shared", fv({{"c", 1}})}};
  std::vector<std::pair<std::string, FeatureVector>> pool;
  for (int i = 0; i < 20; ++i) {
    pool.push_back({"u" + std::to_string(i), fv({{"e" + std::to_string(i), 1}})});
  }
  pool.push_back({"rash", fv({{"b", 1}})});
  TrainingSet set = build_training_set(pos, pool, 5);
  for (const auto &[rel, p] : set.positives) {
    std::set<int> ps(p.begin(), p.end());
    for (int n : set.negatives.at(rel)) CHECK_FALSE(ps.count(n));
  }
  auto key_set = [&](Relation r) {
    std::set<std::string> out;
    for (int i : set.negatives.at(r)) out.insert(set.keys[i]);
    return out;
  };
  auto se = key_set(Relation::kSideEffects);
  CHECK(se.count("pain"));
  CHECK_FALSE(se.count("shared"));
  CHECK(se.size() == 1 + 3);
  auto utt = key_set(Relation::kUsedToTreat);
  CHECK(utt.count("nausea"));
  CHECK(utt.count("rash"));
  CHECK(utt.size() == 2 + 2);

  TrainingSet again = build_training_set(pos, pool, 5);
  CHECK(again.keys == set.keys);
  CHECK(again.negatives == set.negatives);

  TrainingSet bad = set;
  bad.negatives[Relation::kSideEffects].push_back(set.positives[Relation::kSideEffects][0]);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("platt calibration is increasing in the margin") {
  Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> margins;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
      const int y = gen.chance(0.5) ? 1 : -1;
      margins.push_back(y * gen.uniform(0, 2) + gen.uniform(-1, 1));
      labels.push_back(y);
    }
    auto [a, b] = fit_platt(margins, labels);
    CHECK(a > 0);
    LinearModel m;
    m.calib_scale = a;
    m.calib_offset = b;
    double prev = 0;
    for (double t = -5; t <= 5; t += 0.25) {
      const double p = m.probability(t);
      CHECK(p >= prev);
      prev = p;
    }
  }
}

TEST_CASE("extraction breaks a list into triples") {
  Corpus corpus;
  corpus.documents.push_back(make_doc(
      "d1", "aspirin",
      {make_sentence("Side/NN effects/NNS include/VBP nausea/NN ,/, headache/NN "
                     ",/, dizziness/NN ,/, or/CC rash/NN ./.")}));
  LinearModel always;
  always.relation = Relation::kSideEffects;
  always.bias = 1;
  LinearModel other_domain;
  other_domain.relation = Relation::kSymptoms;
  other_domain.bias = 5;
  TripleStore store = extract_triples({always, other_domain}, corpus, FeatureFilter{});
  for (const char *item : {"nausea", "headache", "dizziness", "rash"}) {
    auto it = store.triples().find({"aspirin", Relation::kSideEffects, item});
    REQUIRE(it != store.triples().end());
    CHECK(it->second == doctest::Approx(always.probability(1)));
  }
  for (const auto &[key, score] : store.triples()) {
    CHECK(key.relation == Relation::kSideEffects);
    CHECK(key.object != "aspirin");
  }
}

TEST_CASE("triple store keeps the best score") {
  TripleStore store;
  store.add("aspirin", Relation::kSideEffects, "nausea", 0.4);
  store.add("aspirin", Relation::kSideEffects, "nausea", 0.9);
  store.add("aspirin", Relation::kSideEffects, "nausea", 0.2);
  REQUIRE(store.size() == 1);
  CHECK(store.triples().begin()->second == 0.9);
}

TEST_CASE("model and triple store round trips") {
  LinearModel m;
  m.relation = Relation::kCauses;
  m.bias = -0.125;
  m.calib_scale = 1.7;
  m.calib_offset = 0.3;
  m.weights = {{"npTok=virus", 0.1 + 0.2}, {"ctxTok=left:by", -1.0 / 3}};
  LinearModel empty;
  std::ostringstream out;
  write_models(out, {m, empty});
  std::istringstream in(out.str());
  auto back = read_models(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].relation == m.relation);
  CHECK(back[0].bias == m.bias);
  CHECK(back[0].calib_scale == m.calib_scale);
  CHECK(back[0].calib_offset == m.calib_offset);
  CHECK(back[0].weights == m.weights);
  CHECK(back[1].weights.empty());

  std::istringstream truncated("model\tcauses\t0\t1\t0\t2\nx\t1\n");
  CHECK_THROWS_AS(read_models(truncated), Error);

  TripleStore store;
  store.add("flu", Relation::kSymptoms, "fever", 0.75);
  store.add("flu", Relation::kCauses, "influenza virus", 1.0 / 3);
  std::ostringstream ts;
  write_triple_store(ts, store);
  std::istringstream tin(ts.str());
  TripleStore store2 = read_triple_store(tin);
  CHECK(store2.triples() == store.triples());
  std::istringstream bad("flu\tnot_a_relation\tfever\t1\n");
  CHECK_THROWS_AS(read_triple_store(bad), Error);
}

}  // namespace
}  // namespace diebolds
