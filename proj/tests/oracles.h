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

#ifndef DIEBOLDS_TESTS_ORACLES_H_
#define DIEBOLDS_TESTS_ORACLES_H_

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "diebolds/features.h"
#include "diebolds/propagate.h"

namespace diebolds::testing {

// Dense solve of (I - (1 - a) S D^-1) v = a r; isolated nodes keep a zero
// column, and the result is rescaled to unit mass.
inline Eigen::VectorXd dense_ppr(const PropGraph &g, const std::vector<double> &r,
                                 double alpha) {
  const int n = g.size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const Edge &e : g.edges()) {
    S(e.a, e.b) += e.weight;
    S(e.b, e.a) += e.weight;
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = S.col(j).sum();
    if (d > 0) P.col(j) = S.col(j) / d;
  }
  Eigen::VectorXd rv(n);
  for (int i = 0; i < n; ++i) rv(i) = r[i];
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - (1 - alpha) * P;
  Eigen::VectorXd v = A.partialPivLu().solve(alpha * rv);
  return v / v.sum();
}

// Count by scanning every vector per id, then rank each id against all
// others pairwise.
inline std::set<std::string> recount_kept(const std::vector<FeatureVector> &vectors,
                                          double frac) {
  std::set<std::string> vocab;
  for (const auto &v : vectors) {
    for (const auto &e : v.items) vocab.insert(e.first);
  }
  std::map<std::string, int> df;
  for (const std::string &id : vocab) {
    for (const auto &v : vectors) df[id] += v.has(id) ? 1 : 0;
  }
  const size_t cut = static_cast<size_t>(std::ceil(frac * vocab.size() - 1e-9));
  std::set<std::string> kept;
  for (const std::string &id : vocab) {
    size_t ahead = 0;
    for (const std::string &other : vocab) {
      if (df[other] > df[id] || (df[other] == df[id] && other < id)) ++ahead;
    }
    if (ahead >= cut && df[id] > 1) kept.insert(id);
  }
  return kept;
}

}  // namespace diebolds::testing

#endif  // DIEBOLDS_TESTS_ORACLES_H_
