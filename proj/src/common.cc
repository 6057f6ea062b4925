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


#include "diebolds/common.h"

#include <cctype>
#include <charconv>
#include <iostream>
#include <mutex>

namespace diebolds {
namespace {

struct RelationInfo {
  Relation relation;
  std::string_view name;
  Domain domain;
};

constexpr std::array<RelationInfo, kNumRelations> kRelationInfo = {{
    {Relation::kUsedToTreat, "used_to_treat", Domain::kDrug},
    {Relation::kConditionsThisMayPrevent, "conditions_this_may_prevent",
     Domain::kDrug},
    {Relation::kSideEffects, "side_effects", Domain::kDrug},
    {Relation::kTreatments, "treatments", Domain::kDisease},
    {Relation::kSymptoms, "symptoms", Domain::kDisease},
    {Relation::kRiskFactors, "risk_factors", Domain::kDisease},
    {Relation::kCauses, "causes", Domain::kDisease},
    {Relation::kPreventionFactors, "prevention_factors", Domain::kDisease},
}};

std::mutex warnings_mu;
std::vector<std::string> &warning_buffer() {
  static std::vector<std::string> buffer;
  return buffer;
}

}  // namespace

std::string_view relation_name(Relation r) {
  return kRelationInfo[static_cast<int>(r)].name;
}

std::optional<Relation> parse_relation(std::string_view name) {
  for (const auto &info : kRelationInfo) {
    if (info.name == name) return info.relation;
  }
  return std::nullopt;
}

Domain relation_domain(Relation r) {
  return kRelationInfo[static_cast<int>(r)].domain;
}

std::vector<Relation> domain_relations(Domain d) {
  std::vector<Relation> out;
  for (const auto &info : kRelationInfo) {
    if (info.domain == d) out.push_back(info.relation);
  }
  return out;
}

std::string_view domain_name(Domain d) {
  return d == Domain::kDrug ? "drug" : "disease";
}

std::optional<Domain> parse_domain(std::string_view name) {
  if (name == "drug") return Domain::kDrug;
  if (name == "disease") return Domain::kDisease;
  return std::nullopt;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("not a number: '" + std::string(s) + "'");
  }
  return v;
}

void warn(const std::string &message) {
  std::lock_guard<std::mutex> lock(warnings_mu);
  std::cerr << "warning: " << message << "\n";
  warning_buffer().push_back(message);
}

std::vector<std::string> take_warnings() {
  std::lock_guard<std::mutex> lock(warnings_mu);
  std::vector<std::string> out;
  out.swap(warning_buffer());
  return out;
}

}  // namespace diebolds
