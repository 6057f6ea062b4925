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

#ifndef DIEBOLDS_COMMON_H_
#define DIEBOLDS_COMMON_H_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace diebolds {

// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// The closed set of relations that can be extracted.
enum class Relation {
  kUsedToTreat,
  kConditionsThisMayPrevent,
  kSideEffects,
  kTreatments,
  kSymptoms,
  kRiskFactors,
  kCauses,
  kPreventionFactors,
};

inline constexpr int kNumRelations = 8;

inline constexpr std::array<Relation, kNumRelations> kAllRelations = {
    Relation::kUsedToTreat,  Relation::kConditionsThisMayPrevent,
    Relation::kSideEffects,  Relation::kTreatments,
    Relation::kSymptoms,     Relation::kRiskFactors,
    Relation::kCauses,       Relation::kPreventionFactors,
};

enum class Domain { kDrug, kDisease };

std::string_view relation_name(Relation r);
std::optional<Relation> parse_relation(std::string_view name);
Domain relation_domain(Relation r);
std::vector<Relation> domain_relations(Domain d);

std::string_view domain_name(Domain d);
std::optional<Domain> parse_domain(std::string_view name);

// String helpers shared by the modules.
std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

// Formats a double so that it reads back bit-identically.
std::string format_double(double v);
double parse_double(std::string_view s);

// Warnings go to stderr and are kept in a process-wide buffer so callers
// (and tests) can inspect what was emitted.
void warn(const std::string &message);
std::vector<std::string> take_warnings();

}  // namespace diebolds

#endif  // DIEBOLDS_COMMON_H_
