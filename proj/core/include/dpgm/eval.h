//
// Copyright 2026 The DPGM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Utility metrics: clustering accuracy under the best cluster-to-label
// matching, and counting-query workloads scored by relative error.

#ifndef DPGM_EVAL_H_
#define DPGM_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpgm/data.h"
#include "dpgm/random.h"

namespace dpgm {

inline constexpr int kWorkloadSubsets = 5;
inline constexpr double kSanityBoundFraction = 0.001;

// Fraction of records whose label equals the matched label of their
// cluster, maximized over one-to-one matchings. Throws DomainError on a
// length mismatch or empty input.
double ClusteringAccuracy(std::span<const int> assignments,
                          std::span<const int> labels);

enum class QuerySemantics {
  kAny,  // record shares at least one item with the query
  kAll,  // record contains every query item
};

std::string ToString(QuerySemantics semantics);
QuerySemantics ParseQuerySemantics(const std::string& name);

struct QueryWorkload {
  std::vector<std::vector<int>> queries;  // sorted item sets
  std::vector<int> subset_id;             // 1..5
  QuerySemantics semantics = QuerySemantics::kAny;
};

// total / 5 queries per subset i; lengths uniform on
// [1, min(m, ceil(i * max_l1 / 5))], items uniform without replacement.
QueryWorkload GenerateWorkload(int m, int max_l1, int total,
                               QuerySemantics semantics, Rng& rng);

std::int64_t CountingQuery(const BinaryDataset& dataset,
                           std::span<const int> query,
                           QuerySemantics semantics);

// |synth - truth| / max(truth, 0.001 * dataset_size).
double RelativeError(double true_count, double synth_count,
                     std::size_t dataset_size);

struct SubsetResult {
  int subset = 0;
  int n_queries = 0;
  double mean_rel_err = 0.0;
  // Reference only: counts predicted from the real data's item marginals
  // under an independence assumption.
  double baseline_mean_rel_err = 0.0;
};

struct EvalReport {
  std::vector<SubsetResult> subsets;
  std::optional<double> accuracy;
  std::size_t query_count = 0;
  double sanity_bound = 0.0;
  std::size_t real_size = 0;
  std::size_t synthetic_size = 0;
  QuerySemantics semantics = QuerySemantics::kAny;
};

// Synthetic counts are rescaled by |real| / |synthetic| before scoring.
EvalReport EvaluateWorkload(const BinaryDataset& real,
                            const BinaryDataset& synthetic,
                            const QueryWorkload& workload);

nlohmann::json ToJson(const EvalReport& report);
// Columns: subset, mean_rel_err, n_queries.
std::string ToCsv(const EvalReport& report);

}  // namespace dpgm

#endif  // DPGM_EVAL_H_
