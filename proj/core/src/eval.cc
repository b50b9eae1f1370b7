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

#include "dpgm/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "dpgm/errors.h"
#include "dpgm/hungarian.h"

namespace dpgm {
namespace {

// Records packed into 64-bit words for fast predicate evaluation.
class PackedRecords {
 public:
  explicit PackedRecords(const BinaryDataset& dataset)
      : words_((dataset.dimension() + 63) / 64), rows_(dataset.size()) {
    bits_.assign(rows_ * words_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto bits = dataset[i].bits();
      for (std::size_t j = 0; j < bits.size(); ++j) {
        if (bits[j]) bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }

  std::vector<std::uint64_t> Mask(std::span<const int> items) const {
    std::vector<std::uint64_t> mask(words_, 0);
    for (int j : items) mask[j / 64] |= std::uint64_t{1} << (j % 64);
    return mask;
  }

  std::int64_t Count(const std::vector<std::uint64_t>& mask,
                     QuerySemantics semantics) const {
    std::int64_t count = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::uint64_t* row = &bits_[i * words_];
      bool match = semantics == QuerySemantics::kAll;
      for (std::size_t w = 0; w < words_; ++w) {
        const std::uint64_t hit = row[w] & mask[w];
        if (semantics == QuerySemantics::kAny) {
          if (hit != 0) {
            match = true;
            break;
          }
        } else if (hit != mask[w]) {
          match = false;
          break;
        }
      }
      count += match;
    }
    return count;
  }

 private:
  std::size_t words_;
  std::size_t rows_;
  std::vector<std::uint64_t> bits_;
};

void CheckQuery(const BinaryDataset& dataset, std::span<const int> query) {
  if (query.empty()) throw DomainError("counting query must be non-empty");
  for (int j : query) {
    if (j < 0 || j >= dataset.dimension()) {
      throw RangeError("query item " + std::to_string(j) + " outside [0, " +
                       std::to_string(dataset.dimension()) + ")");
    }
  }
}

std::vector<double> ItemMarginals(const BinaryDataset& dataset) {
  std::vector<double> marginals(dataset.dimension(), 0.0);
  for (const auto& record : dataset.records()) {
    const auto bits = record.bits();
    for (std::size_t j = 0; j < bits.size(); ++j) marginals[j] += bits[j];
  }
  for (auto& p : marginals) p /= static_cast<double>(dataset.size());
  return marginals;
}

double IndependentEstimate(const std::vector<double>& marginals,
                           std::span<const int> query, QuerySemantics semantics,
                           std::size_t n) {
  double product = 1.0;
  for (int j : query) {
    product *=
        semantics == QuerySemantics::kAny ? 1.0 - marginals[j] : marginals[j];
  }
  const double fraction =
      semantics == QuerySemantics::kAny ? 1.0 - product : product;
  return fraction * static_cast<double>(n);
}

}  // namespace

double ClusteringAccuracy(std::span<const int> assignments,
                          std::span<const int> labels) {
  if (assignments.size() != labels.size()) {
    throw DomainError("assignments and labels differ in length");
  }
  if (assignments.empty()) throw DomainError("accuracy of an empty labeling");

  std::map<int, int> cluster_index, label_index;
  for (int c : assignments) cluster_index.emplace(c, cluster_index.size());
  for (int l : labels) label_index.emplace(l, label_index.size());
  const int n =
      static_cast<int>(std::max(cluster_index.size(), label_index.size()));

  Eigen::MatrixXd contingency = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    contingency(cluster_index[assignments[i]], label_index[labels[i]]) += 1.0;
  }
  const std::vector<int> match = SolveAssignment(-contingency);
  double correct = 0.0;
  for (int r = 0; r < n; ++r) correct += contingency(r, match[r]);
  return correct / static_cast<double>(assignments.size());
}

std::string ToString(QuerySemantics semantics) {
  return semantics == QuerySemantics::kAny ? "any" : "all";
}

QuerySemantics ParseQuerySemantics(const std::string& name) {
  if (name == "any") return QuerySemantics::kAny;
  if (name == "all") return QuerySemantics::kAll;
  throw DomainError("query semantics must be 'any' or 'all', got '" + name +
                    "'");
}

QueryWorkload GenerateWorkload(int m, int max_l1, int total,
                               QuerySemantics semantics, Rng& rng) {
  if (m < 1) throw DomainError("workload needs m >= 1");
  if (max_l1 < 1) throw DomainError("max_l1 must be at least 1");
  if (total <= 0 || total % kWorkloadSubsets != 0) {
    throw DomainError("query total must be a positive multiple of 5");
  }
  QueryWorkload workload;
  workload.semantics = semantics;
  std::vector<int> universe(m);
  std::iota(universe.begin(), universe.end(), 0);
  for (int subset = 1; subset <= kWorkloadSubsets; ++subset) {
    const int upper = std::min(
        m, static_cast<int>(std::ceil(subset * static_cast<double>(max_l1) /
                                      kWorkloadSubsets)));
    std::uniform_int_distribution<int> length_dist(1, upper);
    for (int q = 0; q < total / kWorkloadSubsets; ++q) {
      const int length = length_dist(rng);
      // Partial Fisher-Yates: the first `length` slots become the sample.
      for (int i = 0; i < length; ++i) {
        std::uniform_int_distribution<int> pick(i, m - 1);
        std::swap(universe[i], universe[pick(rng)]);
      }
      std::vector<int> query(universe.begin(), universe.begin() + length);
      std::sort(query.begin(), query.end());
      workload.queries.push_back(std::move(query));
      workload.subset_id.push_back(subset);
    }
  }
  return workload;
}

std::int64_t CountingQuery(const BinaryDataset& dataset,
                           std::span<const int> query,
                           QuerySemantics semantics) {
  CheckQuery(dataset, query);
  const PackedRecords packed(dataset);
  return packed.Count(packed.Mask(query), semantics);
}

double RelativeError(double true_count, double synth_count,
                     std::size_t dataset_size) {
  if (true_count < 0.0 || synth_count < 0.0) {
    throw DomainError("counts must be non-negative");
  }
  const double sanity =
      kSanityBoundFraction * static_cast<double>(dataset_size);
  const double denominator = std::max(true_count, sanity);
  if (denominator == 0.0) {
    return synth_count == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(synth_count - true_count) / denominator;
}

EvalReport EvaluateWorkload(const BinaryDataset& real,
                            const BinaryDataset& synthetic,
                            const QueryWorkload& workload) {
  if (real.empty() || synthetic.empty()) {
    throw DomainError("evaluation needs non-empty real and synthetic data");
  }
  if (real.dimension() != synthetic.dimension()) {
    throw DomainError("real and synthetic data differ in dimension");
  }
  EvalReport report;
  report.real_size = real.size();
  report.synthetic_size = synthetic.size();
  report.query_count = workload.queries.size();
  report.semantics = workload.semantics;
  report.sanity_bound = kSanityBoundFraction * static_cast<double>(real.size());

  const PackedRecords packed_real(real);
  const PackedRecords packed_synth(synthetic);
  const std::vector<double> marginals = ItemMarginals(real);
  const double scale =
      static_cast<double>(real.size()) / static_cast<double>(synthetic.size());

  std::vector<double> error_sum(kWorkloadSubsets, 0.0);
  std::vector<double> baseline_sum(kWorkloadSubsets, 0.0);
  std::vector<int> counts(kWorkloadSubsets, 0);
  for (std::size_t i = 0; i < workload.queries.size(); ++i) {
    const auto& query = workload.queries[i];
    CheckQuery(real, query);
    const int s = workload.subset_id[i] - 1;
    if (s < 0 || s >= kWorkloadSubsets) {
      throw DomainError("query subset id outside 1..5");
    }
    const auto mask = packed_real.Mask(query);
    const double truth =
        static_cast<double>(packed_real.Count(mask, workload.semantics));
    const double synth = scale * static_cast<double>(packed_synth.Count(
                                     mask, workload.semantics));
    const double baseline =
        IndependentEstimate(marginals, query, workload.semantics, real.size());
    error_sum[s] += RelativeError(truth, synth, real.size());
    baseline_sum[s] += RelativeError(truth, baseline, real.size());
    ++counts[s];
  }
  for (int s = 0; s < kWorkloadSubsets; ++s) {
    SubsetResult row;
    row.subset = s + 1;
    row.n_queries = counts[s];
    if (counts[s] > 0) {
      row.mean_rel_err = error_sum[s] / counts[s];
      row.baseline_mean_rel_err = baseline_sum[s] / counts[s];
    }
    report.subsets.push_back(row);
  }
  return report;
}

nlohmann::json ToJson(const EvalReport& report) {
  nlohmann::json subsets = nlohmann::json::array();
  for (const auto& row : report.subsets) {
    subsets.push_back(
        {{"subset", row.subset},
         {"n_queries", row.n_queries},
         {"mean_rel_err", row.mean_rel_err},
         {"baseline_independent_mean_rel_err", row.baseline_mean_rel_err}});
  }
  nlohmann::json out = {
      {"semantics", ToString(report.semantics)},
      {"query_count", report.query_count},
      {"sanity_bound", report.sanity_bound},
      {"real_size", report.real_size},
      {"synthetic_size", report.synthetic_size},
      {"subsets", subsets},
  };
  if (report.accuracy) out["accuracy"] = *report.accuracy;
  return out;
}

std::string ToCsv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "subset,mean_rel_err,n_queries\n";
  for (const auto& row : report.subsets) {
    out << row.subset << ',' << row.mean_rel_err << ',' << row.n_queries
        << '\n';
  }
  return out.str();
}

}  // namespace dpgm
