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
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "dpgm/errors.h"
#include "dpgm/hungarian.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/corpora.h"

namespace dpgm {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

BinaryDataset ToyDataset() {
  return BinaryDataset(4,
                       {BinaryRecord({1, 1, 0, 0}), BinaryRecord({0, 1, 1, 0}),
                        BinaryRecord({0, 0, 1, 1}), BinaryRecord({0, 0, 0, 0})},
                       RecordPolicy::kAllowEmpty);
}

double BruteForceMinCost(const Eigen::MatrixXd& cost) {
  std::vector<int> perm(cost.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index r = 0; r < cost.rows(); ++r) total += cost(r, perm[r]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(AccuracyTest, IdentityLabelingIsPerfect) {
  const std::vector<int> labels = {0, 1, 2, 0, 1, 2};
  EXPECT_EQ(ClusteringAccuracy(labels, labels), 1.0);
}

TEST(AccuracyTest, PermutedLabelingIsPerfect) {
  const std::vector<int> labels = {0, 0, 1, 1, 2, 2};
  const std::vector<int> clusters = {2, 2, 0, 0, 1, 1};
  EXPECT_EQ(ClusteringAccuracy(clusters, labels), 1.0);
}

TEST(AccuracyTest, HalfSwappedIsOneHalf) {
  const std::vector<int> labels = {0, 0, 1, 1};
  const std::vector<int> clusters = {0, 1, 1, 0};
  EXPECT_EQ(ClusteringAccuracy(clusters, labels), 0.5);
}

TEST(AccuracyTest, AtLeastOneOverKAndAtMostOne) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 5;
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::vector<int> clusters(60), labels(60);
    for (int i = 0; i < 60; ++i) {
      clusters[i] = pick(rng);
      labels[i] = pick(rng);
    }
    const double acc = ClusteringAccuracy(clusters, labels);
    EXPECT_GE(acc, 1.0 / k - 1e-12);
    EXPECT_LE(acc, 1.0);
  }
}

TEST(AccuracyTest, RejectsMismatchedLengths) {
  EXPECT_THROW(ClusteringAccuracy(std::vector<int>{0, 1}, std::vector<int>{0}),
               DomainError);
  EXPECT_THROW(ClusteringAccuracy(std::vector<int>{}, std::vector<int>{}),
               DomainError);
}

TEST(HungarianTest, MatchesBruteForceOnRandomMatrices) {
  Rng rng(2);
  std::uniform_real_distribution<double> uniform(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 6;
    Eigen::MatrixXd cost(k, k);
    for (Eigen::Index i = 0; i < cost.size(); ++i)
      cost.data()[i] = uniform(rng);
    const std::vector<int> match = SolveAssignment(cost);
    ASSERT_EQ(static_cast<int>(match.size()), k);
    EXPECT_EQ(std::set<int>(match.begin(), match.end()).size(),
              static_cast<std::size_t>(k));
    double total = 0.0;
    for (int r = 0; r < k; ++r) total += cost(r, match[r]);
    EXPECT_NEAR(total, BruteForceMinCost(cost), 1e-9) << "trial " << trial;
  }
}

TEST(WorkloadTest, SubsetSizesAndLengthBounds) {
  Rng rng(3);
  const int max_l1 = 20;
  const QueryWorkload workload =
      GenerateWorkload(100, max_l1, 500, QuerySemantics::kAny, rng);
  ASSERT_EQ(workload.queries.size(), 500u);
  std::vector<int> per_subset(kWorkloadSubsets + 1, 0);
  for (std::size_t i = 0; i < workload.queries.size(); ++i) {
    const int s = workload.subset_id[i];
    ++per_subset[s];
    const auto& query = workload.queries[i];
    EXPECT_GE(query.size(), 1u);
    EXPECT_LE(static_cast<int>(query.size()), 4 * s);
    EXPECT_TRUE(std::is_sorted(query.begin(), query.end()));
    EXPECT_EQ(std::set<int>(query.begin(), query.end()).size(), query.size());
    EXPECT_GE(query.front(), 0);
    EXPECT_LT(query.back(), 100);
  }
  for (int s = 1; s <= kWorkloadSubsets; ++s) EXPECT_EQ(per_subset[s], 100);
}

TEST(WorkloadTest, LengthsCappedByDimension) {
  Rng rng(4);
  const QueryWorkload workload =
      GenerateWorkload(3, 40, 50, QuerySemantics::kAll, rng);
  for (const auto& query : workload.queries) EXPECT_LE(query.size(), 3u);
}

TEST(WorkloadTest, SameSeedSameWorkload) {
  Rng a(5), b(5);
  EXPECT_EQ(GenerateWorkload(30, 10, 100, QuerySemantics::kAny, a).queries,
            GenerateWorkload(30, 10, 100, QuerySemantics::kAny, b).queries);
}

TEST(WorkloadTest, RejectsBadArguments) {
  Rng rng(6);
  EXPECT_THROW(GenerateWorkload(10, 5, 7, QuerySemantics::kAny, rng),
               DomainError);
  EXPECT_THROW(GenerateWorkload(10, 0, 5, QuerySemantics::kAny, rng),
               DomainError);
  EXPECT_THROW(GenerateWorkload(0, 5, 5, QuerySemantics::kAny, rng),
               DomainError);
}

TEST(CountingQueryTest, ToyDatasetUnderBothSemantics) {
  const BinaryDataset toy = ToyDataset();
  EXPECT_EQ(CountingQuery(toy, std::vector<int>{0, 1}, QuerySemantics::kAny),
            2);
  EXPECT_EQ(CountingQuery(toy, std::vector<int>{0, 1}, QuerySemantics::kAll),
            1);
  EXPECT_EQ(CountingQuery(toy, std::vector<int>{1, 2}, QuerySemantics::kAny),
            3);
  EXPECT_EQ(CountingQuery(toy, std::vector<int>{1, 2}, QuerySemantics::kAll),
            1);
  EXPECT_EQ(CountingQuery(toy, std::vector<int>{3}, QuerySemantics::kAny), 1);
}

TEST(CountingQueryTest, MatchesDirectScanAcrossWordBoundaries) {
  Rng rng(7);
  std::vector<BinaryRecord> records;
  for (int i = 0; i < 200; ++i)
    records.push_back(testing::RandomRecord(150, 0.05, rng));
  const BinaryDataset data(150, records);
  const QueryWorkload workload =
      GenerateWorkload(150, 10, 50, QuerySemantics::kAny, rng);
  for (const auto& query : workload.queries) {
    std::int64_t any = 0, all = 0;
    for (const auto& record : records) {
      const auto hits = std::count_if(query.begin(), query.end(),
                                      [&](int j) { return record[j]; });
      any += hits > 0;
      all += hits == static_cast<long>(query.size());
    }
    EXPECT_EQ(CountingQuery(data, query, QuerySemantics::kAny), any);
    EXPECT_EQ(CountingQuery(data, query, QuerySemantics::kAll), all);
  }
}

TEST(CountingQueryTest, RejectsOutOfRangeAndEmptyQueries) {
  EXPECT_THROW(
      CountingQuery(ToyDataset(), std::vector<int>{4}, QuerySemantics::kAny),
      RangeError);
  EXPECT_THROW(
      CountingQuery(ToyDataset(), std::vector<int>{}, QuerySemantics::kAny),
      DomainError);
}

TEST(RelativeErrorTest, UsesTrueCountAboveSanityBound) {
  EXPECT_DOUBLE_EQ(RelativeError(60, 55, 1000), 5.0 / 60.0);
}

TEST(RelativeErrorTest, UsesSanityBoundForRareQueries) {
  EXPECT_DOUBLE_EQ(RelativeError(0, 1, 10000), 0.1);
}

TEST(RelativeErrorTest, ScaleInvariant) {
  for (double c : {2.0, 10.0, 1000.0}) {
    EXPECT_NEAR(RelativeError(60 * c, 55 * c, 1000 * c), 5.0 / 60.0, 1e-15);
    EXPECT_NEAR(RelativeError(0, c, 10000 * c), 0.1, 1e-15);
  }
}

TEST(RelativeErrorTest, RejectsNegativeCounts) {
  EXPECT_THROW(RelativeError(-1, 2, 10), DomainError);
}

TEST(EvaluateTest, IdenticalDataHasZeroError) {
  Rng rng(8);
  const BinaryDataset data = testing::BernoulliMixture(
      500, testing::BlockPrototypes(2, 20, 0.6, 0.1), rng);
  const QueryWorkload workload =
      GenerateWorkload(20, 10, 100, QuerySemantics::kAny, rng);
  const EvalReport report = EvaluateWorkload(data, data, workload);
  ASSERT_EQ(report.subsets.size(), 5u);
  for (const auto& row : report.subsets) {
    EXPECT_EQ(row.n_queries, 20);
    EXPECT_EQ(row.mean_rel_err, 0.0);
  }
  EXPECT_EQ(report.sanity_bound, 0.5);
}

TEST(EvaluateTest, SyntheticCountsAreRescaledToRealSize) {
  const BinaryDataset toy = ToyDataset();
  std::vector<BinaryRecord> doubled = toy.records();
  doubled.insert(doubled.end(), toy.records().begin(), toy.records().end());
  QueryWorkload workload;
  for (int s = 1; s <= 5; ++s) {
    workload.queries.push_back({0, 2});
    workload.subset_id.push_back(s);
  }
  const EvalReport report = EvaluateWorkload(
      toy, BinaryDataset(4, doubled, RecordPolicy::kAllowEmpty), workload);
  for (const auto& row : report.subsets) EXPECT_EQ(row.mean_rel_err, 0.0);
}

TEST(EvaluateTest, JsonAndCsvOutputs) {
  EvalReport report;
  for (int s = 1; s <= 5; ++s)
    report.subsets.push_back({s, 100, 0.01 * s, 0.2});
  report.accuracy = 0.75;
  report.query_count = 500;
  const nlohmann::json j = ToJson(report);
  EXPECT_EQ(j["subsets"].size(), 5u);
  EXPECT_EQ(j["subsets"][2]["mean_rel_err"], 0.03);
  EXPECT_EQ(j["accuracy"], 0.75);
  const std::string csv = ToCsv(report);
  EXPECT_THAT(csv, StartsWith("subset,mean_rel_err,n_queries\n"));
  EXPECT_THAT(csv, HasSubstr("\n5,0.050000000000000003,100\n"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(SemanticsTest, ParseRoundTrip) {
  EXPECT_EQ(ParseQuerySemantics("any"), QuerySemantics::kAny);
  EXPECT_EQ(ParseQuerySemantics(ToString(QuerySemantics::kAll)),
            QuerySemantics::kAll);
  EXPECT_THROW(ParseQuerySemantics("some"), DomainError);
}

}  // namespace
}  // namespace dpgm
