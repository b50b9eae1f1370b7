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

#include "dpgm/data.h"

#include <cmath>
#include <sstream>

#include "dpgm/errors.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/corpora.h"

namespace dpgm {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

BinaryDataset ParseSparseText(
    const std::string& text,
    RecordPolicy policy = RecordPolicy::kRequireNonEmpty) {
  std::istringstream in(text);
  return ParseSparse(in, policy);
}

TEST(SparseFormatTest, ParsesItemIndices) {
  const BinaryDataset dataset = ParseSparseText("m=10\n3 7 9\n");
  ASSERT_EQ(dataset.size(), 1u);
  EXPECT_EQ(dataset.dimension(), 10);
  EXPECT_THAT(dataset[0].Items(), ElementsAre(3, 7, 9));
  EXPECT_EQ(dataset[0].CountOnes(), 3);
}

TEST(SparseFormatTest, IndexAtOrAboveMIsRangeError) {
  EXPECT_THROW(ParseSparseText("m=10\n3 10\n"), RangeError);
}

TEST(SparseFormatTest, MalformedLineReportsLineNumber) {
  try {
    ParseSparseText("m=10\n1 2\n4 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_THAT(e.what(), HasSubstr("line 3"));
  }
}

TEST(SparseFormatTest, RequiresIncreasingIndices) {
  EXPECT_THROW(ParseSparseText("m=10\n4 2\n"), ParseError);
  EXPECT_THROW(ParseSparseText("m=10\n4 4\n"), ParseError);
}

TEST(SparseFormatTest, RequiresHeader) {
  EXPECT_THROW(ParseSparseText("3 7 9\n"), ParseError);
}

TEST(SparseFormatTest, EmptyRecordIsValidationError) {
  EXPECT_THROW(ParseSparseText("m=4\n1\n\n2\n"), ValidationError);
}

TEST(SparseFormatTest, EmptyRecordAllowedForSyntheticData) {
  const BinaryDataset dataset =
      ParseSparseText("m=4\n1\n\n2\n", RecordPolicy::kAllowEmpty);
  ASSERT_EQ(dataset.size(), 3u);
  EXPECT_TRUE(dataset[1].IsEmptySet());
}

TEST(DenseCsvTest, ThresholdsCells) {
  std::istringstream in("0,128,255\n");
  const BinaryDataset dataset = ParseDenseCsv(in, 127);
  ASSERT_EQ(dataset.size(), 1u);
  EXPECT_EQ(dataset.dimension(), 3);
  EXPECT_THAT(dataset[0].Items(), ElementsAre(1, 2));
}

TEST(DenseCsvTest, AllZeroRowIsValidationError) {
  std::istringstream in("0,0,0\n");
  EXPECT_THROW(ParseDenseCsv(in, 127), ValidationError);
}

TEST(DenseCsvTest, RaggedRowIsParseError) {
  std::istringstream in("0,200,0\n255,0\n");
  EXPECT_THROW(ParseDenseCsv(in, 127), ParseError);
}

TEST(DenseCsvTest, OutOfRangeCellIsRejected) {
  std::istringstream in("0,300,0\n");
  EXPECT_THROW(ParseDenseCsv(in, 127), Error);
}

TEST(DatasetTest, RejectsDimensionMismatch) {
  std::vector<BinaryRecord> records = {BinaryRecord({1, 0, 0}),
                                       BinaryRecord({1, 0})};
  EXPECT_THROW(BinaryDataset(3, records), ValidationError);
}

TEST(DatasetTest, MaxL1NormAndSubset) {
  const BinaryDataset dataset = ParseSparseText("m=5\n0\n1 2 3\n4\n");
  EXPECT_EQ(dataset.MaxL1Norm(), 3);
  const std::vector<std::size_t> pick = {2, 0};
  const BinaryDataset subset = dataset.Subset(pick);
  ASSERT_EQ(subset.size(), 2u);
  EXPECT_EQ(subset[0], dataset[2]);
  EXPECT_EQ(subset[1], dataset[0]);
}

TEST(DatasetTest, SparseRoundTripIsIdentity) {
  Rng rng(11);
  std::vector<BinaryRecord> records;
  for (int i = 0; i < 200; ++i) {
    records.push_back(testing::RandomRecord(37, 0.2, rng));
  }
  const BinaryDataset original(37, records);
  std::stringstream buffer;
  WriteSparse(original, buffer);
  EXPECT_EQ(ParseSparse(buffer), original);
}

TEST(DatasetTest, FileRoundTripIsIdentity) {
  testing::ScopedTempDir dir;
  const BinaryDataset original = ParseSparseText("m=6\n0 5\n2\n1 3 4\n");
  WriteSparseFile(original, dir.File("d.txt"));
  LoadOptions options;
  EXPECT_EQ(LoadRecords(dir.File("d.txt"), options), original);
}

TEST(LabelsTest, ParsesOnePerLine) {
  std::istringstream in("3\n1\n0\n");
  EXPECT_THAT(ParseLabels(in), ElementsAre(3, 1, 0));
}

class SampleBatchTest : public ::testing::Test {
 protected:
  SampleBatchTest() {
    Rng rng(5);
    std::vector<BinaryRecord> records;
    for (int i = 0; i < 10000; ++i) {
      records.push_back(testing::RandomRecord(8, 0.5, rng));
    }
    dataset_ = BinaryDataset(8, records);
  }
  BinaryDataset dataset_;
};

TEST_F(SampleBatchTest, QOneTakesEveryRecord) {
  Rng rng(1);
  const Batch batch = SampleBatch(dataset_, 1.0, rng);
  EXPECT_EQ(batch.size(), dataset_.size());
}

TEST_F(SampleBatchTest, QZeroIsEmpty) {
  Rng rng(1);
  EXPECT_TRUE(SampleBatch(dataset_, 0.0, rng).empty());
}

TEST_F(SampleBatchTest, RejectsProbabilityOutsideUnitInterval) {
  Rng rng(1);
  EXPECT_THROW(SampleBatch(dataset_, 1.5, rng), DomainError);
  EXPECT_THROW(SampleBatch(dataset_, -0.1, rng), DomainError);
}

TEST_F(SampleBatchTest, MeanBatchSizeMatchesBinomial) {
  Rng rng(2);
  double total = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    total += static_cast<double>(SampleBatch(dataset_, 0.5, rng).size());
  }
  // Per-trial sd is 50, so the mean of 1000 trials has sd 50 / sqrt(1000).
  EXPECT_NEAR(total / trials, 5000.0, 3.0 * 50.0 / std::sqrt(1000.0));
}

TEST_F(SampleBatchTest, InclusionFrequenciesPassChiSquare) {
  // Record inclusion counts over 10,000 trials for 20 fixed records; the
  // chi-square statistic over the include/exclude cells has 20 degrees of
  // freedom, with 1% critical value 37.57.
  const double q = 0.3;
  const int trials = 10000;
  const std::vector<BinaryRecord> head(dataset_.records().begin(),
                                       dataset_.records().begin() + 20);
  const BinaryDataset small(8, head);
  std::vector<int> included(20, 0);
  Rng rng(3);
  for (int t = 0; t < trials; ++t) {
    for (std::size_t i : SampleBatch(small, q, rng).indices) ++included[i];
  }
  double chi2 = 0.0;
  const double expected_in = q * trials;
  const double expected_out = (1.0 - q) * trials;
  for (int count : included) {
    chi2 += std::pow(count - expected_in, 2) / expected_in +
            std::pow((trials - count) - expected_out, 2) / expected_out;
  }
  EXPECT_LT(chi2, 37.57);
}

}  // namespace
}  // namespace dpgm
