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

// Binary-record datasets. One record corresponds to one individual and is
// the unit of privacy throughout the library.

#ifndef DPGM_DATA_H_
#define DPGM_DATA_H_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpgm/random.h"

namespace dpgm {

// A length-m indicator vector over the item universe.
class BinaryRecord {
 public:
  BinaryRecord() = default;
  explicit BinaryRecord(std::vector<std::uint8_t> bits);

  // Builds a record with ones at `items`. Throws RangeError on an index
  // outside [0, m).
  static BinaryRecord FromItems(int m, std::span<const int> items);

  int dimension() const { return static_cast<int>(bits_.size()); }
  bool operator[](int j) const { return bits_[j] != 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  int CountOnes() const;
  bool IsEmptySet() const { return CountOnes() == 0; }
  std::vector<int> Items() const;
  Eigen::VectorXd ToVector() const;

  friend bool operator==(const BinaryRecord&, const BinaryRecord&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Synthetic records may legitimately be the empty set; real records may not.
enum class RecordPolicy { kRequireNonEmpty, kAllowEmpty };

class BinaryDataset {
 public:
  BinaryDataset() = default;
  // Validates that every record has dimension `m` and, under
  // kRequireNonEmpty, at least one item. Throws ValidationError.
  BinaryDataset(int m, std::vector<BinaryRecord> records,
                RecordPolicy policy = RecordPolicy::kRequireNonEmpty);

  int dimension() const { return m_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const BinaryRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<BinaryRecord>& records() const { return records_; }

  // Labels are carried for clustering-accuracy evaluation only.
  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const { return *labels_; }
  void SetLabels(std::vector<int> labels);

  BinaryDataset Subset(std::span<const std::size_t> indices) const;

  // Row i is record i as 0.0 / 1.0.
  Eigen::MatrixXd ToMatrix() const;
  int MaxL1Norm() const;

  friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

 private:
  int m_ = 0;
  std::vector<BinaryRecord> records_;
  std::optional<std::vector<int>> labels_;
};

enum class DataFormat { kSparseItems, kDenseCsv };

struct LoadOptions {
  DataFormat format = DataFormat::kSparseItems;
  // Dense cells strictly greater than the threshold become 1.
  int binarize_threshold = 127;
  RecordPolicy policy = RecordPolicy::kRequireNonEmpty;
};

// Sparse format: a header line "m=<int>", then one record per line as
// whitespace-separated, strictly increasing item indices in [0, m).
BinaryDataset ParseSparse(std::istream& in,
                          RecordPolicy policy = RecordPolicy::kRequireNonEmpty);

// Dense CSV: no header, one record per row, every cell a number in [0, 255].
// The dimension is the column count of the first row.
BinaryDataset ParseDenseCsv(
    std::istream& in, int binarize_threshold,
    RecordPolicy policy = RecordPolicy::kRequireNonEmpty);

BinaryDataset LoadRecords(const std::string& path, const LoadOptions& options);

// One integer per line.
std::vector<int> ParseLabels(std::istream& in);
std::vector<int> LoadLabels(const std::string& path);

void WriteSparse(const BinaryDataset& dataset, std::ostream& out);
void WriteSparseFile(const BinaryDataset& dataset, const std::string& path);

struct Batch {
  std::vector<std::size_t> indices;
  std::vector<BinaryRecord> records;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  Eigen::MatrixXd ToMatrix() const;
};

// Poisson subsampling: every record is included independently with
// probability q.
Batch SampleBatch(const BinaryDataset& dataset, double q, Rng& rng);

}  // namespace dpgm

#endif  // DPGM_DATA_H_
