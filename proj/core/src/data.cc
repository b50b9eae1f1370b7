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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "dpgm/errors.h"

namespace dpgm {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool ParseInt(std::string_view token, long long& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ParseDouble(std::string_view token, double& out) {
  // std::from_chars for double is unavailable on older libstdc++.
  std::string copy(token);
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  return !copy.empty() && end == copy.c_str() + copy.size() &&
         std::isfinite(out);
}

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

}  // namespace

BinaryRecord::BinaryRecord(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw ValidationError("record entries must be 0 or 1");
  }
}

BinaryRecord BinaryRecord::FromItems(int m, std::span<const int> items) {
  std::vector<std::uint8_t> bits(m, 0);
  for (int j : items) {
    if (j < 0 || j >= m) {
      throw RangeError("item index " + std::to_string(j) + " outside [0, " +
                       std::to_string(m) + ")");
    }
    bits[j] = 1;
  }
  return BinaryRecord(std::move(bits));
}

int BinaryRecord::CountOnes() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<int> BinaryRecord::Items() const {
  std::vector<int> items;
  for (int j = 0; j < dimension(); ++j) {
    if (bits_[j]) items.push_back(j);
  }
  return items;
}

Eigen::VectorXd BinaryRecord::ToVector() const {
  Eigen::VectorXd v(dimension());
  for (int j = 0; j < dimension(); ++j) v[j] = bits_[j];
  return v;
}

BinaryDataset::BinaryDataset(int m, std::vector<BinaryRecord> records,
                             RecordPolicy policy)
    : m_(m), records_(std::move(records)) {
  if (m_ < 1) throw ValidationError("dimension m must be at least 1");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].dimension() != m_) {
      throw ValidationError("record " + std::to_string(i) + " has dimension " +
                            std::to_string(records_[i].dimension()) +
                            ", expected " + std::to_string(m_));
    }
    if (policy == RecordPolicy::kRequireNonEmpty && records_[i].IsEmptySet()) {
      throw ValidationError("record " + std::to_string(i) + " is empty");
    }
  }
}

void BinaryDataset::SetLabels(std::vector<int> labels) {
  if (labels.size() != records_.size()) {
    throw ValidationError("label count " + std::to_string(labels.size()) +
                          " does not match record count " +
                          std::to_string(records_.size()));
  }
  labels_ = std::move(labels);
}

BinaryDataset BinaryDataset::Subset(
    std::span<const std::size_t> indices) const {
  BinaryDataset out;
  out.m_ = m_;
  out.records_.reserve(indices.size());
  std::vector<int> labels;
  for (std::size_t i : indices) {
    out.records_.push_back(records_.at(i));
    if (labels_) labels.push_back((*labels_)[i]);
  }
  if (labels_) out.labels_ = std::move(labels);
  return out;
}

Eigen::MatrixXd BinaryDataset::ToMatrix() const {
  Eigen::MatrixXd x(records_.size(), m_);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto bits = records_[i].bits();
    for (int j = 0; j < m_; ++j) x(i, j) = bits[j];
  }
  return x;
}

int BinaryDataset::MaxL1Norm() const {
  int best = 0;
  for (const auto& r : records_) best = std::max(best, r.CountOnes());
  return best;
}

BinaryDataset ParseSparse(std::istream& in, RecordPolicy policy) {
  std::string line;
  std::size_t line_no = 0;
  long long m = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto header = Trim(line);
    if (header.empty()) continue;
    if (header.substr(0, 2) != "m=" || !ParseInt(header.substr(2), m)) {
      throw ParseError("expected header 'm=<int>'", line_no);
    }
    break;
  }
  if (m < 1) throw ParseError("declared m must be at least 1", line_no);

  std::vector<BinaryRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::uint8_t> bits(m, 0);
    std::istringstream tokens{std::string(Trim(line))};
    std::string token;
    long long previous = -1;
    while (tokens >> token) {
      long long item = 0;
      if (!ParseInt(token, item)) {
        throw ParseError("not an item index: '" + token + "'", line_no);
      }
      if (item < 0 || item >= m) {
        throw RangeError("line " + std::to_string(line_no) + ": item index " +
                         std::to_string(item) + " outside [0, " +
                         std::to_string(m) + ")");
      }
      if (item <= previous) {
        throw ParseError("item indices must be strictly increasing", line_no);
      }
      previous = item;
      bits[item] = 1;
    }
    if (previous < 0 && policy == RecordPolicy::kRequireNonEmpty) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": empty record");
    }
    records.emplace_back(std::move(bits));
  }
  return BinaryDataset(static_cast<int>(m), std::move(records), policy);
}

BinaryDataset ParseDenseCsv(std::istream& in, int binarize_threshold,
                            RecordPolicy policy) {
  std::string line;
  std::size_t line_no = 0;
  int m = -1;
  std::vector<BinaryRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = Trim(line);
    if (row.empty()) {
      throw ParseError("empty row", line_no);
    }
    std::vector<std::uint8_t> bits;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      const auto cell = Trim(row.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start));
      double value = 0.0;
      if (!ParseDouble(cell, value)) {
        throw ParseError("not a number: '" + std::string(cell) + "'", line_no);
      }
      if (value < 0.0 || value > 255.0) {
        throw RangeError("line " + std::to_string(line_no) + ": value " +
                         std::string(cell) + " outside [0, 255]");
      }
      bits.push_back(value > binarize_threshold ? 1 : 0);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (m < 0) m = static_cast<int>(bits.size());
    if (static_cast<int>(bits.size()) != m) {
      throw ParseError("expected " + std::to_string(m) + " columns, found " +
                           std::to_string(bits.size()),
                       line_no);
    }
    BinaryRecord record(std::move(bits));
    if (policy == RecordPolicy::kRequireNonEmpty && record.IsEmptySet()) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": empty record after binarization");
    }
    records.push_back(std::move(record));
  }
  if (m < 1) throw ValidationError("dense input contains no rows");
  return BinaryDataset(m, std::move(records), policy);
}

BinaryDataset LoadRecords(const std::string& path, const LoadOptions& options) {
  auto in = OpenOrThrow(path);
  switch (options.format) {
    case DataFormat::kSparseItems:
      return ParseSparse(in, options.policy);
    case DataFormat::kDenseCsv:
      return ParseDenseCsv(in, options.binarize_threshold, options.policy);
  }
  throw DomainError("unknown data format");
}

std::vector<int> ParseLabels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto token = Trim(line);
    long long value = 0;
    if (!ParseInt(token, value)) {
      throw ParseError("not an integer label: '" + std::string(token) + "'",
                       line_no);
    }
    labels.push_back(static_cast<int>(value));
  }
  return labels;
}

std::vector<int> LoadLabels(const std::string& path) {
  auto in = OpenOrThrow(path);
  return ParseLabels(in);
}

void WriteSparse(const BinaryDataset& dataset, std::ostream& out) {
  out << "m=" << dataset.dimension() << '\n';
  for (const auto& record : dataset.records()) {
    bool first = true;
    for (int j : record.Items()) {
      if (!first) out << ' ';
      out << j;
      first = false;
    }
    out << '\n';
  }
}

void WriteSparseFile(const BinaryDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  WriteSparse(dataset, out);
}

Eigen::MatrixXd Batch::ToMatrix() const {
  if (records.empty()) return Eigen::MatrixXd(0, 0);
  const int m = records.front().dimension();
  Eigen::MatrixXd x(records.size(), m);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto bits = records[i].bits();
    for (int j = 0; j < m; ++j) x(i, j) = bits[j];
  }
  return x;
}

Batch SampleBatch(const BinaryDataset& dataset, double q, Rng& rng) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("sampling probability must lie in [0, 1]");
  }
  Batch batch;
  if (q == 0.0) return batch;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (q == 1.0 || Uniform01(rng) < q) {
      batch.indices.push_back(i);
      batch.records.push_back(dataset[i]);
    }
  }
  return batch;
}

}  // namespace dpgm
