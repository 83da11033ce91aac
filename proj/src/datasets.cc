//
// Copyright 2026 The shuffledp Authors
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

#include "shuffledp/datasets.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace shuffledp {

absl::StatusOr<BitDataset> BitDataset::Create(std::vector<Bit> bits) {
  if (bits.empty()) {
    return absl::InvalidArgumentError("dataset needs at least one user");
  }
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("entry ", i, " is not a bit: ", bits[i]));
    }
  }
  return BitDataset(std::move(bits));
}

std::int64_t BitDataset::Sum() const {
  return std::accumulate(bits_.begin(), bits_.end(), std::int64_t{0});
}

absl::StatusOr<RealDataset> RealDataset::Create(std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("dataset needs at least one user");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("entry ", i, " is outside [0, 1]: ", values[i]));
    }
  }
  return RealDataset(std::move(values));
}

double RealDataset::Sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

absl::StatusOr<CategoricalDataset> CategoricalDataset::Create(
    std::vector<int> values, int domain_size) {
  if (values.empty()) {
    return absl::InvalidArgumentError("dataset needs at least one user");
  }
  if (domain_size < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("domain size must be at least 2, got ", domain_size));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0 || values[i] >= domain_size) {
      return absl::InvalidArgumentError(absl::StrCat(
          "entry ", i, " = ", values[i], " is outside [0, ", domain_size, ")"));
    }
  }
  return CategoricalDataset(std::move(values), domain_size);
}

Eigen::VectorXd CategoricalDataset::Histogram() const {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(domain_size_);
  for (int v : values_) counts[v] += 1;
  return counts;
}

absl::StatusOr<BinaryMatrixDataset> BinaryMatrixDataset::Create(
    BitMatrix rows) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    return absl::InvalidArgumentError(
        "binary matrix needs at least one user and one column");
  }
  if ((rows.array() > Bit{1}).any()) {
    return absl::InvalidArgumentError("binary matrix has a non-bit entry");
  }
  return BinaryMatrixDataset(std::move(rows));
}

std::vector<std::span<const Bit>> BinaryMatrixDataset::RowViews() const {
  std::vector<std::span<const Bit>> views;
  views.reserve(n());
  for (std::int64_t i = 0; i < n(); ++i) views.push_back(Row(i));
  return views;
}

Eigen::VectorXd BinaryMatrixDataset::ColumnSums() const {
  return rows_.cast<double>().colwise().sum().transpose();
}

}  // namespace shuffledp
