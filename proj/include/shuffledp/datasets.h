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

#ifndef SHUFFLEDP_DATASETS_H_
#define SHUFFLEDP_DATASETS_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "absl/status/statusor.h"

namespace shuffledp {

using Bit = std::uint8_t;

// n users holding one bit each.
class BitDataset {
 public:
  static absl::StatusOr<BitDataset> Create(std::vector<Bit> bits);

  std::span<const Bit> bits() const { return bits_; }
  std::int64_t n() const { return static_cast<std::int64_t>(bits_.size()); }
  std::int64_t Sum() const;

 private:
  explicit BitDataset(std::vector<Bit> bits) : bits_(std::move(bits)) {}
  std::vector<Bit> bits_;
};

// n users holding one real in [0, 1] each.
class RealDataset {
 public:
  static absl::StatusOr<RealDataset> Create(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::int64_t n() const { return static_cast<std::int64_t>(values_.size()); }
  double Sum() const;

 private:
  explicit RealDataset(std::vector<double> values)
      : values_(std::move(values)) {}
  std::vector<double> values_;
};

// n users holding one value in [0, D) each.
class CategoricalDataset {
 public:
  static absl::StatusOr<CategoricalDataset> Create(std::vector<int> values,
                                                   int domain_size);

  std::span<const int> values() const { return values_; }
  int domain_size() const { return domain_size_; }
  std::int64_t n() const { return static_cast<std::int64_t>(values_.size()); }
  // Exact count of each value.
  Eigen::VectorXd Histogram() const;

 private:
  CategoricalDataset(std::vector<int> values, int domain_size)
      : values_(std::move(values)), domain_size_(domain_size) {}
  std::vector<int> values_;
  int domain_size_;
};

using BitMatrix =
    Eigen::Matrix<Bit, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n users holding a row of d bits each.
class BinaryMatrixDataset {
 public:
  static absl::StatusOr<BinaryMatrixDataset> Create(BitMatrix rows);

  const BitMatrix& rows() const { return rows_; }
  std::int64_t n() const { return rows_.rows(); }
  int d() const { return static_cast<int>(rows_.cols()); }
  std::span<const Bit> Row(std::int64_t i) const {
    return {rows_.data() + i * rows_.cols(),
            static_cast<std::size_t>(rows_.cols())};
  }
  // Per-user row views, the input sequence for protocols over this dataset.
  std::vector<std::span<const Bit>> RowViews() const;
  Eigen::VectorXd ColumnSums() const;

 private:
  explicit BinaryMatrixDataset(BitMatrix rows) : rows_(std::move(rows)) {}
  BitMatrix rows_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_DATASETS_H_
