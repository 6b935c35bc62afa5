/*
 * Copyright 2026 The MASK Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mask {

/// Raised whenever two vectors (or a vector and an index) disagree on dimensionality.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// A point of the feature space, stored either densely or as sorted (index, value) pairs.
///
/// Construction validates the representation: dense length equals dim, sparse
/// indices strictly increasing and below dim, every component finite. A
/// default-constructed Vector is an empty dense vector of dimension zero and is
/// only useful as a placeholder.
class Vector {
 public:
  Vector() = default;

  static Vector dense(std::vector<double> values);
  static Vector sparse(std::size_t dim, std::vector<SparseEntry> entries);
  static Vector zeros(std::size_t dim);

  std::size_t dim() const { return dim_; }
  bool is_sparse() const { return sparse_; }

  /// Dense storage; empty for sparse vectors.
  std::span<const double> values() const { return dense_; }
  /// Sparse storage; empty for dense vectors.
  std::span<const SparseEntry> entries() const { return entries_; }

  double at(std::size_t i) const;
  std::size_t nonzeros() const;
  Vector densify() const;

  /// Componentwise equality regardless of storage.
  bool same_point(const Vector& other) const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::size_t dim_ = 0;
  bool sparse_ = false;
  std::vector<double> dense_;
  std::vector<SparseEntry> entries_;
};

std::string to_string(const Vector& v);

}  // namespace mask
