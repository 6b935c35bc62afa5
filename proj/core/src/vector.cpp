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

#include "mask/vector.hpp"

#include <cmath>
#include <sstream>

namespace mask {

Vector Vector::dense(std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("non-finite component at index " + std::to_string(i));
    }
  }
  Vector v;
  v.dim_ = values.size();
  v.dense_ = std::move(values);
  return v;
}

Vector Vector::sparse(std::size_t dim, std::vector<SparseEntry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.index >= dim) {
      throw DimensionError("sparse index " + std::to_string(e.index) + " out of range for dim " +
                           std::to_string(dim));
    }
    if (i > 0 && entries[i - 1].index >= e.index) {
      throw std::invalid_argument("sparse indices must be strictly increasing");
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("non-finite component at index " + std::to_string(e.index));
    }
  }
  Vector v;
  v.dim_ = dim;
  v.sparse_ = true;
  v.entries_ = std::move(entries);
  return v;
}

Vector Vector::zeros(std::size_t dim) { return dense(std::vector<double>(dim, 0.0)); }

double Vector::at(std::size_t i) const {
  if (i >= dim_) throw std::out_of_range("component index out of range");
  if (!sparse_) return dense_[i];
  // entries are sorted, binary search
  std::size_t lo = 0, hi = entries_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (entries_[mid].index < i) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < entries_.size() && entries_[lo].index == i) return entries_[lo].value;
  return 0.0;
}

std::size_t Vector::nonzeros() const {
  std::size_t n = 0;
  if (sparse_) {
    for (const auto& e : entries_) n += e.value != 0.0;
  } else {
    for (double x : dense_) n += x != 0.0;
  }
  return n;
}

Vector Vector::densify() const {
  if (!sparse_) return *this;
  std::vector<double> out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return dense(std::move(out));
}

bool Vector::same_point(const Vector& other) const {
  if (dim_ != other.dim_) return false;
  if (!sparse_ && !other.sparse_) return dense_ == other.dense_;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (at(i) != other.at(i)) return false;
  }
  return true;
}

std::string to_string(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  if (v.is_sparse()) {
    os << "sparse(" << v.dim() << ")[";
    bool first = true;
    for (const auto& e : v.entries()) {
      if (!first) os << ' ';
      os << e.index << ':' << e.value;
      first = false;
    }
    os << ']';
  } else {
    os << '(';
    for (std::size_t i = 0; i < v.dim(); ++i) {
      if (i) os << ", ";
      os << v.values()[i];
    }
    os << ')';
  }
  return os.str();
}

}  // namespace mask
