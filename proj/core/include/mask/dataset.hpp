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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mask/vector.hpp"

namespace mask {

using ElementId = std::uint64_t;

/// A set of points sharing one dimensionality, each with a unique stable id
/// and, optionally, a category tag.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Vector> points, std::vector<ElementId> ids,
          std::vector<std::string> labels = {});

  /// Assigns ids 0..n-1 in input order.
  static Dataset from_points(std::vector<Vector> points, std::vector<std::string> labels = {});

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::size_t dim() const { return dim_; }
  bool has_labels() const { return !labels_.empty(); }

  const Vector& point(std::size_t row) const { return points_.at(row); }
  ElementId id(std::size_t row) const { return ids_.at(row); }
  const std::string& label(std::size_t row) const;

  std::span<const Vector> points() const { return points_; }
  std::span<const ElementId> ids() const { return ids_; }
  std::span<const std::string> labels() const { return labels_; }

  std::optional<std::size_t> row_of(ElementId id) const;

  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<Vector> points_;
  std::vector<ElementId> ids_;
  std::vector<std::string> labels_;
  std::unordered_map<ElementId, std::size_t> rows_;
  std::size_t dim_ = 0;
};

}  // namespace mask
