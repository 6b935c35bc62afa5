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

#include "mask/dataset.hpp"

#include <stdexcept>

namespace mask {

Dataset::Dataset(std::vector<Vector> points, std::vector<ElementId> ids,
                 std::vector<std::string> labels)
    : points_(std::move(points)), ids_(std::move(ids)), labels_(std::move(labels)) {
  if (points_.size() != ids_.size()) {
    throw std::invalid_argument("dataset: point and id counts differ");
  }
  if (!labels_.empty() && labels_.size() != points_.size()) {
    throw std::invalid_argument("dataset: label count differs from point count");
  }
  if (!points_.empty()) dim_ = points_.front().dim();
  rows_.reserve(ids_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].dim() != dim_) {
      throw DimensionError("dataset: point " + std::to_string(i) + " has dim " +
                           std::to_string(points_[i].dim()) + ", expected " +
                           std::to_string(dim_));
    }
    if (!rows_.emplace(ids_[i], i).second) {
      throw std::invalid_argument("dataset: duplicate id " + std::to_string(ids_[i]));
    }
  }
}

Dataset Dataset::from_points(std::vector<Vector> points, std::vector<std::string> labels) {
  std::vector<ElementId> ids(points.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return Dataset(std::move(points), std::move(ids), std::move(labels));
}

const std::string& Dataset::label(std::size_t row) const {
  if (labels_.empty()) throw std::logic_error("dataset has no labels");
  return labels_.at(row);
}

std::optional<std::size_t> Dataset::row_of(ElementId id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Vector> pts;
  std::vector<ElementId> ids;
  std::vector<std::string> labels;
  pts.reserve(rows.size());
  ids.reserve(rows.size());
  for (std::size_t r : rows) {
    pts.push_back(points_.at(r));
    ids.push_back(ids_[r]);
    if (has_labels()) labels.push_back(labels_[r]);
  }
  return Dataset(std::move(pts), std::move(ids), std::move(labels));
}

}  // namespace mask
