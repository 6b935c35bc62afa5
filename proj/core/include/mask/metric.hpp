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

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "mask/vector.hpp"

namespace mask {

enum class MetricKind { L1, L2, Linf, Custom };

/// Minkowski distances of order 1, 2 and infinity, plus a hook for user metrics.
///
/// A custom metric receives dense spans; sparse operands are densified first.
/// Custom functions must satisfy the metric axioms for the range-query
/// cover-radius pruning to stay lossless.
class Metric {
 public:
  using DenseFn = std::function<double(std::span<const double>, std::span<const double>)>;

  Metric() = default;
  explicit Metric(MetricKind kind);

  static Metric l1() { return Metric(MetricKind::L1); }
  static Metric l2() { return Metric(MetricKind::L2); }
  static Metric linf() { return Metric(MetricKind::Linf); }
  static Metric custom(std::string name, DenseFn fn);

  MetricKind kind() const { return kind_; }
  std::string_view name() const;

  double operator()(const Vector& a, const Vector& b) const;

 private:
  friend double distance(const Metric&, const Vector&, const Vector&);

  MetricKind kind_ = MetricKind::L2;
  std::shared_ptr<const DenseFn> custom_;
  std::string custom_name_;
};

/// Distance between two points of equal dimension. Any mix of dense and sparse
/// storage produces exactly the value of the densified computation.
double distance(const Metric& metric, const Vector& a, const Vector& b);

/// Distance between a sparse point and a dense one (typically a centroid).
double sparse_dense_distance(const Metric& metric, const Vector& sparse, const Vector& dense);

/// Squared Euclidean distance; the k-means objective.
double squared_l2(const Vector& a, const Vector& b);

std::optional<Metric> parse_metric(std::string_view name);

}  // namespace mask
