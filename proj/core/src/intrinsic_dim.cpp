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

#include "mask/intrinsic_dim.hpp"

#include <random>
#include <vector>

namespace mask {

double intrinsic_dimensionality_of(std::span<const double> distances) {
  if (distances.empty()) throw std::invalid_argument("no distances");
  double mean = 0.0;
  for (double d : distances) mean += d;
  mean /= static_cast<double>(distances.size());
  double var = 0.0;
  for (double d : distances) var += (d - mean) * (d - mean);
  var /= static_cast<double>(distances.size());
  if (var == 0.0) {
    throw UndefinedIntrinsicDimension("undefined intrinsic dimensionality: distance variance is 0");
  }
  return mean * mean / (2.0 * var);
}

double intrinsic_dimensionality(const Dataset& points, const Metric& metric, std::size_t n_pairs,
                                RngSeed seed) {
  if (points.size() < 2) throw std::invalid_argument("need at least 2 points");
  if (n_pairs == 0) throw std::invalid_argument("n_pairs must be >= 1");
  Engine rng = make_engine(derive_seed(seed, {stream::kPairs}));
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::vector<double> d(n_pairs);
  for (double& x : d) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    x = distance(metric, points.point(i), points.point(j));
  }
  return intrinsic_dimensionality_of(d);
}

double intrinsic_dimensionality_exact(const Dataset& points, const Metric& metric) {
  if (points.size() < 2) throw std::invalid_argument("need at least 2 points");
  std::vector<double> d;
  d.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      d.push_back(distance(metric, points.point(i), points.point(j)));
    }
  }
  return intrinsic_dimensionality_of(d);
}

}  // namespace mask
