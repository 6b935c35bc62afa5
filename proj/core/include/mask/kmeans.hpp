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
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mask/random.hpp"
#include "mask/vector.hpp"

namespace mask {

struct KMeansIteration {
  std::size_t iteration = 0;
  double inertia = 0.0;           // after the assignment step of this iteration
  double max_displacement = 0.0;  // of the update step that follows it
};

struct KMeansOptions {
  std::size_t max_iter = 100;
  double tol = 1e-4;  // on max centroid displacement
  std::function<void(const KMeansIteration&)> trace;
};

struct KMeansResult {
  std::vector<Vector> centroids;       // dense, size k
  std::vector<std::uint32_t> labels;   // one per input point
  double inertia = 0.0;                // sum of squared L2 distances to assigned centroid
  std::size_t iterations = 0;          // completed update steps
};

/// Lloyd's k-means with k-means++ seeding.
///
/// Points may be dense or sparse; centroids are always dense. Ties in
/// nearest-centroid assignment go to the lowest ordinal. A cluster that
/// empties during an iteration is re-seeded at the point farthest from its
/// current centroid, so k centroids always come back. The returned labels are
/// a fresh nearest-centroid assignment against the returned centroids.
///
/// Throws std::invalid_argument when k is 0, k exceeds the number of points,
/// or the points are empty; DimensionError on mixed dimensions.
KMeansResult kmeans_fit(std::span<const Vector> points, std::size_t k, RngSeed seed,
                        const KMeansOptions& options = {});

/// Nearest-centroid ordinal for every point (squared L2, ties to the lowest ordinal).
std::vector<std::uint32_t> assign(std::span<const Vector> points,
                                  std::span<const Vector> centroids);

std::uint32_t nearest_centroid(const Vector& point, std::span<const Vector> centroids);

/// Trace sink that writes `iteration,inertia,max_displacement` CSV rows.
std::function<void(const KMeansIteration&)> csv_trace(std::ostream& out);

}  // namespace mask
