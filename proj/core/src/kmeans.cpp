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

#include "mask/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "mask/metric.hpp"

namespace mask {
namespace {

std::vector<Vector> plus_plus_seeds(std::span<const Vector> points, std::size_t k, Engine& rng) {
  const std::size_t n = points.size();
  std::vector<Vector> centroids;
  centroids.reserve(k);
  std::vector<char> chosen(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  chosen[first] = 1;
  centroids.push_back(points[first].densify());

  while (centroids.size() < k) {
    const Vector& last = centroids.back();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_l2(points[i], last));
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > r) break;
      }
    }
    if (pick == n) {
      // every remaining point coincides with a centroid
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    chosen[pick] = 1;
    centroids.push_back(points[pick].densify());
  }
  return centroids;
}

struct Assignment {
  std::vector<std::uint32_t> labels;
  std::vector<double> d2;
  std::vector<std::size_t> counts;
};

Assignment assign_full(std::span<const Vector> points, std::span<const Vector> centroids) {
  Assignment a;
  a.labels.resize(points.size());
  a.d2.resize(points.size());
  a.counts.assign(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      double d = squared_l2(points[i], centroids[j]);
      if (d < best) {
        best = d;
        arg = static_cast<std::uint32_t>(j);
      }
    }
    a.labels[i] = arg;
    a.d2[i] = best;
    ++a.counts[arg];
  }
  return a;
}

void repair_empty(std::span<const Vector> points, std::vector<Vector>& centroids, Assignment& a) {
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    if (a.counts[j] != 0) continue;
    std::size_t far = points.size();
    double far_d2 = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (a.counts[a.labels[i]] > 1 && a.d2[i] > far_d2) {
        far_d2 = a.d2[i];
        far = i;
      }
    }
    if (far == points.size()) return;  // all points sit on their centroids
    --a.counts[a.labels[far]];
    centroids[j] = points[far].densify();
    a.labels[far] = static_cast<std::uint32_t>(j);
    a.d2[far] = 0.0;
    a.counts[j] = 1;
  }
}

}  // namespace

KMeansResult kmeans_fit(std::span<const Vector> points, std::size_t k, RngSeed seed,
                        const KMeansOptions& options) {
  if (points.empty()) throw std::invalid_argument("kmeans: no points");
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (k > points.size()) {
    throw std::invalid_argument("kmeans: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(points.size()) + " points");
  }
  const std::size_t dim = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != dim) throw DimensionError("kmeans: points of mixed dimension");
  }

  Engine rng = make_engine(seed);
  KMeansResult result;
  result.centroids = plus_plus_seeds(points, k, rng);

  std::vector<double> sums(k * dim);
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    Assignment a = assign_full(points, result.centroids);
    repair_empty(points, result.centroids, a);
    double inertia = 0.0;
    for (double d : a.d2) inertia += d;

    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      double* row = sums.data() + a.labels[i] * dim;
      const Vector& p = points[i];
      if (p.is_sparse()) {
        for (const auto& e : p.entries()) row[e.index] += e.value;
      } else {
        auto v = p.values();
        for (std::size_t d = 0; d < dim; ++d) row[d] += v[d];
      }
    }
    double max_disp = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (a.counts[j] == 0) continue;
      std::vector<double> mean(sums.begin() + j * dim, sums.begin() + (j + 1) * dim);
      for (double& x : mean) x /= static_cast<double>(a.counts[j]);
      Vector next = Vector::dense(std::move(mean));
      max_disp = std::max(max_disp, std::sqrt(squared_l2(next, result.centroids[j])));
      result.centroids[j] = std::move(next);
    }
    result.iterations = it + 1;
    if (options.trace) options.trace({it, inertia, max_disp});
    if (max_disp < options.tol) break;
  }

  Assignment final_assignment = assign_full(points, result.centroids);
  result.labels = std::move(final_assignment.labels);
  result.inertia = 0.0;
  for (double d : final_assignment.d2) result.inertia += d;
  return result;
}

std::uint32_t nearest_centroid(const Vector& point, std::span<const Vector> centroids) {
  if (centroids.empty()) throw std::invalid_argument("assign: no centroids");
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    double d = squared_l2(point, centroids[j]);
    if (d < best) {
      best = d;
      arg = static_cast<std::uint32_t>(j);
    }
  }
  return arg;
}

std::vector<std::uint32_t> assign(std::span<const Vector> points,
                                  std::span<const Vector> centroids) {
  std::vector<std::uint32_t> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest_centroid(points[i], centroids);
  return labels;
}

std::function<void(const KMeansIteration&)> csv_trace(std::ostream& out) {
  out << "iteration,inertia,max_displacement\n";
  return [&out](const KMeansIteration& it) {
    out << it.iteration << ',' << it.inertia << ',' << it.max_displacement << '\n';
  };
}

}  // namespace mask
