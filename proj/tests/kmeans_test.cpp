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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mask/kmeans.hpp"
#include "mask/metric.hpp"
#include "oracles.hpp"

namespace mask {
namespace {

std::vector<Vector> pts(std::initializer_list<std::pair<double, double>> xy) {
  std::vector<Vector> out;
  for (auto [x, y] : xy) out.push_back(Vector::dense({x, y}));
  return out;
}

TEST(KMeans, FourPointGlobalOptimum) {
  auto p = pts({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  for (std::uint64_t s = 0; s < 10; ++s) {
    KMeansResult r = kmeans_fit(p, 2, RngSeed{s});
    std::vector<Vector> c = r.centroids;
    std::sort(c.begin(), c.end(), [](const Vector& a, const Vector& b) { return a.at(0) < b.at(0); });
    EXPECT_EQ(c[0], Vector::dense({0, 0.5}));
    EXPECT_EQ(c[1], Vector::dense({10, 0.5}));
    EXPECT_DOUBLE_EQ(r.inertia, 1.0);
  }
}

TEST(KMeans, KEqualsNGivesZeroInertia) {
  auto p = pts({{0, 0}, {1, 5}, {2, 2}, {7, 1}, {3, 3}});
  KMeansResult r = kmeans_fit(p, p.size(), RngSeed{1});
  EXPECT_EQ(r.inertia, 0.0);
  for (const Vector& x : p) {
    EXPECT_TRUE(std::any_of(r.centroids.begin(), r.centroids.end(), [&](const Vector& c) { return c == x; }));
  }
}

TEST(KMeans, KOneIsTheMean) {
  auto p = pts({{0, 0}, {2, 0}, {4, 6}});
  KMeansResult r = kmeans_fit(p, 1, RngSeed{9});
  ASSERT_EQ(r.centroids.size(), 1u);
  EXPECT_DOUBLE_EQ(r.centroids[0].at(0), 2.0);
  EXPECT_DOUBLE_EQ(r.centroids[0].at(1), 2.0);
  for (auto l : r.labels) EXPECT_EQ(l, 0u);
}

TEST(KMeans, RejectsBadK) {
  auto p = pts({{0, 0}, {1, 1}});
  EXPECT_THROW(kmeans_fit(p, 0, RngSeed{}), std::invalid_argument);
  EXPECT_THROW(kmeans_fit(p, 3, RngSeed{}), std::invalid_argument);
  EXPECT_THROW(kmeans_fit(std::vector<Vector>{}, 1, RngSeed{}), std::invalid_argument);
  std::vector<Vector> mixed{Vector::dense({0}), Vector::dense({1, 2})};
  EXPECT_THROW(kmeans_fit(mixed, 1, RngSeed{}), DimensionError);
}

TEST(KMeans, DuplicatePointsStillYieldKCentroids) {
  std::vector<Vector> p(10, Vector::dense({1.0, 1.0}));
  p.push_back(Vector::dense({5.0, 5.0}));
  KMeansResult r = kmeans_fit(p, 4, RngSeed{2});
  EXPECT_EQ(r.centroids.size(), 4u);
  EXPECT_EQ(r.labels.size(), p.size());
}

TEST(Assign, ExactMatchAndTies) {
  auto c = pts({{0, 0}, {5, 5}});
  EXPECT_EQ(nearest_centroid(Vector::dense({0, 0}), c), 0u);
  auto eq = pts({{-1, 0}, {1, 0}});
  EXPECT_EQ(nearest_centroid(Vector::dense({0, 3}), eq), 0u);
  EXPECT_THROW(nearest_centroid(Vector::dense({0, 0, 0}), c), DimensionError);
}

TEST(Assign, MatchesBruteForce) {
  Dataset d = oracle::uniform_points(100, 3, 4);
  Dataset cs = oracle::uniform_points(10, 3, 5);
  auto labels = assign(d.points(), cs.points());
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < cs.size(); ++c) {
      if (squared_l2(d.point(i), cs.point(c)) < squared_l2(d.point(i), cs.point(best))) best = c;
    }
    EXPECT_EQ(labels[i], best);
  }
}

TEST(KMeans, DeterministicAndSelfConsistent) {
  Dataset d = oracle::uniform_points(300, 4, 8);
  KMeansResult a = kmeans_fit(d.points(), 12, RngSeed{77});
  KMeansResult b = kmeans_fit(d.points(), 12, RngSeed{77});
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(assign(d.points(), a.centroids), a.labels);
  double inertia = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) inertia += squared_l2(d.point(i), a.centroids[a.labels[i]]);
  EXPECT_NEAR(a.inertia, inertia, 1e-9 * inertia);
}

TEST(KMeans, InertiaNeverIncreasesAcrossIterations) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Dataset d = oracle::uniform_points(200, 2, 100 + s);
    std::vector<double> trace;
    KMeansOptions opt;
    opt.tol = 0.0;
    opt.trace = [&](const KMeansIteration& it) { trace.push_back(it.inertia); };
    KMeansResult r = kmeans_fit(d.points(), 9, RngSeed{s}, opt);
    ASSERT_FALSE(trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] * (1 + 1e-12));
    EXPECT_LE(r.inertia, trace.back() * (1 + 1e-12));
  }
}

TEST(KMeans, SparseInputGivesDenseCentroids) {
  std::vector<Vector> p{Vector::sparse(4, {{0, 1.0}}), Vector::sparse(4, {{0, 1.0}, {3, 1.0}}),
                        Vector::sparse(4, {{2, 5.0}}), Vector::sparse(4, {{2, 6.0}})};
  KMeansResult r = kmeans_fit(p, 2, RngSeed{1});
  for (const Vector& c : r.centroids) EXPECT_FALSE(c.is_sparse());
  EXPECT_NE(r.labels[0], r.labels[2]);
  EXPECT_EQ(r.labels[0], r.labels[1]);
}

TEST(KMeans, CoverageShrinksAsKDoubles) {
  // mean point-to-nearest-centroid distance, averaged over seeds
  Dataset d = oracle::uniform_points(400, 2, 21);
  double prev = INFINITY;
  for (std::size_t k : {2, 4, 8, 16, 32}) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      KMeansResult r = kmeans_fit(d.points(), k, RngSeed{s});
      for (std::size_t i = 0; i < d.size(); ++i) total += std::sqrt(squared_l2(d.point(i), r.centroids[r.labels[i]]));
    }
    EXPECT_LT(total, prev);
    prev = total;
  }
}

TEST(KMeans, CsvTraceWritesOneRowPerIteration) {
  Dataset d = oracle::uniform_points(50, 2, 2);
  std::ostringstream out;
  KMeansOptions opt;
  opt.trace = csv_trace(out);
  KMeansResult r = kmeans_fit(d.points(), 3, RngSeed{1}, opt);
  const std::string s = out.str();
  std::size_t lines = std::count(s.begin(), s.end(), '\n');
  EXPECT_GE(lines, r.iterations);
}

}  // namespace
}  // namespace mask
