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

#include <gtest/gtest.h>

#include "mask/clouds.hpp"
#include "mask/distributed.hpp"
#include "oracles.hpp"

namespace mask {
namespace {

BuildParams small_params(std::uint64_t seed = 1) {
  BuildParams p;
  p.length_group = 16;
  p.n_centroids = 8;
  p.seed = RngSeed{seed};
  return p;
}

Dataset clouds(std::uint64_t seed = 1) {
  return gen_clouds(preset_spec(OverlapPreset::GNO, 8, 200, RngSeed{seed}));
}

TEST(Cluster, BuildExchangesNoNodeMessages) {
  Transport t;
  Cluster c = build_cluster(split_among_nodes(clouds(), 4, RngSeed{3}), small_params(), Metric::l2(), &t,
                            std::nullopt, 4);
  EXPECT_EQ(t.node_messages(), 0u);
  EXPECT_EQ(t.coordinator_messages(), 4u);  // one registration per node
  EXPECT_EQ(c.build_seconds.size(), 4u);
  cluster_knn(c, Vector::dense({0, 0}), 5, kBroadcast, &t);
  EXPECT_EQ(t.node_messages(), 0u);
  t.reset();
  EXPECT_EQ(t.coordinator_messages(), 0u);
}

TEST(Cluster, SplitDealsEveryRowOnce) {
  Dataset d = clouds();
  auto parts = split_among_nodes(d, 3, RngSeed{9});
  ASSERT_EQ(parts.size(), 3u);
  std::set<ElementId> ids;
  for (const auto& [node, ds] : parts) {
    EXPECT_GE(ds.size(), d.size() / 3);
    EXPECT_LE(ds.size(), d.size() / 3 + 1);
    for (std::size_t r = 0; r < ds.size(); ++r) EXPECT_TRUE(ids.insert(ds.id(r)).second);
  }
  EXPECT_EQ(ids.size(), d.size());
  EXPECT_THROW(split_among_nodes(d, 0, RngSeed{}), std::invalid_argument);
}

TEST(Cluster, SingleNodeMatchesAPlainIndex) {
  Dataset d = clouds(2);
  Cluster c = build_cluster(std::map<NodeId, Dataset>{{7, d}}, small_params(2));
  MultilevelIndex ix = MultilevelIndex::build(d, small_params(2));
  Dataset qs = oracle::uniform_points(100, 2, 4, -20, 20);
  for (const Vector& q : qs.points()) {
    auto got = cluster_knn(c, q, 6, kBroadcast);
    auto want = ix.knn_query(q, 6);
    ASSERT_EQ(got.hits.size(), want.hits.size());
    for (std::size_t i = 0; i < got.hits.size(); ++i) {
      EXPECT_EQ(got.hits[i].node, 7u);
      EXPECT_EQ(got.hits[i].id, want.hits[i].id);
      EXPECT_EQ(got.hits[i].distance, want.hits[i].distance);
    }
  }
}

TEST(Cluster, SmallNodeIsScannedWhole) {
  std::map<NodeId, Dataset> data{{0, clouds(3)}, {1, oracle::uniform_points(5, 2, 8)}};
  Cluster c = build_cluster(data, small_params());
  const NodeHandle& small = c.node(1);
  EXPECT_EQ(small.indexes()[0].depth(), 0u);
  EXPECT_EQ(small.top_centroids().size(), 5u);
  auto r = small.knn_query(Vector::dense({0.5, 0.5}), 5);
  EXPECT_EQ(r.hits.size(), 5u);
  EXPECT_THROW(c.node(42), std::out_of_range);
}

TEST(Cluster, NodeWithSeveralPartitionsMergesResults) {
  Dataset d = clouds(4);
  std::vector<std::size_t> a, b;
  for (std::size_t r = 0; r < d.size(); ++r) (r % 2 ? a : b).push_back(r);
  Cluster c = build_cluster(std::map<NodeId, std::vector<Dataset>>{{0, {d.subset(a), d.subset(b)}}}, small_params());
  EXPECT_EQ(c.node(0).size(), d.size());
  auto r = c.node(0).knn_query(d.point(0), 10);
  ASSERT_EQ(r.hits.size(), 10u);
  for (std::size_t i = 1; i < r.hits.size(); ++i) EXPECT_LE(r.hits[i - 1].distance, r.hits[i].distance);
}

TEST(Routing, InfinityBroadcastsAndZeroSelectsNothing) {
  Cluster c = build_cluster(split_among_nodes(clouds(5), 5, RngSeed{1}), small_params());
  Vector q = Vector::dense({1.0, 2.0});
  EXPECT_EQ(route(c.coordinator, q, kBroadcast).size(), 5u);
  EXPECT_TRUE(route(c.coordinator, q, 0.0).empty());
  auto r = cluster_knn(c, q, 3, 0.0);
  EXPECT_TRUE(r.empty_route);
  EXPECT_TRUE(r.hits.empty());
  EXPECT_EQ(r.skipped.size(), 5u);
  EXPECT_THROW(route(c.coordinator, q, NAN), std::invalid_argument);
}

TEST(Routing, MonotoneInEpsilon) {
  Cluster c = build_cluster(split_among_nodes(clouds(6), 6, RngSeed{2}), small_params());
  Dataset qs = oracle::uniform_points(50, 2, 3, -25, 25);
  for (const Vector& q : qs.points()) {
    std::set<NodeId> prev;
    for (double eps : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0, kBroadcast}) {
      std::set<NodeId> cur = route(c.coordinator, q, eps);
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST(Routing, BroadcastEqualsMergingEveryNode) {
  Cluster c = build_cluster(split_among_nodes(clouds(7), 3, RngSeed{4}), small_params());
  Vector q = Vector::dense({3.0, -1.0});
  auto r = cluster_knn(c, q, 8, kBroadcast);
  std::vector<ClusterHit> all;
  for (const NodeHandle& n : c.nodes) {
    for (const Hit& h : n.knn_query(q, 8).hits) all.push_back({n.id(), h.id, h.distance});
  }
  std::sort(all.begin(), all.end(), [](const ClusterHit& a, const ClusterHit& b) {
    return std::tie(a.distance, a.node, a.id) < std::tie(b.distance, b.node, b.id);
  });
  all.resize(8);
  EXPECT_EQ(r.hits, all);
  EXPECT_TRUE(r.skipped.empty());
}

TEST(Routing, TightEpsilonRecordsSkippedNodes) {
  // each node holds two adjacent clouds; the far side of the ring is out of reach
  Dataset d = clouds(8);
  std::map<NodeId, Dataset> data;
  for (NodeId n = 0; n < 4; ++n) {
    std::vector<std::size_t> rows;
    for (std::size_t r = n * 400; r < (n + 1) * 400; ++r) rows.push_back(r);
    data[n] = d.subset(rows);
  }
  Cluster c = build_cluster(data, small_params(), Metric::l2(), nullptr, 8.0);
  EXPECT_EQ(c.coordinator.epsilon(), 8.0);
  auto r = cluster_knn(c, d.point(10), 4, c.coordinator.epsilon());
  EXPECT_FALSE(r.routed.empty());
  EXPECT_FALSE(r.skipped.empty());
  EXPECT_EQ(r.routed.size() + r.skipped.size(), 4u);
  for (const ClusterHit& h : r.hits) {
    EXPECT_NE(std::find(r.routed.begin(), r.routed.end(), h.node), r.routed.end());
  }
}

TEST(Cluster, BuildFailureNamesTheNode) {
  std::map<NodeId, std::vector<Dataset>> data{{0, {clouds()}}, {13, {}}};
  try {
    build_cluster(data, small_params());
    FAIL() << "expected ClusterBuildError";
  } catch (const ClusterBuildError& e) {
    EXPECT_EQ(e.node(), 13u);
    EXPECT_NE(std::string(e.what()).find("node 13"), std::string::npos);
  }
}

TEST(Coordinator, ChildRegistersTheUnionOfItsNodes) {
  ClusterCoordinator child;
  child.register_node(1, {Vector::dense({0, 0})});
  child.register_node(2, {Vector::dense({10, 0}), Vector::dense({20, 0})});
  ClusterCoordinator root;
  root.register_child(100, child);
  root.register_node(200, {Vector::dense({-50, 0})});
  EXPECT_EQ(root.registry().at(100).size(), 3u);
  EXPECT_EQ(route(root, Vector::dense({19, 0}), 2.0), (std::set<NodeId>{100}));
  EXPECT_THROW(root.register_node(200, {}), std::invalid_argument);
  EXPECT_THROW(ClusterCoordinator(Metric::l2(), -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace mask
