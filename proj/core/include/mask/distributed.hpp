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

#include <atomic>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "mask/dataset.hpp"
#include "mask/index.hpp"

namespace mask {

using NodeId = std::uint64_t;

inline constexpr double kBroadcast = std::numeric_limits<double>::infinity();

/// In-process stand-in for the network. Every message the simulation would put
/// on a wire goes through send(); a real transport can replace it.
class Transport {
 public:
  enum class Channel { NodeToNode, NodeToCoordinator, CoordinatorToNode };

  void send(Channel channel, NodeId from, NodeId to);

  std::uint64_t node_messages() const { return node_to_node_.load(); }
  std::uint64_t coordinator_messages() const {
    return to_coordinator_.load() + from_coordinator_.load();
  }
  void reset();

 private:
  std::atomic<std::uint64_t> node_to_node_{0};
  std::atomic<std::uint64_t> to_coordinator_{0};
  std::atomic<std::uint64_t> from_coordinator_{0};
};

/// One machine: its local data partitions and one index per partition.
class NodeHandle {
 public:
  NodeHandle(NodeId id, std::vector<Dataset> partitions, const BuildParams& params,
             const Metric& metric);

  NodeId id() const { return id_; }
  std::span<const Dataset> partitions() const { return partitions_; }
  std::span<const MultilevelIndex> indexes() const { return indexes_; }
  std::size_t size() const;

  /// Top-layer centroids of every local index, concatenated.
  std::vector<Vector> top_centroids() const;

  /// k-NN over all local indexes, merged by (distance, element id).
  QueryResult knn_query(const Vector& q, std::size_t k) const;

 private:
  NodeId id_;
  std::vector<Dataset> partitions_;
  std::vector<MultilevelIndex> indexes_;
};

/// Registry of node id -> that node's top-layer centroids. A coordinator can
/// itself be registered in a parent coordinator (one entry carrying the union
/// of its children's centroids).
class ClusterCoordinator {
 public:
  explicit ClusterCoordinator(Metric metric = Metric::l2(),
                              std::optional<double> epsilon = std::nullopt);

  void register_node(NodeId id, std::vector<Vector> top_centroids);
  void register_child(NodeId id, const ClusterCoordinator& child);

  const std::map<NodeId, std::vector<Vector>>& registry() const { return registry_; }
  const Metric& metric() const { return metric_; }
  /// Default routing threshold; broadcast when unset.
  double epsilon() const { return epsilon_.value_or(kBroadcast); }

 private:
  Metric metric_;
  std::optional<double> epsilon_;
  std::map<NodeId, std::vector<Vector>> registry_;
};

/// Nodes holding at least one top centroid strictly closer than epsilon.
/// epsilon = +inf selects every node.
std::set<NodeId> route(const ClusterCoordinator& coordinator, const Vector& q, double epsilon);

class ClusterBuildError : public std::runtime_error {
 public:
  ClusterBuildError(NodeId node, const std::string& what);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

struct Cluster {
  std::vector<NodeHandle> nodes;  // ascending node id
  ClusterCoordinator coordinator;
  std::vector<double> build_seconds;  // wall-clock per node, same order as nodes

  const NodeHandle& node(NodeId id) const;
};

/// Builds every node independently (in parallel, `threads` at a time) and
/// registers the top layers. Node builds never talk to each other; only the
/// registration messages reach the transport.
Cluster build_cluster(const std::map<NodeId, std::vector<Dataset>>& data,
                      const BuildParams& params, const Metric& metric = Metric::l2(),
                      Transport* transport = nullptr, std::optional<double> epsilon = std::nullopt,
                      std::size_t threads = 1);
Cluster build_cluster(const std::map<NodeId, Dataset>& data, const BuildParams& params,
                      const Metric& metric = Metric::l2(), Transport* transport = nullptr,
                      std::optional<double> epsilon = std::nullopt, std::size_t threads = 1);

struct ClusterHit {
  NodeId node = 0;
  ElementId id = 0;
  double distance = 0.0;

  friend bool operator==(const ClusterHit&, const ClusterHit&) = default;
};

struct ClusterQueryResult {
  std::vector<ClusterHit> hits;  // ascending (distance, node, id)
  std::vector<NodeId> routed;
  std::vector<NodeId> skipped;
  bool empty_route = false;
  SearchStats stats;  // summed over routed nodes
};

/// Fans knn_query out to the routed nodes and keeps the k best.
ClusterQueryResult cluster_knn(const Cluster& cluster, const Vector& q, std::size_t k,
                               double epsilon, Transport* transport = nullptr);

/// Deals dataset rows to `nodes` nodes (ids 0..nodes-1) by a seeded shuffle,
/// as evenly as possible.
std::map<NodeId, Dataset> split_among_nodes(const Dataset& data, std::size_t nodes, RngSeed seed);

}  // namespace mask
