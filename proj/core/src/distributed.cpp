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

#include "mask/distributed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"

namespace mask {

void Transport::send(Channel channel, NodeId, NodeId) {
  switch (channel) {
    case Channel::NodeToNode: ++node_to_node_; break;
    case Channel::NodeToCoordinator: ++to_coordinator_; break;
    case Channel::CoordinatorToNode: ++from_coordinator_; break;
  }
}

void Transport::reset() {
  node_to_node_ = 0;
  to_coordinator_ = 0;
  from_coordinator_ = 0;
}

NodeHandle::NodeHandle(NodeId id, std::vector<Dataset> partitions, const BuildParams& params,
                       const Metric& metric)
    : id_(id), partitions_(std::move(partitions)) {
  if (partitions_.empty()) throw std::invalid_argument("node holds no data partition");
  indexes_.reserve(partitions_.size());
  for (const Dataset& d : partitions_) indexes_.push_back(MultilevelIndex::build(d, params, metric));
}

std::size_t NodeHandle::size() const {
  std::size_t n = 0;
  for (const auto& ix : indexes_) n += ix.size();
  return n;
}

std::vector<Vector> NodeHandle::top_centroids() const {
  std::vector<Vector> out;
  for (const auto& ix : indexes_) {
    auto top = ix.top_centroids();
    out.insert(out.end(), std::make_move_iterator(top.begin()), std::make_move_iterator(top.end()));
  }
  return out;
}

QueryResult NodeHandle::knn_query(const Vector& q, std::size_t k) const {
  if (indexes_.size() == 1) return indexes_.front().knn_query(q, k);
  QueryResult merged;
  for (const auto& ix : indexes_) {
    QueryResult r = ix.knn_query(q, k);
    merged.hits.insert(merged.hits.end(), r.hits.begin(), r.hits.end());
    merged.stats.distance_count += r.stats.distance_count;
    merged.stats.layers_traversed = std::max(merged.stats.layers_traversed, r.stats.layers_traversed);
    merged.stats.partitions_scanned += r.stats.partitions_scanned;
  }
  std::sort(merged.hits.begin(), merged.hits.end(), [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  merged.stats.truncated = merged.hits.size() < k;
  if (merged.hits.size() > k) merged.hits.resize(k);
  return merged;
}

ClusterCoordinator::ClusterCoordinator(Metric metric, std::optional<double> epsilon)
    : metric_(std::move(metric)), epsilon_(epsilon) {
  if (epsilon_ && (std::isnan(*epsilon_) || *epsilon_ < 0)) {
    throw std::invalid_argument("epsilon must be >= 0");
  }
}

void ClusterCoordinator::register_node(NodeId id, std::vector<Vector> top_centroids) {
  if (registry_.contains(id)) throw std::invalid_argument("node " + std::to_string(id) + " already registered");
  registry_.emplace(id, std::move(top_centroids));
}

void ClusterCoordinator::register_child(NodeId id, const ClusterCoordinator& child) {
  std::vector<Vector> all;
  for (const auto& [_, cs] : child.registry()) all.insert(all.end(), cs.begin(), cs.end());
  register_node(id, std::move(all));
}

std::set<NodeId> route(const ClusterCoordinator& coordinator, const Vector& q, double epsilon) {
  if (std::isnan(epsilon)) throw std::invalid_argument("epsilon is NaN");
  std::set<NodeId> out;
  for (const auto& [node, centroids] : coordinator.registry()) {
    if (std::isinf(epsilon) && epsilon > 0) {
      out.insert(node);
      continue;
    }
    for (const Vector& c : centroids) {
      if (distance(coordinator.metric(), q, c) < epsilon) {
        out.insert(node);
        break;
      }
    }
  }
  return out;
}

ClusterBuildError::ClusterBuildError(NodeId node, const std::string& what)
    : std::runtime_error("node " + std::to_string(node) + ": " + what), node_(node) {}

const NodeHandle& Cluster::node(NodeId id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const NodeHandle& n, NodeId v) { return n.id() < v; });
  if (it == nodes.end() || it->id() != id) throw std::out_of_range("unknown node " + std::to_string(id));
  return *it;
}

Cluster build_cluster(const std::map<NodeId, std::vector<Dataset>>& data, const BuildParams& params,
                      const Metric& metric, Transport* transport, std::optional<double> epsilon,
                      std::size_t threads) {
  if (data.empty()) throw std::invalid_argument("cluster needs at least one node");
  params.validate();
  std::vector<std::pair<NodeId, const std::vector<Dataset>*>> work;
  for (const auto& [id, parts] : data) work.emplace_back(id, &parts);

  std::vector<std::optional<NodeHandle>> built(work.size());
  std::vector<std::string> failures(work.size());
  std::vector<double> seconds(work.size(), 0.0);
  detail::parallel_for(work.size(), threads, [&](std::size_t i) {
    try {
      auto t0 = std::chrono::steady_clock::now();
      built[i].emplace(work[i].first, *work[i].second, params, metric);
      seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!built[i]) throw ClusterBuildError(work[i].first, failures[i]);
  }

  Cluster cluster{{}, ClusterCoordinator(metric, epsilon), std::move(seconds)};
  cluster.nodes.reserve(built.size());
  for (auto& n : built) {
    if (transport) transport->send(Transport::Channel::NodeToCoordinator, n->id(), 0);
    cluster.coordinator.register_node(n->id(), n->top_centroids());
    cluster.nodes.push_back(std::move(*n));
  }
  return cluster;
}

Cluster build_cluster(const std::map<NodeId, Dataset>& data, const BuildParams& params,
                      const Metric& metric, Transport* transport, std::optional<double> epsilon,
                      std::size_t threads) {
  std::map<NodeId, std::vector<Dataset>> wrapped;
  for (const auto& [id, d] : data) wrapped[id].push_back(d);
  return build_cluster(wrapped, params, metric, transport, epsilon, threads);
}

ClusterQueryResult cluster_knn(const Cluster& cluster, const Vector& q, std::size_t k,
                               double epsilon, Transport* transport) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  ClusterQueryResult out;
  std::set<NodeId> routed = route(cluster.coordinator, q, epsilon);
  for (const NodeHandle& node : cluster.nodes) {
    if (!routed.contains(node.id())) {
      out.skipped.push_back(node.id());
      continue;
    }
    out.routed.push_back(node.id());
    if (transport) {
      transport->send(Transport::Channel::CoordinatorToNode, 0, node.id());
      transport->send(Transport::Channel::NodeToCoordinator, node.id(), 0);
    }
    QueryResult r = node.knn_query(q, k);
    for (const Hit& h : r.hits) out.hits.push_back({node.id(), h.id, h.distance});
    out.stats.distance_count += r.stats.distance_count;
    out.stats.layers_traversed = std::max(out.stats.layers_traversed, r.stats.layers_traversed);
    out.stats.partitions_scanned += r.stats.partitions_scanned;
  }
  out.empty_route = out.routed.empty();
  std::sort(out.hits.begin(), out.hits.end(), [](const ClusterHit& a, const ClusterHit& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.node != b.node) return a.node < b.node;
    return a.id < b.id;
  });
  out.stats.truncated = out.hits.size() < k;
  if (out.hits.size() > k) out.hits.resize(k);
  return out;
}

std::map<NodeId, Dataset> split_among_nodes(const Dataset& data, std::size_t nodes, RngSeed seed) {
  if (nodes == 0) throw std::invalid_argument("node count must be >= 1");
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  Engine rng = make_engine(derive_seed(seed, {stream::kCluster}));
  std::shuffle(rows.begin(), rows.end(), rng);
  auto sizes = balanced_chunk_sizes(rows.size(), nodes);
  std::map<NodeId, Dataset> out;
  std::size_t at = 0;
  for (std::size_t n = 0; n < nodes; ++n) {
    std::vector<std::size_t> mine(rows.begin() + at, rows.begin() + at + sizes[n]);
    std::sort(mine.begin(), mine.end());
    at += sizes[n];
    out.emplace(n, data.subset(mine));
  }
  return out;
}

}  // namespace mask
