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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mask/dataset.hpp"
#include "mask/kmeans.hpp"
#include "mask/metric.hpp"
#include "mask/random.hpp"
#include "mask/vector.hpp"

namespace mask {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

struct BuildParams {
  std::size_t length_group = 16;  // points per group
  std::size_t n_centroids = 8;    // k-means centroids fitted per group
  RngSeed seed{};
  std::size_t threads = 1;        // 0 = hardware concurrency; results do not depend on it
  std::size_t kmeans_max_iter = 100;
  double kmeans_tol = 1e-4;

  /// Data summarization ratio between adjacent layers.
  double ratio() const {
    return static_cast<double>(length_group) / static_cast<double>(n_centroids);
  }
  void validate() const;
};

/// Total centroid count of every layer the builder will produce for n points,
/// bottom to top. Depth is the length of the result.
std::vector<std::size_t> predicted_layer_sizes(std::size_t n, std::size_t length_group,
                                               std::size_t n_centroids);
std::size_t predicted_depth(std::size_t n, std::size_t length_group, std::size_t n_centroids);

/// Sizes of `groups` balanced chunks of n items: floor(n/groups) each, with the
/// remainder spread one per group over the last groups.
std::vector<std::size_t> balanced_chunk_sizes(std::size_t n, std::size_t groups);

/// One k-means fit: a chunk of the layer below and the centroids it produced.
struct CentroidGroup {
  std::vector<std::size_t> members;    // indices into the layer below (element slots on layer 1)
  std::vector<std::uint32_t> labels;   // per member, ordinal into `centroids`
  std::vector<std::size_t> centroids;  // flat indices into the owning layer
};

struct CentroidLayer {
  std::vector<Vector> centroids;
  std::vector<std::vector<std::size_t>> children;  // per centroid, indices into the layer below
  std::vector<std::size_t> group_of;               // per centroid
  std::vector<std::size_t> parent;                 // per centroid, kNoParent on the top layer
  std::vector<double> cover_radius;                // max distance to any descendant element
  std::vector<std::size_t> subtree_size;           // descendant element count
  std::vector<CentroidGroup> groups;

  std::size_t size() const { return centroids.size(); }
};

struct Hit {
  ElementId id = 0;
  double distance = 0.0;

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct SearchStats {
  std::size_t distance_count = 0;
  std::size_t layers_traversed = 0;
  std::size_t partitions_scanned = 0;
  bool truncated = false;  // k-NN: the reached partition held fewer than k elements

  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

/// Hits sorted by ascending distance, ties by ascending id.
struct QueryResult {
  std::vector<Hit> hits;
  SearchStats stats;
};

struct PointQueryResult {
  std::optional<ElementId> match;  // lowest id at distance 0, if any
  std::size_t partition = 0;       // bottom partition reached by the descent
  QueryResult scan;                // the whole reached partition, ranked

  /// True when `id` is among the exact matches.
  bool found(ElementId id) const;
};

/// Chosen centroid per layer (top first) and the reached partition.
struct Descent {
  std::vector<std::size_t> path;
  std::size_t partition = 0;
  std::size_t distance_count = 0;

  friend bool operator==(const Descent&, const Descent&) = default;
};

enum class RangeMode {
  PaperFaithful,  // keep centroids with d(q, c) <= radius
  CoverExpanded,  // keep centroids with d(q, c) <= radius + cover_radius(c); lossless
};

/// Multilevel index of k-means centroids built bottom-up over fixed-size groups.
///
/// Elements are split into floor(n / length_group) groups by a seeded random
/// permutation. Each group is summarized by n_centroids k-means centroids;
/// the flattened centroids are re-chunked into groups of length_group and
/// summarized again, until fewer than length_group centroids remain. The
/// bottom groups are the partitions that point and k-NN queries scan.
///
/// Reads are safe from any number of threads. insert() and split_partition()
/// need exclusive access.
class MultilevelIndex {
 public:
  MultilevelIndex() = default;

  static MultilevelIndex build(const Dataset& data, const BuildParams& params,
                               Metric metric = Metric::l2());

  /// Builds over caller-supplied bottom partitions (rows of `data`), keeping
  /// them as given. With `allow_undersized`, a partition smaller than
  /// n_centroids fits one centroid per element instead of failing; empty
  /// partitions are dropped.
  static MultilevelIndex build_from_partitions(const Dataset& data,
                                               std::vector<std::vector<std::size_t>> partitions,
                                               const BuildParams& params, Metric metric,
                                               bool allow_undersized);

  const BuildParams& params() const { return params_; }
  const Metric& metric() const { return metric_; }
  std::size_t depth() const { return layers_.size(); }
  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const CentroidLayer> layers() const { return layers_; }

  std::size_t partition_count() const;
  /// Element slots of a bottom partition.
  std::span<const std::size_t> partition(std::size_t p) const;
  std::vector<ElementId> partition_ids(std::size_t p) const;

  const Vector& point(std::size_t slot) const { return points_.at(slot); }
  ElementId id(std::size_t slot) const { return ids_.at(slot); }
  std::optional<std::size_t> slot_of(ElementId id) const;
  std::size_t partition_of_slot(std::size_t slot) const { return partition_of_.at(slot); }

  /// Top-layer centroids; for a depth-0 index, the points of its single partition.
  std::vector<Vector> top_centroids() const;

  Descent descend(const Vector& q) const;

  PointQueryResult point_query(const Vector& q) const;
  QueryResult knn_query(const Vector& q, std::size_t k) const;
  QueryResult range_query(const Vector& q, double radius, RangeMode mode) const;

  /// Routes the point down the index and appends it to the reached partition.
  /// Centroids stay put. Returns the partition id.
  std::size_t insert(const Vector& point, ElementId id);

  /// Re-partitions one oversized bottom partition into ceil(size / length_group)
  /// groups, refits them, and relinks the new centroids under the parents of
  /// the old ones. Layers above the first keep their centroids.
  void split_partition(std::size_t partition, std::size_t threshold);

  /// Snapshot support (see index_io.hpp).
  friend class IndexSerializer;

 private:
  void build_layers(const std::vector<std::vector<std::size_t>>& bottom, bool allow_undersized);
  void recompute_covers();
  void check_dim(const Vector& q) const;
  void scan(std::span<const std::size_t> slots, const Vector& q, QueryResult& out) const;
  void rebuild_slot_maps();

  BuildParams params_;
  Metric metric_;
  std::size_t dim_ = 0;
  std::vector<Vector> points_;
  std::vector<ElementId> ids_;
  std::unordered_map<ElementId, std::size_t> slot_of_;
  std::vector<std::size_t> partition_of_;
  std::vector<std::size_t> leaf_of_;          // layer-1 centroid of each slot
  std::vector<std::size_t> flat_partition_;   // the single partition of a depth-0 index
  std::vector<CentroidLayer> layers_;         // bottom to top
  std::uint64_t split_count_ = 0;
};

/// Fraction of dataset elements whose own point query does not return them.
double exhaustive_error(const MultilevelIndex& index, const Dataset& data);

struct Miss {
  std::size_t row = 0;        // dataset row
  std::size_t reached = 0;    // partition the failed descent ended in
};
std::vector<Miss> exhaustive_misses(const MultilevelIndex& index, const Dataset& data);

struct RelocationReport {
  std::vector<double> errors;      // entry 0 is the initial error
  std::size_t best_iteration = 0;  // first iteration attaining the minimum
  MultilevelIndex final_index;
};

using RelocationObserver =
    std::function<void(std::size_t iteration, const MultilevelIndex& index, double error)>;

/// Repeatedly moves every element that was not found into the partition its
/// search reached and rebuilds over the new partitions (iteration i reseeds
/// k-means with base seed + i).
RelocationReport relocate_and_rebuild(const MultilevelIndex& index, const Dataset& data,
                                      std::size_t iterations,
                                      const RelocationObserver& observer = {});

enum class ClassifyRule { NearestNeighbor, PartitionMajority };

/// Category of q: the label of its approximate nearest neighbour, or the modal
/// label of the partition it reaches (ties to the lexicographically first tag).
/// `exclude` drops one element (the query itself in leave-one-out runs).
/// Returns nullopt when nothing is left to vote.
std::optional<std::string> classify(const MultilevelIndex& index, const Dataset& labelled,
                                    const Vector& q, ClassifyRule rule,
                                    std::optional<ElementId> exclude = std::nullopt);

/// Leave-one-out mismatch rate of classify() over every element of `labelled`.
double classification_error(const MultilevelIndex& index, const Dataset& labelled,
                            ClassifyRule rule);

}  // namespace mask
