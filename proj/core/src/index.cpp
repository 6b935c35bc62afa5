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

#include "mask/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "parallel.hpp"

namespace mask {
namespace {

constexpr std::uint64_t kLayerOne = 1;

KMeansOptions kmeans_options(const BuildParams& p) {
  KMeansOptions o;
  o.max_iter = p.kmeans_max_iter;
  o.tol = p.kmeans_tol;
  return o;
}

void sort_hits(std::vector<Hit>& hits) {
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
}

// Appends one layer's worth of fitted groups to `layer`.
void append_groups(CentroidLayer& layer, const std::vector<std::vector<std::size_t>>& members,
                   std::vector<KMeansResult>& fits) {
  for (std::size_t g = 0; g < members.size(); ++g) {
    CentroidGroup group;
    group.members = members[g];
    group.labels = std::move(fits[g].labels);
    for (auto& c : fits[g].centroids) {
      std::size_t flat = layer.centroids.size();
      layer.centroids.push_back(std::move(c));
      layer.children.emplace_back();
      layer.group_of.push_back(layer.groups.size());
      layer.parent.push_back(kNoParent);
      group.centroids.push_back(flat);
    }
    for (std::size_t i = 0; i < group.members.size(); ++i) {
      layer.children[group.centroids[group.labels[i]]].push_back(group.members[i]);
    }
    layer.groups.push_back(std::move(group));
  }
  layer.cover_radius.assign(layer.centroids.size(), 0.0);
  layer.subtree_size.assign(layer.centroids.size(), 0);
}

}  // namespace

void BuildParams::validate() const {
  if (length_group == 0) throw std::invalid_argument("length_group must be positive");
  if (n_centroids == 0) throw std::invalid_argument("n_centroids must be positive");
  if (n_centroids > length_group) {
    throw std::invalid_argument("n_centroids (" + std::to_string(n_centroids) +
                                ") must not exceed length_group (" +
                                std::to_string(length_group) + ")");
  }
  if (n_centroids == length_group) {
    // ratio 1:1 never shrinks a layer; the build would not terminate
    throw std::invalid_argument("n_centroids must be smaller than length_group");
  }
}

std::vector<std::size_t> predicted_layer_sizes(std::size_t n, std::size_t length_group,
                                               std::size_t n_centroids) {
  if (n_centroids == 0 || n_centroids >= length_group) {
    throw std::invalid_argument("layer sizes need 0 < n_centroids < length_group");
  }
  std::vector<std::size_t> sizes;
  std::size_t groups = n / length_group;
  while (groups >= 1) {
    n = groups * n_centroids;
    sizes.push_back(n);
    groups = n / length_group;
  }
  return sizes;
}

std::size_t predicted_depth(std::size_t n, std::size_t length_group, std::size_t n_centroids) {
  return predicted_layer_sizes(n, length_group, n_centroids).size();
}

std::vector<std::size_t> balanced_chunk_sizes(std::size_t n, std::size_t groups) {
  if (groups == 0) throw std::invalid_argument("balanced_chunk_sizes: zero groups");
  std::vector<std::size_t> sizes(groups, n / groups);
  std::size_t rem = n % groups;
  for (std::size_t g = groups - rem; g < groups; ++g) ++sizes[g];
  return sizes;
}

bool PointQueryResult::found(ElementId id) const {
  for (const auto& h : scan.hits) {
    if (h.distance != 0.0) break;
    if (h.id == id) return true;
  }
  return false;
}

MultilevelIndex MultilevelIndex::build(const Dataset& data, const BuildParams& params,
                                       Metric metric) {
  params.validate();
  const std::size_t n = data.size();
  const std::size_t groups = n / params.length_group;
  std::vector<std::vector<std::size_t>> bottom;
  if (groups >= 1) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Engine rng = make_engine(derive_seed(params.seed, {stream::kPartition}));
    std::shuffle(perm.begin(), perm.end(), rng);
    std::size_t at = 0;
    for (std::size_t size : balanced_chunk_sizes(n, groups)) {
      bottom.emplace_back(perm.begin() + at, perm.begin() + at + size);
      at += size;
    }
  } else {
    bottom.emplace_back(n);
    std::iota(bottom[0].begin(), bottom[0].end(), std::size_t{0});
  }

  MultilevelIndex index;
  index.params_ = params;
  index.metric_ = std::move(metric);
  index.dim_ = data.dim();
  index.points_.assign(data.points().begin(), data.points().end());
  index.ids_.assign(data.ids().begin(), data.ids().end());
  if (groups >= 1) {
    index.build_layers(bottom, false);
  } else {
    index.flat_partition_ = std::move(bottom[0]);
  }
  index.rebuild_slot_maps();
  return index;
}

MultilevelIndex MultilevelIndex::build_from_partitions(
    const Dataset& data, std::vector<std::vector<std::size_t>> partitions,
    const BuildParams& params, Metric metric, bool allow_undersized) {
  params.validate();
  std::vector<char> seen(data.size(), 0);
  std::size_t total = 0;
  std::erase_if(partitions, [](const auto& p) { return p.empty(); });
  for (const auto& p : partitions) {
    for (std::size_t row : p) {
      if (row >= data.size()) throw std::out_of_range("partition row out of range");
      if (seen[row]) throw std::invalid_argument("row " + std::to_string(row) + " in two partitions");
      seen[row] = 1;
      ++total;
    }
  }
  if (total != data.size()) throw std::invalid_argument("partitions do not cover the dataset");

  MultilevelIndex index;
  index.params_ = params;
  index.metric_ = std::move(metric);
  index.dim_ = data.dim();
  index.points_.assign(data.points().begin(), data.points().end());
  index.ids_.assign(data.ids().begin(), data.ids().end());
  if (data.size() < params.length_group || partitions.empty()) {
    index.flat_partition_.resize(data.size());
    std::iota(index.flat_partition_.begin(), index.flat_partition_.end(), std::size_t{0});
  } else {
    index.build_layers(partitions, allow_undersized);
  }
  index.rebuild_slot_maps();
  return index;
}

void MultilevelIndex::build_layers(const std::vector<std::vector<std::size_t>>& bottom,
                                   bool allow_undersized) {
  layers_.clear();
  const KMeansOptions options = kmeans_options(params_);
  const std::size_t nc = params_.n_centroids;

  {
    std::vector<KMeansResult> fits(bottom.size());
    detail::parallel_for(bottom.size(), params_.threads, [&](std::size_t g) {
      std::vector<Vector> pts;
      pts.reserve(bottom[g].size());
      for (std::size_t slot : bottom[g]) pts.push_back(points_[slot]);
      std::size_t k = nc;
      if (pts.size() < k) {
        if (!allow_undersized) {
          throw std::invalid_argument("layer 1, group " + std::to_string(g) + ": " +
                                      std::to_string(pts.size()) +
                                      " elements, fewer than n_centroids=" + std::to_string(nc));
        }
        k = pts.size();
      }
      fits[g] = kmeans_fit(pts, k, derive_seed(params_.seed, {stream::kKMeans, kLayerOne, g}),
                           options);
    });
    CentroidLayer layer;
    append_groups(layer, bottom, fits);
    layers_.push_back(std::move(layer));
  }

  for (std::uint64_t level = 2;; ++level) {
    const CentroidLayer& below = layers_.back();
    const std::size_t m = below.size();
    const std::size_t groups = m / params_.length_group;
    if (groups < 1) break;
    std::vector<std::vector<std::size_t>> members;
    std::size_t at = 0;
    for (std::size_t size : balanced_chunk_sizes(m, groups)) {
      members.emplace_back(size);
      std::iota(members.back().begin(), members.back().end(), at);
      at += size;
    }
    std::vector<KMeansResult> fits(groups);
    detail::parallel_for(groups, params_.threads, [&](std::size_t g) {
      std::vector<Vector> pts;
      pts.reserve(members[g].size());
      for (std::size_t c : members[g]) pts.push_back(below.centroids[c]);
      fits[g] = kmeans_fit(pts, nc, derive_seed(params_.seed, {stream::kKMeans, level, g}),
                           options);
    });
    CentroidLayer layer;
    append_groups(layer, members, fits);
    CentroidLayer& lower = layers_.back();
    for (std::size_t u = 0; u < layer.size(); ++u) {
      for (std::size_t c : layer.children[u]) lower.parent[c] = u;
    }
    layers_.push_back(std::move(layer));
  }
  // leaf links are needed before covers can be computed
  leaf_of_.assign(points_.size(), kNoParent);
  const CentroidLayer& first = layers_.front();
  for (std::size_t c = 0; c < first.size(); ++c) {
    for (std::size_t slot : first.children[c]) leaf_of_[slot] = c;
  }
  recompute_covers();
}

void MultilevelIndex::rebuild_slot_maps() {
  slot_of_.clear();
  slot_of_.reserve(ids_.size());
  for (std::size_t s = 0; s < ids_.size(); ++s) {
    if (!slot_of_.emplace(ids_[s], s).second) {
      throw std::invalid_argument("duplicate element id " + std::to_string(ids_[s]));
    }
  }
  partition_of_.assign(ids_.size(), 0);
  leaf_of_.assign(ids_.size(), kNoParent);
  if (layers_.empty()) return;
  const CentroidLayer& first = layers_.front();
  for (std::size_t g = 0; g < first.groups.size(); ++g) {
    for (std::size_t slot : first.groups[g].members) partition_of_[slot] = g;
  }
  for (std::size_t c = 0; c < first.size(); ++c) {
    for (std::size_t slot : first.children[c]) leaf_of_[slot] = c;
  }
}

void MultilevelIndex::recompute_covers() {
  for (auto& layer : layers_) {
    layer.cover_radius.assign(layer.size(), 0.0);
    layer.subtree_size.assign(layer.size(), 0);
  }
  for (std::size_t slot = 0; slot < points_.size(); ++slot) {
    std::size_t c = leaf_of_[slot];
    for (std::size_t l = 0; l < layers_.size() && c != kNoParent; ++l) {
      CentroidLayer& layer = layers_[l];
      layer.cover_radius[c] = std::max(layer.cover_radius[c], metric_(layer.centroids[c], points_[slot]));
      ++layer.subtree_size[c];
      c = layer.parent[c];
    }
  }
}

std::size_t MultilevelIndex::partition_count() const {
  return layers_.empty() ? 1 : layers_.front().groups.size();
}

std::span<const std::size_t> MultilevelIndex::partition(std::size_t p) const {
  if (p >= partition_count()) throw std::out_of_range("unknown partition " + std::to_string(p));
  if (layers_.empty()) return flat_partition_;
  return layers_.front().groups[p].members;
}

std::vector<ElementId> MultilevelIndex::partition_ids(std::size_t p) const {
  std::vector<ElementId> out;
  for (std::size_t slot : partition(p)) out.push_back(ids_[slot]);
  return out;
}

std::optional<std::size_t> MultilevelIndex::slot_of(ElementId id) const {
  auto it = slot_of_.find(id);
  if (it == slot_of_.end()) return std::nullopt;
  return it->second;
}

std::vector<Vector> MultilevelIndex::top_centroids() const {
  if (layers_.empty()) {
    std::vector<Vector> out;
    for (std::size_t slot : flat_partition_) out.push_back(points_[slot]);
    return out;
  }
  return layers_.back().centroids;
}

void MultilevelIndex::check_dim(const Vector& q) const {
  if (size() > 0 && q.dim() != dim_) {
    throw DimensionError("query dim " + std::to_string(q.dim()) + " does not match index dim " +
                         std::to_string(dim_));
  }
}

Descent MultilevelIndex::descend(const Vector& q) const {
  check_dim(q);
  Descent d;
  if (layers_.empty()) return d;

  std::vector<std::size_t> top(layers_.back().size());
  std::iota(top.begin(), top.end(), std::size_t{0});
  std::span<const std::size_t> candidates = top;

  for (std::size_t l = layers_.size(); l-- > 0;) {
    const CentroidLayer& layer = layers_[l];
    std::size_t best = kNoParent;
    double best_d = 0.0;
    for (std::size_t c : candidates) {
      // above layer 1 a centroid without children leads nowhere
      if (l > 0 && layer.children[c].empty()) continue;
      double dist = metric_(q, layer.centroids[c]);
      ++d.distance_count;
      if (best == kNoParent || dist < best_d || (dist == best_d && c < best)) {
        best = c;
        best_d = dist;
      }
    }
    if (best == kNoParent) throw std::logic_error("descent found no centroid with children");
    d.path.push_back(best);
    if (l == 0) {
      d.partition = layer.group_of[best];
    } else {
      candidates = layer.children[best];
    }
  }
  return d;
}

void MultilevelIndex::scan(std::span<const std::size_t> slots, const Vector& q,
                           QueryResult& out) const {
  out.hits.reserve(out.hits.size() + slots.size());
  for (std::size_t slot : slots) {
    out.hits.push_back({ids_[slot], metric_(q, points_[slot])});
  }
  out.stats.distance_count += slots.size();
  ++out.stats.partitions_scanned;
}

PointQueryResult MultilevelIndex::point_query(const Vector& q) const {
  Descent d = descend(q);
  PointQueryResult r;
  r.partition = d.partition;
  r.scan.stats.distance_count = d.distance_count;
  r.scan.stats.layers_traversed = depth();
  scan(partition(d.partition), q, r.scan);
  sort_hits(r.scan.hits);
  if (!r.scan.hits.empty() && r.scan.hits.front().distance == 0.0) r.match = r.scan.hits.front().id;
  return r;
}

QueryResult MultilevelIndex::knn_query(const Vector& q, std::size_t k) const {
  if (k == 0) throw std::invalid_argument("knn_query: k must be positive");
  Descent d = descend(q);
  QueryResult r;
  r.stats.distance_count = d.distance_count;
  r.stats.layers_traversed = depth();
  auto slots = partition(d.partition);
  scan(slots, q, r);
  r.stats.truncated = slots.size() < k;
  if (r.hits.size() > k) {
    std::partial_sort(r.hits.begin(), r.hits.begin() + static_cast<std::ptrdiff_t>(k), r.hits.end(),
                      [](const Hit& a, const Hit& b) {
                        if (a.distance != b.distance) return a.distance < b.distance;
                        return a.id < b.id;
                      });
    r.hits.resize(k);
  } else {
    sort_hits(r.hits);
  }
  return r;
}

QueryResult MultilevelIndex::range_query(const Vector& q, double radius, RangeMode mode) const {
  check_dim(q);
  if (!(radius >= 0.0)) throw std::invalid_argument("range_query: radius must be non-negative");
  QueryResult r;
  std::vector<std::size_t> parts;
  if (layers_.empty()) {
    parts.push_back(0);
  } else {
    auto keep = [&](std::size_t l, std::size_t c) {
      const CentroidLayer& layer = layers_[l];
      if (l > 0 && layer.children[c].empty()) return false;
      double slack = mode == RangeMode::CoverExpanded ? layer.cover_radius[c] : 0.0;
      ++r.stats.distance_count;
      return metric_(q, layer.centroids[c]) <= radius + slack;
    };
    std::vector<std::size_t> candidates;
    const std::size_t top = layers_.size() - 1;
    for (std::size_t c = 0; c < layers_[top].size(); ++c) {
      if (keep(top, c)) candidates.push_back(c);
    }
    for (std::size_t l = top; l > 0; --l) {
      std::vector<std::size_t> next;
      for (std::size_t c : candidates) {
        for (std::size_t child : layers_[l].children[c]) {
          if (keep(l - 1, child)) next.push_back(child);
        }
      }
      candidates = std::move(next);
    }
    for (std::size_t c : candidates) parts.push_back(layers_.front().group_of[c]);
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  }
  r.stats.layers_traversed = depth();
  for (std::size_t p : parts) {
    for (std::size_t slot : partition(p)) {
      double dist = metric_(q, points_[slot]);
      ++r.stats.distance_count;
      if (dist <= radius) r.hits.push_back({ids_[slot], dist});
    }
    ++r.stats.partitions_scanned;
  }
  sort_hits(r.hits);
  return r;
}

std::size_t MultilevelIndex::insert(const Vector& point, ElementId id) {
  if (slot_of_.contains(id)) throw std::invalid_argument("insert: id " + std::to_string(id) + " already indexed");
  if (size() == 0 && dim_ == 0) dim_ = point.dim();
  check_dim(point);
  if (point.dim() != dim_) throw DimensionError("insert: dimension mismatch");

  Descent d = layers_.empty() ? Descent{} : descend(point);
  const std::size_t slot = points_.size();
  points_.push_back(point);
  ids_.push_back(id);
  slot_of_.emplace(id, slot);
  partition_of_.push_back(d.partition);

  if (layers_.empty()) {
    flat_partition_.push_back(slot);
    leaf_of_.push_back(kNoParent);
    return 0;
  }

  CentroidLayer& first = layers_.front();
  CentroidGroup& group = first.groups[d.partition];
  std::vector<Vector> local;
  local.reserve(group.centroids.size());
  for (std::size_t c : group.centroids) local.push_back(first.centroids[c]);
  std::uint32_t label = nearest_centroid(point, local);
  std::size_t leaf = group.centroids[label];
  group.members.push_back(slot);
  group.labels.push_back(label);
  first.children[leaf].push_back(slot);
  leaf_of_.push_back(leaf);

  std::size_t c = leaf;
  for (std::size_t l = 0; l < layers_.size() && c != kNoParent; ++l) {
    CentroidLayer& layer = layers_[l];
    layer.cover_radius[c] = std::max(layer.cover_radius[c], metric_(layer.centroids[c], point));
    ++layer.subtree_size[c];
    c = layer.parent[c];
  }
  return d.partition;
}

void MultilevelIndex::split_partition(std::size_t p, std::size_t threshold) {
  if (p >= partition_count()) throw std::out_of_range("split_partition: unknown partition " + std::to_string(p));
  const std::size_t size = partition(p).size();
  if (size <= threshold) {
    throw std::invalid_argument("split_partition: partition " + std::to_string(p) + " holds " +
                                std::to_string(size) + " elements, not above threshold " +
                                std::to_string(threshold));
  }
  if (layers_.empty()) throw std::logic_error("split_partition: index has no centroid layers");

  const std::size_t lg = params_.length_group;
  const std::size_t nc = params_.n_centroids;
  const std::uint64_t round = split_count_++;
  std::vector<std::size_t> members(partition(p).begin(), partition(p).end());
  Engine rng = make_engine(derive_seed(params_.seed, {stream::kSplit, p, round}));
  std::shuffle(members.begin(), members.end(), rng);

  const std::size_t pieces = (size + lg - 1) / lg;
  std::vector<std::vector<std::size_t>> chunks;
  std::size_t at = 0;
  for (std::size_t s : balanced_chunk_sizes(size, pieces)) {
    chunks.emplace_back(members.begin() + at, members.begin() + at + s);
    at += s;
  }
  std::vector<KMeansResult> fits(pieces);
  for (std::size_t i = 0; i < pieces; ++i) {
    if (chunks[i].size() < nc) {
      throw std::invalid_argument("split_partition: piece " + std::to_string(i) + " of partition " +
                                  std::to_string(p) + " has " + std::to_string(chunks[i].size()) +
                                  " elements, fewer than n_centroids=" + std::to_string(nc));
    }
  }
  const KMeansOptions options = kmeans_options(params_);
  for (std::size_t i = 0; i < pieces; ++i) {
    std::vector<Vector> pts;
    for (std::size_t slot : chunks[i]) pts.push_back(points_[slot]);
    fits[i] = kmeans_fit(pts, nc, derive_seed(params_.seed, {stream::kSplit, p, round, i + 1}),
                         options);
  }

  CentroidLayer& first = layers_.front();
  const std::vector<std::size_t> old = first.groups[p].centroids;
  std::vector<std::size_t> old_parents;
  for (std::size_t c : old) {
    first.children[c].clear();
    if (first.parent[c] != kNoParent) old_parents.push_back(first.parent[c]);
  }

  // piece 0 keeps partition id p and reuses the old centroid slots
  std::vector<std::size_t> fresh;
  for (std::size_t i = 0; i < pieces; ++i) {
    const std::size_t g = i == 0 ? p : first.groups.size();
    CentroidGroup group;
    group.members = chunks[i];
    group.labels = std::move(fits[i].labels);
    for (std::size_t j = 0; j < fits[i].centroids.size(); ++j) {
      std::size_t flat;
      if (i == 0 && j < old.size()) {
        flat = old[j];
        first.centroids[flat] = std::move(fits[i].centroids[j]);
      } else {
        flat = first.centroids.size();
        first.centroids.push_back(std::move(fits[i].centroids[j]));
        first.children.emplace_back();
        first.group_of.push_back(g);
        first.parent.push_back(kNoParent);
        first.cover_radius.push_back(0.0);
        first.subtree_size.push_back(0);
      }
      first.group_of[flat] = g;
      first.parent[flat] = kNoParent;
      group.centroids.push_back(flat);
      fresh.push_back(flat);
    }
    for (std::size_t m = 0; m < group.members.size(); ++m) {
      first.children[group.centroids[group.labels[m]]].push_back(group.members[m]);
    }
    if (i == 0) {
      first.groups[p] = std::move(group);
    } else {
      first.groups.push_back(std::move(group));
    }
  }
  if (layers_.size() >= 2) {
    CentroidLayer& second = layers_[1];
    std::set<std::size_t> groups_touched;
    for (std::size_t parent : old_parents) groups_touched.insert(second.group_of[parent]);
    const std::set<std::size_t> old_set(old.begin(), old.end());
    for (std::size_t parent : old_parents) {
      std::erase_if(second.children[parent], [&](std::size_t c) { return old_set.contains(c); });
    }
    for (std::size_t g : groups_touched) {
      CentroidGroup& group = second.groups[g];
      std::vector<std::size_t> members;
      std::vector<std::uint32_t> labels;
      for (std::size_t m = 0; m < group.members.size(); ++m) {
        if (!old_set.contains(group.members[m])) {
          members.push_back(group.members[m]);
          labels.push_back(group.labels[m]);
        }
      }
      group.members = std::move(members);
      group.labels = std::move(labels);
    }
    std::vector<std::size_t> candidates;
    for (std::size_t g : groups_touched) {
      for (std::size_t c : second.groups[g].centroids) candidates.push_back(c);
    }
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t c : fresh) {
      std::size_t best = kNoParent;
      double best_d = 0.0;
      for (std::size_t cand : candidates) {
        double d = squared_l2(first.centroids[c], second.centroids[cand]);
        if (best == kNoParent || d < best_d) {
          best = cand;
          best_d = d;
        }
      }
      first.parent[c] = best;
      second.children[best].push_back(c);
      CentroidGroup& group = second.groups[second.group_of[best]];
      auto ordinal = std::find(group.centroids.begin(), group.centroids.end(), best) - group.centroids.begin();
      group.members.push_back(c);
      group.labels.push_back(static_cast<std::uint32_t>(ordinal));
    }
  }
  rebuild_slot_maps();
  recompute_covers();
}

}  // namespace mask
