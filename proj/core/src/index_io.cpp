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

#include "mask/index_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mask/dataset_io.hpp"

namespace mask {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes little-endian hosts");

constexpr std::array<char, 8> kMagic = {'M', 'A', 'S', 'K', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void pod(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void u64(std::uint64_t v) { pod(v); }
  void f64(double v) { pod(v); }

  void indices(const std::vector<std::size_t>& v) {
    u64(v.size());
    for (auto x : v) u64(x);
  }
  void vector(const Vector& v) {
    pod<std::uint8_t>(v.is_sparse() ? 1 : 0);
    u64(v.dim());
    if (v.is_sparse()) {
      u64(v.entries().size());
      for (const auto& e : v.entries()) {
        pod(e.index);
        f64(e.value);
      }
    } else {
      for (double x : v.values()) f64(x);
    }
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw FormatError("index snapshot truncated");
    return v;
  }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  double f64() { return pod<double>(); }

  std::size_t count() {
    std::uint64_t n = u64();
    if (n > (std::uint64_t{1} << 40)) throw FormatError("index snapshot: implausible count");
    return static_cast<std::size_t>(n);
  }
  std::vector<std::size_t> indices() {
    std::vector<std::size_t> v(count());
    for (auto& x : v) x = u64();
    return v;
  }
  Vector vector() {
    bool sparse = pod<std::uint8_t>() != 0;
    std::size_t dim = count();
    if (sparse) {
      std::vector<SparseEntry> entries(count());
      for (auto& e : entries) {
        e.index = pod<std::uint32_t>();
        e.value = f64();
      }
      return Vector::sparse(dim, std::move(entries));
    }
    std::vector<double> values(dim);
    for (double& x : values) x = f64();
    return Vector::dense(std::move(values));
  }

 private:
  std::istream& in_;
};

}  // namespace

void IndexSerializer::write(std::ostream& out, const MultilevelIndex& index) {
  if (index.metric_.kind() == MetricKind::Custom) {
    throw std::invalid_argument("cannot persist an index with a custom metric");
  }
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.pod(kVersion);
  const BuildParams& p = index.params_;
  w.u64(p.length_group);
  w.u64(p.n_centroids);
  w.u64(p.seed.value);
  w.u64(p.threads);
  w.u64(p.kmeans_max_iter);
  w.f64(p.kmeans_tol);
  w.pod<std::uint8_t>(static_cast<std::uint8_t>(index.metric_.kind()));
  w.u64(index.dim_);
  w.u64(index.split_count_);

  w.u64(index.ids_.size());
  for (std::size_t s = 0; s < index.ids_.size(); ++s) {
    w.u64(index.ids_[s]);
    w.vector(index.points_[s]);
  }
  w.indices(index.flat_partition_);

  w.u64(index.layers_.size());
  for (const CentroidLayer& layer : index.layers_) {
    w.u64(layer.size());
    for (std::size_t c = 0; c < layer.size(); ++c) {
      w.vector(layer.centroids[c]);
      w.indices(layer.children[c]);
      w.u64(layer.group_of[c]);
      w.u64(layer.parent[c]);
      w.f64(layer.cover_radius[c]);
      w.u64(layer.subtree_size[c]);
    }
    w.u64(layer.groups.size());
    for (const CentroidGroup& g : layer.groups) {
      w.indices(g.members);
      w.u64(g.labels.size());
      for (auto l : g.labels) w.pod(l);
      w.indices(g.centroids);
    }
  }
  if (!out) throw std::runtime_error("index snapshot: write failed");
}

MultilevelIndex IndexSerializer::read(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("not a mask index snapshot");
  Reader r(in);
  auto version = r.pod<std::uint32_t>();
  if (version != kVersion) throw FormatError("unsupported snapshot version " + std::to_string(version));

  MultilevelIndex index;
  BuildParams& p = index.params_;
  p.length_group = r.count();
  p.n_centroids = r.count();
  p.seed = RngSeed{r.u64()};
  p.threads = r.count();
  p.kmeans_max_iter = r.count();
  p.kmeans_tol = r.f64();
  p.validate();
  auto kind = r.pod<std::uint8_t>();
  if (kind > static_cast<std::uint8_t>(MetricKind::Linf)) throw FormatError("bad metric kind");
  index.metric_ = Metric(static_cast<MetricKind>(kind));
  index.dim_ = r.count();
  index.split_count_ = r.u64();

  const std::size_t n = r.count();
  index.ids_.resize(n);
  index.points_.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    index.ids_[s] = r.u64();
    index.points_[s] = r.vector();
  }
  index.flat_partition_ = r.indices();

  const std::size_t depth = r.count();
  index.layers_.resize(depth);
  for (CentroidLayer& layer : index.layers_) {
    const std::size_t m = r.count();
    layer.centroids.resize(m);
    layer.children.resize(m);
    layer.group_of.resize(m);
    layer.parent.resize(m);
    layer.cover_radius.resize(m);
    layer.subtree_size.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
      layer.centroids[c] = r.vector();
      layer.children[c] = r.indices();
      layer.group_of[c] = r.count();
      layer.parent[c] = r.u64();
      layer.cover_radius[c] = r.f64();
      layer.subtree_size[c] = r.count();
    }
    layer.groups.resize(r.count());
    for (CentroidGroup& g : layer.groups) {
      g.members = r.indices();
      g.labels.resize(r.count());
      for (auto& l : g.labels) l = r.pod<std::uint32_t>();
      g.centroids = r.indices();
    }
  }
  index.rebuild_slot_maps();
  return index;
}

void save_index(const std::filesystem::path& path, const MultilevelIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  IndexSerializer::write(out, index);
}

MultilevelIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return IndexSerializer::read(in);
}

}  // namespace mask
