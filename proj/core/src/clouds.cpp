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

#include "mask/clouds.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mask/metric.hpp"

namespace mask {

void CloudSpec::validate() const {
  if (n_clouds == 0) throw std::invalid_argument("n_clouds must be >= 1");
  if (points_per_cloud == 0) throw std::invalid_argument("points_per_cloud must be >= 1");
  if (dim == 0) throw std::invalid_argument("dim must be >= 1");
  if (means.size() != n_clouds) {
    throw std::invalid_argument("expected " + std::to_string(n_clouds) + " means, got " +
                                std::to_string(means.size()));
  }
  for (const Vector& m : means) {
    if (m.dim() != dim) throw DimensionError("cloud mean dimension differs from dim");
  }
  // sigma == 0 is accepted: every point then equals its cloud mean
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be finite and >= 0");
  if (family == CloudFamily::StudentT && !(dof > 0)) throw std::invalid_argument("dof must be > 0");
}

double preset_spacing(OverlapPreset preset) {
  switch (preset) {
    case OverlapPreset::GNO: return 10.0;
    case OverlapPreset::GMO: return 4.0;
    case OverlapPreset::GRO: return 2.0;
  }
  return 0.0;
}

std::string_view preset_name(OverlapPreset preset) {
  switch (preset) {
    case OverlapPreset::GNO: return "GNO";
    case OverlapPreset::GMO: return "GMO";
    case OverlapPreset::GRO: return "GRO";
  }
  return "";
}

OverlapPreset parse_preset(std::string_view name) {
  if (name == "GNO" || name == "gno") return OverlapPreset::GNO;
  if (name == "GMO" || name == "gmo") return OverlapPreset::GMO;
  if (name == "GRO" || name == "gro") return OverlapPreset::GRO;
  throw std::invalid_argument("unknown overlap preset '" + std::string(name) + "'");
}

std::vector<Vector> ring_means(std::size_t n_clouds, std::size_t dim, double spacing) {
  if (dim < 2 && n_clouds > 1) throw std::invalid_argument("ring layout needs dim >= 2");
  std::vector<Vector> out;
  out.reserve(n_clouds);
  if (n_clouds == 1) {
    out.push_back(Vector::zeros(dim));
    return out;
  }
  // chord between neighbours on a circle of radius R is 2 R sin(pi / n)
  const double radius = spacing / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n_clouds)));
  for (std::size_t c = 0; c < n_clouds; ++c) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(n_clouds);
    std::vector<double> v(dim, 0.0);
    v[0] = radius * std::cos(a);
    v[1] = radius * std::sin(a);
    out.push_back(Vector::dense(std::move(v)));
  }
  return out;
}

CloudSpec preset_spec(OverlapPreset preset, std::size_t n_clouds, std::size_t points_per_cloud,
                      RngSeed seed, double sigma) {
  CloudSpec spec;
  spec.n_clouds = n_clouds;
  spec.points_per_cloud = points_per_cloud;
  spec.dim = 2;
  spec.sigma = sigma;
  spec.seed = seed;
  spec.means = ring_means(n_clouds, 2, preset_spacing(preset) * sigma);
  return spec;
}

CloudSpec bombard_demo_spec(RngSeed seed, std::size_t points_per_cloud) {
  CloudSpec spec;
  spec.n_clouds = 4;
  spec.points_per_cloud = points_per_cloud;
  spec.dim = 2;
  spec.sigma = 1.0;
  spec.seed = seed;
  spec.family = CloudFamily::StudentT;
  spec.dof = 12.0;
  spec.means = {Vector::dense({-5.0, -5.0}), Vector::dense({5.0, -5.0}),
                Vector::dense({-5.0, 5.0}), Vector::dense({5.0, 5.0})};
  return spec;
}

Dataset gen_clouds(const CloudSpec& spec) {
  spec.validate();
  std::vector<Vector> points;
  std::vector<std::string> labels;
  points.reserve(spec.n_clouds * spec.points_per_cloud);
  labels.reserve(points.capacity());
  for (std::size_t c = 0; c < spec.n_clouds; ++c) {
    // one engine per cloud: adding clouds never perturbs the earlier ones
    Engine rng = make_engine(derive_seed(spec.seed, {stream::kClouds, c}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::student_t_distribution<double> student(spec.family == CloudFamily::StudentT ? spec.dof : 1.0);
    const Vector dense_mean = spec.means[c].densify();
    const auto mean = dense_mean.values();
    for (std::size_t i = 0; i < spec.points_per_cloud; ++i) {
      std::vector<double> v(spec.dim);
      for (std::size_t d = 0; d < spec.dim; ++d) {
        double z = spec.family == CloudFamily::Gaussian ? normal(rng) : student(rng);
        v[d] = mean[d] + spec.sigma * z;
      }
      points.push_back(Vector::dense(std::move(v)));
      labels.push_back("c" + std::to_string(c));
    }
  }
  return Dataset::from_points(std::move(points), std::move(labels));
}

double measured_overlap(const CloudSpec& spec, const Dataset& data) {
  if (data.size() != spec.n_clouds * spec.points_per_cloud) {
    throw std::invalid_argument("dataset size does not match the cloud spec");
  }
  std::size_t wrong = 0;
  for (std::size_t row = 0; row < data.size(); ++row) {
    const std::size_t own = row / spec.points_per_cloud;
    const double d_own = squared_l2(data.point(row), spec.means[own]);
    for (std::size_t c = 0; c < spec.n_clouds; ++c) {
      if (c != own && squared_l2(data.point(row), spec.means[c]) < d_own) {
        ++wrong;
        break;
      }
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

}  // namespace mask
