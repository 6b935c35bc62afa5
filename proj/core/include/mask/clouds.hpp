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

#include <string>
#include <string_view>
#include <vector>

#include "mask/dataset.hpp"
#include "mask/random.hpp"
#include "mask/vector.hpp"

namespace mask {

enum class CloudFamily { Gaussian, StudentT };

/// Isotropic point clouds. Student-t clouds draw each coordinate as
/// mean + sigma * t(dof), so sigma is a scale, not the standard deviation.
struct CloudSpec {
  std::size_t n_clouds = 8;
  std::size_t points_per_cloud = 200;
  std::size_t dim = 2;
  std::vector<Vector> means;
  double sigma = 1.0;
  RngSeed seed{};
  CloudFamily family = CloudFamily::Gaussian;
  double dof = 12.0;

  void validate() const;
};

/// Overlap presets: clouds evenly spaced on a ring, adjacent means a fixed
/// number of sigmas apart.
enum class OverlapPreset { GNO, GMO, GRO };

/// Adjacent-mean spacing in units of sigma: GNO 10, GMO 4, GRO 2.
double preset_spacing(OverlapPreset preset);
std::string_view preset_name(OverlapPreset preset);
OverlapPreset parse_preset(std::string_view name);

/// Means of n clouds on a circle in the first two coordinates (the rest are
/// zero) with adjacent means `spacing` apart. A single cloud sits at the origin.
std::vector<Vector> ring_means(std::size_t n_clouds, std::size_t dim, double spacing);

CloudSpec preset_spec(OverlapPreset preset, std::size_t n_clouds = 8,
                      std::size_t points_per_cloud = 200, RngSeed seed = {},
                      double sigma = 1.0);

/// Four t(12) clouds on the corners of a square, for the centroid-bombardment demo.
CloudSpec bombard_demo_spec(RngSeed seed = {}, std::size_t points_per_cloud = 250);

/// Rows are cloud-major; labels are "c<cloud>". Ids are the row numbers.
Dataset gen_clouds(const CloudSpec& spec);

/// Fraction of points whose nearest cloud mean is not the mean of the cloud
/// that generated them. `data` must come from gen_clouds(spec).
double measured_overlap(const CloudSpec& spec, const Dataset& data);

}  // namespace mask
