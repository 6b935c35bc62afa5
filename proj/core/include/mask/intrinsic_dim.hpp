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

#include <span>
#include <stdexcept>

#include "mask/dataset.hpp"
#include "mask/metric.hpp"
#include "mask/random.hpp"

namespace mask {

class UndefinedIntrinsicDimension : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// rho = mu^2 / (2 sigma^2) of a sample of distances (population variance).
double intrinsic_dimensionality_of(std::span<const double> distances);

/// rho estimated over n_pairs seeded random pairs of distinct rows.
double intrinsic_dimensionality(const Dataset& points, const Metric& metric, std::size_t n_pairs,
                                RngSeed seed);

/// rho over all n(n-1)/2 pairs.
double intrinsic_dimensionality_exact(const Dataset& points, const Metric& metric);

}  // namespace mask
