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

#include <filesystem>
#include <iosfwd>

#include "mask/index.hpp"

namespace mask {

// Binary snapshot, little-endian:
//   magic "MASKIDX\0", u32 version (1)
//   params, metric kind, dim, split counter
//   elements (id + vector), depth-0 partition, then every layer bottom to top
//   with centroids, children, group_of, parent, cover radii, subtree sizes and
//   groups (members, labels, centroid ordinals).
// Custom metrics cannot be persisted.
class IndexSerializer {
 public:
  static void write(std::ostream& out, const MultilevelIndex& index);
  static MultilevelIndex read(std::istream& in);
};

void save_index(const std::filesystem::path& path, const MultilevelIndex& index);
MultilevelIndex load_index(const std::filesystem::path& path);

}  // namespace mask
