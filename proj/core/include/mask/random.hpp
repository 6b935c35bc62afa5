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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mask {

/// Seed for every stochastic operation. Identical seed and inputs give
/// bit-identical outputs.
struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

using Engine = std::mt19937_64;

/// Derives an independent sub-seed from a base seed and a list of stream ids
/// (layer, group, node, ...) with splitmix64 mixing. Parallel work items seeded
/// this way produce the same results regardless of scheduling.
RngSeed derive_seed(RngSeed base, std::initializer_list<std::uint64_t> streams);

inline Engine make_engine(RngSeed seed) { return Engine(seed.value); }

/// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kPartition = 0x7061727469746e;
inline constexpr std::uint64_t kKMeans = 0x6b6d65616e73;
inline constexpr std::uint64_t kSplit = 0x73706c6974;
inline constexpr std::uint64_t kPairs = 0x7061697273;
inline constexpr std::uint64_t kClouds = 0x636c6f756473;
inline constexpr std::uint64_t kCorpus = 0x636f72707573;
inline constexpr std::uint64_t kCluster = 0x636c7573746572;
}  // namespace stream

}  // namespace mask
