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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mask/clouds.hpp"
#include "mask/distributed.hpp"
#include "mask/index.hpp"
#include "mask/text.hpp"

namespace mask::bench {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"bombard",     "gauss_bench", "size_sweep",
                                                 "param_sweep", "ratio_sweep", "text_bench",
                                                 "cluster_bench"};
  return names;
}

struct ExperimentConfig {
  std::string experiment = "gauss_bench";

  // point clouds (ignored when `data` names a file)
  std::string preset = "GRO";
  std::size_t n_clouds = 8;
  std::vector<std::size_t> npc{200};
  double sigma = 1.0;
  std::string data;

  std::vector<std::pair<std::size_t, std::size_t>> grid{{16, 8}};  // (length_group, n_centroids)
  std::vector<std::uint64_t> seeds{1};
  std::size_t iterations = 0;
  std::string metric = "l2";
  std::size_t threads = 1;

  // text_bench
  std::string corpus;  // empty: synthetic corpus below
  std::vector<std::pair<std::string, std::string>> categories;
  std::vector<bool> stemming{false, true};
  SyntheticCorpusSpec synthetic;

  // cluster_bench
  std::size_t nodes = 4;
  std::uint64_t partition_seed = 7;
  std::vector<double> epsilons{0.0, 1.0, 2.0, 4.0, 8.0, 16.0, kBroadcast};
  std::size_t k = 10;
  std::size_t queries = 100;

  // bombard
  std::vector<std::size_t> topdown_k{1, 4, 8, 16, 32, 64, 128};
  std::vector<std::size_t> bottomup_k{1, 2, 4, 8, 16, 32};
  std::size_t bombard_groups = 4;
  std::size_t bombard_npc = 250;

  void validate() const;
  /// FNV-1a 64 over the canonical JSON form (sorted keys, output path excluded).
  std::uint64_t hash() const;
  std::string to_json() const;
};

/// Defaults for one experiment (the sweeps differ only in their grids and sizes).
ExperimentConfig default_config(const std::string& experiment);

/// Starts from default_config(json["experiment"]) and overrides the keys present.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One result row of an index benchmark. Fractions, never percentages.
struct BenchRecord {
  std::string experiment;
  std::string dataset;
  std::string variant;
  std::size_t npc = 0;
  std::size_t n = 0;
  std::size_t length_group = 0;
  std::size_t n_centroids = 0;
  std::uint64_t seed = 0;
  std::optional<NodeId> node;
  std::size_t iteration = 0;
  std::size_t tree_depth = 0;
  double error_rate = 0.0;            // own-id exhaustive point-search error
  double class_error_nn = 0.0;        // leave-one-out, 1-NN rule
  double class_error_majority = 0.0;  // leave-one-out, partition-majority rule
  std::optional<std::uint64_t> comm_messages;
  double tree_time = 0.0;
  double search_time = 0.0;

  /// Range checks; at iteration 0 the depth must match the layer recurrence.
  void validate() const;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
};

struct ExperimentOutput {
  Table main;
  Table timings;
  std::vector<std::pair<std::string, Table>> extra;  // suffix -> table
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

ExperimentOutput run_bombard(const ExperimentConfig& config);
ExperimentOutput run_index_bench(const ExperimentConfig& config);  // gauss/size/param/ratio
ExperimentOutput run_text_bench(const ExperimentConfig& config);
ExperimentOutput run_cluster_bench(const ExperimentConfig& config);

/// `# mask-bench v1 experiment=<name> config_hash=<hex>`
std::string csv_header_line(const ExperimentConfig& config);

/// Main table to `out` (stdout when empty), timings to <out>.timings.csv and
/// each extra table to <out>.<suffix>.csv. Returns the files written.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const ExperimentOutput& output,
                                                 const std::filesystem::path& out);

}  // namespace mask::bench
