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

#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mask/dataset_io.hpp"
#include "mask/kmeans.hpp"

namespace mask::bench {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(std::uint64_t x, int) { return std::to_string(x); }

json epsilon_to_json(double e) { return std::isinf(e) ? json("inf") : json(e); }
double epsilon_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kBroadcast;
    throw std::invalid_argument("epsilon must be a number or \"inf\"");
  }
  return j.get<double>();
}

json to_json_value(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["preset"] = c.preset;
  j["n_clouds"] = c.n_clouds;
  j["npc"] = c.npc;
  j["sigma"] = c.sigma;
  j["data"] = c.data;
  j["grid"] = json::array();
  for (auto [lg, nc] : c.grid) j["grid"].push_back({lg, nc});
  j["seeds"] = c.seeds;
  j["iterations"] = c.iterations;
  j["metric"] = c.metric;
  j["corpus"] = c.corpus;
  j["categories"] = json::array();
  for (const auto& [a, b] : c.categories) j["categories"].push_back({a, b});
  j["stemming"] = c.stemming;
  j["synthetic"] = {{"labels", c.synthetic.labels},
                    {"docs_per_class", c.synthetic.docs_per_class},
                    {"words_per_doc", c.synthetic.words_per_doc},
                    {"vocab_per_class", c.synthetic.vocab_per_class},
                    {"shared_vocab", c.synthetic.shared_vocab},
                    {"overlap", c.synthetic.overlap},
                    {"seed", c.synthetic.seed.value}};
  j["nodes"] = c.nodes;
  j["partition_seed"] = c.partition_seed;
  j["epsilons"] = json::array();
  for (double e : c.epsilons) j["epsilons"].push_back(epsilon_to_json(e));
  j["k"] = c.k;
  j["queries"] = c.queries;
  j["topdown_k"] = c.topdown_k;
  j["bottomup_k"] = c.bottomup_k;
  j["bombard_groups"] = c.bombard_groups;
  j["bombard_npc"] = c.bombard_npc;
  return j;
}

Metric config_metric(const ExperimentConfig& c) {
  auto m = parse_metric(c.metric);
  if (!m) throw std::invalid_argument("unknown metric '" + c.metric + "'");
  return *m;
}

BuildParams make_params(const ExperimentConfig& c, std::size_t lg, std::size_t nc, std::uint64_t seed) {
  BuildParams p;
  p.length_group = lg;
  p.n_centroids = nc;
  p.seed = RngSeed{seed};
  p.threads = c.threads;
  return p;
}

struct Source {
  std::string name;
  std::size_t npc = 0;
  Dataset data;
};

Source make_source(const ExperimentConfig& c, std::size_t npc, std::uint64_t seed) {
  if (!c.data.empty()) {
    return {std::filesystem::path(c.data).filename().string(), 0, load_dataset(c.data)};
  }
  CloudSpec spec = preset_spec(parse_preset(c.preset), c.n_clouds, npc, RngSeed{seed}, c.sigma);
  return {c.preset, npc, gen_clouds(spec)};
}

const std::vector<std::string> kRecordColumns = {
    "experiment", "dataset",   "variant",    "npc",        "n",
    "length_group", "n_centroids", "seed",   "iteration",  "tree_depth",
    "error_rate", "class_error_nn", "class_error_majority"};
const std::vector<std::string> kTimingColumns = {
    "experiment", "dataset", "variant", "npc", "length_group", "n_centroids",
    "seed", "iteration", "tree_time", "search_time"};

std::vector<std::string> with_cluster_columns(std::vector<std::string> cols, bool cluster,
                                              bool comm) {
  if (!cluster) return cols;
  auto at = std::find(cols.begin(), cols.end(), "iteration");
  at = cols.insert(at, "node");
  if (comm) cols.push_back("comm_messages");
  return cols;
}

std::vector<std::string> record_row(const BenchRecord& r) {
  std::vector<std::string> row = {r.experiment, r.dataset, r.variant, fmt(r.npc), fmt(r.n),
                                  fmt(r.length_group), fmt(r.n_centroids), fmt(r.seed, 0)};
  if (r.node) row.push_back(fmt(*r.node, 0));
  row.insert(row.end(), {fmt(r.iteration), fmt(r.tree_depth), fmt(r.error_rate),
                         fmt(r.class_error_nn), fmt(r.class_error_majority)});
  if (r.comm_messages) row.push_back(fmt(*r.comm_messages, 0));
  return row;
}

std::vector<std::string> timing_row(const BenchRecord& r) {
  std::vector<std::string> row = {r.experiment, r.dataset, r.variant, fmt(r.npc),
                                  fmt(r.length_group), fmt(r.n_centroids), fmt(r.seed, 0)};
  if (r.node) row.push_back(fmt(*r.node, 0));
  row.insert(row.end(), {fmt(r.iteration), fmt(r.tree_time), fmt(r.search_time)});
  return row;
}

void add_record(ExperimentOutput& out, const BenchRecord& r) {
  r.validate();
  out.main.rows.push_back(record_row(r));
  out.timings.rows.push_back(timing_row(r));
}

std::pair<double, double> class_errors(const MultilevelIndex& index, const Dataset& data) {
  if (!data.has_labels()) return {0.0, 0.0};
  return {classification_error(index, data, ClassifyRule::NearestNeighbor),
          classification_error(index, data, ClassifyRule::PartitionMajority)};
}

// Builds, then runs `iterations` relocation rounds, one record per round.
// Returns the records so callers can summarize them.
std::vector<BenchRecord> bench_cell(const BenchRecord& proto, const Dataset& data,
                                    const BuildParams& params, const Metric& metric,
                                    std::size_t iterations) {
  std::vector<BenchRecord> out;
  auto t0 = Clock::now();
  MultilevelIndex index = MultilevelIndex::build(data, params, metric);
  double build_time = seconds_since(t0);
  auto last = Clock::now();
  relocate_and_rebuild(index, data, iterations,
                       [&](std::size_t it, const MultilevelIndex& ix, double error) {
                         double elapsed = seconds_since(last);
                         auto ts = Clock::now();
                         double check = exhaustive_error(ix, data);
                         double search_time = seconds_since(ts);
                         if (check != error) throw std::logic_error("exhaustive error is not reproducible");
                         BenchRecord r = proto;
                         r.n = data.size();
                         r.iteration = it;
                         r.tree_depth = ix.depth();
                         r.error_rate = error;
                         std::tie(r.class_error_nn, r.class_error_majority) = class_errors(ix, data);
                         r.search_time = search_time;
                         // rebuild rounds also re-run the miss scan; subtract one search
                         r.tree_time = it == 0 ? build_time : std::max(0.0, elapsed - search_time);
                         out.push_back(r);
                         last = Clock::now();
                       });
  return out;
}

Table summary_table() {
  return Table{{"experiment", "dataset", "variant", "npc", "length_group", "n_centroids", "seed",
                "initial_error", "best_iteration", "best_error", "best_class_iteration",
                "best_class_error_nn"},
               {}};
}

void add_summary(Table& t, const std::vector<BenchRecord>& recs) {
  if (recs.empty()) return;
  auto best = std::min_element(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
    return a.error_rate < b.error_rate;
  });
  auto best_cls = std::min_element(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
    return a.class_error_nn < b.class_error_nn;
  });
  const BenchRecord& r = recs.front();
  t.rows.push_back({r.experiment, r.dataset, r.variant, fmt(r.npc), fmt(r.length_group),
                    fmt(r.n_centroids), fmt(r.seed, 0), fmt(r.error_rate), fmt(best->iteration),
                    fmt(best->error_rate), fmt(best_cls->iteration), fmt(best_cls->class_error_nn)});
}

double mean_cover(const Dataset& data, std::span<const Vector> centroids, double* max_out) {
  double sum = 0.0, mx = 0.0;
  for (const Vector& p : data.points()) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& c : centroids) best = std::min(best, distance(Metric::l2(), p, c));
    sum += best;
    mx = std::max(mx, best);
  }
  if (max_out) *max_out = mx;
  return sum / static_cast<double>(data.size());
}

std::vector<ElementId> brute_force_knn(const Dataset& data, const Metric& metric, const Vector& q,
                                       std::size_t k) {
  std::vector<std::pair<double, ElementId>> all;
  all.reserve(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) all.emplace_back(distance(metric, q, data.point(r)), data.id(r));
  std::sort(all.begin(), all.end());
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  if (!parse_metric(metric)) throw std::invalid_argument("unknown metric '" + metric + "'");
  if (data.empty() && experiment != "text_bench") {
    parse_preset(preset);
    if (npc.empty()) throw std::invalid_argument("npc list is empty");
  }
  if (seeds.empty()) throw std::invalid_argument("seeds list is empty");
  if (experiment != "bombard") {
    if (grid.empty()) throw std::invalid_argument("parameter grid is empty");
    for (auto [lg, nc] : grid) {
      BuildParams p;
      p.length_group = lg;
      p.n_centroids = nc;
      try {
        p.validate();
      } catch (const std::exception& e) {
        throw std::invalid_argument("grid pair (" + std::to_string(lg) + "," + std::to_string(nc) +
                                    "): " + e.what());
      }
    }
  }
  if (experiment == "cluster_bench") {
    if (nodes == 0) throw std::invalid_argument("nodes must be >= 1");
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    for (double e : epsilons) {
      if (std::isnan(e) || e < 0) throw std::invalid_argument("epsilons must be >= 0");
    }
  }
  if (experiment == "bombard") {
    if (bombard_groups == 0) throw std::invalid_argument("bombard_groups must be >= 1");
    if (topdown_k.empty() || bottomup_k.empty()) throw std::invalid_argument("bombard k lists are empty");
  }
  if (experiment == "text_bench" && stemming.empty()) throw std::invalid_argument("stemming list is empty");
}

std::string ExperimentConfig::to_json() const { return to_json_value(*this).dump(2); }

std::uint64_t ExperimentConfig::hash() const {
  json j = to_json_value(*this);
  j.erase("threads");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "gauss_bench") {
    c.preset = "GRO";
    c.seeds = {1, 2, 3, 4, 5};
    c.iterations = 8;
  } else if (experiment == "size_sweep") {
    c.preset = "GNO";
    c.npc = {200, 1000, 2000, 5000, 10000};
  } else if (experiment == "param_sweep") {
    c.preset = "GNO";
    c.npc = {10000};
    c.grid = {{10, 5}, {30, 15}, {50, 25}, {70, 35}, {90, 45}, {110, 55}};
  } else if (experiment == "ratio_sweep") {
    c.preset = "GMO";
    c.npc = {1000};
    c.grid = {{32, 2}, {32, 4}, {32, 8}, {32, 16}};
  } else if (experiment == "text_bench") {
    c.iterations = 10;
  } else if (experiment == "cluster_bench") {
    c.preset = "GNO";
  } else if (experiment != "bombard") {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  return c;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c = default_config(j.value("experiment", std::string("gauss_bench")));
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") continue;
      else if (key == "preset") c.preset = v.get<std::string>();
      else if (key == "n_clouds") c.n_clouds = v.get<std::size_t>();
      else if (key == "npc") c.npc = v.get<std::vector<std::size_t>>();
      else if (key == "sigma") c.sigma = v.get<double>();
      else if (key == "data") c.data = v.get<std::string>();
      else if (key == "grid") c.grid = v.get<std::vector<std::pair<std::size_t, std::size_t>>>();
      else if (key == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
      else if (key == "iterations") c.iterations = v.get<std::size_t>();
      else if (key == "metric") c.metric = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<std::size_t>();
      else if (key == "corpus") c.corpus = v.get<std::string>();
      else if (key == "categories") c.categories = v.get<std::vector<std::pair<std::string, std::string>>>();
      else if (key == "stemming") c.stemming = v.get<std::vector<bool>>();
      else if (key == "synthetic") {
        auto& s = c.synthetic;
        s.labels = v.value("labels", s.labels);
        s.docs_per_class = v.value("docs_per_class", s.docs_per_class);
        s.words_per_doc = v.value("words_per_doc", s.words_per_doc);
        s.vocab_per_class = v.value("vocab_per_class", s.vocab_per_class);
        s.shared_vocab = v.value("shared_vocab", s.shared_vocab);
        s.overlap = v.value("overlap", s.overlap);
        s.seed = RngSeed{v.value("seed", s.seed.value)};
      }
      else if (key == "nodes") c.nodes = v.get<std::size_t>();
      else if (key == "partition_seed") c.partition_seed = v.get<std::uint64_t>();
      else if (key == "epsilon" || key == "epsilons") {
        c.epsilons.clear();
        if (v.is_array()) {
          for (const auto& e : v) c.epsilons.push_back(epsilon_from_json(e));
        } else {
          c.epsilons.push_back(epsilon_from_json(v));
        }
      }
      else if (key == "k") c.k = v.get<std::size_t>();
      else if (key == "queries") c.queries = v.get<std::size_t>();
      else if (key == "topdown_k") c.topdown_k = v.get<std::vector<std::size_t>>();
      else if (key == "bottomup_k") c.bottomup_k = v.get<std::vector<std::size_t>>();
      else if (key == "bombard_groups") c.bombard_groups = v.get<std::size_t>();
      else if (key == "bombard_npc") c.bombard_npc = v.get<std::size_t>();
      else throw std::invalid_argument("unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void BenchRecord::validate() const {
  auto fraction = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!fraction(error_rate) || !fraction(class_error_nn) || !fraction(class_error_majority)) {
    throw std::logic_error("bench record: error rate outside [0, 1]");
  }
  if (!(tree_time >= 0.0) || !(search_time >= 0.0)) throw std::logic_error("bench record: negative time");
  if (iteration == 0 && tree_depth != predicted_depth(n, length_group, n_centroids)) {
    throw std::logic_error("bench record: depth " + std::to_string(tree_depth) +
                           " does not match the layer recurrence");
  }
}

void Table::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
}

ExperimentOutput run_index_bench(const ExperimentConfig& c) {
  c.validate();
  const Metric metric = config_metric(c);
  ExperimentOutput out;
  out.main.columns = kRecordColumns;
  out.timings.columns = kTimingColumns;
  Table summary = summary_table();
  const std::vector<std::size_t> sizes = c.data.empty() ? c.npc : std::vector<std::size_t>{0};
  for (std::size_t npc : sizes) {
    for (auto [lg, nc] : c.grid) {
      for (std::uint64_t seed : c.seeds) {
        Source src = make_source(c, npc, seed);
        BenchRecord proto;
        proto.experiment = c.experiment;
        proto.dataset = src.name;
        proto.variant = c.metric;
        proto.npc = src.npc;
        proto.length_group = lg;
        proto.n_centroids = nc;
        proto.seed = seed;
        std::vector<BenchRecord> recs;
        try {
          recs = bench_cell(proto, src.data, make_params(c, lg, nc, seed), metric, c.iterations);
        } catch (const std::exception& e) {
          throw std::runtime_error(c.experiment + " npc=" + std::to_string(npc) + " grid=(" +
                                   std::to_string(lg) + "," + std::to_string(nc) +
                                   ") seed=" + std::to_string(seed) + ": " + e.what());
        }
        for (const auto& r : recs) add_record(out, r);
        add_summary(summary, recs);
      }
    }
  }
  out.extra.emplace_back("summary", std::move(summary));
  return out;
}

ExperimentOutput run_text_bench(const ExperimentConfig& c) {
  c.validate();
  const Metric metric = config_metric(c);
  ExperimentOutput out;
  out.main.columns = kRecordColumns;
  out.timings.columns = kTimingColumns;
  Table summary = summary_table();

  std::vector<std::pair<std::string, std::string>> pairs = c.categories;
  std::optional<std::string> synthetic_text;
  if (c.corpus.empty()) {
    std::ostringstream tsv;
    write_corpus_tsv(tsv, gen_synthetic_corpus(c.synthetic));
    synthetic_text = tsv.str();
    if (pairs.empty()) pairs.emplace_back(c.synthetic.labels.at(0), c.synthetic.labels.at(1));
  }
  if (pairs.empty()) throw std::invalid_argument("text_bench: no category pairs given");

  for (const auto& pair : pairs) {
    Corpus corpus;
    if (synthetic_text) {
      std::istringstream in(*synthetic_text);
      corpus = parse_reuters_like(in, pair);
    } else {
      corpus = load_reuters_like(c.corpus, pair);
    }
    for (bool stem : c.stemming) {
      TermDocumentMatrix m = tfidf_encode(corpus, stem ? StemmingHook(suffix_stem) : StemmingHook{});
      Dataset data = m.to_dataset();
      for (auto [lg, nc] : c.grid) {
        for (std::uint64_t seed : c.seeds) {
          BenchRecord proto;
          proto.experiment = c.experiment;
          proto.dataset = pair.first + "/" + pair.second;
          proto.variant = stem ? "stem" : "plain";
          proto.length_group = lg;
          proto.n_centroids = nc;
          proto.seed = seed;
          std::vector<BenchRecord> recs;
          try {
            recs = bench_cell(proto, data, make_params(c, lg, nc, seed), metric, c.iterations);
          } catch (const std::exception& e) {
            throw std::runtime_error("text_bench " + proto.dataset + " " + proto.variant + ": " + e.what());
          }
          for (const auto& r : recs) add_record(out, r);
          add_summary(summary, recs);
        }
      }
    }
  }
  out.extra.emplace_back("summary", std::move(summary));
  return out;
}

ExperimentOutput run_cluster_bench(const ExperimentConfig& c) {
  c.validate();
  const Metric metric = config_metric(c);
  ExperimentOutput out;
  out.main.columns = with_cluster_columns(kRecordColumns, true, true);
  out.timings.columns = with_cluster_columns(kTimingColumns, true, false);
  Table routing{{"dataset", "npc", "length_group", "n_centroids", "seed", "nodes", "epsilon", "k",
                 "queries", "recall", "mean_routed", "empty_routes"},
                {}};
  const std::vector<std::size_t> sizes = c.data.empty() ? c.npc : std::vector<std::size_t>{0};
  for (std::size_t npc : sizes) {
    for (auto [lg, nc] : c.grid) {
      for (std::uint64_t seed : c.seeds) {
        Source src = make_source(c, npc, seed);
        auto parts = split_among_nodes(src.data, c.nodes, RngSeed{c.partition_seed});
        Transport transport;
        BuildParams params = make_params(c, lg, nc, seed);
        params.threads = 1;
        Cluster cluster = build_cluster(parts, params, metric, &transport, std::nullopt, c.threads);
        const std::uint64_t comm = transport.node_messages();

        for (std::size_t i = 0; i < cluster.nodes.size(); ++i) {
          const NodeHandle& node = cluster.nodes[i];
          const Dataset& local = node.partitions()[0];
          const MultilevelIndex& ix = node.indexes()[0];
          BenchRecord r;
          r.experiment = c.experiment;
          r.dataset = src.name;
          r.variant = c.metric;
          r.npc = src.npc;
          r.n = local.size();
          r.length_group = lg;
          r.n_centroids = nc;
          r.seed = seed;
          r.node = node.id();
          r.tree_depth = ix.depth();
          r.tree_time = cluster.build_seconds[i];
          auto ts = Clock::now();
          r.error_rate = exhaustive_error(ix, local);
          r.search_time = seconds_since(ts);
          std::tie(r.class_error_nn, r.class_error_majority) = class_errors(ix, local);
          r.comm_messages = comm;
          add_record(out, r);
        }

        Engine rng = make_engine(derive_seed(RngSeed{seed}, {stream::kCluster, 1}));
        std::uniform_int_distribution<std::size_t> pick(0, src.data.size() - 1);
        std::vector<std::size_t> qrows(c.queries);
        for (auto& q : qrows) q = pick(rng);
        std::vector<std::vector<ElementId>> truth;
        for (std::size_t q : qrows) truth.push_back(brute_force_knn(src.data, metric, src.data.point(q), c.k));

        for (double eps : c.epsilons) {
          double recall = 0.0, routed = 0.0;
          std::size_t empty = 0;
          for (std::size_t i = 0; i < qrows.size(); ++i) {
            ClusterQueryResult r = cluster_knn(cluster, src.data.point(qrows[i]), c.k, eps);
            std::set<ElementId> want(truth[i].begin(), truth[i].end());
            std::size_t got = 0;
            for (const auto& h : r.hits) got += want.count(h.id);
            recall += want.empty() ? 1.0 : static_cast<double>(got) / static_cast<double>(want.size());
            routed += static_cast<double>(r.routed.size());
            empty += r.empty_route;
          }
          const double nq = qrows.empty() ? 1.0 : static_cast<double>(qrows.size());
          routing.rows.push_back({src.name, fmt(src.npc), fmt(lg), fmt(nc), fmt(seed, 0),
                                  fmt(c.nodes), fmt(eps), fmt(c.k), fmt(c.queries),
                                  fmt(recall / nq), fmt(routed / nq), fmt(empty)});
        }
      }
    }
  }
  out.extra.emplace_back("routing", std::move(routing));
  return out;
}

ExperimentOutput run_bombard(const ExperimentConfig& c) {
  c.validate();
  ExperimentOutput out;
  out.main.columns = {"test", "k_per_group", "groups", "total_centroids", "seed", "mean_cover", "max_cover"};
  out.timings.columns = {"test", "k_per_group", "seed", "fit_time"};
  Table cents{{"test", "k_per_group", "seed", "group", "index"}, {}};
  bool coords_named = false;

  for (std::uint64_t seed : c.seeds) {
    const Dataset data = c.data.empty() ? gen_clouds(bombard_demo_spec(RngSeed{seed}, c.bombard_npc))
                                        : load_dataset(c.data);
    if (!coords_named) {
      for (std::size_t d = 0; d < data.dim(); ++d) cents.columns.push_back("x" + std::to_string(d));
      coords_named = true;
    }
    auto emit = [&](const std::string& test, std::size_t k, std::size_t groups,
                    const std::vector<std::vector<Vector>>& per_group, double fit_time) {
      std::vector<Vector> all;
      for (std::size_t g = 0; g < per_group.size(); ++g) {
        for (std::size_t i = 0; i < per_group[g].size(); ++i) {
          std::vector<std::string> row = {test, fmt(k), fmt(seed, 0), fmt(g), fmt(i)};
          for (double x : per_group[g][i].densify().values()) row.push_back(fmt(x));
          cents.rows.push_back(std::move(row));
          all.push_back(per_group[g][i]);
        }
      }
      double mx = 0.0;
      double mean = mean_cover(data, all, &mx);
      out.main.rows.push_back({test, fmt(k), fmt(groups), fmt(all.size()), fmt(seed, 0), fmt(mean), fmt(mx)});
      out.timings.rows.push_back({test, fmt(k), fmt(seed, 0), fmt(fit_time)});
    };

    for (std::size_t k : c.topdown_k) {
      auto t0 = Clock::now();
      KMeansResult r = kmeans_fit(data.points(), k, derive_seed(RngSeed{seed}, {stream::kKMeans, k}));
      emit("topdown", k, 1, {r.centroids}, seconds_since(t0));
    }

    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), 0);
    Engine rng = make_engine(derive_seed(RngSeed{seed}, {stream::kPartition}));
    std::shuffle(rows.begin(), rows.end(), rng);
    std::vector<std::vector<Vector>> groups;
    std::size_t at = 0;
    for (std::size_t size : balanced_chunk_sizes(rows.size(), c.bombard_groups)) {
      std::vector<Vector> g;
      for (std::size_t i = at; i < at + size; ++i) g.push_back(data.point(rows[i]));
      at += size;
      groups.push_back(std::move(g));
    }
    for (std::size_t k : c.bottomup_k) {
      auto t0 = Clock::now();
      std::vector<std::vector<Vector>> per_group;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        per_group.push_back(
            kmeans_fit(groups[g], k, derive_seed(RngSeed{seed}, {stream::kKMeans, k, g})).centroids);
      }
      emit("bottomup", k, groups.size(), per_group, seconds_since(t0));
    }
  }
  out.extra.emplace_back("centroids", std::move(cents));
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& c) {
  c.validate();
  if (c.experiment == "bombard") return run_bombard(c);
  if (c.experiment == "text_bench") return run_text_bench(c);
  if (c.experiment == "cluster_bench") return run_cluster_bench(c);
  return run_index_bench(c);
}

std::string csv_header_line(const ExperimentConfig& c) {
  std::ostringstream s;
  s << "# mask-bench v1 experiment=" << c.experiment << " config_hash=" << std::hex
    << std::setw(16) << std::setfill('0') << c.hash();
  return s.str();
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& c, const ExperimentOutput& o,
                                                 const std::filesystem::path& out) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& p, const Table& t) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << csv_header_line(c) << '\n';
    t.write(f);
    written.push_back(p);
  };
  if (out.empty()) {
    std::cout << csv_header_line(c) << '\n';
    o.main.write(std::cout);
    return written;
  }
  emit(out, o.main);
  emit(out.string() + ".timings.csv", o.timings);
  for (const auto& [suffix, t] : o.extra) emit(out.string() + "." + suffix + ".csv", t);
  return written;
}

}  // namespace mask::bench
