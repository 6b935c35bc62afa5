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

// mask: build, query and benchmark multilevel k-means indexes.
//
// Failures print one line `error: <message>` on stderr and exit with 1
// (2 for command-line usage errors).

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiments/experiments.hpp"
#include "mask/clouds.hpp"
#include "mask/dataset_io.hpp"
#include "mask/index_io.hpp"
#include "mask/text.hpp"

namespace {

using namespace mask;
using nlohmann::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Vector parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream s(text);
  std::string cell;
  while (std::getline(s, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("--point: '" + cell + "' is not a number");
    }
  }
  if (v.empty()) throw UsageError("--point is empty");
  return Vector::dense(std::move(v));
}

double parse_epsilon(const std::string& s) {
  if (s == "inf" || s == "infinity") return kBroadcast;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw UsageError("--epsilon: '" + s + "' is not a number or 'inf'");
  }
}

Metric metric_named(const std::string& name) {
  auto m = parse_metric(name);
  if (!m) throw UsageError("--metric must be l1, l2 or linf");
  return *m;
}

RangeMode mode_named(const std::string& name) {
  if (name == "paper_faithful") return RangeMode::PaperFaithful;
  if (name == "cover_expanded") return RangeMode::CoverExpanded;
  throw UsageError("--mode must be paper_faithful or cover_expanded");
}

void write_manifest(const std::filesystem::path& out, const json& manifest) {
  std::ofstream f(out.string() + ".manifest.json");
  if (!f) throw std::runtime_error("cannot write manifest for " + out.string());
  f << manifest.dump(2) << '\n';
}

void print_hits(std::ostream& os, std::size_t query, const QueryResult& r) {
  for (const Hit& h : r.hits) os << query << ',' << h.id << ',' << format_double(h.distance) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mask: multilevel k-means similarity-search index"};
  app.require_subcommand(1);

  // shared flags
  std::size_t length_group = 16, n_centroids = 8, iterations = 0, threads = 1;
  std::uint64_t seed = 1;
  std::string metric = "l2", mode = "cover_expanded", out;
  auto add_index_flags = [&](CLI::App* c) {
    c->add_option("--length-group", length_group, "points per group")->capture_default_str();
    c->add_option("--n-centroids", n_centroids, "k-means centroids per group")->capture_default_str();
    c->add_option("--seed", seed, "random seed")->capture_default_str();
    c->add_option("--metric", metric, "l1, l2 or linf")->capture_default_str();
    c->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  };

  // gen
  auto* gen = app.add_subcommand("gen", "generate a dataset");
  std::string gen_kind = "clouds", preset = "GRO", family = "gaussian";
  std::size_t n_clouds = 8, npc = 200, docs = 40, words = 30, vocab = 60;
  double sigma = 1.0, dof = 12.0, overlap = 0.0;
  std::string corpus_path, categories;
  bool stem = false;
  gen->add_option("kind", gen_kind, "clouds | bombard | corpus | tfidf")->capture_default_str();
  gen->add_option("--preset", preset, "GNO, GMO or GRO")->capture_default_str();
  gen->add_option("--n-clouds", n_clouds)->capture_default_str();
  gen->add_option("--npc", npc, "points per cloud")->capture_default_str();
  gen->add_option("--sigma", sigma)->capture_default_str();
  gen->add_option("--family", family, "gaussian or student_t")->capture_default_str();
  gen->add_option("--dof", dof, "student-t degrees of freedom")->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--docs", docs, "synthetic corpus: documents per class")->capture_default_str();
  gen->add_option("--words", words, "synthetic corpus: words per document")->capture_default_str();
  gen->add_option("--vocab", vocab, "synthetic corpus: words per class")->capture_default_str();
  gen->add_option("--overlap", overlap, "synthetic corpus: shared-word probability")->capture_default_str();
  gen->add_option("--corpus", corpus_path, "tfidf: input corpus (TSV or Reuters SGML)");
  gen->add_option("--categories", categories, "tfidf: two categories, comma separated");
  gen->add_flag("--stem", stem, "tfidf: apply the suffix stemmer");
  gen->add_option("--out", out, "output file")->required();

  // build
  auto* build = app.add_subcommand("build", "build an index snapshot");
  std::string data_path;
  add_index_flags(build);
  build->add_option("--data", data_path, "dataset (dense CSV or sparse)")->required();
  build->add_option("--out", out, "index snapshot")->required();

  // query
  auto* query = app.add_subcommand("query", "query an index");
  std::string index_path, point_text, queries_path, qtype = "knn";
  std::size_t k = 10;
  double radius = 0.0;
  query->add_option("--index", index_path)->required();
  query->add_option("--type", qtype, "point, knn or range")->capture_default_str();
  query->add_option("--point", point_text, "comma-separated coordinates");
  query->add_option("--queries", queries_path, "dataset file; every row is a query");
  query->add_option("--k", k)->capture_default_str();
  query->add_option("--radius", radius)->capture_default_str();
  query->add_option("--mode", mode, "paper_faithful or cover_expanded")->capture_default_str();
  query->add_option("--out", out, "output CSV (stdout when omitted)");

  // insert
  auto* insert = app.add_subcommand("insert", "insert a point into an index");
  std::uint64_t new_id = 0;
  std::size_t split_threshold = 0;
  insert->add_option("--index", index_path)->required();
  insert->add_option("--point", point_text)->required();
  insert->add_option("--id", new_id)->required();
  insert->add_option("--split-threshold", split_threshold,
                     "split the partition when it grows beyond this size (0 = never)");
  insert->add_option("--out", out, "updated snapshot (default: overwrite --index)");

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment");
  std::string experiment = "gauss_bench", config_path;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> npcs;
  bench->add_option("--experiment", experiment, "bombard, gauss_bench, size_sweep, param_sweep, "
                                                "ratio_sweep, text_bench, cluster_bench")
      ->capture_default_str();
  bench->add_option("--config", config_path, "JSON experiment config");
  bench->add_option("--length-group", length_group);
  bench->add_option("--n-centroids", n_centroids);
  bench->add_option("--seed", seeds, "seed(s)");
  bench->add_option("--npc", npcs, "points per cloud (repeatable)");
  bench->add_option("--preset", preset);
  bench->add_option("--data", data_path);
  bench->add_option("--corpus", corpus_path);
  bench->add_option("--iterations", iterations);
  bench->add_option("--metric", metric);
  bench->add_option("--threads", threads);
  bench->add_option("--out", out, "main CSV (stdout when omitted)");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "simulate a distributed deployment");
  std::string topology_path;
  std::vector<std::string> epsilons;
  std::size_t nodes = 4, n_queries = 100;
  std::uint64_t partition_seed = 7;
  add_index_flags(cluster);
  cluster->add_option("--topology", topology_path, "JSON: nodes, partition_seed, epsilon");
  cluster->add_option("--nodes", nodes)->capture_default_str();
  cluster->add_option("--partition-seed", partition_seed)->capture_default_str();
  cluster->add_option("--epsilon", epsilons, "routing threshold(s); 'inf' broadcasts");
  cluster->add_option("--k", k)->capture_default_str();
  cluster->add_option("--queries", n_queries)->capture_default_str();
  cluster->add_option("--preset", preset)->capture_default_str();
  cluster->add_option("--npc", npc)->capture_default_str();
  cluster->add_option("--data", data_path);
  cluster->add_option("--out", out, "main CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*gen) {
      json manifest = {{"kind", gen_kind}, {"seed", seed}};
      if (gen_kind == "clouds" || gen_kind == "bombard") {
        CloudSpec spec = gen_kind == "bombard"
                             ? bombard_demo_spec(RngSeed{seed}, npc)
                             : preset_spec(parse_preset(preset), n_clouds, npc, RngSeed{seed}, sigma);
        if (gen_kind == "clouds" && family == "student_t") {
          spec.family = CloudFamily::StudentT;
          spec.dof = dof;
        } else if (family != "gaussian" && family != "student_t") {
          throw UsageError("--family must be gaussian or student_t");
        }
        Dataset d = gen_clouds(spec);
        save_dataset(out, d);
        manifest.update({{"preset", gen_kind == "bombard" ? "bombard" : preset},
                         {"n_clouds", spec.n_clouds},
                         {"points_per_cloud", spec.points_per_cloud},
                         {"sigma", spec.sigma},
                         {"family", spec.family == CloudFamily::Gaussian ? "gaussian" : "student_t"},
                         {"dof", spec.dof},
                         {"measured_overlap", measured_overlap(spec, d)}});
        json means = json::array();
        for (const Vector& m : spec.means) means.push_back(m.densify().values());
        manifest["means"] = means;
      } else if (gen_kind == "corpus") {
        SyntheticCorpusSpec spec;
        spec.docs_per_class = docs;
        spec.words_per_doc = words;
        spec.vocab_per_class = vocab;
        spec.overlap = overlap;
        spec.seed = RngSeed{seed};
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        write_corpus_tsv(f, gen_synthetic_corpus(spec));
        manifest.update({{"labels", spec.labels}, {"docs_per_class", docs}, {"words_per_doc", words},
                         {"vocab_per_class", vocab}, {"shared_vocab", spec.shared_vocab},
                         {"overlap", overlap}});
      } else if (gen_kind == "tfidf") {
        auto comma = categories.find(',');
        if (corpus_path.empty() || comma == std::string::npos) {
          throw UsageError("tfidf needs --corpus and --categories a,b");
        }
        std::pair<std::string, std::string> pair{categories.substr(0, comma), categories.substr(comma + 1)};
        Corpus corpus = load_reuters_like(corpus_path, pair);
        TermDocumentMatrix m = tfidf_encode(corpus, stem ? StemmingHook(suffix_stem) : StemmingHook{});
        save_dataset(out, m.to_dataset());
        manifest.update({{"corpus", corpus_path}, {"categories", {pair.first, pair.second}},
                         {"stemming", stem}, {"documents", m.n()}, {"terms", m.terms.size()}});
      } else {
        throw UsageError("gen kind must be clouds, bombard, corpus or tfidf");
      }
      write_manifest(out, manifest);
      std::cout << "wrote " << out << '\n';
    } else if (*build) {
      Dataset d = load_dataset(data_path);
      BuildParams p;
      p.length_group = length_group;
      p.n_centroids = n_centroids;
      p.seed = RngSeed{seed};
      p.threads = threads;
      auto t0 = std::chrono::steady_clock::now();
      MultilevelIndex ix = MultilevelIndex::build(d, p, metric_named(metric));
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      save_index(out, ix);
      std::cout << "elements=" << ix.size() << " depth=" << ix.depth()
                << " partitions=" << ix.partition_count() << " tree_time=" << secs << '\n';
    } else if (*query) {
      MultilevelIndex ix = load_index(index_path);
      std::vector<Vector> qs;
      if (!point_text.empty()) qs.push_back(parse_point(point_text));
      if (!queries_path.empty()) {
        Dataset d = load_dataset(queries_path);
        qs.insert(qs.end(), d.points().begin(), d.points().end());
      }
      if (qs.empty()) throw UsageError("give --point or --queries");
      std::ofstream file;
      if (!out.empty()) {
        file.open(out);
        if (!file) throw std::runtime_error("cannot write " + out);
      }
      std::ostream& os = out.empty() ? std::cout : file;
      if (qtype == "point") {
        os << "query,match,partition\n";
        for (std::size_t i = 0; i < qs.size(); ++i) {
          PointQueryResult r = ix.point_query(qs[i]);
          os << i << ',' << (r.match ? std::to_string(*r.match) : "none") << ',' << r.partition << '\n';
        }
      } else if (qtype == "knn" || qtype == "range") {
        os << "query,id,distance\n";
        RangeMode m = mode_named(mode);
        for (std::size_t i = 0; i < qs.size(); ++i) {
          print_hits(os, i, qtype == "knn" ? ix.knn_query(qs[i], k) : ix.range_query(qs[i], radius, m));
        }
      } else {
        throw UsageError("--type must be point, knn or range");
      }
    } else if (*insert) {
      MultilevelIndex ix = load_index(index_path);
      std::size_t p = ix.insert(parse_point(point_text), new_id);
      bool split = false;
      if (split_threshold > 0 && ix.partition(p).size() > split_threshold) {
        ix.split_partition(p, split_threshold);
        split = true;
      }
      save_index(out.empty() ? index_path : out, ix);
      std::cout << "partition=" << p << " split=" << (split ? "yes" : "no")
                << " partitions=" << ix.partition_count() << '\n';
    } else if (*bench || *cluster) {
      bench::ExperimentConfig c;
      if (*bench) {
        c = config_path.empty() ? bench::default_config(experiment) : bench::load_config(config_path);
        if (bench->count("--experiment") && c.experiment != experiment) {
          throw UsageError("--experiment disagrees with the config file");
        }
      } else {
        c = bench::default_config("cluster_bench");
        if (!topology_path.empty()) {
          std::ifstream f(topology_path);
          if (!f) throw std::runtime_error("cannot open " + topology_path);
          std::stringstream buf;
          buf << f.rdbuf();
          json t = json::parse(buf.str());
          t["experiment"] = "cluster_bench";
          c = bench::parse_config(t.dump());
        }
        if (cluster->count("--nodes")) c.nodes = nodes;
        if (cluster->count("--partition-seed")) c.partition_seed = partition_seed;
        if (cluster->count("--k")) c.k = k;
        if (cluster->count("--queries")) c.queries = n_queries;
        if (cluster->count("--npc")) c.npc = {npc};
        if (cluster->count("--seed")) c.seeds = {seed};
        if (!epsilons.empty()) {
          c.epsilons.clear();
          for (const auto& e : epsilons) c.epsilons.push_back(parse_epsilon(e));
        }
      }
      auto* sub = *bench ? bench : cluster;
      if (sub->count("--length-group") || sub->count("--n-centroids")) {
        std::size_t lg = sub->count("--length-group") ? length_group : c.grid.front().first;
        std::size_t nc = sub->count("--n-centroids") ? n_centroids : c.grid.front().second;
        c.grid = {{lg, nc}};
      }
      if (sub->count("--preset")) c.preset = preset;
      if (sub->count("--data")) c.data = data_path;
      if (sub->count("--metric")) c.metric = metric;
      if (sub->count("--threads")) c.threads = threads;
      if (*bench) {
        if (!seeds.empty()) c.seeds = seeds;
        if (!npcs.empty()) c.npc = npcs;
        if (bench->count("--corpus")) c.corpus = corpus_path;
        if (bench->count("--iterations")) c.iterations = iterations;
      }
      c.validate();
      auto result = bench::run_experiment(c);
      auto files = bench::write_outputs(c, result, out);
      for (const auto& f : files) std::cerr << "wrote " << f.string() << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
