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

#include <algorithm>
#include <map>
#include <stdexcept>

#include "mask/index.hpp"
#include "parallel.hpp"

namespace mask {

std::vector<Miss> exhaustive_misses(const MultilevelIndex& index, const Dataset& data) {
  std::vector<char> missed(data.size(), 0);
  std::vector<std::size_t> reached(data.size(), 0);
  detail::parallel_for(data.size(), index.params().threads, [&](std::size_t row) {
    PointQueryResult r = index.point_query(data.point(row));
    if (!r.found(data.id(row))) {
      missed[row] = 1;
      reached[row] = r.partition;
    }
  });
  std::vector<Miss> out;
  for (std::size_t row = 0; row < data.size(); ++row) {
    if (missed[row]) out.push_back({row, reached[row]});
  }
  return out;
}

double exhaustive_error(const MultilevelIndex& index, const Dataset& data) {
  if (data.empty()) return 0.0;
  return static_cast<double>(exhaustive_misses(index, data).size()) /
         static_cast<double>(data.size());
}

RelocationReport relocate_and_rebuild(const MultilevelIndex& index, const Dataset& data,
                                      std::size_t iterations,
                                      const RelocationObserver& observer) {
  RelocationReport report;
  MultilevelIndex current = index;
  std::vector<Miss> misses = exhaustive_misses(current, data);
  auto rate = [&](std::size_t count) {
    return data.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(data.size());
  };
  report.errors.push_back(rate(misses.size()));
  if (observer) observer(0, current, report.errors.back());

  for (std::size_t it = 1; it <= iterations; ++it) {
    // partitions as dataset rows
    std::vector<std::vector<std::size_t>> partitions(current.partition_count());
    std::vector<std::size_t> where(data.size(), 0);
    for (std::size_t p = 0; p < current.partition_count(); ++p) {
      for (std::size_t slot : current.partition(p)) {
        auto row = data.row_of(current.id(slot));
        if (!row) throw std::invalid_argument("relocation: index holds ids missing from the dataset");
        partitions[p].push_back(*row);
        where[*row] = p;
      }
    }
    for (const Miss& m : misses) where[m.row] = m.reached;
    for (auto& p : partitions) p.clear();
    for (std::size_t row = 0; row < data.size(); ++row) partitions[where[row]].push_back(row);

    BuildParams params = current.params();
    params.seed = RngSeed{index.params().seed.value + it};
    current = MultilevelIndex::build_from_partitions(data, std::move(partitions), params,
                                                     current.metric(), true);
    misses = exhaustive_misses(current, data);
    report.errors.push_back(rate(misses.size()));
    if (observer) observer(it, current, report.errors.back());
  }
  report.best_iteration = static_cast<std::size_t>(
      std::min_element(report.errors.begin(), report.errors.end()) - report.errors.begin());
  report.final_index = std::move(current);
  return report;
}

std::optional<std::string> classify(const MultilevelIndex& index, const Dataset& labelled,
                                    const Vector& q, ClassifyRule rule,
                                    std::optional<ElementId> exclude) {
  if (!labelled.has_labels()) throw std::invalid_argument("classify: dataset has no labels");
  auto label_of = [&](ElementId id) -> const std::string& {
    auto row = labelled.row_of(id);
    if (!row) throw std::invalid_argument("classify: id " + std::to_string(id) + " not in dataset");
    return labelled.label(*row);
  };

  if (rule == ClassifyRule::NearestNeighbor) {
    QueryResult r = index.knn_query(q, exclude ? 2 : 1);
    for (const Hit& h : r.hits) {
      if (exclude && h.id == *exclude) continue;
      return label_of(h.id);
    }
    return std::nullopt;
  }

  Descent d = index.descend(q);
  std::map<std::string, std::size_t> votes;
  for (std::size_t slot : index.partition(d.partition)) {
    ElementId id = index.id(slot);
    if (exclude && id == *exclude) continue;
    ++votes[label_of(id)];
  }
  if (votes.empty()) return std::nullopt;
  // std::map iterates tags in lexicographic order, so max_element keeps the first on ties
  auto best = std::max_element(votes.begin(), votes.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  return best->first;
}

double classification_error(const MultilevelIndex& index, const Dataset& labelled,
                            ClassifyRule rule) {
  if (!labelled.has_labels()) throw std::invalid_argument("classification_error: dataset has no labels");
  if (labelled.empty()) return 0.0;
  std::vector<char> wrong(labelled.size(), 0);
  detail::parallel_for(labelled.size(), index.params().threads, [&](std::size_t row) {
    auto tag = classify(index, labelled, labelled.point(row), rule, labelled.id(row));
    wrong[row] = !tag || *tag != labelled.label(row);
  });
  std::size_t count = 0;
  for (char w : wrong) count += w;
  return static_cast<double>(count) / static_cast<double>(labelled.size());
}

}  // namespace mask
