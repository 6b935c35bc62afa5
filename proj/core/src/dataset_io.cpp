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

#include "mask/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace mask {
namespace {

constexpr std::string_view kDenseHeader = "# mask-dense v1";
constexpr std::string_view kSparseHeader = "# mask-sparse v1";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <typename T>
std::optional<T> parse_uint(std::string_view s) {
  T v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw FormatError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

Dataset read_dense_csv(std::istream& in) {
  std::vector<Vector> points;
  std::vector<std::string> labels;
  std::optional<std::size_t> dim;
  std::optional<bool> labelled;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.starts_with("# mask-") && view != kDenseHeader) {
        fail(line_no, "unsupported header '" + std::string(view) + "'");
      }
      continue;
    }
    auto fields = split(view, ',');
    bool has_label = !parse_double(fields.back()).has_value();
    if (!labelled) labelled = has_label;
    if (*labelled != has_label) fail(line_no, "label column present on some rows only");
    std::size_t n = fields.size() - (has_label ? 1 : 0);
    if (n == 0) fail(line_no, "no numeric columns");
    if (!dim) dim = n;
    if (*dim != n) {
      fail(line_no, "inconsistent dimension " + std::to_string(n) + " (expected " +
                        std::to_string(*dim) + ")");
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = parse_double(fields[i]);
      if (!v) fail(line_no, "bad number '" + std::string(fields[i]) + "'");
      values[i] = *v;
    }
    try {
      points.push_back(Vector::dense(std::move(values)));
    } catch (const std::invalid_argument& e) {
      fail(line_no, e.what());
    }
    if (has_label) labels.emplace_back(trim(fields.back()));
  }
  return Dataset::from_points(std::move(points), std::move(labels));
}

Dataset read_sparse(std::istream& in) {
  struct Row {
    ElementId id;
    std::optional<std::string> label;
    std::vector<SparseEntry> entries;
  };
  std::vector<Row> rows;
  std::optional<std::size_t> declared_dim;
  std::size_t max_index_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.starts_with(kSparseHeader)) {
        auto rest = trim(view.substr(kSparseHeader.size()));
        if (rest.starts_with("dim=")) {
          auto d = parse_uint<std::size_t>(rest.substr(4));
          if (!d) fail(line_no, "bad dim in header");
          declared_dim = *d;
        }
      } else if (view.starts_with("# mask-")) {
        fail(line_no, "unsupported header '" + std::string(view) + "'");
      }
      continue;
    }
    auto tokens = split_ws(view);
    Row row;
    auto id = parse_uint<ElementId>(tokens[0]);
    if (!id) fail(line_no, "bad id '" + std::string(tokens[0]) + "'");
    row.id = *id;
    std::size_t t = 1;
    if (t < tokens.size() && tokens[t].find(':') == std::string_view::npos) {
      row.label = std::string(tokens[t]);
      ++t;
    }
    for (; t < tokens.size(); ++t) {
      auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) fail(line_no, "expected idx:val");
      auto idx = parse_uint<std::uint32_t>(tokens[t].substr(0, colon));
      auto val = parse_double(tokens[t].substr(colon + 1));
      if (!idx || !val) fail(line_no, "bad entry '" + std::string(tokens[t]) + "'");
      if (!row.entries.empty() && row.entries.back().index >= *idx) {
        fail(line_no, "indices must be strictly increasing");
      }
      if (declared_dim && *idx >= *declared_dim) {
        fail(line_no, "index " + std::to_string(*idx) + " exceeds declared dim " +
                          std::to_string(*declared_dim));
      }
      row.entries.push_back({*idx, *val});
      max_index_plus_one = std::max<std::size_t>(max_index_plus_one, *idx + 1);
    }
    rows.push_back(std::move(row));
  }
  std::size_t dim = declared_dim.value_or(max_index_plus_one);
  std::vector<Vector> points;
  std::vector<ElementId> ids;
  std::vector<std::string> labels;
  bool any_label = false, all_label = true;
  for (const auto& r : rows) {
    any_label |= r.label.has_value();
    all_label &= r.label.has_value();
  }
  if (any_label && !all_label) throw FormatError("label present on some rows only");
  for (auto& r : rows) {
    points.push_back(Vector::sparse(dim, std::move(r.entries)));
    ids.push_back(r.id);
    if (r.label) labels.push_back(*r.label);
  }
  return Dataset(std::move(points), std::move(ids), std::move(labels));
}

void write_dense_csv(std::ostream& out, const Dataset& data) {
  out << kDenseHeader << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Vector& p = data.point(r);
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (i) out << ',';
      out << format_double(p.at(i));
    }
    if (data.has_labels()) out << ',' << data.label(r);
    out << '\n';
  }
}

void write_sparse(std::ostream& out, const Dataset& data) {
  out << kSparseHeader << " dim=" << data.dim() << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << data.id(r);
    if (data.has_labels()) out << ' ' << data.label(r);
    const Vector& p = data.point(r);
    if (p.is_sparse()) {
      for (const auto& e : p.entries()) out << ' ' << e.index << ':' << format_double(e.value);
    } else {
      for (std::size_t i = 0; i < p.dim(); ++i) {
        if (p.values()[i] != 0.0) out << ' ' << i << ':' << format_double(p.values()[i]);
      }
    }
    out << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  bool sparse = std::string_view(first).starts_with(kSparseHeader) ||
                (!std::string_view(first).starts_with(kDenseHeader) && path.extension() != ".csv");
  in.clear();
  in.seekg(0);
  return sparse ? read_sparse(in) : read_dense_csv(in);
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  bool sparse = !data.empty() && data.point(0).is_sparse();
  if (sparse) {
    write_sparse(out, data);
  } else {
    write_dense_csv(out, data);
  }
}

}  // namespace mask
