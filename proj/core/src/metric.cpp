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

#include "mask/metric.hpp"

#include <algorithm>
#include <cmath>

namespace mask {
namespace {

void check_dims(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

// Walks both operands in dimension order and hands each coordinate pair to
// `step`. Pairs where both operands are implicit zeros are skipped; for the
// built-in metrics such a pair contributes exactly +0.0, so the result is
// bit-identical to the dense loop.
template <typename Step>
void for_each_pair(const Vector& a, const Vector& b, Step&& step) {
  if (!a.is_sparse() && !b.is_sparse()) {
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < x.size(); ++i) step(x[i], y[i]);
    return;
  }
  if (a.is_sparse() && !b.is_sparse()) {
    auto y = b.values();
    auto e = a.entries();
    std::size_t k = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double x = 0.0;
      if (k < e.size() && e[k].index == i) x = e[k++].value;
      step(x, y[i]);
    }
    return;
  }
  if (!a.is_sparse() && b.is_sparse()) {
    auto x = a.values();
    auto e = b.entries();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double y = 0.0;
      if (k < e.size() && e[k].index == i) y = e[k++].value;
      step(x[i], y);
    }
    return;
  }
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t i = 0, j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i].index < eb[j].index)) {
      step(ea[i++].value, 0.0);
    } else if (i == ea.size() || eb[j].index < ea[i].index) {
      step(0.0, eb[j++].value);
    } else {
      step(ea[i++].value, eb[j++].value);
    }
  }
}

double builtin(MetricKind kind, const Vector& a, const Vector& b) {
  switch (kind) {
    case MetricKind::L1: {
      double s = 0.0;
      for_each_pair(a, b, [&](double x, double y) { s += std::fabs(x - y); });
      return s;
    }
    case MetricKind::L2: {
      double s = 0.0;
      for_each_pair(a, b, [&](double x, double y) {
        double d = x - y;
        s += d * d;
      });
      return std::sqrt(s);
    }
    case MetricKind::Linf: {
      double m = 0.0;
      for_each_pair(a, b, [&](double x, double y) { m = std::max(m, std::fabs(x - y)); });
      return m;
    }
    case MetricKind::Custom:
      break;
  }
  throw std::logic_error("not a built-in metric");
}

}  // namespace

Metric::Metric(MetricKind kind) : kind_(kind) {
  if (kind == MetricKind::Custom) {
    throw std::invalid_argument("use Metric::custom to build a user metric");
  }
}

Metric Metric::custom(std::string name, DenseFn fn) {
  if (!fn) throw std::invalid_argument("custom metric needs a callable");
  Metric m;
  m.kind_ = MetricKind::Custom;
  m.custom_ = std::make_shared<const DenseFn>(std::move(fn));
  m.custom_name_ = std::move(name);
  return m;
}

std::string_view Metric::name() const {
  switch (kind_) {
    case MetricKind::L1:
      return "l1";
    case MetricKind::L2:
      return "l2";
    case MetricKind::Linf:
      return "linf";
    case MetricKind::Custom:
      return custom_name_;
  }
  return "?";
}

double Metric::operator()(const Vector& a, const Vector& b) const { return distance(*this, a, b); }

double distance(const Metric& metric, const Vector& a, const Vector& b) {
  check_dims(a, b);
  if (metric.kind() != MetricKind::Custom) return builtin(metric.kind(), a, b);
  // custom metrics only see dense data
  const Vector da = a.densify();
  const Vector db = b.densify();
  return (*metric.custom_)(da.values(), db.values());
}

double sparse_dense_distance(const Metric& metric, const Vector& sparse, const Vector& dense) {
  check_dims(sparse, dense);
  if (dense.is_sparse()) throw std::invalid_argument("second operand must be dense");
  return distance(metric, sparse, dense);
}

double squared_l2(const Vector& a, const Vector& b) {
  check_dims(a, b);
  double s = 0.0;
  for_each_pair(a, b, [&](double x, double y) {
    double d = x - y;
    s += d * d;
  });
  return s;
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "l1") return Metric::l1();
  if (name == "l2") return Metric::l2();
  if (name == "linf") return Metric::linf();
  return std::nullopt;
}

}  // namespace mask
