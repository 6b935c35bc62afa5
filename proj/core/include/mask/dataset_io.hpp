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
#include <stdexcept>
#include <string>

#include "mask/dataset.hpp"

namespace mask {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense CSV, version 1:
//
//   # mask-dense v1
//   x0,x1,...,x{d-1}[,label]
//
// One point per line. The header line is optional on input. A trailing
// non-numeric field is a label; either every row carries one or none does.
// Ids are the zero-based row numbers.
//
// Sparse, version 1:
//
//   # mask-sparse v1 dim=<d>
//   <id> [label] <idx>:<val> <idx>:<val> ...
//
// Indices strictly increasing. Without a dim= header the dimension is the
// largest index plus one.

Dataset read_dense_csv(std::istream& in);
Dataset read_sparse(std::istream& in);
void write_dense_csv(std::ostream& out, const Dataset& data);
void write_sparse(std::ostream& out, const Dataset& data);

/// Dispatches on the header line (falls back to the file extension: .csv is dense).
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace mask
