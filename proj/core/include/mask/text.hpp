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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mask/dataset.hpp"
#include "mask/random.hpp"

namespace mask {

struct Document {
  std::vector<std::string> tokens;
  std::string label;
};
using Corpus = std::vector<Document>;

/// Maps a token to its stem. Identity when not supplied.
using StemmingHook = std::function<std::string(std::string_view)>;

/// A small suffix-stripping stemmer (-ing, -edly, -ed, -ies, -es, -s, -ly).
/// A stand-in for a real stemming engine.
std::string suffix_stem(std::string_view token);

/// The fixed English stop-word list.
const std::unordered_set<std::string>& stop_words();

struct TokenFilter {
  bool drop_stop_words = true;
  bool drop_numbers = true;      // tokens containing a digit
  bool drop_punctuation = true;  // tokens with no letter or digit at all
};

/// Lower-cases `text` and splits it on every character that is not a letter
/// or digit, then applies the filter.
std::vector<std::string> tokenize(std::string_view text, const TokenFilter& filter = {});
std::vector<std::string> filter_tokens(const std::vector<std::string>& tokens,
                                       const TokenFilter& filter);

/// Term-document matrix of TF-IDF weights, w_ij = tf_ij * ln(n / df_i).
/// Terms are sorted; term i is dimension i of every document vector. Zero
/// weights are not stored.
struct TermDocumentMatrix {
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  std::vector<Vector> docs;
  std::vector<std::string> labels;

  std::size_t n() const { return docs.size(); }
  std::optional<std::size_t> term_index(std::string_view term) const;
  /// Ids 0..n-1 in corpus order, labels attached.
  Dataset to_dataset() const;
};

/// Filters every document's tokens, stems them if a hook is given, then
/// weights. Throws if no term survives filtering.
TermDocumentMatrix tfidf_encode(const Corpus& corpus, const StemmingHook& stem = {},
                                const TokenFilter& filter = {});

/// Reads a corpus and keeps the documents of exactly one of the two
/// categories. Two formats:
///   - tab-separated, one document per line: `label<TAB>text` ('#' lines are comments)
///   - Reuters-21578 SGML (<REUTERS> blocks, <TOPICS><D>..</D></TOPICS>, TITLE and BODY)
/// Documents tagged with both categories are dropped. Throws when either
/// category matches no document.
Corpus load_reuters_like(const std::filesystem::path& path,
                         const std::pair<std::string, std::string>& categories,
                         const TokenFilter& filter = {});
Corpus parse_reuters_like(std::istream& in, const std::pair<std::string, std::string>& categories,
                          const TokenFilter& filter = {});

/// Two-or-more-class synthetic corpus. Each class owns `vocab_per_class`
/// words; every token is drawn from a shared pool of `shared_vocab` words with
/// probability `overlap`, otherwise from the class's own words. overlap = 0
/// gives disjoint vocabularies.
struct SyntheticCorpusSpec {
  std::vector<std::string> labels{"alpha", "beta"};
  std::size_t docs_per_class = 40;
  std::size_t words_per_doc = 30;
  std::size_t vocab_per_class = 60;
  std::size_t shared_vocab = 60;
  double overlap = 0.0;
  RngSeed seed{};
};

/// (label, text) pairs, class-major.
std::vector<std::pair<std::string, std::string>> gen_synthetic_corpus(const SyntheticCorpusSpec& spec);
void write_corpus_tsv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& docs);

}  // namespace mask
