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

#include "mask/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mask/dataset_io.hpp"

namespace mask {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Contents of every <tag>...</tag> inside `s`.
std::vector<std::string_view> elements(std::string_view s, std::string_view tag) {
  std::vector<std::string_view> out;
  const std::string open = "<" + std::string(tag);
  const std::string close = "</" + std::string(tag) + ">";
  std::size_t at = 0;
  for (;;) {
    std::size_t b = s.find(open, at);
    if (b == std::string_view::npos) break;
    std::size_t after = b + open.size();
    // exact tag name: next char must end it
    if (after < s.size() && s[after] != '>' && s[after] != ' ') {
      at = after;
      continue;
    }
    std::size_t gt = s.find('>', after);
    if (gt == std::string_view::npos) throw FormatError("unterminated <" + std::string(tag) + "> tag");
    std::size_t e = s.find(close, gt + 1);
    if (e == std::string_view::npos) throw FormatError("missing " + close);
    out.push_back(s.substr(gt + 1, e - gt - 1));
    at = e + close.size();
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '&') {
      std::size_t semi = s.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 6) {
        std::string_view ent = s.substr(i + 1, semi - i - 1);
        if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "amp") out += '&';
        else out += ' ';  // &#3; and friends
        i = semi;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

std::string synthetic_word(std::string_view prefix, std::size_t index) {
  std::string suffix;
  do {
    suffix += static_cast<char>('a' + index % 26);
    index /= 26;
  } while (index > 0);
  return std::string(prefix) + suffix;
}

}  // namespace

std::string suffix_stem(std::string_view token) {
  std::string t(token);
  auto strip = [&](std::string_view suffix, std::string_view repl = "") {
    if (ends_with(t, suffix) && t.size() - suffix.size() >= 3) {
      t = t.substr(0, t.size() - suffix.size()) + std::string(repl);
      return true;
    }
    return false;
  };
  strip("ing") || strip("edly") || strip("ed") || strip("ies", "y") || strip("es") ||
      strip("ly") || (!ends_with(t, "ss") && strip("s"));
  return t;
}

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
      "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
      "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing", "down",
      "during", "each", "few", "for", "from", "further", "had", "has", "have", "having",
      "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if",
      "in", "into", "is", "it", "its", "itself", "just", "me", "more", "most", "my",
      "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other",
      "our", "ours", "ourselves", "out", "over", "own", "said", "same", "she", "should",
      "so", "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves",
      "then", "there", "these", "they", "this", "those", "through", "to", "too", "under",
      "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
      "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
      "yourself", "yourselves", "mln", "dlrs", "pct", "reuter", "reuters", "s", "t"};
  return words;
}

std::vector<std::string> filter_tokens(const std::vector<std::string>& tokens,
                                       const TokenFilter& filter) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (t.empty()) continue;
    bool has_alpha = std::any_of(t.begin(), t.end(), is_alpha);
    bool has_digit = std::any_of(t.begin(), t.end(), is_digit);
    if (filter.drop_punctuation && !has_alpha && !has_digit) continue;
    if (filter.drop_numbers && has_digit) continue;
    if (filter.drop_stop_words && stop_words().contains(t)) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, const TokenFilter& filter) {
  std::vector<std::string> raw;
  std::string cur;
  for (char c : text) {
    if (is_alpha(c) || is_digit(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      raw.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) raw.push_back(std::move(cur));
  return filter_tokens(raw, filter);
}

std::optional<std::size_t> TermDocumentMatrix::term_index(std::string_view term) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - terms.begin());
}

Dataset TermDocumentMatrix::to_dataset() const { return Dataset::from_points(docs, labels); }

TermDocumentMatrix tfidf_encode(const Corpus& corpus, const StemmingHook& stem,
                                const TokenFilter& filter) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  std::vector<std::map<std::string, std::size_t>> counts(corpus.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    for (const std::string& t : filter_tokens(corpus[j].tokens, filter)) {
      std::string term = stem ? stem(t) : t;
      if (term.empty()) continue;
      ++counts[j][term];
    }
    for (const auto& [term, _] : counts[j]) ++df[term];
  }
  if (df.empty()) throw std::invalid_argument("empty vocabulary after filtering");

  TermDocumentMatrix m;
  std::map<std::string, std::uint32_t> index;
  for (const auto& [term, f] : df) {
    index.emplace(term, static_cast<std::uint32_t>(m.terms.size()));
    m.terms.push_back(term);
    m.df.push_back(f);
  }
  const double n = static_cast<double>(corpus.size());
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    std::vector<SparseEntry> entries;
    for (const auto& [term, tf] : counts[j]) {  // map order = term order
      std::uint32_t i = index.at(term);
      double w = static_cast<double>(tf) * std::log(n / static_cast<double>(m.df[i]));
      if (w != 0.0) entries.push_back({i, w});
    }
    m.docs.push_back(Vector::sparse(m.terms.size(), std::move(entries)));
    m.labels.push_back(corpus[j].label);
  }
  return m;
}

Corpus parse_reuters_like(std::istream& in, const std::pair<std::string, std::string>& categories,
                          const TokenFilter& filter) {
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  const std::string a = lower(categories.first);
  const std::string b = lower(categories.second);
  if (a == b) throw std::invalid_argument("the two categories must differ");

  Corpus out;
  std::size_t count_a = 0, count_b = 0;
  auto keep = [&](const std::vector<std::string>& topics, std::string_view text) {
    bool has_a = std::find(topics.begin(), topics.end(), a) != topics.end();
    bool has_b = std::find(topics.begin(), topics.end(), b) != topics.end();
    if (has_a == has_b) return;
    out.push_back({tokenize(text, filter), has_a ? a : b});
    ++(has_a ? count_a : count_b);
  };

  if (content.find("<REUTERS") != std::string::npos) {
    for (std::string_view doc : elements(content, "REUTERS")) {
      std::vector<std::string> topics;
      for (std::string_view t : elements(doc, "TOPICS")) {
        for (std::string_view d : elements(t, "D")) topics.push_back(lower(d));
      }
      std::string text;
      for (std::string_view t : elements(doc, "TITLE")) text += unescape(t) + "\n";
      for (std::string_view t : elements(doc, "BODY")) text += unescape(t) + "\n";
      keep(topics, text);
    }
  } else {
    std::istringstream lines(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw FormatError("line " + std::to_string(lineno) + ": expected 'label<TAB>text'");
      }
      keep({lower(line.substr(0, tab))}, std::string_view(line).substr(tab + 1));
    }
  }
  if (count_a == 0) throw std::invalid_argument("no document of category '" + a + "'");
  if (count_b == 0) throw std::invalid_argument("no document of category '" + b + "'");
  return out;
}

Corpus load_reuters_like(const std::filesystem::path& path,
                         const std::pair<std::string, std::string>& categories,
                         const TokenFilter& filter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_reuters_like(in, categories, filter);
}

std::vector<std::pair<std::string, std::string>> gen_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  if (spec.labels.size() < 2) throw std::invalid_argument("need at least two classes");
  if (spec.docs_per_class == 0 || spec.words_per_doc == 0 || spec.vocab_per_class == 0) {
    throw std::invalid_argument("docs_per_class, words_per_doc and vocab_per_class must be >= 1");
  }
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0)) throw std::invalid_argument("overlap must be in [0, 1]");
  if (spec.overlap > 0.0 && spec.shared_vocab == 0) throw std::invalid_argument("overlap needs a shared vocabulary");

  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t c = 0; c < spec.labels.size(); ++c) {
    Engine rng = make_engine(derive_seed(spec.seed, {stream::kCorpus, c}));
    std::bernoulli_distribution shared(spec.overlap);
    std::uniform_int_distribution<std::size_t> own_word(0, spec.vocab_per_class - 1);
    std::uniform_int_distribution<std::size_t> shared_word(0, spec.shared_vocab == 0 ? 0 : spec.shared_vocab - 1);
    // class prefixes are letters only so no token is dropped as a number
    const std::string prefix = "w" + synthetic_word("", c) + "x";
    for (std::size_t d = 0; d < spec.docs_per_class; ++d) {
      std::string text;
      for (std::size_t w = 0; w < spec.words_per_doc; ++w) {
        if (w) text += ' ';
        text += shared(rng) ? synthetic_word("common", shared_word(rng))
                            : synthetic_word(prefix, own_word(rng));
      }
      out.emplace_back(spec.labels[c], std::move(text));
    }
  }
  return out;
}

void write_corpus_tsv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& docs) {
  out << "# label\ttext\n";
  for (const auto& [label, text] : docs) out << label << '\t' << text << '\n';
}

}  // namespace mask
