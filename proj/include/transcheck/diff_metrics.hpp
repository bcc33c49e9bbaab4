// Copyright 2026 The transcheck Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transcheck/text.hpp"

namespace transcheck {

// A maximal run of tokens outside the common subsequence. `start` indexes
// into the sequence the slice was taken from.
struct DiffSlice {
  std::size_t start = 0;
  Tokens tokens;

  std::size_t end() const { return start + tokens.size(); }
  friend bool operator==(const DiffSlice&, const DiffSlice&) = default;
};

struct DiffSlices {
  std::vector<DiffSlice> slices_a;
  std::vector<DiffSlice> slices_b;
  Tokens common;  // the aligned common subsequence
};

// Word-level diff over an LCS alignment. When several alignments are
// optimal, tokens of `a` are matched as early as possible.
DiffSlices word_diff(TokenView a, TokenView b);

std::size_t lcs_length(TokenView a, TokenView b);
// Unit-cost insert/delete/substitute distance over tokens.
std::size_t edit_distance(TokenView a, TokenView b);

// len(LCS) / max(len). Two empty sequences score 1.
double lcs_metric(TokenView a, TokenView b);
// 1 - ED / max(len). Two empty sequences score 1.
double ed_metric(TokenView a, TokenView b);

using BagOfWords = std::map<std::string, std::size_t>;
BagOfWords bag_of_words(TokenView tokens);

// Inverse document frequencies, log((|C| + 1) / (f_w + 1)), over a corpus of
// sentences. A default-constructed table is uniform: every weight is 1.
class IdfTable {
 public:
  IdfTable() = default;

  static IdfTable uniform() { return IdfTable(); }
  static IdfTable from_frequencies(std::size_t corpus_size,
                                   std::map<std::string, std::size_t> doc_freq);

  double weight(std::string_view token) const;
  std::optional<std::size_t> doc_freq(std::string_view token) const;
  std::size_t corpus_size() const { return corpus_size_; }
  bool is_uniform() const { return uniform_; }
  // Built from an empty corpus: every weight is log(1) = 0.
  bool is_degenerate() const { return !uniform_ && corpus_size_ == 0; }
  const std::map<std::string, std::size_t, std::less<>>& frequencies() const { return doc_freq_; }

  // TSV: "# corpus_size\t<n>" header, then "token\tdoc_freq" sorted by token.
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static IdfTable read(std::istream& in, std::string_view source_name = "<stream>");
  static IdfTable load(const std::filesystem::path& path);

 private:
  bool uniform_ = true;
  std::size_t corpus_size_ = 0;
  std::map<std::string, std::size_t, std::less<>> doc_freq_;
};

IdfTable build_idf(std::span<const Tokens> sentences);

struct TfidfScore {
  double score = 0.0;
  bool degenerate = false;  // a weighted vector was all zeros
};

// Cosine of the idf-weighted bag-of-words vectors, clamped to [0, 1]. Two
// identical bags score 1 even when both weighted vectors vanish.
TfidfScore tfidf_metric(TokenView a, TokenView b, const IdfTable& idf);

struct NgramPrecision {
  std::size_t matched = 0;  // clipped matches
  std::size_t total = 0;    // candidate n-grams
  double value() const { return total == 0 ? 0.0 : static_cast<double>(matched) / total; }
};

// Modified n-gram precision of `candidate` against `reference`: candidate
// n-gram counts clipped by the reference counts.
NgramPrecision modified_precision(TokenView reference, TokenView candidate, std::size_t n);

// Sentence BLEU with uniform weights over orders 1..min(4, max(c, r)) and
// the exponential brevity penalty. Any zero precision gives 0; no smoothing.
// Throws kInvalidInput on empty input.
double bleu_directional(TokenView reference, TokenView candidate);

// max(BLEU(a -> b), BLEU(b -> a)).
double bleu_metric(TokenView a, TokenView b);

enum class Metric { kLcs, kEd, kTfidf, kBleu };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::kLcs, Metric::kEd, Metric::kTfidf,
                                                      Metric::kBleu};

std::string_view metric_name(Metric metric);
// Case-insensitive; accepts LCS, ED, TFIDF / TF-IDF, BLEU.
Metric parse_metric(std::string_view name);
// Comma-separated list or "all".
std::vector<Metric> parse_metric_list(std::string_view names);

struct MetricValue {
  double score = 0.0;
  bool degenerate = false;
};

// Dispatches to the metric, defined on empty inputs too: two empty
// sequences score 1 and one empty sequence scores 0.
MetricValue compute_metric(Metric metric, TokenView a, TokenView b, const IdfTable& idf);

}  // namespace transcheck
