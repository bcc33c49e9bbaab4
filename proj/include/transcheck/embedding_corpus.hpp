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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace transcheck {

struct WordVector {
  std::string word;
  std::vector<double> vector;
};

// dot(a, b) / (|a| |b|). Throws kInvalidInput on a dimension mismatch and
// kDegenerateVector when either norm is zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const WordVector& a, const WordVector& b);

// A word-embedding text file: "token c1 c2 ... cD" per line. The dimension
// is taken from the first line; a leading "<count> <dim>" header line is
// recognised and skipped. A repeated token replaces the earlier vector.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  static EmbeddingModel load(const std::filesystem::path& path, bool lowercase = false);
  static EmbeddingModel parse(std::istream& in, std::string_view source_name,
                              bool lowercase = false);

  void add(WordVector entry);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  const std::vector<double>* find(std::string_view word) const;
  std::span<const WordVector> entries() const { return vectors_; }

 private:
  std::size_t dimension_ = 0;
  std::vector<WordVector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SimilarityPair {
  std::string word_a;  // word_a < word_b
  std::string word_b;
  double sim_model1 = 0.0;
  double sim_model2 = 0.0;

  double min_similarity() const { return sim_model1 < sim_model2 ? sim_model1 : sim_model2; }
  friend bool operator==(const SimilarityPair&, const SimilarityPair&) = default;
};

struct Replacement {
  std::string word;
  double similarity = 0.0;  // min over the two models

  friend bool operator==(const Replacement&, const Replacement&) = default;
};

// Context-similar word pairs. Immutable once constructed; safe for
// concurrent readers.
class SimilarityCorpus {
 public:
  SimilarityCorpus() = default;

  // Pairs are normalised to word_a < word_b and sorted. Throws kInvalidInput
  // on self-pairs, duplicates, or pairs below the threshold.
  SimilarityCorpus(double threshold, std::vector<SimilarityPair> pairs);

  double threshold() const { return threshold_; }
  std::span<const SimilarityPair> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // Partners of `word` in either position, by similarity descending then
  // lexicographically.
  std::vector<Replacement> lookup(std::string_view word) const;

  // TSV: "word_a\tword_b\tsim1\tsim2", sorted, preceded by a
  // "# threshold\t<t>" comment line.
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static SimilarityCorpus read(std::istream& in, std::string_view source_name = "<stream>");
  static SimilarityCorpus load(const std::filesystem::path& path);

 private:
  double threshold_ = 1.0;
  std::vector<SimilarityPair> pairs_;
  std::unordered_map<std::string, std::vector<Replacement>> partners_;
};

// All unordered pairs over the shared vocabulary whose similarity is at
// least `threshold` under both models. Zero-norm vectors are never paired.
SimilarityCorpus build_corpus(const EmbeddingModel& model1, const EmbeddingModel& model2,
                              double threshold, unsigned workers = 1);

}  // namespace transcheck
