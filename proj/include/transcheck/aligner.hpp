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
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "transcheck/text.hpp"

namespace transcheck {

struct AlignmentLink {
  std::size_t source = 0;
  std::size_t target = 0;
  double confidence = 1.0;

  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
};

// Source-to-target token links for one sentence pair, kept sorted by
// (source, target).
class AlignmentTable {
 public:
  AlignmentTable() = default;
  // Throws kInvalidInput when a link is out of bounds.
  AlignmentTable(std::vector<AlignmentLink> links, std::size_t source_length,
                 std::size_t target_length);

  std::span<const AlignmentLink> links() const { return links_; }
  std::vector<AlignmentLink> links_for(std::size_t source) const;
  std::size_t source_length() const { return source_length_; }
  std::size_t target_length() const { return target_length_; }

  // "i-j i-j ..." interchange format.
  std::string to_string() const;
  static AlignmentTable parse(std::string_view line, std::size_t source_length,
                              std::size_t target_length);

 private:
  std::vector<AlignmentLink> links_;
  std::size_t source_length_ = 0;
  std::size_t target_length_ = 0;
};

struct ParallelPair {
  Tokens source;
  Tokens target;
};

// Lexical translation probabilities p(target | source).
class LexiconModel {
 public:
  using Row = std::map<std::string, double, std::less<>>;

  double probability(std::string_view source, std::string_view target) const;
  const Row* row(std::string_view source) const;
  const std::map<std::string, Row, std::less<>>& table() const { return table_; }

  std::size_t iterations() const { return iterations_; }
  std::size_t corpus_size() const { return corpus_size_; }
  // Largest |sum_t p(t|s) - 1| seen after each training iteration.
  const std::vector<double>& normalization_drift() const { return drift_; }

  // TSV "source\ttarget\tprobability" sorted, with "# iterations" and
  // "# corpus_size" header lines.
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static LexiconModel read(std::istream& in, std::string_view source_name = "<stream>");
  static LexiconModel load(const std::filesystem::path& path);

 private:
  friend LexiconModel train_lexicon(std::span<const ParallelPair> corpus, std::size_t iterations);

  std::map<std::string, Row, std::less<>> table_;
  std::size_t iterations_ = 0;
  std::size_t corpus_size_ = 0;
  std::vector<double> drift_;
};

// Expectation-maximisation over lexical translation probabilities with a
// uniform start over co-occurring target words. Deterministic in corpus
// order. Throws kTraining on an empty corpus or zero iterations.
LexiconModel train_lexicon(std::span<const ParallelPair> corpus, std::size_t iterations);

// Parses "source ||| target" or "source<TAB>target" lines.
std::vector<ParallelPair> read_parallel(std::istream& in, const LanguageProfile& source_profile,
                                        const LanguageProfile& target_profile);

struct AlignOptions {
  double floor = 0.1;
};

// Each source token links to its most probable target token when that
// probability reaches the floor; ties prefer the target nearest the
// diagonal, then the leftmost.
AlignmentTable align(TokenView source, TokenView target, const LexiconModel& model,
                     const AlignOptions& options = {});

class Aligner {
 public:
  virtual ~Aligner() = default;
  virtual AlignmentTable align(TokenView source, TokenView target) const = 0;
};

class LexicalAligner final : public Aligner {
 public:
  explicit LexicalAligner(LexiconModel model, AlignOptions options = {})
      : model_(std::move(model)), options_(options) {}

  AlignmentTable align(TokenView source, TokenView target) const override;
  const LexiconModel& model() const { return model_; }

 private:
  LexiconModel model_;
  AlignOptions options_;
};

// Alignments produced elsewhere: a parallel file plus one "i-j ..." line per
// pair. Unknown pairs align to an empty table.
class FileAligner final : public Aligner {
 public:
  void add(TokenView source, TokenView target, AlignmentTable table);
  static FileAligner load(const std::filesystem::path& parallel,
                          const std::filesystem::path& alignments,
                          const LanguageProfile& source_profile,
                          const LanguageProfile& target_profile);

  AlignmentTable align(TokenView source, TokenView target) const override;

 private:
  std::unordered_map<std::string, AlignmentTable> tables_;
};

struct TargetSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  bool low_confidence = false;  // linked targets were not contiguous
  Tokens tokens;
};

// The target tokens covered by the links of `index`, from the lowest to the
// highest linked position.
std::optional<TargetSpan> get_translated_word(std::size_t index, const AlignmentTable& table,
                                              TokenView target);

}  // namespace transcheck
