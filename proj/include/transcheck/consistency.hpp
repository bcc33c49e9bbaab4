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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "transcheck/diff_metrics.hpp"

namespace transcheck {

// Slices longer than this are assumed unrelated to the mutated word and are
// never deleted.
inline constexpr std::size_t kMaxSliceTokens = 5;

struct ConsistencyResult {
  double score = 0.0;
  DiffSlices slices;  // oriented as (original, mutant)
  bool degenerate = false;
};

// `tokens` plus one variant per retained slice with exactly that slice
// deleted. Slices over kMaxSliceTokens are skipped.
std::vector<Tokens> slice_deleted_variants(TokenView tokens, std::span<const DiffSlice> slices);

// Maximum of `metric` over every pair drawn from the slice-deleted variants
// of each translation. The diff is computed on a canonical argument order
// so that the score is symmetric. Throws kInvalidTranslation on empty input.
ConsistencyResult consistency_score(TokenView original, TokenView mutant, Metric metric,
                                    const IdfTable& idf = IdfTable::uniform());

struct GridOptions {
  double lower = 0.80;
  double upper = 1.00;
  double step = 0.001;
};

std::vector<double> threshold_grid(const GridOptions& grid);

// Per-metric decision thresholds. A score strictly below the threshold is
// an inconsistency.
class ThresholdSet {
 public:
  struct Entry {
    double threshold = 1.0;
    std::optional<double> f_measure;
  };

  // LCS 0.963, ED 0.963, TFIDF 0.999, BLEU 0.906.
  static ThresholdSet defaults();

  void set(Metric metric, Entry entry);
  bool has(Metric metric) const { return entries_[index(metric)].has_value(); }
  const Entry& entry(Metric metric) const;
  double threshold(Metric metric) const { return entry(metric).threshold; }

  std::optional<double> grid_step() const { return grid_step_; }
  void set_grid_step(double step) { grid_step_ = step; }

  // key=value lines: "LCS=0.963", "LCS.f_measure=0.81", "grid_step=0.001".
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static ThresholdSet read(std::istream& in, std::string_view source_name = "<stream>");
  static ThresholdSet load(const std::filesystem::path& path);

 private:
  static std::size_t index(Metric metric) { return static_cast<std::size_t>(metric); }

  std::array<std::optional<Entry>, 4> entries_;
  std::optional<double> grid_step_;
};

struct LabeledSample {
  std::array<std::optional<double>, 4> scores;  // indexed by Metric
  bool consistent = true;                       // human label

  std::optional<double> score(Metric metric) const {
    return scores[static_cast<std::size_t>(metric)];
  }
};

struct DetectionCounts {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;

  double precision() const;
  double recall() const;
  double f_measure() const;  // F1; 0 when nothing is detected
};

DetectionCounts evaluate_threshold(std::span<const LabeledSample> samples, Metric metric,
                                   double threshold);

// Grid search per metric for the threshold with the highest F1 of the
// "inconsistent" class; ties go to the lower threshold. Metrics without any
// scores are left unset. Throws kCalibration when all labels agree.
ThresholdSet learn_thresholds(std::span<const LabeledSample> samples,
                              const GridOptions& grid = {});

struct ConsistencyReport {
  std::string sentence_id;
  std::string mutant_id;
  Metric metric = Metric::kLcs;
  double score = 0.0;
  double threshold = 1.0;
  bool is_bug = false;
  bool degenerate = false;
  DiffSlices slices;
};

ConsistencyReport judge(TokenView original, TokenView mutant, const ThresholdSet& thresholds,
                        Metric metric, const IdfTable& idf = IdfTable::uniform());

}  // namespace transcheck
