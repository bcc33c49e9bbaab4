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

#include "transcheck/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "transcheck/error.hpp"

namespace transcheck {

std::vector<Tokens> slice_deleted_variants(TokenView tokens, std::span<const DiffSlice> slices) {
  std::vector<Tokens> variants;
  variants.emplace_back(tokens.begin(), tokens.end());
  for (const auto& slice : slices) {
    if (slice.tokens.size() > kMaxSliceTokens) continue;
    Tokens variant;
    variant.reserve(tokens.size() - slice.tokens.size());
    variant.insert(variant.end(), tokens.begin(),
                   tokens.begin() + static_cast<std::ptrdiff_t>(slice.start));
    variant.insert(variant.end(), tokens.begin() + static_cast<std::ptrdiff_t>(slice.end()),
                   tokens.end());
    variants.push_back(std::move(variant));
  }
  return variants;
}

ConsistencyResult consistency_score(TokenView original, TokenView mutant, Metric metric,
                                    const IdfTable& idf) {
  if (original.empty() || mutant.empty()) {
    throw Error(ErrorKind::kInvalidTranslation, "consistency_score: empty translation");
  }
  ConsistencyResult result;
  // Lexicographic canonical order makes the slices independent of argument order.
  const bool swapped =
      std::lexicographical_compare(mutant.begin(), mutant.end(), original.begin(), original.end());
  if (swapped) {
    result.slices = word_diff(mutant, original);
    std::swap(result.slices.slices_a, result.slices.slices_b);
  } else {
    result.slices = word_diff(original, mutant);
  }

  const auto originals = slice_deleted_variants(original, result.slices.slices_a);
  const auto mutants = slice_deleted_variants(mutant, result.slices.slices_b);
  result.score = -1.0;
  for (const auto& a : originals) {
    for (const auto& b : mutants) {
      const MetricValue value = compute_metric(metric, a, b, idf);
      if (value.score > result.score) {
        result.score = value.score;
        result.degenerate = value.degenerate;
      }
    }
  }
  return result;
}

std::vector<double> threshold_grid(const GridOptions& grid) {
  if (!(grid.step > 0.0) || grid.upper < grid.lower) {
    throw Error(ErrorKind::kInvalidInput, "invalid threshold grid");
  }
  const auto steps = static_cast<long>(std::llround((grid.upper - grid.lower) / grid.step));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k <= steps; ++k) {
    const double raw = grid.lower + static_cast<double>(k) * grid.step;
    values.push_back(std::round(raw * 1e9) / 1e9);
  }
  return values;
}

// ---------------------------------------------------------------------------
// ThresholdSet

ThresholdSet ThresholdSet::defaults() {
  ThresholdSet set;
  set.set(Metric::kLcs, {0.963, std::nullopt});
  set.set(Metric::kEd, {0.963, std::nullopt});
  set.set(Metric::kTfidf, {0.999, std::nullopt});
  set.set(Metric::kBleu, {0.906, std::nullopt});
  return set;
}

void ThresholdSet::set(Metric metric, Entry entry) { entries_[index(metric)] = entry; }

const ThresholdSet::Entry& ThresholdSet::entry(Metric metric) const {
  const auto& slot = entries_[index(metric)];
  if (!slot) {
    throw Error(ErrorKind::kConfig,
                "no threshold configured for metric " + std::string(metric_name(metric)));
  }
  return *slot;
}

void ThresholdSet::write(std::ostream& out) const {
  if (grid_step_) out << "grid_step=" << format_double(*grid_step_) << '\n';
  for (Metric metric : kAllMetrics) {
    const auto& slot = entries_[index(metric)];
    if (!slot) continue;
    out << metric_name(metric) << '=' << format_double(slot->threshold) << '\n';
    if (slot->f_measure) {
      out << metric_name(metric) << ".f_measure=" << format_double(*slot->f_measure) << '\n';
    }
  }
}

void ThresholdSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write thresholds " + path.string());
  write(out);
}

ThresholdSet ThresholdSet::read(std::istream& in, std::string_view source_name) {
  ThresholdSet set;
  std::array<std::optional<double>, 4> f_measures;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kParse, where + ": expected key=value");
    auto trim = [](std::string_view s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string_view::npos ? std::string_view{} : s.substr(b, e - b + 1);
    };
    const std::string_view key = trim(std::string_view(line).substr(0, eq));
    const double value = parse_double(trim(std::string_view(line).substr(eq + 1)), where);
    if (key == "grid_step") {
      set.grid_step_ = value;
      continue;
    }
    const auto dot = key.find('.');
    const Metric metric = parse_metric(key.substr(0, dot));
    if (dot == std::string_view::npos) {
      if (value < 0.0 || value > 1.0) {
        throw Error(ErrorKind::kParse, where + ": threshold outside [0, 1]");
      }
      Entry entry = set.entries_[index(metric)].value_or(Entry{});
      entry.threshold = value;
      set.entries_[index(metric)] = entry;
    } else if (key.substr(dot + 1) == "f_measure") {
      f_measures[index(metric)] = value;
    } else {
      throw Error(ErrorKind::kParse, where + ": unknown key '" + std::string(key) + "'");
    }
  }
  for (Metric metric : kAllMetrics) {
    auto& slot = set.entries_[index(metric)];
    if (slot) slot->f_measure = f_measures[index(metric)];
  }
  return set;
}

ThresholdSet ThresholdSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open thresholds " + path.string());
  return read(in, path.string());
}

// ---------------------------------------------------------------------------
// Calibration

double DetectionCounts::precision() const {
  const std::size_t flagged = true_positive + false_positive;
  return flagged == 0 ? 0.0 : static_cast<double>(true_positive) / static_cast<double>(flagged);
}

double DetectionCounts::recall() const {
  const std::size_t actual = true_positive + false_negative;
  return actual == 0 ? 0.0 : static_cast<double>(true_positive) / static_cast<double>(actual);
}

double DetectionCounts::f_measure() const {
  if (true_positive == 0) return 0.0;
  const double p = precision();
  const double r = recall();
  return 2.0 * p * r / (p + r);
}

DetectionCounts evaluate_threshold(std::span<const LabeledSample> samples, Metric metric,
                                   double threshold) {
  DetectionCounts counts;
  for (const auto& sample : samples) {
    const auto score = sample.score(metric);
    if (!score) continue;
    const bool flagged = *score < threshold;
    const bool inconsistent = !sample.consistent;
    if (flagged && inconsistent) ++counts.true_positive;
    if (flagged && !inconsistent) ++counts.false_positive;
    if (!flagged && inconsistent) ++counts.false_negative;
    if (!flagged && !inconsistent) ++counts.true_negative;
  }
  return counts;
}

ThresholdSet learn_thresholds(std::span<const LabeledSample> samples, const GridOptions& grid) {
  const auto consistent = std::count_if(samples.begin(), samples.end(),
                                        [](const LabeledSample& s) { return s.consistent; });
  if (consistent == 0 || static_cast<std::size_t>(consistent) == samples.size()) {
    throw Error(ErrorKind::kCalibration,
                "calibration needs both consistent and inconsistent labels");
  }
  const auto candidates = threshold_grid(grid);
  ThresholdSet set;
  set.set_grid_step(grid.step);
  for (Metric metric : kAllMetrics) {
    const bool scored = std::any_of(samples.begin(), samples.end(),
                                    [metric](const LabeledSample& s) { return s.score(metric); });
    if (!scored) continue;
    double best_threshold = candidates.front();
    double best_f = -1.0;
    for (double threshold : candidates) {
      const double f = evaluate_threshold(samples, metric, threshold).f_measure();
      if (f > best_f) {
        best_f = f;
        best_threshold = threshold;
      }
    }
    set.set(metric, {best_threshold, best_f});
  }
  return set;
}

ConsistencyReport judge(TokenView original, TokenView mutant, const ThresholdSet& thresholds,
                        Metric metric, const IdfTable& idf) {
  ConsistencyResult result = consistency_score(original, mutant, metric, idf);
  ConsistencyReport report;
  report.metric = metric;
  report.score = result.score;
  report.threshold = thresholds.threshold(metric);
  report.is_bug = report.score < report.threshold;
  report.degenerate = result.degenerate;
  report.slices = std::move(result.slices);
  return report;
}

}  // namespace transcheck
