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

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "transcheck/aligner.hpp"
#include "transcheck/consistency.hpp"
#include "transcheck/embedding_corpus.hpp"
#include "transcheck/mutation.hpp"
#include "transcheck/repair.hpp"
#include "transcheck/translator.hpp"

namespace transcheck {

// Applies `fn` to 0..count-1 on up to `workers` threads. Results keep index
// order; the exception of the lowest failing index is rethrown.
template <typename Fn>
auto parallel_map(std::size_t count, std::size_t workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  std::vector<Result> results;
  results.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    results.push_back(std::move(*slots[i]));
  }
  return results;
}

inline constexpr std::string_view kMutantSchema = "transcheck.mutant/1";
inline constexpr std::string_view kTranslationSchema = "transcheck.translation/1";
inline constexpr std::string_view kReportSchema = "transcheck.report/1";
inline constexpr std::string_view kRepairSchema = "transcheck.repair/1";
inline constexpr std::string_view kSummarySchema = "transcheck.summary/1";

// key=value run configuration. Relative paths resolve against the config
// file's directory.
struct RunConfig {
  std::filesystem::path input;  // one sentence per line
  std::filesystem::path corpus;  // similarity corpus TSV, or build from the two models
  std::filesystem::path model1;
  std::filesystem::path model2;
  double sim_threshold = 0.9;
  bool lowercase = false;
  std::filesystem::path translator;  // translator profile
  std::vector<Metric> metrics{Metric::kLcs};
  std::filesystem::path thresholds;  // defaults when empty
  std::filesystem::path idf;         // uniform weights when empty
  std::size_t max_test_mutants = 5;
  std::size_t repair_mutants = 16;
  bool repair = true;
  RankingMode repair_mode = RankingMode::kCrossReference;
  Metric repair_metric = Metric::kLcs;
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache;  // in-memory cache when empty
  std::string tagger = "baseline";
  std::string target_tagger = "rules";  // "none" disables the structure gate
  FilterMode filter_mode = FilterMode::kSentence;
  bool fold_case = false;
  std::filesystem::path source_numerals;
  std::filesystem::path target_numerals;
  std::filesystem::path aligner_model;  // trained on the run's own pairs when empty
  std::size_t align_iterations = 10;
  double align_floor = 0.1;
  std::size_t workers = 1;
  std::uint64_t seed = 0;  // reserved for sampling utilities

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(std::istream& in, const std::filesystem::path& base_dir,
                         std::string_view source_name = "<stream>");
  // Throws kConfig on missing paths or inconsistent settings.
  void validate() const;
};

struct SourceSentence {
  std::size_t id = 0;  // 1-based input line number
  Tokens tokens;
};

// Blank lines are skipped but still advance the line number.
std::vector<SourceSentence> read_sentences(const std::filesystem::path& path,
                                           const LanguageProfile& profile);

struct MutantRecord {
  std::size_t sentence_id = 0;
  std::size_t mutant_id = 0;  // 1-based within the sentence
  std::string original;
  std::string mutant;
  std::size_t index = 0;
  std::string original_word;
  std::string replacement_word;
  double similarity = 0.0;
};

struct MutationStats {
  std::size_t sentences = 0;
  std::size_t candidates = 0;
  std::size_t filtered = 0;
  std::size_t emitted = 0;
};

struct MutateOutput {
  std::vector<MutantRecord> mutants;
  MutationStats stats;
};

MutateOutput mutate_stage(std::span<const SourceSentence> sentences, const SimilarityCorpus& corpus,
                          const PosTagger& tagger, const MutationOptions& options,
                          const LanguageProfile& source_profile, std::size_t workers = 1);

std::string mutant_to_json(const MutantRecord& mutant);
void write_mutants(const std::filesystem::path& path, std::span<const MutantRecord> mutants);
std::vector<MutantRecord> read_mutants(const std::filesystem::path& path);

// Translates every distinct text once, in first-seen order.
std::map<std::string, TranslationRecord> translate_all(std::span<const std::string> texts,
                                                       TranslationClient& client,
                                                       std::size_t workers = 1);

struct TestReport {
  std::size_t sentence_id = 0;
  std::size_t mutant_id = 0;
  Metric metric = Metric::kLcs;
  double score = 0.0;
  double threshold = 1.0;
  bool is_bug = false;
  bool degenerate = false;
  std::string original;
  std::string mutant;
  std::string original_translation;
  std::string mutant_translation;
  std::optional<double> original_probability;
  std::optional<double> mutant_probability;
  DiffSlices slices;
};

std::vector<TestReport> test_stage(std::span<const MutantRecord> mutants,
                                   const std::map<std::string, TranslationRecord>& translations,
                                   std::span<const Metric> metrics, const ThresholdSet& thresholds,
                                   const IdfTable& idf, const LanguageProfile& target_profile,
                                   std::size_t workers = 1);

std::string report_to_json(const TestReport& report);
void write_reports(const std::filesystem::path& path, std::span<const TestReport> reports);
std::vector<TestReport> read_reports(const std::filesystem::path& path);

struct RepairSettings {
  RankingMode mode = RankingMode::kCrossReference;
  Metric metric = Metric::kLcs;
  double threshold = 0.963;
  std::size_t repair_mutants = 16;
  MutationOptions mutation;
  std::size_t align_iterations = 10;
  AlignOptions align;
  std::size_t workers = 1;
};

struct RepairRecord {
  std::size_t sentence_id = 0;
  std::optional<std::size_t> mutant_id;  // empty for the original translation
  RankingMode mode = RankingMode::kCrossReference;
  Metric metric = Metric::kLcs;
  std::size_t candidates = 0;
  std::string source;  // sentence whose translation was repaired
  RepairOutcome outcome;
  std::string input_translation;
  std::string repaired_translation;
  // Mean consistency against the other candidates' translations, originals only.
  std::optional<double> mean_score_before;
  std::optional<double> mean_score_after;
  std::optional<double> reference_score;  // repaired mutant vs repaired original
};

struct RepairInputs {
  const SimilarityCorpus* corpus = nullptr;
  const PosTagger* tagger = nullptr;
  const PosTagger* target_tagger = nullptr;  // may be null
  TranslationClient* client = nullptr;
  const IdfTable* idf = nullptr;
  const LexiconModel* aligner_model = nullptr;  // trained on the fly when null
  LanguageProfile source_profile = LanguageProfile::for_tag("en");
  LanguageProfile target_profile = LanguageProfile::for_tag("en");
};

// Repairs every sentence group that has at least one bug: the original
// translation first, then each buggy mutant translation against it.
std::vector<RepairRecord> repair_stage(std::span<const TestReport> reports,
                                       const RepairInputs& inputs,
                                       const RepairSettings& settings);

std::string repair_to_json(const RepairRecord& record);
void write_repairs(const std::filesystem::path& path, std::span<const RepairRecord> repairs);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunSummary {
  bool ok = true;
  std::string failed_stage;
  std::string error;
  std::size_t sentences_in = 0;
  std::size_t mutants_generated = 0;  // candidates examined
  std::size_t mutants_filtered = 0;
  std::size_t mutants_emitted = 0;
  std::size_t inputs_tested = 0;  // (original, mutant) pairs
  std::map<std::string, std::size_t> bugs;             // per metric
  std::map<std::string, std::size_t> buggy_sentences;  // per metric
  std::string repair_mode;
  std::map<std::string, std::size_t> repairs;  // "<original|mutant>/<status>"
  ClientCounters translator;
  std::vector<StageTiming> timings;

  std::string to_json() const;
};

// Runs every stage and writes mutants.jsonl, translations.jsonl,
// reports.jsonl, repairs.jsonl and summary.json into the output directory.
// A failing stage is recorded in the summary; earlier artifacts remain.
RunSummary run_pipeline(const RunConfig& config);

struct Histogram {
  // 20 buckets of width 0.05 over [0, 1) followed by an exact-1.0 bucket.
  std::map<std::string, std::array<std::size_t, 21>> counts;  // per metric
  std::size_t malformed_lines = 0;

  std::string to_csv() const;
};

std::size_t histogram_bucket(double score);
Histogram report_histogram(std::istream& reports);
Histogram report_histogram(const std::filesystem::path& reports);

}  // namespace transcheck
