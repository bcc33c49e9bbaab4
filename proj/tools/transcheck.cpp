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

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "transcheck/aligner.hpp"
#include "transcheck/consistency.hpp"
#include "transcheck/diff_metrics.hpp"
#include "transcheck/embedding_corpus.hpp"
#include "transcheck/error.hpp"
#include "transcheck/pipeline.hpp"
#include "transcheck/pos_tagger.hpp"
#include "transcheck/translator.hpp"

namespace {

using namespace transcheck;
namespace fs = std::filesystem;

constexpr int kValidationFailure = 1;
constexpr int kStageFailure = 2;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kParse:
    case ErrorKind::kConfig:
    case ErrorKind::kIo:
    case ErrorKind::kCalibration:
      return kValidationFailure;
    default:
      return kStageFailure;
  }
}

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error(ErrorKind::kIo, "cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

LanguageProfile profile_for(const std::string& tag, const std::string& numerals) {
  auto profile = LanguageProfile::for_tag(tag);
  if (!numerals.empty()) profile.load_numerals(numerals);
  return profile;
}

ThresholdSet thresholds_from(const std::string& path) {
  ThresholdSet set = ThresholdSet::defaults();
  if (path.empty()) return set;
  const auto loaded = ThresholdSet::load(path);
  for (Metric metric : kAllMetrics) {
    if (loaded.has(metric)) set.set(metric, loaded.entry(metric));
  }
  return set;
}

IdfTable idf_from(const std::string& path) {
  return path.empty() ? IdfTable::uniform() : IdfTable::load(path);
}

std::vector<LabeledSample> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, path + ": missing header");
  std::vector<std::optional<Metric>> columns;
  std::optional<std::size_t> label_column;
  const auto header = split_fields(line);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "consistent") {
      label_column = c;
      columns.emplace_back();
    } else {
      columns.emplace_back(parse_metric(header[c]));
    }
  }
  if (!label_column) throw Error(ErrorKind::kParse, path + ": header needs a 'consistent' column");
  std::vector<LabeledSample> samples;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    const auto fields = split_fields(line);
    if (fields.size() != columns.size()) throw Error(ErrorKind::kParse, where + ": column count");
    LabeledSample sample;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == *label_column) {
        if (fields[c] != "0" && fields[c] != "1") {
          throw Error(ErrorKind::kParse, where + ": consistent must be 0 or 1");
        }
        sample.consistent = fields[c] == "1";
      } else if (!fields[c].empty() && fields[c] != "-") {
        sample.scores[static_cast<std::size_t>(*columns[c])] = parse_double(fields[c], where);
      }
    }
    samples.push_back(sample);
  }
  return samples;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  CLI::App app{"Metamorphic testing and repair of machine translation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress and gate decisions");

  // corpus build
  auto* corpus_cmd = app.add_subcommand("corpus", "Context-similar word corpus");
  corpus_cmd->require_subcommand(1);
  auto* corpus_build = corpus_cmd->add_subcommand("build", "Build from two embedding models");
  std::string model1, model2, corpus_out;
  double sim_threshold = 0.9;
  bool lowercase = false;
  std::size_t workers = 1;
  corpus_build->add_option("--model1", model1, "First embedding file")->required()->check(CLI::ExistingFile);
  corpus_build->add_option("--model2", model2, "Second embedding file")->required()->check(CLI::ExistingFile);
  corpus_build->add_option("--threshold", sim_threshold, "Minimum cosine similarity in both models");
  corpus_build->add_flag("--lowercase", lowercase, "Lowercase vocabulary while loading");
  corpus_build->add_option("--workers", workers, "Worker threads");
  corpus_build->add_option("--out", corpus_out, "Output TSV (stdout if omitted)");

  // idf build
  auto* idf_cmd = app.add_subcommand("idf", "Inverse document frequency tables");
  idf_cmd->require_subcommand(1);
  auto* idf_build = idf_cmd->add_subcommand("build", "Count document frequencies over sentences");
  std::string idf_input, idf_out, idf_lang = "en";
  idf_build->add_option("--input", idf_input, "One sentence per line")->required()->check(CLI::ExistingFile);
  idf_build->add_option("--lang", idf_lang, "Language tag used for tokenization");
  idf_build->add_option("--out", idf_out, "Output TSV (stdout if omitted)");

  // align train / align apply
  auto* align_cmd = app.add_subcommand("align", "Word alignment");
  align_cmd->require_subcommand(1);
  auto* align_train = align_cmd->add_subcommand("train", "Train lexical translation probabilities");
  std::string parallel, align_out, align_model, source_lang = "en", target_lang = "zh";
  std::size_t iterations = 10;
  double floor = 0.1;
  align_train->add_option("--parallel", parallel, "'source ||| target' lines")->required()->check(CLI::ExistingFile);
  align_train->add_option("--iterations", iterations, "EM iterations");
  align_train->add_option("--source-lang", source_lang, "Source language tag");
  align_train->add_option("--target-lang", target_lang, "Target language tag");
  align_train->add_option("--out", align_out, "Output model TSV (stdout if omitted)");
  auto* align_apply = align_cmd->add_subcommand("apply", "Print 'i-j' links for each pair");
  align_apply->add_option("--model", align_model, "Model from 'align train'")->required()->check(CLI::ExistingFile);
  align_apply->add_option("--parallel", parallel, "'source ||| target' lines")->required()->check(CLI::ExistingFile);
  align_apply->add_option("--floor", floor, "Minimum link probability");
  align_apply->add_option("--source-lang", source_lang, "Source language tag");
  align_apply->add_option("--target-lang", target_lang, "Target language tag");
  align_apply->add_option("--out", align_out, "Output file (stdout if omitted)");

  // mutate
  auto* mutate_cmd = app.add_subcommand("mutate", "Generate context-similar mutants");
  std::string input, corpus_path, out, tagger_descriptor = "baseline", filter = "sentence",
                                          source_numerals;
  std::size_t max_mutants = 5;
  bool fold_case = false;
  mutate_cmd->add_option("--input", input, "One sentence per line")->required()->check(CLI::ExistingFile);
  mutate_cmd->add_option("--corpus", corpus_path, "Similarity corpus TSV")->required()->check(CLI::ExistingFile);
  mutate_cmd->add_option("--max-mutants", max_mutants, "Mutants per sentence");
  mutate_cmd->add_option("--tagger", tagger_descriptor, "baseline, baseline:<lexicon>, rules or process:<cmd>");
  mutate_cmd->add_option("--filter", filter, "Structural filter: sentence or word");
  mutate_cmd->add_flag("--fold-case", fold_case, "Case-insensitive corpus lookup");
  mutate_cmd->add_option("--lang", source_lang, "Source language tag");
  mutate_cmd->add_option("--workers", workers, "Worker threads");
  mutate_cmd->add_option("--out", out, "mutants.jsonl (stdout if omitted)");

  // translate
  auto* translate_cmd = app.add_subcommand("translate", "Translate sentences through a profile");
  std::string profile_path, cache_path;
  translate_cmd->add_option("--profile", profile_path, "Translator profile")->required()->check(CLI::ExistingFile);
  translate_cmd->add_option("--input", input, "One sentence per line")->required()->check(CLI::ExistingFile);
  translate_cmd->add_option("--cache", cache_path, "JSONL response cache");
  translate_cmd->add_option("--workers", workers, "Worker threads");
  translate_cmd->add_option("--out", out, "Translation records JSONL (stdout if omitted)");

  // test
  auto* test_cmd = app.add_subcommand("test", "Translate mutants and flag inconsistencies");
  std::string mutants_path, metric_list = "LCS", thresholds_path, idf_path, target_numerals;
  test_cmd->add_option("--mutants", mutants_path, "mutants.jsonl")->required()->check(CLI::ExistingFile);
  test_cmd->add_option("--profile", profile_path, "Translator profile")->required()->check(CLI::ExistingFile);
  test_cmd->add_option("--cache", cache_path, "JSONL response cache");
  test_cmd->add_option("--metric", metric_list, "LCS, ED, TFIDF, BLEU, a comma list or all");
  test_cmd->add_option("--thresholds", thresholds_path, "Threshold file")->check(CLI::ExistingFile);
  test_cmd->add_option("--idf", idf_path, "IDF table")->check(CLI::ExistingFile);
  test_cmd->add_option("--workers", workers, "Worker threads");
  test_cmd->add_option("--out", out, "reports.jsonl (stdout if omitted)");

  // repair
  auto* repair_cmd = app.add_subcommand("repair", "Repair translations flagged in reports");
  std::string reports_path, mode = "cross-reference", repair_metric = "LCS",
                            target_tagger_descriptor = "rules";
  std::size_t repair_mutants = 16;
  repair_cmd->add_option("--reports", reports_path, "reports.jsonl")->required()->check(CLI::ExistingFile);
  repair_cmd->add_option("--profile", profile_path, "Translator profile")->required()->check(CLI::ExistingFile);
  repair_cmd->add_option("--corpus", corpus_path, "Similarity corpus TSV")->required()->check(CLI::ExistingFile);
  repair_cmd->add_option("--cache", cache_path, "JSONL response cache");
  repair_cmd->add_option("--mode", mode, "probability or cross-reference");
  repair_cmd->add_option("--metric", repair_metric, "Metric for ranking and the consistency gate");
  repair_cmd->add_option("--repair-mutants", repair_mutants, "Mutants per repaired sentence");
  repair_cmd->add_option("--thresholds", thresholds_path, "Threshold file")->check(CLI::ExistingFile);
  repair_cmd->add_option("--idf", idf_path, "IDF table")->check(CLI::ExistingFile);
  repair_cmd->add_option("--tagger", tagger_descriptor, "Source tagger");
  repair_cmd->add_option("--target-tagger", target_tagger_descriptor, "Target tagger, or none");
  repair_cmd->add_option("--aligner-model", align_model, "Model from 'align train'")->check(CLI::ExistingFile);
  repair_cmd->add_option("--iterations", iterations, "EM iterations when training on the fly");
  repair_cmd->add_option("--floor", floor, "Minimum link probability");
  repair_cmd->add_option("--filter", filter, "Structural filter: sentence or word");
  repair_cmd->add_flag("--fold-case", fold_case, "Case-insensitive corpus lookup");
  repair_cmd->add_option("--source-numerals", source_numerals, "Extra numeral words")->check(CLI::ExistingFile);
  repair_cmd->add_option("--target-numerals", target_numerals, "Extra numeral words")->check(CLI::ExistingFile);
  repair_cmd->add_option("--workers", workers, "Worker threads");
  repair_cmd->add_option("--out", out, "repairs.jsonl (stdout if omitted)");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run every stage from a config file");
  std::string config_path, output_dir;
  run_cmd->add_option("--config", config_path, "key=value run config")->required();
  run_cmd->add_option("--output-dir", output_dir, "Override the configured output directory");

  // report
  auto* report_cmd = app.add_subcommand("report", "Score histogram per metric");
  report_cmd->add_option("--reports", reports_path, "reports.jsonl")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out, "CSV file (stdout if omitted)");

  // calibrate
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Learn thresholds from labeled scores");
  std::string labels_path;
  double grid_step = 0.001;
  calibrate_cmd->add_option("--labels", labels_path, "TSV with metric columns and 'consistent'")->required()->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--grid-step", grid_step, "Grid step over [0.8, 1.0]");
  calibrate_cmd->add_option("--out", out, "Threshold file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationFailure;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*corpus_build) {
      const auto corpus = build_corpus(EmbeddingModel::load(model1, lowercase),
                                       EmbeddingModel::load(model2, lowercase), sim_threshold,
                                       workers);
      Output sink(corpus_out);
      corpus.write(sink.stream());
      spdlog::info("{} context-similar pairs", corpus.pairs().size());
    } else if (*idf_build) {
      const auto profile = LanguageProfile::for_tag(idf_lang);
      std::vector<Tokens> sentences;
      for (const auto& line : read_lines(idf_input)) sentences.push_back(profile.tokenize(line));
      Output sink(idf_out);
      build_idf(sentences).write(sink.stream());
    } else if (*align_train) {
      std::ifstream in(parallel);
      const auto pairs = read_parallel(in, LanguageProfile::for_tag(source_lang),
                                       LanguageProfile::for_tag(target_lang));
      const auto model = train_lexicon(pairs, iterations);
      Output sink(align_out);
      model.write(sink.stream());
    } else if (*align_apply) {
      const auto model = LexiconModel::load(align_model);
      std::ifstream in(parallel);
      const auto pairs = read_parallel(in, LanguageProfile::for_tag(source_lang),
                                       LanguageProfile::for_tag(target_lang));
      Output sink(align_out);
      for (const auto& pair : pairs) {
        sink.stream() << align(pair.source, pair.target, model, {floor}).to_string() << '\n';
      }
    } else if (*mutate_cmd) {
      const auto profile = LanguageProfile::for_tag(source_lang);
      const auto corpus = SimilarityCorpus::load(corpus_path);
      const auto tagger = make_tagger(tagger_descriptor);
      if (max_mutants < 1) throw Error(ErrorKind::kInvalidInput, "--max-mutants must be >= 1");
      const MutationOptions options{max_mutants, parse_filter_mode(filter), fold_case};
      const auto output = mutate_stage(read_sentences(input, profile), corpus, *tagger, options,
                                       profile, workers);
      Output sink(out);
      for (const auto& m : output.mutants) sink.stream() << mutant_to_json(m) << '\n';
      std::fprintf(stderr, "sentences=%zu candidates=%zu filtered=%zu emitted=%zu\n",
                   output.stats.sentences, output.stats.candidates, output.stats.filtered,
                   output.stats.emitted);
    } else if (*translate_cmd) {
      auto client = make_client(TranslatorProfile::load(profile_path), cache_path);
      const auto lines = read_lines(input);
      const auto records = translate_all(lines, *client, workers);
      Output sink(out);
      std::set<std::string> written;
      for (const auto& line : lines) {
        if (written.insert(line).second) sink.stream() << record_to_json(records.at(line)) << '\n';
      }
    } else if (*test_cmd) {
      const auto profile = TranslatorProfile::load(profile_path);
      auto client = make_client(profile, cache_path);
      const auto mutants = read_mutants(mutants_path);
      std::vector<std::string> texts;
      for (const auto& m : mutants) {
        texts.push_back(m.original);
        texts.push_back(m.mutant);
      }
      const auto translations = translate_all(texts, *client, workers);
      const auto metrics = parse_metric_list(metric_list);
      const auto reports =
          test_stage(mutants, translations, metrics, thresholds_from(thresholds_path),
                     idf_from(idf_path), LanguageProfile::for_tag(profile.target_language), workers);
      Output sink(out);
      for (const auto& r : reports) sink.stream() << report_to_json(r) << '\n';
    } else if (*repair_cmd) {
      const auto profile = TranslatorProfile::load(profile_path);
      const auto ranking = parse_ranking_mode(mode);
      if (ranking == RankingMode::kProbability && profile.capability != Capability::kGreyBox) {
        throw Error(ErrorKind::kConfig, "probability repair needs a grey-box translator profile");
      }
      auto client = make_client(profile, cache_path);
      const auto corpus = SimilarityCorpus::load(corpus_path);
      const auto tagger = make_tagger(tagger_descriptor);
      std::unique_ptr<PosTagger> target_tagger;
      if (target_tagger_descriptor != "none") target_tagger = make_tagger(target_tagger_descriptor);
      const auto idf = idf_from(idf_path);
      std::optional<LexiconModel> model;
      if (!align_model.empty()) model = LexiconModel::load(align_model);

      RepairInputs inputs;
      inputs.corpus = &corpus;
      inputs.tagger = tagger.get();
      inputs.target_tagger = target_tagger.get();
      inputs.client = client.get();
      inputs.idf = &idf;
      inputs.aligner_model = model ? &*model : nullptr;
      inputs.source_profile = profile_for(profile.source_language, source_numerals);
      inputs.target_profile = profile_for(profile.target_language, target_numerals);
      RepairSettings settings;
      settings.mode = ranking;
      settings.metric = parse_metric(repair_metric);
      settings.threshold = thresholds_from(thresholds_path).threshold(settings.metric);
      settings.repair_mutants = repair_mutants;
      settings.mutation.filter_mode = parse_filter_mode(filter);
      settings.mutation.fold_case = fold_case;
      settings.align_iterations = iterations;
      settings.align.floor = floor;
      settings.workers = workers;
      const auto repairs = repair_stage(read_reports(reports_path), inputs, settings);
      Output sink(out);
      for (const auto& r : repairs) sink.stream() << repair_to_json(r) << '\n';
    } else if (*run_cmd) {
      auto config = RunConfig::load(config_path);
      if (!output_dir.empty()) config.output_dir = output_dir;
      const auto summary = run_pipeline(config);
      std::cout << summary.to_json() << '\n';
      return summary.ok ? 0 : kStageFailure;
    } else if (*report_cmd) {
      const auto histogram = report_histogram(fs::path(reports_path));
      Output sink(out);
      sink.stream() << histogram.to_csv();
      if (histogram.malformed_lines > 0) {
        std::fprintf(stderr, "skipped %zu malformed lines\n", histogram.malformed_lines);
      }
    } else if (*calibrate_cmd) {
      const auto samples = read_labels(labels_path);
      GridOptions grid;
      grid.step = grid_step;
      const auto thresholds = learn_thresholds(samples, grid);
      Output sink(out);
      thresholds.write(sink.stream());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStageFailure;
  }
  return 0;
}
