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

#include "transcheck/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "transcheck/error.hpp"

namespace transcheck {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(std::string_view value, const std::string& where) {
  const double v = parse_double(value, where);
  if (v < 0 || v != std::floor(v)) {
    throw Error(ErrorKind::kConfig, where + ": expected a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view value, const std::string& where) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorKind::kConfig, where + ": expected true or false");
}

void require_file(const std::filesystem::path& path, std::string_view what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorKind::kConfig, std::string(what) + " not found: " + path.string());
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse,
                  path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
}

json optional_number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<double> read_optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

json slices_to_json(std::span<const DiffSlice> slices) {
  json out = json::array();
  for (const auto& slice : slices) out.push_back({{"start", slice.start}, {"tokens", slice.tokens}});
  return out;
}

std::vector<DiffSlice> slices_from_json(const json& j) {
  std::vector<DiffSlice> out;
  for (const auto& item : j) {
    out.push_back({item.at("start").get<std::size_t>(), item.at("tokens").get<Tokens>()});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

RunConfig RunConfig::parse(std::istream& in, const std::filesystem::path& base_dir,
                           std::string_view source_name) {
  RunConfig config;
  config.output_dir = base_dir / "out";
  auto resolve = [&](std::string_view value) {
    std::filesystem::path path{std::string(value)};
    return path.is_relative() ? (base_dir / path).lexically_normal() : path;
  };
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::kConfig, where + ": expected key=value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    try {
      if (key == "input") {
        config.input = resolve(value);
      } else if (key == "corpus") {
        config.corpus = resolve(value);
      } else if (key == "model1") {
        config.model1 = resolve(value);
      } else if (key == "model2") {
        config.model2 = resolve(value);
      } else if (key == "sim_threshold") {
        config.sim_threshold = parse_double(value, where);
      } else if (key == "lowercase") {
        config.lowercase = parse_bool(value, where);
      } else if (key == "translator") {
        config.translator = resolve(value);
      } else if (key == "metric" || key == "metrics") {
        config.metrics = parse_metric_list(value);
      } else if (key == "thresholds") {
        config.thresholds = resolve(value);
      } else if (key == "idf") {
        config.idf = resolve(value);
      } else if (key == "max_test_mutants") {
        config.max_test_mutants = parse_count(value, where);
      } else if (key == "repair_mutants") {
        config.repair_mutants = parse_count(value, where);
      } else if (key == "repair") {
        config.repair = parse_bool(value, where);
      } else if (key == "repair_mode") {
        config.repair_mode = parse_ranking_mode(value);
      } else if (key == "repair_metric") {
        config.repair_metric = parse_metric(value);
      } else if (key == "output_dir") {
        config.output_dir = resolve(value);
      } else if (key == "cache") {
        config.cache = resolve(value);
      } else if (key == "tagger" || key == "target_tagger") {
        std::string descriptor(value);
        if (descriptor.starts_with("baseline:")) descriptor = "baseline:" + resolve(descriptor.substr(9)).string();
        (key == "tagger" ? config.tagger : config.target_tagger) = descriptor;
      } else if (key == "filter_mode") {
        config.filter_mode = parse_filter_mode(value);
      } else if (key == "fold_case") {
        config.fold_case = parse_bool(value, where);
      } else if (key == "source_numerals") {
        config.source_numerals = resolve(value);
      } else if (key == "target_numerals") {
        config.target_numerals = resolve(value);
      } else if (key == "aligner_model") {
        config.aligner_model = resolve(value);
      } else if (key == "align_iterations") {
        config.align_iterations = parse_count(value, where);
      } else if (key == "align_floor") {
        config.align_floor = parse_double(value, where);
      } else if (key == "workers") {
        config.workers = parse_count(value, where);
      } else if (key == "seed") {
        config.seed = parse_count(value, where);
      } else {
        throw Error(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kConfig) throw;
      throw Error(ErrorKind::kConfig, where + ": " + e.what());
    }
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open run config " + path.string());
  return parse(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path(),
               path.string());
}

void RunConfig::validate() const {
  if (input.empty()) throw Error(ErrorKind::kConfig, "input is required");
  require_file(input, "input");
  if (!corpus.empty()) {
    require_file(corpus, "corpus");
  } else if (!model1.empty() && !model2.empty()) {
    require_file(model1, "model1");
    require_file(model2, "model2");
  } else {
    throw Error(ErrorKind::kConfig, "either corpus or model1 and model2 are required");
  }
  if (translator.empty()) throw Error(ErrorKind::kConfig, "translator is required");
  require_file(translator, "translator profile");
  if (!thresholds.empty()) require_file(thresholds, "thresholds");
  if (!idf.empty()) require_file(idf, "idf table");
  if (!aligner_model.empty()) require_file(aligner_model, "aligner model");
  if (!source_numerals.empty()) require_file(source_numerals, "source numerals");
  if (!target_numerals.empty()) require_file(target_numerals, "target numerals");
  if (metrics.empty()) throw Error(ErrorKind::kConfig, "at least one metric is required");
  if (max_test_mutants < 1) throw Error(ErrorKind::kConfig, "max_test_mutants must be >= 1");
  if (repair_mutants < 1) throw Error(ErrorKind::kConfig, "repair_mutants must be >= 1");
  if (align_iterations < 1) throw Error(ErrorKind::kConfig, "align_iterations must be >= 1");
  if (workers < 1) throw Error(ErrorKind::kConfig, "workers must be >= 1");
  if (!(sim_threshold > 0.0 && sim_threshold <= 1.0)) {
    throw Error(ErrorKind::kConfig, "sim_threshold must be in (0, 1]");
  }
  if (!(align_floor >= 0.0 && align_floor <= 1.0)) {
    throw Error(ErrorKind::kConfig, "align_floor must be in [0, 1]");
  }
  const auto profile = TranslatorProfile::load(translator);
  if (profile.kind == TranslatorKind::kMock) require_file(profile.endpoint, "mock translator config");
  if (repair && repair_mode == RankingMode::kProbability &&
      profile.capability != Capability::kGreyBox) {
    throw Error(ErrorKind::kConfig, "probability repair needs a grey-box translator profile");
  }
}

// ---------------------------------------------------------------------------
// Mutate

std::vector<SourceSentence> read_sentences(const std::filesystem::path& path,
                                           const LanguageProfile& profile) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<SourceSentence> sentences;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    Tokens tokens = profile.tokenize(trim(line));
    if (tokens.empty()) continue;
    sentences.push_back({line_number, std::move(tokens)});
  }
  return sentences;
}

MutateOutput mutate_stage(std::span<const SourceSentence> sentences, const SimilarityCorpus& corpus,
                          const PosTagger& tagger, const MutationOptions& options,
                          const LanguageProfile& source_profile, std::size_t workers) {
  auto batches = parallel_map(sentences.size(), workers, [&](std::size_t k) {
    try {
      return generate_mutants_with_stats(pos_tag(sentences[k].tokens, tagger), corpus, tagger,
                                         options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidSentence) throw;
      spdlog::warn("sentence {} skipped: {}", sentences[k].id, e.what());
      return MutationBatch{};
    }
  });
  MutateOutput output;
  output.stats.sentences = sentences.size();
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    const auto& batch = batches[k];
    output.stats.candidates += batch.candidates;
    output.stats.filtered += batch.rejected;
    output.stats.emitted += batch.mutants.size();
    const std::string original = source_profile.detokenize(sentences[k].tokens);
    for (std::size_t m = 0; m < batch.mutants.size(); ++m) {
      const auto& mutant = batch.mutants[m];
      output.mutants.push_back({sentences[k].id, m + 1, original,
                                source_profile.detokenize(mutant.tokens()), mutant.mutated_index,
                                mutant.original_word, mutant.replacement_word, mutant.similarity});
    }
  }
  return output;
}

std::string mutant_to_json(const MutantRecord& m) {
  const json j = {{"schema", kMutantSchema},
                  {"sentence_id", m.sentence_id},
                  {"mutant_id", m.mutant_id},
                  {"original", m.original},
                  {"mutant", m.mutant},
                  {"index", m.index},
                  {"original_word", m.original_word},
                  {"replacement_word", m.replacement_word},
                  {"similarity", m.similarity}};
  return j.dump();
}

void write_mutants(const std::filesystem::path& path, std::span<const MutantRecord> mutants) {
  auto out = open_output(path);
  for (const auto& m : mutants) out << mutant_to_json(m) << '\n';
}

std::vector<MutantRecord> read_mutants(const std::filesystem::path& path) {
  std::vector<MutantRecord> mutants;
  for_each_json_line(path, [&](const json& j) {
    mutants.push_back({j.at("sentence_id").get<std::size_t>(), j.at("mutant_id").get<std::size_t>(),
                       j.at("original").get<std::string>(), j.at("mutant").get<std::string>(),
                       j.at("index").get<std::size_t>(), j.at("original_word").get<std::string>(),
                       j.at("replacement_word").get<std::string>(),
                       j.value("similarity", 0.0)});
  });
  return mutants;
}

// ---------------------------------------------------------------------------
// Translate and test

std::map<std::string, TranslationRecord> translate_all(std::span<const std::string> texts,
                                                       TranslationClient& client,
                                                       std::size_t workers) {
  std::vector<std::string> unique;
  std::set<std::string_view> seen;
  for (const auto& text : texts) {
    if (seen.insert(text).second) unique.push_back(text);
  }
  auto records = parallel_map(unique.size(), workers,
                              [&](std::size_t k) { return client.translate(unique[k]); });
  std::map<std::string, TranslationRecord> out;
  for (std::size_t k = 0; k < unique.size(); ++k) out.emplace(unique[k], std::move(records[k]));
  return out;
}

std::vector<TestReport> test_stage(std::span<const MutantRecord> mutants,
                                   const std::map<std::string, TranslationRecord>& translations,
                                   std::span<const Metric> metrics, const ThresholdSet& thresholds,
                                   const IdfTable& idf, const LanguageProfile& target_profile,
                                   std::size_t workers) {
  auto lookup = [&](const std::string& text) -> const TranslationRecord& {
    auto it = translations.find(text);
    if (it == translations.end()) {
      throw Error(ErrorKind::kInvalidInput, "no translation for '" + text + "'");
    }
    return it->second;
  };
  auto groups = parallel_map(mutants.size(), workers, [&](std::size_t k) {
    const auto& m = mutants[k];
    const auto& original = lookup(m.original);
    const auto& mutant = lookup(m.mutant);
    const Tokens t_o = target_profile.tokenize(original.output);
    const Tokens t_m = target_profile.tokenize(mutant.output);
    std::vector<TestReport> reports;
    for (Metric metric : metrics) {
      ConsistencyReport verdict = judge(t_o, t_m, thresholds, metric, idf);
      TestReport report;
      report.sentence_id = m.sentence_id;
      report.mutant_id = m.mutant_id;
      report.metric = metric;
      report.score = verdict.score;
      report.threshold = verdict.threshold;
      report.is_bug = verdict.is_bug;
      report.degenerate = verdict.degenerate;
      report.original = m.original;
      report.mutant = m.mutant;
      report.original_translation = original.output;
      report.mutant_translation = mutant.output;
      report.original_probability = original.probability;
      report.mutant_probability = mutant.probability;
      report.slices = std::move(verdict.slices);
      reports.push_back(std::move(report));
    }
    return reports;
  });
  std::vector<TestReport> out;
  for (auto& group : groups) {
    for (auto& report : group) out.push_back(std::move(report));
  }
  return out;
}

std::string report_to_json(const TestReport& r) {
  const json j = {{"schema", kReportSchema},
                  {"sentence_id", r.sentence_id},
                  {"mutant_id", r.mutant_id},
                  {"metric", metric_name(r.metric)},
                  {"score", r.score},
                  {"threshold", r.threshold},
                  {"is_bug", r.is_bug},
                  {"degenerate", r.degenerate},
                  {"original", r.original},
                  {"mutant", r.mutant},
                  {"original_translation", r.original_translation},
                  {"mutant_translation", r.mutant_translation},
                  {"original_probability", optional_number(r.original_probability)},
                  {"mutant_probability", optional_number(r.mutant_probability)},
                  {"slices",
                   {{"original", slices_to_json(r.slices.slices_a)},
                    {"mutant", slices_to_json(r.slices.slices_b)}}}};
  return j.dump();
}

void write_reports(const std::filesystem::path& path, std::span<const TestReport> reports) {
  auto out = open_output(path);
  for (const auto& report : reports) out << report_to_json(report) << '\n';
}

std::vector<TestReport> read_reports(const std::filesystem::path& path) {
  std::vector<TestReport> reports;
  for_each_json_line(path, [&](const json& j) {
    TestReport r;
    r.sentence_id = j.at("sentence_id").get<std::size_t>();
    r.mutant_id = j.at("mutant_id").get<std::size_t>();
    r.metric = parse_metric(j.at("metric").get<std::string>());
    r.score = j.at("score").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.is_bug = j.at("is_bug").get<bool>();
    r.degenerate = j.value("degenerate", false);
    r.original = j.at("original").get<std::string>();
    r.mutant = j.at("mutant").get<std::string>();
    r.original_translation = j.at("original_translation").get<std::string>();
    r.mutant_translation = j.at("mutant_translation").get<std::string>();
    r.original_probability = read_optional_number(j, "original_probability");
    r.mutant_probability = read_optional_number(j, "mutant_probability");
    if (auto s = j.find("slices"); s != j.end()) {
      r.slices.slices_a = slices_from_json(s->at("original"));
      r.slices.slices_b = slices_from_json(s->at("mutant"));
    }
    reports.push_back(std::move(r));
  });
  return reports;
}

// ---------------------------------------------------------------------------
// Repair

namespace {

struct Unit {
  std::optional<std::size_t> mutant_id;
  std::string text;
  std::string translation;
  std::optional<double> probability;
  Tokens tokens;
  std::vector<Tokens> candidates;  // repair mutants
};

struct Group {
  std::size_t sentence_id = 0;
  Unit original;
  std::vector<Unit> mutants;  // every tested mutant, ascending id
  std::set<std::size_t> buggy;
};

std::vector<Group> group_reports(std::span<const TestReport> reports) {
  std::map<std::size_t, Group> groups;
  for (const auto& r : reports) {
    Group& g = groups[r.sentence_id];
    g.sentence_id = r.sentence_id;
    g.original.text = r.original;
    g.original.translation = r.original_translation;
    g.original.probability = r.original_probability;
    auto it = std::find_if(g.mutants.begin(), g.mutants.end(),
                           [&](const Unit& u) { return u.mutant_id == r.mutant_id; });
    if (it == g.mutants.end()) {
      g.mutants.push_back({r.mutant_id, r.mutant, r.mutant_translation, r.mutant_probability, {}, {}});
    }
    if (r.is_bug) g.buggy.insert(r.mutant_id);
  }
  std::vector<Group> out;
  for (auto& [id, g] : groups) {
    std::sort(g.mutants.begin(), g.mutants.end(),
              [](const Unit& a, const Unit& b) { return a.mutant_id < b.mutant_id; });
    out.push_back(std::move(g));
  }
  return out;
}

double mean_consistency(const Tokens& translation, const CandidateSet& set, Metric metric,
                        const IdfTable& idf) {
  double sum = 0.0;
  for (std::size_t k = 1; k < set.size(); ++k) {
    sum += consistency_score(translation, set.entries()[k].translation, metric, idf).score;
  }
  return sum / static_cast<double>(set.size() - 1);
}

}  // namespace

std::vector<RepairRecord> repair_stage(std::span<const TestReport> reports,
                                       const RepairInputs& inputs,
                                       const RepairSettings& settings) {
  if (inputs.corpus == nullptr || inputs.tagger == nullptr || inputs.client == nullptr) {
    throw Error(ErrorKind::kConfig, "repair_stage: corpus, tagger and translator are required");
  }
  const IdfTable uniform;
  const IdfTable& idf = inputs.idf ? *inputs.idf : uniform;
  auto groups = group_reports(reports);

  MutationOptions mutation = settings.mutation;
  mutation.max_mutants = settings.repair_mutants;
  auto expand = [&](Unit& unit) {
    unit.tokens = inputs.source_profile.tokenize(unit.text);
    try {
      for (const auto& m :
           generate_mutants(pos_tag(unit.tokens, *inputs.tagger), *inputs.corpus, *inputs.tagger,
                            mutation)) {
        unit.candidates.push_back(m.tokens());
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidSentence) throw;
      spdlog::warn("repair: cannot tag '{}': {}", unit.text, e.what());
    }
  };
  parallel_map(groups.size(), settings.workers, [&](std::size_t k) {
    Group& g = groups[k];
    if (g.buggy.empty()) return 0;
    expand(g.original);
    for (auto& unit : g.mutants) {
      if (g.buggy.contains(*unit.mutant_id)) expand(unit);
    }
    return 0;
  });

  std::vector<std::string> texts;
  for (const auto& g : groups) {
    for (const auto& c : g.original.candidates) texts.push_back(inputs.source_profile.detokenize(c));
    for (const auto& unit : g.mutants) {
      for (const auto& c : unit.candidates) texts.push_back(inputs.source_profile.detokenize(c));
    }
  }
  const auto translations = translate_all(texts, *inputs.client, settings.workers);

  std::optional<LexiconModel> trained;
  if (inputs.aligner_model == nullptr) {
    std::vector<ParallelPair> pairs;
    std::set<std::string> seen;
    auto add = [&](const std::string& source, const std::string& target) {
      if (!seen.insert(source).second) return;
      pairs.push_back({inputs.source_profile.tokenize(source), inputs.target_profile.tokenize(target)});
    };
    for (const auto& g : groups) {
      add(g.original.text, g.original.translation);
      for (const auto& unit : g.mutants) add(unit.text, unit.translation);
    }
    for (const auto& [source, record] : translations) add(source, record.output);
    if (!pairs.empty()) trained = train_lexicon(pairs, settings.align_iterations);
  }
  const LexiconModel empty_model;
  const LexiconModel& model =
      inputs.aligner_model ? *inputs.aligner_model : (trained ? *trained : empty_model);
  const LexicalAligner aligner(model, settings.align);

  RepairContext context;
  context.mode = settings.mode;
  context.metric = settings.metric;
  context.threshold = settings.threshold;
  context.idf = &idf;
  context.aligner = &aligner;
  context.target_tagger = inputs.target_tagger;
  context.source_profile = inputs.source_profile;
  context.target_profile = inputs.target_profile;

  auto build_set = [&](const Unit& unit) {
    CandidateSet set(unit.tokens, inputs.target_profile.tokenize(unit.translation),
                     unit.probability);
    for (std::size_t k = 0; k < unit.candidates.size(); ++k) {
      const auto& record = translations.at(inputs.source_profile.detokenize(unit.candidates[k]));
      set.add_mutant(k + 1, unit.candidates[k], inputs.target_profile.tokenize(record.output),
                     record.probability);
    }
    return set;
  };
  auto make_record = [&](std::size_t sentence_id, const Unit& unit, const CandidateSet& set,
                         RepairOutcome outcome) {
    RepairRecord record;
    record.sentence_id = sentence_id;
    record.mutant_id = unit.mutant_id;
    record.mode = settings.mode;
    record.metric = settings.metric;
    record.candidates = set.size() - 1;
    record.source = unit.text;
    record.input_translation = unit.translation;
    record.repaired_translation = outcome.status == RepairStatus::kRepaired
                                      ? inputs.target_profile.detokenize(outcome.repaired_translation)
                                      : unit.translation;
    record.outcome = std::move(outcome);
    return record;
  };

  auto per_group = parallel_map(groups.size(), settings.workers, [&](std::size_t k) {
    const Group& g = groups[k];
    std::vector<RepairRecord> records;
    if (g.buggy.empty()) return records;

    const CandidateSet original_set = build_set(g.original);
    RepairOutcome original_outcome = repair_translation(original_set, context);
    const Tokens reference = original_outcome.repaired_translation;
    RepairRecord original_record =
        make_record(g.sentence_id, g.original, original_set, std::move(original_outcome));
    if (original_set.size() > 1) {
      original_record.mean_score_before = mean_consistency(
          original_set.original().translation, original_set, settings.metric, idf);
      original_record.mean_score_after =
          mean_consistency(reference, original_set, settings.metric, idf);
    }
    records.push_back(std::move(original_record));

    for (const auto& unit : g.mutants) {
      if (!g.buggy.contains(*unit.mutant_id)) continue;
      const CandidateSet set = build_set(unit);
      RepairOutcome outcome = repair_translation(set, context, reference);
      const double score =
          consistency_score(outcome.repaired_translation, reference, settings.metric, idf).score;
      RepairRecord record = make_record(g.sentence_id, unit, set, std::move(outcome));
      record.reference_score = score;
      records.push_back(std::move(record));
    }
    return records;
  });

  std::vector<RepairRecord> out;
  for (auto& records : per_group) {
    for (auto& record : records) out.push_back(std::move(record));
  }
  return out;
}

std::string repair_to_json(const RepairRecord& r) {
  json gates = json::array();
  for (const auto& g : r.outcome.gates) {
    gates.push_back({{"candidate", g.mutant_id ? json(*g.mutant_id) : json("original")},
                     {"rank_score", g.rank_score},
                     {"numeric", gate_result_name(g.numeric)},
                     {"structure", gate_result_name(g.structure)},
                     {"consistency", gate_result_name(g.consistency)},
                     {"consistency_score", optional_number(g.consistency_score)},
                     {"skip_reason", g.skip_reason.empty() ? json(nullptr) : json(g.skip_reason)}});
  }
  const json j = {{"schema", kRepairSchema},
                  {"sentence_id", r.sentence_id},
                  {"mutant_id", r.mutant_id ? json(*r.mutant_id) : json(nullptr)},
                  {"target", r.mutant_id ? "mutant" : "original"},
                  {"mode", ranking_mode_name(r.mode)},
                  {"metric", metric_name(r.metric)},
                  {"status", repair_status_name(r.outcome.status)},
                  {"chosen", r.outcome.chosen ? json(*r.outcome.chosen) : json(nullptr)},
                  {"candidates", r.candidates},
                  {"source", r.source},
                  {"input_translation", r.input_translation},
                  {"repaired_translation", r.repaired_translation},
                  {"mean_score_before", optional_number(r.mean_score_before)},
                  {"mean_score_after", optional_number(r.mean_score_after)},
                  {"reference_score", optional_number(r.reference_score)},
                  {"gates", gates}};
  return j.dump();
}

void write_repairs(const std::filesystem::path& path, std::span<const RepairRecord> repairs) {
  auto out = open_output(path);
  for (const auto& record : repairs) out << repair_to_json(record) << '\n';
}

// ---------------------------------------------------------------------------
// run_pipeline

std::string RunSummary::to_json() const {
  json timing = json::object();
  for (const auto& t : timings) timing[t.stage] = t.seconds;
  const json j = {{"schema", kSummarySchema},
                  {"status", ok ? "ok" : "failed"},
                  {"failed_stage", failed_stage.empty() ? json(nullptr) : json(failed_stage)},
                  {"error", error.empty() ? json(nullptr) : json(error)},
                  {"counts",
                   {{"sentences_in", sentences_in},
                    {"mutants_generated", mutants_generated},
                    {"mutants_filtered", mutants_filtered},
                    {"mutants_emitted", mutants_emitted},
                    {"inputs_tested", inputs_tested},
                    {"bugs", bugs},
                    {"buggy_sentences", buggy_sentences},
                    {"repair_mode", repair_mode},
                    {"repairs", repairs}}},
                  {"translator",
                   {{"requests", translator.requests},
                    {"cache_hits", translator.cache_hits},
                    {"backend_calls", translator.backend_calls},
                    {"retries", translator.retries}}},
                  {"timings_seconds", timing}};
  return j.dump(2);
}

RunSummary run_pipeline(const RunConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  RunSummary summary;

  auto stage = [&](const char* name, auto&& body) {
    if (!summary.ok) return;
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const std::exception& e) {
      summary.ok = false;
      summary.failed_stage = name;
      summary.error = e.what();
      spdlog::error("stage {} failed: {}", name, e.what());
    }
    summary.timings.push_back(
        {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
  };

  TranslatorProfile profile;
  LanguageProfile source_profile;
  LanguageProfile target_profile;
  std::unique_ptr<TranslationClient> client;
  std::unique_ptr<PosTagger> tagger;
  std::unique_ptr<PosTagger> target_tagger;
  ThresholdSet thresholds = ThresholdSet::defaults();
  IdfTable idf;
  std::optional<LexiconModel> aligner_model;
  std::optional<SimilarityCorpus> corpus;
  std::vector<MutantRecord> mutants;
  std::map<std::string, TranslationRecord> translations;
  std::vector<TestReport> reports;

  stage("setup", [&] {
    profile = TranslatorProfile::load(config.translator);
    source_profile = LanguageProfile::for_tag(profile.source_language);
    target_profile = LanguageProfile::for_tag(profile.target_language);
    if (!config.source_numerals.empty()) source_profile.load_numerals(config.source_numerals);
    if (!config.target_numerals.empty()) target_profile.load_numerals(config.target_numerals);
    client = make_client(profile, config.cache);
    tagger = make_tagger(config.tagger);
    if (config.target_tagger != "none") target_tagger = make_tagger(config.target_tagger);
    if (!config.thresholds.empty()) {
      const auto loaded = ThresholdSet::load(config.thresholds);
      for (Metric metric : kAllMetrics) {
        if (loaded.has(metric)) thresholds.set(metric, loaded.entry(metric));
      }
    }
    if (!config.idf.empty()) idf = IdfTable::load(config.idf);
    if (!config.aligner_model.empty()) aligner_model = LexiconModel::load(config.aligner_model);
  });

  stage("corpus", [&] {
    if (!config.corpus.empty()) {
      corpus = SimilarityCorpus::load(config.corpus);
    } else {
      corpus = build_corpus(EmbeddingModel::load(config.model1, config.lowercase),
                            EmbeddingModel::load(config.model2, config.lowercase),
                            config.sim_threshold, config.workers);
      corpus->save(config.output_dir / "corpus.tsv");
    }
  });

  MutationOptions mutation{config.max_test_mutants, config.filter_mode, config.fold_case};
  stage("mutate", [&] {
    const auto sentences = read_sentences(config.input, source_profile);
    auto output = mutate_stage(sentences, *corpus, *tagger, mutation, source_profile, config.workers);
    summary.sentences_in = output.stats.sentences;
    summary.mutants_generated = output.stats.candidates;
    summary.mutants_filtered = output.stats.filtered;
    summary.mutants_emitted = output.stats.emitted;
    mutants = std::move(output.mutants);
    write_mutants(config.output_dir / "mutants.jsonl", mutants);
  });

  stage("translate", [&] {
    std::vector<std::string> texts;
    for (const auto& m : mutants) {
      texts.push_back(m.original);
      texts.push_back(m.mutant);
    }
    translations = translate_all(texts, *client, config.workers);
    auto out = open_output(config.output_dir / "translations.jsonl");
    std::set<std::string_view> written;
    for (const auto& text : texts) {
      if (!written.insert(text).second) continue;
      const auto& record = translations.at(text);
      const json j = {{"schema", kTranslationSchema},
                      {"input", record.input},
                      {"output", record.output},
                      {"probability", optional_number(record.probability)},
                      {"backend", record.backend},
                      {"source_language", record.source_language},
                      {"target_language", record.target_language}};
      out << j.dump() << '\n';
    }
  });

  stage("test", [&] {
    reports = test_stage(mutants, translations, config.metrics, thresholds, idf, target_profile,
                         config.workers);
    write_reports(config.output_dir / "reports.jsonl", reports);
    summary.inputs_tested = mutants.size();
    std::map<std::string, std::set<std::size_t>> sentences;
    for (Metric metric : config.metrics) {
      summary.bugs[std::string(metric_name(metric))] = 0;
      sentences[std::string(metric_name(metric))];
    }
    for (const auto& r : reports) {
      if (!r.is_bug) continue;
      ++summary.bugs[std::string(metric_name(r.metric))];
      sentences[std::string(metric_name(r.metric))].insert(r.sentence_id);
    }
    for (const auto& [name, ids] : sentences) summary.buggy_sentences[name] = ids.size();
  });

  if (config.repair) {
    stage("repair", [&] {
      RepairInputs inputs;
      inputs.corpus = &*corpus;
      inputs.tagger = tagger.get();
      inputs.target_tagger = target_tagger.get();
      inputs.client = client.get();
      inputs.idf = &idf;
      inputs.aligner_model = aligner_model ? &*aligner_model : nullptr;
      inputs.source_profile = source_profile;
      inputs.target_profile = target_profile;
      RepairSettings settings;
      settings.mode = config.repair_mode;
      settings.metric = config.repair_metric;
      settings.threshold = thresholds.threshold(config.repair_metric);
      settings.repair_mutants = config.repair_mutants;
      settings.mutation = mutation;
      settings.align_iterations = config.align_iterations;
      settings.align.floor = config.align_floor;
      settings.workers = config.workers;
      const auto repairs = repair_stage(reports, inputs, settings);
      write_repairs(config.output_dir / "repairs.jsonl", repairs);
      summary.repair_mode = std::string(ranking_mode_name(config.repair_mode));
      for (const char* target : {"original", "mutant"}) {
        for (RepairStatus status :
             {RepairStatus::kRepaired, RepairStatus::kKeptOriginal, RepairStatus::kNoCandidate}) {
          summary.repairs[std::string(target) + "/" + std::string(repair_status_name(status))] = 0;
        }
      }
      for (const auto& r : repairs) {
        ++summary.repairs[std::string(r.mutant_id ? "mutant" : "original") + "/" +
                          std::string(repair_status_name(r.outcome.status))];
      }
    });
  }

  if (client) summary.translator = client->counters();
  auto out = open_output(config.output_dir / "summary.json");
  out << summary.to_json() << '\n';
  return summary;
}

// ---------------------------------------------------------------------------
// Histogram

std::size_t histogram_bucket(double score) {
  if (score >= 1.0) return 20;
  if (score <= 0.0) return 0;
  return std::min<std::size_t>(19, static_cast<std::size_t>(std::floor(score * 20.0 + 1e-9)));
}

Histogram report_histogram(std::istream& reports) {
  Histogram histogram;
  std::string line;
  while (std::getline(reports, line)) {
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      const auto metric = j.at("metric").get<std::string>();
      const double score = j.at("score").get<double>();
      if (!(score >= 0.0 && score <= 1.0)) throw Error(ErrorKind::kParse, "score outside [0, 1]");
      auto [it, inserted] = histogram.counts.try_emplace(metric);
      if (inserted) it->second.fill(0);
      ++it->second[histogram_bucket(score)];
    } catch (const std::exception&) {
      ++histogram.malformed_lines;
    }
  }
  if (histogram.malformed_lines > 0) {
    spdlog::warn("histogram: skipped {} malformed report lines", histogram.malformed_lines);
  }
  return histogram;
}

Histogram report_histogram(const std::filesystem::path& reports) {
  std::ifstream in(reports);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + reports.string());
  return report_histogram(in);
}

std::string Histogram::to_csv() const {
  std::string out = "metric,lower,upper,count\n";
  char buffer[96];
  for (const auto& [metric, buckets] : counts) {
    for (std::size_t k = 0; k < buckets.size(); ++k) {
      const double lower = k < 20 ? static_cast<double>(k) * 0.05 : 1.0;
      const double upper = k < 20 ? static_cast<double>(k + 1) * 0.05 : 1.0;
      std::snprintf(buffer, sizeof buffer, "%s,%.2f,%.2f,%zu\n", metric.c_str(), lower, upper,
                    buckets[k]);
      out += buffer;
    }
  }
  return out;
}

}  // namespace transcheck
