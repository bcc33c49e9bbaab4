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

#include "support/fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "transcheck/error.hpp"
#include "transcheck/pos_tagger.hpp"

namespace transcheck::testing {

TempDir::TempDir() {
  std::random_device device;
  std::mt19937_64 rng(device());
  for (;;) {
    std::ostringstream name;
    name << "transcheck-" << std::hex << rng();
    path_ = fs::temp_directory_path() / name.str();
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ignored;
  fs::remove_all(path_, ignored);
}

void write_text(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> pseudo_words(std::size_t count, std::mt19937& rng) {
  static constexpr std::string_view kConsonants = "bdgkmnprtz";
  static constexpr std::string_view kVowels = "aeiou";
  const LexiconTagger tagger;
  std::set<std::string> seen;
  std::vector<std::string> words;
  std::uniform_int_distribution<std::size_t> consonant(0, kConsonants.size() - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, kVowels.size() - 1);
  while (words.size() < count) {
    std::string word;
    for (int s = 0; s < 3; ++s) {
      word.push_back(kConsonants[consonant(rng)]);
      word.push_back(kVowels[vowel(rng)]);
    }
    if (!seen.insert(word).second) continue;
    const Tokens probe{"the", word};
    if (tagger.tag(probe)[1] != "NN") continue;
    words.push_back(word);
  }
  return words;
}

MutationFixture make_mutation_fixture(std::size_t sentences, std::size_t pairs, unsigned seed) {
  std::mt19937 rng(seed);
  const auto nouns = pseudo_words(24, rng);
  std::vector<std::string> adjectives;
  for (const auto& w : pseudo_words(12, rng)) adjectives.push_back(w + "ous");
  const std::vector<std::string> numerals{"two", "three", "four", "five", "six", "seven", "eight"};

  std::set<std::pair<std::string, std::string>> chosen;
  std::vector<SimilarityPair> corpus_pairs;
  MutationFixture fixture;
  auto add_pair = [&](const std::string& a, const std::string& b, bool cross) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    if (!chosen.insert(key).second) return;
    std::uniform_real_distribution<double> sim(0.9, 1.0);
    const double s1 = sim(rng);
    const double s2 = sim(rng);
    corpus_pairs.push_back({key.first, key.second, s1, s2});
    if (cross) ++fixture.cross_category_pairs;
  };
  auto pick = [&](const std::vector<std::string>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  const std::size_t cross = pairs / 5;
  while (corpus_pairs.size() < pairs) {
    const std::size_t k = corpus_pairs.size();
    if (k < cross) {
      add_pair(pick(nouns), pick(adjectives), true);
    } else if (k % 3 == 0) {
      add_pair(pick(adjectives), pick(adjectives), false);
    } else if (k % 7 == 0) {
      add_pair(pick(numerals), pick(numerals), false);
    } else {
      add_pair(pick(nouns), pick(nouns), false);
    }
  }
  fixture.corpus = SimilarityCorpus(0.9, std::move(corpus_pairs));

  const std::vector<std::string> verbs{"likes", "sees", "makes", "finds", "buys"};
  for (std::size_t i = 0; i < sentences; ++i) {
    Tokens s{"the", pick(adjectives), pick(nouns), pick(verbs), pick(numerals), pick(nouns)};
    if (i % 4 == 1) s.insert(s.begin() + 3, {"of", "the", pick(nouns)});
    s.push_back(".");
    fixture.sentences.push_back(std::move(s));
  }
  return fixture;
}

BijectiveCorpus make_bijective_corpus(std::size_t types, std::size_t train, std::size_t held_out,
                                      std::size_t max_length, unsigned seed) {
  std::mt19937 rng(seed);
  BijectiveCorpus corpus;
  std::vector<std::size_t> permutation(types);
  for (std::size_t k = 0; k < types; ++k) permutation[k] = k;
  std::shuffle(permutation.begin(), permutation.end(), rng);
  for (std::size_t k = 0; k < types; ++k) {
    corpus.truth["s" + std::to_string(k)] = "t" + std::to_string(permutation[k]);
  }
  std::uniform_int_distribution<std::size_t> length(2, max_length);
  std::uniform_int_distribution<std::size_t> word(0, types - 1);
  auto make = [&] {
    ParallelPair pair;
    const std::size_t n = length(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string source = "s" + std::to_string(word(rng));
      pair.source.push_back(source);
      pair.target.push_back(corpus.truth.at(source));
    }
    std::shuffle(pair.target.begin(), pair.target.end(), rng);
    return pair;
  };
  for (std::size_t i = 0; i < train; ++i) corpus.train.push_back(make());
  for (std::size_t i = 0; i < held_out; ++i) corpus.held_out.push_back(make());
  return corpus;
}

MockScenario write_mock_scenario(const fs::path& dir, const MockScenarioOptions& options) {
  if (options.planted > options.sentences) {
    throw Error(ErrorKind::kInvalidInput, "more planted sentences than sentences");
  }
  std::mt19937 rng(options.seed);
  const std::size_t neutral_clusters = 14;
  const std::size_t cluster_size = 5;
  const std::size_t fillers = 40;
  const auto words = pseudo_words(
      options.planted * (options.partners + 2) + neutral_clusters * cluster_size + fillers, rng);
  auto next = words.begin();
  auto take = [&] { return *next++; };

  std::vector<SimilarityPair> pairs;
  auto add_pair = [&](const std::string& a, const std::string& b, double sim) {
    const auto [lo, hi] = std::minmax(a, b);
    pairs.push_back({lo, hi, sim, sim});
  };

  struct Group {
    std::string trigger;
    std::vector<std::string> partners;  // partners[0] is the most similar
    std::string victim;
  };
  std::vector<Group> groups(options.planted);
  for (auto& g : groups) {
    g.trigger = take();
    for (std::size_t j = 0; j < options.partners; ++j) g.partners.push_back(take());
    g.victim = take();
    for (std::size_t j = 0; j < g.partners.size(); ++j) {
      add_pair(g.trigger, g.partners[j], j == 0 ? 0.99 : 0.98 - 0.002 * static_cast<double>(j));
      for (std::size_t k = j + 1; k < g.partners.size(); ++k) {
        add_pair(g.partners[j], g.partners[k], 0.95);
      }
    }
  }
  std::vector<std::vector<std::string>> clusters(neutral_clusters);
  for (auto& c : clusters) {
    for (std::size_t j = 0; j < cluster_size; ++j) c.push_back(take());
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) add_pair(c[a], c[b], 0.93);
    }
  }
  std::vector<std::string> filler_words;
  for (std::size_t j = 0; j < fillers; ++j) filler_words.push_back(take());

  std::vector<std::size_t> order(options.sentences);
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> planted_group(options.sentences, -1);
  for (std::size_t g = 0; g < options.planted; ++g) planted_group[order[g]] = static_cast<int>(g);

  const LanguageProfile target = LanguageProfile::for_tag("xx");
  auto render_target = [&](const Tokens& source) {
    Tokens out;
    for (const auto& w : source) out.push_back(w == "." ? "." : "z" + w);
    return target.detokenize(out);
  };
  const LanguageProfile source_profile = LanguageProfile::for_tag("en");

  std::uniform_int_distribution<std::size_t> filler(0, filler_words.size() - 1);
  std::uniform_int_distribution<std::size_t> extra(4, 6);
  MockScenario scenario;
  std::string input;
  std::string injections;
  for (std::size_t k = 0; k < options.sentences; ++k) {
    Tokens sentence;
    const std::size_t n_fillers = extra(rng);
    std::vector<std::string> chosen;
    while (chosen.size() < n_fillers) {
      const auto& w = filler_words[filler(rng)];
      if (std::find(chosen.begin(), chosen.end(), w) == chosen.end()) chosen.push_back(w);
    }
    if (planted_group[k] >= 0) {
      const Group& g = groups[static_cast<std::size_t>(planted_group[k])];
      sentence = {g.trigger, chosen[0], chosen[1], g.victim};
      sentence.insert(sentence.end(), chosen.begin() + 2, chosen.end());
      sentence.push_back(".");
      PlantedBug bug;
      bug.sentence_id = k + 1;
      const bool mutant_side = static_cast<std::size_t>(planted_group[k]) % 2 == 1;
      Tokens buggy = sentence;
      if (mutant_side) {
        buggy[0] = g.partners[0];
        bug.kind = PlantKind::kMutant;
        injections += g.victim + " -> zerror WHEN " + g.partners[0] + "\n";
      } else {
        bug.kind = PlantKind::kOriginal;
        injections += g.victim + " -> zerror WHEN " + g.trigger + "\n";
      }
      bug.buggy_source = source_profile.detokenize(buggy);
      bug.clean_translation = render_target(buggy);
      scenario.planted.push_back(std::move(bug));
    } else {
      const auto& cluster = clusters[k % neutral_clusters];
      sentence = {cluster[k % cluster_size]};
      sentence.insert(sentence.end(), chosen.begin(), chosen.end());
      sentence.push_back(".");
    }
    input += source_profile.detokenize(sentence) + "\n";
  }

  std::string rules = "# token rules\n. -> .\n";
  for (const auto& w : words) rules += w + " -> z" + w + "\n";
  rules += "# injected mistranslations\n" + injections;
  rules += "# predictive probabilities\nzerror = 0.3\n* = 0.9\n@unknown = error\n";

  fs::create_directories(dir);
  write_text(dir / "input.txt", input);
  write_text(dir / "mock.rules", rules);
  std::ostringstream corpus_text;
  SimilarityCorpus(0.9, std::move(pairs)).write(corpus_text);
  write_text(dir / "corpus.tsv", corpus_text.str());
  const bool grey = options.mode == RankingMode::kProbability;
  write_text(dir / "profile.txt", std::string("kind=mock\nendpoint=mock.rules\nsource=en\ntarget=xx\n") +
                                      "capability=" + (grey ? "grey-box" : "black-box") +
                                      "\nrate_limit=100000\n");
  write_text(dir / "run.conf",
             "input=input.txt\ncorpus=corpus.tsv\ntranslator=profile.txt\nmetric=LCS\n"
             "max_test_mutants=5\nrepair_mutants=16\nrepair_mode=" +
                 std::string(ranking_mode_name(options.mode)) +
                 "\nrepair_metric=LCS\noutput_dir=out\ncache=cache.jsonl\ntarget_tagger=rules\n"
                 "workers=" +
                 std::to_string(options.workers) + "\n");
  scenario.config = dir / "run.conf";
  scenario.output_dir = dir / "out";
  return scenario;
}

}  // namespace transcheck::testing
