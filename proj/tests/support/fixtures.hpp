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
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "transcheck/aligner.hpp"
#include "transcheck/embedding_corpus.hpp"
#include "transcheck/repair.hpp"
#include "transcheck/text.hpp"

namespace transcheck::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_text(const fs::path& path, std::string_view content);
std::string read_text(const fs::path& path);

// Distinct made-up words from consonant-vowel syllables that the baseline
// tagger labels NN.
std::vector<std::string> pseudo_words(std::size_t count, std::mt19937& rng);

struct MutationFixture {
  std::vector<Tokens> sentences;
  SimilarityCorpus corpus{0.9, {}};
  std::size_t cross_category_pairs = 0;
};

// Sentences over nouns, adjectives and numerals with a similarity corpus of
// `pairs` entries, some of which pair words of different categories.
MutationFixture make_mutation_fixture(std::size_t sentences, std::size_t pairs, unsigned seed);

struct BijectiveCorpus {
  std::vector<ParallelPair> train;
  std::vector<ParallelPair> held_out;
  std::map<std::string, std::string> truth;  // source word -> target word
};

// Source words s<k> map one-to-one onto target words; target order is shuffled.
BijectiveCorpus make_bijective_corpus(std::size_t types, std::size_t train, std::size_t held_out,
                                      std::size_t max_length, unsigned seed);

enum class PlantKind { kOriginal, kMutant };

struct PlantedBug {
  std::size_t sentence_id = 0;
  PlantKind kind = PlantKind::kOriginal;
  std::string buggy_source;       // sentence whose translation carries the bug
  std::string clean_translation;  // its translation without the injection
};

struct MockScenarioOptions {
  std::size_t sentences = 100;
  std::size_t planted = 30;
  std::size_t partners = 10;
  RankingMode mode = RankingMode::kCrossReference;
  std::size_t workers = 1;
  unsigned seed = 7;
};

struct MockScenario {
  fs::path config;  // run config
  fs::path output_dir;
  std::vector<PlantedBug> planted;
};

// Writes a complete mock-translator run: input sentences, similarity corpus,
// translator rules with injected mistranslations, profile and run config.
// Half of the planted groups break the original's translation (the trigger
// sits in the original), the other half break the first mutant's.
MockScenario write_mock_scenario(const fs::path& dir, const MockScenarioOptions& options);

}  // namespace transcheck::testing
