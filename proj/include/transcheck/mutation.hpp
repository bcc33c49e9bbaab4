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
#include <string>
#include <string_view>
#include <vector>

#include "transcheck/embedding_corpus.hpp"
#include "transcheck/pos_tagger.hpp"
#include "transcheck/text.hpp"

namespace transcheck {

struct TaggedSentence {
  Tokens tokens;
  Tags tags;  // tags.size() == tokens.size(), tokens non-empty
};

// Tokenizes and tags a raw sentence. Throws kInvalidSentence when the text
// yields no tokens or the tagger output does not line up.
TaggedSentence pos_tag(std::string_view sentence, const PosTagger& tagger);
TaggedSentence pos_tag(Tokens tokens, const PosTagger& tagger);

struct MutantSentence {
  TaggedSentence original;
  std::size_t mutated_index = 0;
  std::string original_word;
  std::string replacement_word;
  double similarity = 0.0;
  bool passed_filter = false;

  Tokens tokens() const;
};

enum class FilterMode {
  kWord,      // only the replaced position must keep its tag
  kSentence,  // every position must keep its tag
};

FilterMode parse_filter_mode(std::string_view name);

// NN*, JJ* or CD.
bool is_replaceable_tag(std::string_view tag);

// Re-tags the mutant and compares against the original tags. A tagger
// failure rejects the mutant.
bool structural_filter(const TaggedSentence& sentence, const MutantSentence& mutant,
                       const PosTagger& tagger, FilterMode mode = FilterMode::kSentence);

struct MutationOptions {
  std::size_t max_mutants = 5;
  FilterMode filter_mode = FilterMode::kSentence;
  // Look words up lowercased and carry a leading capital over to the
  // replacement; for corpora built with lowercasing.
  bool fold_case = false;
};

struct MutationBatch {
  std::vector<MutantSentence> mutants;  // passed the filter, at most max_mutants
  std::size_t candidates = 0;           // candidates examined
  std::size_t rejected = 0;             // candidates that failed the filter
};

// Replaces one noun, adjective or numeral at a time with a context-similar
// word. Positions are scanned left to right and each position's partners in
// corpus lookup order; scanning stops once max_mutants have passed.
MutationBatch generate_mutants_with_stats(const TaggedSentence& sentence,
                                          const SimilarityCorpus& corpus, const PosTagger& tagger,
                                          const MutationOptions& options);

std::vector<MutantSentence> generate_mutants(const TaggedSentence& sentence,
                                             const SimilarityCorpus& corpus,
                                             const PosTagger& tagger,
                                             const MutationOptions& options);

}  // namespace transcheck
