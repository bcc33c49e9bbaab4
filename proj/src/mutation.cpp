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

#include "transcheck/mutation.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <exception>

#include "transcheck/error.hpp"

namespace transcheck {

TaggedSentence pos_tag(std::string_view sentence, const PosTagger& tagger) {
  return pos_tag(tokenize_words(sentence), tagger);
}

TaggedSentence pos_tag(Tokens tokens, const PosTagger& tagger) {
  if (tokens.empty()) throw Error(ErrorKind::kInvalidSentence, "sentence has no tokens");
  Tags tags = tagger.tag(tokens);
  if (tags.size() != tokens.size()) {
    throw Error(ErrorKind::kInvalidSentence, "tagger returned " + std::to_string(tags.size()) +
                                                 " tags for " + std::to_string(tokens.size()) +
                                                 " tokens");
  }
  return {std::move(tokens), std::move(tags)};
}

Tokens MutantSentence::tokens() const {
  Tokens out = original.tokens;
  out.at(mutated_index) = replacement_word;
  return out;
}

FilterMode parse_filter_mode(std::string_view name) {
  if (name == "word") return FilterMode::kWord;
  if (name == "sentence") return FilterMode::kSentence;
  throw Error(ErrorKind::kConfig, "unknown filter mode '" + std::string(name) + "'");
}

bool is_replaceable_tag(std::string_view tag) {
  return tag.starts_with("NN") || tag.starts_with("JJ") || tag == "CD";
}

bool structural_filter(const TaggedSentence& sentence, const MutantSentence& mutant,
                       const PosTagger& tagger, FilterMode mode) {
  Tags mutated;
  try {
    mutated = tagger.tag(mutant.tokens());
  } catch (const std::exception& e) {
    spdlog::warn("structural filter: tagger failed on mutant '{}' -> '{}': {}",
                 mutant.original_word, mutant.replacement_word, e.what());
    return false;
  }
  if (mutated.size() != sentence.tags.size()) return false;
  if (mode == FilterMode::kWord) {
    return mutated[mutant.mutated_index] == sentence.tags[mutant.mutated_index];
  }
  return mutated == sentence.tags;
}

namespace {

std::string match_case(std::string replacement, std::string_view original) {
  if (!original.empty() && !replacement.empty() &&
      std::isupper(static_cast<unsigned char>(original.front())) != 0) {
    replacement.front() =
        static_cast<char>(std::toupper(static_cast<unsigned char>(replacement.front())));
  }
  return replacement;
}

}  // namespace

MutationBatch generate_mutants_with_stats(const TaggedSentence& sentence,
                                          const SimilarityCorpus& corpus, const PosTagger& tagger,
                                          const MutationOptions& options) {
  if (options.max_mutants < 1) {
    throw Error(ErrorKind::kInvalidInput, "max_mutants must be at least 1");
  }
  MutationBatch batch;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (!is_replaceable_tag(sentence.tags[i])) continue;
    const std::string& word = sentence.tokens[i];
    const auto partners = corpus.lookup(options.fold_case ? to_lower_ascii(word) : word);
    for (const auto& partner : partners) {
      std::string replacement =
          options.fold_case ? match_case(partner.word, word) : partner.word;
      if (replacement == word) continue;
      MutantSentence mutant;
      mutant.original = sentence;
      mutant.mutated_index = i;
      mutant.original_word = word;
      mutant.replacement_word = std::move(replacement);
      mutant.similarity = partner.similarity;
      ++batch.candidates;
      mutant.passed_filter = structural_filter(sentence, mutant, tagger, options.filter_mode);
      if (!mutant.passed_filter) {
        ++batch.rejected;
        continue;
      }
      batch.mutants.push_back(std::move(mutant));
      if (batch.mutants.size() == options.max_mutants) return batch;
    }
  }
  return batch;
}

std::vector<MutantSentence> generate_mutants(const TaggedSentence& sentence,
                                             const SimilarityCorpus& corpus,
                                             const PosTagger& tagger,
                                             const MutationOptions& options) {
  return generate_mutants_with_stats(sentence, corpus, tagger, options).mutants;
}

}  // namespace transcheck
