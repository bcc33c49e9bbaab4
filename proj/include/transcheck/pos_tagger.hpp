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

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "transcheck/text.hpp"

namespace transcheck {

using Tags = std::vector<std::string>;

// Assigns one Penn Treebank tag per token. Implementations must be safe to
// call concurrently from several threads.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual Tags tag(TokenView tokens) const = 0;
};

// Closed-lexicon tagger with numeral, punctuation, capitalisation and
// suffix fallbacks, plus a few contextual rewrites:
//   - "one" after a determiner or adjective is a noun ("a good one");
//   - a suffix-guessed plural right after a personal pronoun is a 3rd
//     person verb ("he likes").
class LexiconTagger final : public PosTagger {
 public:
  // Seeded with the built-in English closed-class lexicon.
  LexiconTagger();

  // No lexicon entries; only the rule fallbacks apply.
  static LexiconTagger rules_only();

  void add(std::string word, std::string tag);
  // "word<TAB>tag" per line; '#' lines are comments. Later entries win.
  void load(const std::filesystem::path& path);

  Tags tag(TokenView tokens) const override;

 private:
  struct RulesOnly {};
  explicit LexiconTagger(RulesOnly) {}

  // Returns the tag and whether it came from the lexicon.
  std::pair<std::string, bool> base_tag(std::string_view token, bool sentence_initial) const;

  std::unordered_map<std::string, std::string> lexicon_;
};

// Adapter for an external tagger process speaking a line protocol: one
// line of space-separated tokens in, one line of space-separated tags out
// (either "TAG" or "token/TAG" per field). Calls are serialised.
class ProcessTagger final : public PosTagger {
 public:
  explicit ProcessTagger(const std::string& command);
  ~ProcessTagger() override;

  ProcessTagger(const ProcessTagger&) = delete;
  ProcessTagger& operator=(const ProcessTagger&) = delete;

  Tags tag(TokenView tokens) const override;

 private:
  struct Channel;
  std::unique_ptr<Channel> channel_;
  mutable std::mutex mutex_;
};

// Builds a tagger from a descriptor: "baseline", "baseline:<lexicon.tsv>",
// "rules", or "process:<shell command>".
std::unique_ptr<PosTagger> make_tagger(std::string_view descriptor);

}  // namespace transcheck
