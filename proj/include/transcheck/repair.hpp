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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transcheck/aligner.hpp"
#include "transcheck/consistency.hpp"
#include "transcheck/pos_tagger.hpp"
#include "transcheck/text.hpp"

namespace transcheck {

struct Candidate {
  std::optional<std::size_t> mutant_id;  // empty for the original sentence
  Tokens sentence;
  Tokens translation;
  std::optional<double> probability;
  std::size_t edit_index = 0;  // position that differs from the original

  bool is_original() const { return !mutant_id.has_value(); }
  std::string label() const;  // "original" or "m<id>"
};

// One original sentence with its translation plus single-token mutants of it.
// The original is always entry 0.
class CandidateSet {
 public:
  // Throws kInvalidInput on an empty sentence or translation, or a
  // probability outside [0, 1].
  CandidateSet(Tokens sentence, Tokens translation, std::optional<double> probability = {});

  // Throws kInvalidInput unless `sentence` differs from the original in
  // exactly one token and `id` is new.
  void add_mutant(std::size_t id, Tokens sentence, Tokens translation,
                  std::optional<double> probability = {});

  const std::vector<Candidate>& entries() const { return entries_; }
  const Candidate& original() const { return entries_.front(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Candidate> entries_;
};

struct RankedCandidate {
  std::size_t entry = 0;  // index into CandidateSet::entries()
  double score = 0.0;
};

// Descending probability; ties put the original first, then lower mutant
// ids. Throws kGreyBoxUnavailable when any probability is missing.
std::vector<RankedCandidate> rank_by_probability(const CandidateSet& candidates);

// Mean consistency score of each translation against every other entry's
// translation, descending, with the same tie rule. A lone original scores 0.
std::vector<RankedCandidate> rank_by_cross_reference(const CandidateSet& candidates,
                                                     Metric metric,
                                                     const IdfTable& idf = IdfTable::uniform());

enum class RankingMode { kProbability, kCrossReference };

RankingMode parse_ranking_mode(std::string_view name);
std::string_view ranking_mode_name(RankingMode mode);

// Non-empty and every token is a numeral pattern or a numeral word of
// `profile`.
bool is_numeric(TokenView span, const LanguageProfile& profile);

// Replaces the target span aligned to the replacement word in `t_sr` with the
// span aligned to the original word in `t_s`. Throws kMapBackUnavailable when
// either word is unaligned, kInvalidInput unless `s` and `s_r` differ in
// exactly one position.
Tokens map_back(TokenView t_s, TokenView t_sr, TokenView s, TokenView s_r,
                const AlignmentTable& a_s, const AlignmentTable& a_sr);

enum class GateResult { kNotRun, kPass, kFail };

std::string_view gate_result_name(GateResult result);

// What happened to one candidate during the walk down the ranked list.
struct GateRecord {
  std::optional<std::size_t> mutant_id;
  double rank_score = 0.0;
  GateResult numeric = GateResult::kNotRun;
  GateResult structure = GateResult::kNotRun;
  GateResult consistency = GateResult::kNotRun;
  std::optional<double> consistency_score;
  // Empty when the candidate was chosen or was the original. Otherwise one
  // of "unaligned", "numeric", "map-back", "structure", "consistency",
  // "unchanged".
  std::string skip_reason;
};

enum class RepairStatus { kRepaired, kKeptOriginal, kNoCandidate };

std::string_view repair_status_name(RepairStatus status);

struct RepairOutcome {
  RepairStatus status = RepairStatus::kNoCandidate;
  std::optional<std::size_t> chosen;  // mutant id of the chosen candidate
  Tokens input_translation;
  Tokens repaired_translation;
  std::vector<GateRecord> gates;
};

struct RepairContext {
  RankingMode mode = RankingMode::kCrossReference;
  Metric metric = Metric::kLcs;
  double threshold = 0.963;  // consistency gate
  const IdfTable* idf = nullptr;  // uniform when null
  const Aligner* aligner = nullptr;
  const PosTagger* target_tagger = nullptr;  // structure gate skipped when null
  LanguageProfile source_profile = LanguageProfile::for_tag("en");
  LanguageProfile target_profile = LanguageProfile::for_tag("en");
};

// Walks the ranked candidates. Reaching the original stops the walk: the
// translation is kept when the original ranked first and reported as
// no-candidate otherwise. Other candidates pass the alignment, numeric,
// map-back, structure and (with `repaired_reference`) consistency gates in
// that order; the first survivor supplies the repaired translation.
// `repaired_reference` is the repaired translation of the original sentence
// when `candidates` was built around one of its mutants.
RepairOutcome repair_translation(const CandidateSet& candidates, const RepairContext& context,
                                 const std::optional<Tokens>& repaired_reference = std::nullopt);

// Same as above with a ranking computed elsewhere.
RepairOutcome repair_translation(const CandidateSet& candidates,
                                 std::span<const RankedCandidate> ranking,
                                 const RepairContext& context,
                                 const std::optional<Tokens>& repaired_reference = std::nullopt);

}  // namespace transcheck
