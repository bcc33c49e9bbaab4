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

#include "transcheck/repair.hpp"

#include <algorithm>
#include <tuple>

#include <spdlog/spdlog.h>

#include "transcheck/error.hpp"

namespace transcheck {

std::string Candidate::label() const {
  return mutant_id ? "m" + std::to_string(*mutant_id) : "original";
}

CandidateSet::CandidateSet(Tokens sentence, Tokens translation,
                           std::optional<double> probability) {
  if (sentence.empty() || translation.empty()) {
    throw Error(ErrorKind::kInvalidInput, "candidate set: empty original sentence or translation");
  }
  if (probability && (*probability < 0.0 || *probability > 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "candidate set: probability outside [0, 1]");
  }
  entries_.push_back({std::nullopt, std::move(sentence), std::move(translation), probability, 0});
}

void CandidateSet::add_mutant(std::size_t id, Tokens sentence, Tokens translation,
                              std::optional<double> probability) {
  const Tokens& base = original().sentence;
  if (sentence.size() != base.size()) {
    throw Error(ErrorKind::kInvalidInput, "mutant " + std::to_string(id) +
                                              " does not have the original's length");
  }
  std::optional<std::size_t> edit;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i] == sentence[i]) continue;
    if (edit) {
      throw Error(ErrorKind::kInvalidInput,
                  "mutant " + std::to_string(id) + " differs in more than one token");
    }
    edit = i;
  }
  if (!edit) {
    throw Error(ErrorKind::kInvalidInput, "mutant " + std::to_string(id) + " equals the original");
  }
  if (translation.empty()) {
    throw Error(ErrorKind::kInvalidInput, "mutant " + std::to_string(id) + " has no translation");
  }
  if (probability && (*probability < 0.0 || *probability > 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "candidate set: probability outside [0, 1]");
  }
  for (const auto& entry : entries_) {
    if (entry.mutant_id == id) {
      throw Error(ErrorKind::kInvalidInput, "duplicate mutant id " + std::to_string(id));
    }
  }
  entries_.push_back({id, std::move(sentence), std::move(translation), probability, *edit});
}

namespace {

// Higher score first, then the original, then ascending mutant id.
void sort_ranking(const CandidateSet& candidates, std::vector<RankedCandidate>& ranking) {
  const auto& entries = candidates.entries();
  std::stable_sort(ranking.begin(), ranking.end(),
                   [&](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     const auto& ea = entries[a.entry];
                     const auto& eb = entries[b.entry];
                     return std::make_tuple(!ea.is_original(), ea.mutant_id.value_or(0)) <
                            std::make_tuple(!eb.is_original(), eb.mutant_id.value_or(0));
                   });
}

}  // namespace

std::vector<RankedCandidate> rank_by_probability(const CandidateSet& candidates) {
  std::vector<RankedCandidate> ranking;
  const auto& entries = candidates.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!entries[k].probability) {
      throw Error(ErrorKind::kGreyBoxUnavailable,
                  "no predictive probability for candidate " + entries[k].label());
    }
    ranking.push_back({k, *entries[k].probability});
  }
  sort_ranking(candidates, ranking);
  return ranking;
}

std::vector<RankedCandidate> rank_by_cross_reference(const CandidateSet& candidates,
                                                     Metric metric, const IdfTable& idf) {
  const auto& entries = candidates.entries();
  const std::size_t n = entries.size();
  std::vector<double> sums(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double score =
          consistency_score(entries[a].translation, entries[b].translation, metric, idf).score;
      sums[a] += score;
      sums[b] += score;
    }
  }
  std::vector<RankedCandidate> ranking;
  for (std::size_t k = 0; k < n; ++k) {
    ranking.push_back({k, n > 1 ? sums[k] / static_cast<double>(n - 1) : 0.0});
  }
  sort_ranking(candidates, ranking);
  return ranking;
}

RankingMode parse_ranking_mode(std::string_view name) {
  if (name == "probability") return RankingMode::kProbability;
  if (name == "cross-reference") return RankingMode::kCrossReference;
  throw Error(ErrorKind::kInvalidInput, "unknown repair mode '" + std::string(name) +
                                            "' (expected probability or cross-reference)");
}

std::string_view ranking_mode_name(RankingMode mode) {
  return mode == RankingMode::kProbability ? "probability" : "cross-reference";
}

bool is_numeric(TokenView span, const LanguageProfile& profile) {
  if (span.empty()) return false;
  return std::all_of(span.begin(), span.end(), [&](const std::string& token) {
    return is_numeral_pattern(token) || profile.is_numeral_word(token);
  });
}

namespace {

std::size_t single_edit_index(TokenView s, TokenView s_r) {
  std::optional<std::size_t> edit;
  if (s.size() == s_r.size()) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == s_r[i]) continue;
      if (edit) {
        edit.reset();
        break;
      }
      edit = i;
    }
  }
  if (!edit) {
    throw Error(ErrorKind::kInvalidInput, "map_back: sentences must differ in exactly one token");
  }
  return *edit;
}

Tokens substitute(TokenView t_sr, const TargetSpan& replaced, const TargetSpan& original) {
  Tokens out(t_sr.begin(), t_sr.begin() + static_cast<std::ptrdiff_t>(replaced.begin));
  out.insert(out.end(), original.tokens.begin(), original.tokens.end());
  out.insert(out.end(), t_sr.begin() + static_cast<std::ptrdiff_t>(replaced.end), t_sr.end());
  return out;
}

}  // namespace

Tokens map_back(TokenView t_s, TokenView t_sr, TokenView s, TokenView s_r,
                const AlignmentTable& a_s, const AlignmentTable& a_sr) {
  const std::size_t i = single_edit_index(s, s_r);
  const auto original = get_translated_word(i, a_s, t_s);
  const auto replaced = get_translated_word(i, a_sr, t_sr);
  if (!original || !replaced) {
    throw Error(ErrorKind::kMapBackUnavailable,
                "map_back: '" + std::string(original ? s_r[i] : s[i]) + "' is unaligned");
  }
  return substitute(t_sr, *replaced, *original);
}

std::string_view gate_result_name(GateResult result) {
  switch (result) {
    case GateResult::kNotRun:
      return "not-run";
    case GateResult::kPass:
      return "pass";
    case GateResult::kFail:
      return "fail";
  }
  return "not-run";
}

std::string_view repair_status_name(RepairStatus status) {
  switch (status) {
    case RepairStatus::kRepaired:
      return "repaired";
    case RepairStatus::kKeptOriginal:
      return "kept-original";
    case RepairStatus::kNoCandidate:
      return "no-candidate";
  }
  return "no-candidate";
}

RepairOutcome repair_translation(const CandidateSet& candidates, const RepairContext& context,
                                 const std::optional<Tokens>& repaired_reference) {
  const IdfTable uniform;
  const IdfTable& idf = context.idf ? *context.idf : uniform;
  const auto ranking = context.mode == RankingMode::kProbability
                           ? rank_by_probability(candidates)
                           : rank_by_cross_reference(candidates, context.metric, idf);
  return repair_translation(candidates, ranking, context, repaired_reference);
}

RepairOutcome repair_translation(const CandidateSet& candidates,
                                 std::span<const RankedCandidate> ranking,
                                 const RepairContext& context,
                                 const std::optional<Tokens>& repaired_reference) {
  if (context.aligner == nullptr) {
    throw Error(ErrorKind::kConfig, "repair_translation: no aligner configured");
  }
  const IdfTable uniform;
  const IdfTable& idf = context.idf ? *context.idf : uniform;
  const Candidate& base = candidates.original();
  const Tokens& s = base.sentence;
  const Tokens& t_s = base.translation;

  RepairOutcome outcome;
  outcome.input_translation = t_s;
  outcome.repaired_translation = t_s;
  std::optional<AlignmentTable> a_s;

  for (std::size_t rank = 0; rank < ranking.size(); ++rank) {
    const Candidate& cand = candidates.entries().at(ranking[rank].entry);
    GateRecord record;
    record.mutant_id = cand.mutant_id;
    record.rank_score = ranking[rank].score;
    if (cand.is_original()) {
      outcome.gates.push_back(record);
      outcome.status = rank == 0 ? RepairStatus::kKeptOriginal : RepairStatus::kNoCandidate;
      return outcome;
    }
    auto skip = [&](std::string reason) {
      spdlog::debug("repair: candidate {} skipped ({})", cand.label(), reason);
      record.skip_reason = std::move(reason);
      outcome.gates.push_back(record);
    };

    if (!a_s) a_s = context.aligner->align(s, t_s);
    const AlignmentTable a_sr = context.aligner->align(cand.sentence, cand.translation);
    const std::size_t i = cand.edit_index;
    const auto span_o = get_translated_word(i, *a_s, t_s);
    const auto span_r = get_translated_word(i, a_sr, cand.translation);
    if (!span_o || !span_r) {
      skip("unaligned");
      continue;
    }

    const bool word_numeric = is_numeric(TokenView(&s[i], 1), context.source_profile);
    const bool replacement_numeric =
        is_numeric(TokenView(&cand.sentence[i], 1), context.source_profile);
    const bool numeric_ok =
        word_numeric == is_numeric(span_o->tokens, context.target_profile) &&
        replacement_numeric == is_numeric(span_r->tokens, context.target_profile);
    record.numeric = numeric_ok ? GateResult::kPass : GateResult::kFail;
    if (!numeric_ok) {
      skip("numeric");
      continue;
    }

    Tokens mapped = substitute(cand.translation, *span_r, *span_o);
    if (mapped == t_s) {
      skip("unchanged");
      continue;
    }

    if (context.target_tagger != nullptr && !(word_numeric && replacement_numeric)) {
      bool same_structure = false;
      try {
        same_structure =
            context.target_tagger->tag(mapped) == context.target_tagger->tag(cand.translation);
      } catch (const std::exception& e) {
        spdlog::warn("repair: target tagger failed: {}", e.what());
      }
      record.structure = same_structure ? GateResult::kPass : GateResult::kFail;
      if (!same_structure) {
        skip("structure");
        continue;
      }
    }

    if (repaired_reference) {
      const double score =
          consistency_score(mapped, *repaired_reference, context.metric, idf).score;
      record.consistency_score = score;
      const bool consistent = score >= context.threshold;
      record.consistency = consistent ? GateResult::kPass : GateResult::kFail;
      if (!consistent) {
        skip("consistency");
        continue;
      }
    }

    outcome.gates.push_back(record);
    outcome.status = RepairStatus::kRepaired;
    outcome.chosen = cand.mutant_id;
    outcome.repaired_translation = std::move(mapped);
    return outcome;
  }
  outcome.status = RepairStatus::kNoCandidate;
  return outcome;
}

}  // namespace transcheck
