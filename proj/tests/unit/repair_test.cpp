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

#include <gtest/gtest.h>

#include <algorithm>

#include "transcheck/error.hpp"

namespace transcheck {
namespace {

Tokens words(std::string_view text) { return tokenize_words(text); }

// Links token i to token i.
class DiagonalAligner final : public Aligner {
 public:
  AlignmentTable align(TokenView source, TokenView target) const override {
    std::vector<AlignmentLink> links;
    for (std::size_t i = 0; i < std::min(source.size(), target.size()); ++i) links.push_back({i, i});
    return AlignmentTable(std::move(links), source.size(), target.size());
  }
};

class NullAligner final : public Aligner {
 public:
  AlignmentTable align(TokenView source, TokenView target) const override {
    return AlignmentTable({}, source.size(), target.size());
  }
};

// Tokens starting with 'Z' are verbs, everything else a noun.
class ZTagger final : public PosTagger {
 public:
  Tags tag(TokenView tokens) const override {
    Tags tags;
    for (const auto& t : tokens) tags.push_back(t.starts_with('Z') ? "VB" : "NN");
    return tags;
  }
};

std::vector<std::string> labels(const CandidateSet& set, const std::vector<RankedCandidate>& r) {
  std::vector<std::string> out;
  for (const auto& c : r) out.push_back(set.entries()[c.entry].label());
  return out;
}

TEST(CandidateSet, Validation) {
  CandidateSet set(words("a cat sits"), words("A CAT SITS"));
  EXPECT_NO_THROW(set.add_mutant(1, words("a dog sits"), words("A DOG SITS")));
  EXPECT_EQ(set.entries()[1].edit_index, 1u);
  EXPECT_THROW(set.add_mutant(1, words("a cow sits"), words("A COW SITS")), Error);
  EXPECT_THROW(set.add_mutant(2, words("a dog runs"), words("X")), Error);
  EXPECT_THROW(set.add_mutant(3, words("a cat sits"), words("X")), Error);
  EXPECT_THROW(set.add_mutant(4, words("a cow"), words("X")), Error);
  EXPECT_THROW(set.add_mutant(5, words("a cow sits"), Tokens{}), Error);
  EXPECT_THROW(set.add_mutant(6, words("a cow sits"), words("X"), 1.5), Error);
  EXPECT_THROW(CandidateSet(Tokens{}, words("X")), Error);
  EXPECT_EQ(set.size(), 2u);
}

TEST(Ranking, ByProbabilityWithTies) {
  CandidateSet set(words("a cat sits"), words("A CAT SITS"), 0.5);
  set.add_mutant(2, words("a dog sits"), words("A DOG SITS"), 0.9);
  set.add_mutant(1, words("a cow sits"), words("A COW SITS"), 0.5);
  set.add_mutant(3, words("a pig sits"), words("A PIG SITS"), 0.2);
  EXPECT_EQ(labels(set, rank_by_probability(set)),
            (std::vector<std::string>{"m2", "original", "m1", "m3"}));

  CandidateSet missing(words("a cat"), words("A CAT"));
  EXPECT_THROW(rank_by_probability(missing), Error);
}

TEST(Ranking, ByCrossReference) {
  CandidateSet set(words("a cat sits now"), words("A CAT SITS BAD"));
  set.add_mutant(1, words("a dog sits now"), words("A DOG SITS NOW"));
  set.add_mutant(2, words("a cow sits now"), words("A COW SITS NOW"));
  const auto ranking = rank_by_cross_reference(set, Metric::kLcs);
  EXPECT_EQ(labels(set, ranking), (std::vector<std::string>{"m1", "m2", "original"}));
  // original vs either mutant: two slices per side, best variant pair 2/3;
  // the mutants differ by a single slice and score 1 against each other.
  EXPECT_NEAR(ranking[0].score, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(ranking[1].score, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(ranking[2].score, 2.0 / 3.0, 1e-12);

  CandidateSet alone(words("a"), words("A"));
  const auto single = rank_by_cross_reference(alone, Metric::kLcs);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_DOUBLE_EQ(single[0].score, 0.0);
}

TEST(RankingMode, Names) {
  EXPECT_EQ(parse_ranking_mode("probability"), RankingMode::kProbability);
  EXPECT_EQ(parse_ranking_mode("cross-reference"), RankingMode::kCrossReference);
  EXPECT_EQ(ranking_mode_name(RankingMode::kCrossReference), "cross-reference");
  EXPECT_THROW(parse_ranking_mode("vote"), Error);
}

TEST(IsNumeric, Examples) {
  const auto en = LanguageProfile::for_tag("en");
  EXPECT_TRUE(is_numeric(words("4.4"), en));
  EXPECT_TRUE(is_numeric(words("two"), en));
  EXPECT_TRUE(is_numeric(words("1,000"), en));
  EXPECT_FALSE(is_numeric(words("kind"), en));
  EXPECT_FALSE(is_numeric(Tokens{}, en));
  EXPECT_FALSE(is_numeric(words("4 cats"), en));
}

TEST(MapBack, SubstitutesTheAlignedSpan) {
  const DiagonalAligner aligner;
  const Tokens s = words("4 cats"), s_r = words("6 cats");
  const Tokens t_s = words("4 CATS"), t_sr = words("6 CATS");
  EXPECT_EQ(map_back(t_s, t_sr, s, s_r, aligner.align(s, t_s), aligner.align(s_r, t_sr)),
            words("4 CATS"));

  // A phrase on either side is replaced as a whole.
  const auto a_s = AlignmentTable::parse("0-0 1-1 1-2 2-3", 3, 4);
  const auto a_sr = AlignmentTable::parse("0-0 1-1 2-2", 3, 3);
  EXPECT_EQ(map_back(words("P Q1 Q2 R"), words("P Y R"), words("a x c"), words("a y c"), a_s, a_sr),
            words("P Q1 Q2 R"));
  EXPECT_EQ(map_back(words("P Q R"), words("P Y BAD R"), words("a x c"), words("a y c"),
                     AlignmentTable::parse("0-0 1-1 2-2", 3, 3),
                     AlignmentTable::parse("0-0 1-1 2-3", 3, 4)),
            words("P Q BAD R"));
}

TEST(MapBack, Errors) {
  const auto table = AlignmentTable::parse("0-0", 2, 2);
  EXPECT_THROW(map_back(words("A B"), words("A C"), words("a b"), words("a c"), table, table),
               Error);
  EXPECT_THROW(map_back(words("A B"), words("C D"), words("a b"), words("c d"), table, table),
               Error);
  try {
    map_back(words("A B"), words("A C"), words("a b"), words("a c"), table, table);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMapBackUnavailable);
  }
}

RepairContext context_with(const Aligner& aligner) {
  RepairContext context;
  context.aligner = &aligner;
  return context;
}

TEST(Repair, CrossReferenceRepairsTheOriginal) {
  const DiagonalAligner aligner;
  CandidateSet set(words("a cat sits now"), words("A CAT SITS BAD"));
  set.add_mutant(1, words("a dog sits now"), words("A DOG SITS NOW"));
  set.add_mutant(2, words("a cow sits now"), words("A COW SITS NOW"));
  const auto outcome = repair_translation(set, context_with(aligner));
  EXPECT_EQ(outcome.status, RepairStatus::kRepaired);
  EXPECT_EQ(outcome.chosen, 1u);
  EXPECT_EQ(outcome.repaired_translation, words("A CAT SITS NOW"));
  EXPECT_EQ(outcome.input_translation, words("A CAT SITS BAD"));
  ASSERT_EQ(outcome.gates.size(), 1u);
  EXPECT_EQ(outcome.gates[0].numeric, GateResult::kPass);
}

TEST(Repair, OriginalRankedFirstIsKept) {
  const DiagonalAligner aligner;
  CandidateSet set(words("a cat sits"), words("A CAT SITS"), 0.9);
  set.add_mutant(1, words("a dog sits"), words("A DOG SITS"), 0.3);
  auto context = context_with(aligner);
  context.mode = RankingMode::kProbability;
  const auto outcome = repair_translation(set, context);
  EXPECT_EQ(outcome.status, RepairStatus::kKeptOriginal);
  EXPECT_EQ(outcome.repaired_translation, words("A CAT SITS"));
  EXPECT_FALSE(outcome.chosen);
}

TEST(Repair, SkipsAreRecordedBeforeReachingTheOriginal) {
  const DiagonalAligner aligner;
  CandidateSet set(words("i have 4 cats"), words("I HAVE 4 CATS"), 0.1);
  set.add_mutant(1, words("i have 6 cats"), words("I HAVE X CATS"), 0.9);  // numeric
  set.add_mutant(2, words("i have 5 cats"), words("I HAVE 4 CATS"), 0.8);  // unchanged
  auto context = context_with(aligner);
  context.mode = RankingMode::kProbability;
  const auto outcome = repair_translation(set, context);
  EXPECT_EQ(outcome.status, RepairStatus::kNoCandidate);
  ASSERT_EQ(outcome.gates.size(), 3u);
  EXPECT_EQ(outcome.gates[0].skip_reason, "numeric");
  EXPECT_EQ(outcome.gates[0].numeric, GateResult::kFail);
  EXPECT_EQ(outcome.gates[1].skip_reason, "unchanged");
  EXPECT_TRUE(outcome.gates[2].skip_reason.empty());
  EXPECT_EQ(outcome.repaired_translation, words("I HAVE 4 CATS"));
}

TEST(Repair, UnalignedCandidatesAreSkipped) {
  const NullAligner aligner;
  CandidateSet set(words("a cat"), words("A CAT"), 0.1);
  set.add_mutant(1, words("a dog"), words("A DOG"), 0.9);
  auto context = context_with(aligner);
  context.mode = RankingMode::kProbability;
  const auto outcome = repair_translation(set, context);
  EXPECT_EQ(outcome.status, RepairStatus::kNoCandidate);
  EXPECT_EQ(outcome.gates[0].skip_reason, "unaligned");
}

TEST(Repair, StructureGate) {
  const DiagonalAligner aligner;
  const ZTagger tagger;
  CandidateSet set(words("a cat sits now"), words("A CAT SITS BAD"), 0.1);
  set.add_mutant(1, words("a dog sits now"), words("A ZOG SITS NOW"), 0.9);
  set.add_mutant(2, words("a cow sits now"), words("A COW SITS NOW"), 0.8);
  auto context = context_with(aligner);
  context.mode = RankingMode::kProbability;
  context.target_tagger = &tagger;
  const auto outcome = repair_translation(set, context);
  EXPECT_EQ(outcome.status, RepairStatus::kRepaired);
  EXPECT_EQ(outcome.chosen, 2u);
  EXPECT_EQ(outcome.gates[0].skip_reason, "structure");
  EXPECT_EQ(outcome.gates[0].structure, GateResult::kFail);
  EXPECT_EQ(outcome.gates[1].structure, GateResult::kPass);
}

TEST(Repair, ConsistencyGateAgainstTheRepairedReference) {
  const DiagonalAligner aligner;
  // Candidate set built around a mutant sentence.
  CandidateSet set(words("a dog sits now"), words("A DOG SITS BAD"), 0.1);
  set.add_mutant(1, words("a dog runs now"), words("A DOG RUNS WORSE"), 0.9);
  set.add_mutant(2, words("a dog sits here"), words("A DOG SITS HERE"), 0.8);
  auto context = context_with(aligner);
  context.mode = RankingMode::kProbability;
  const Tokens reference = words("A CAT SITS NOW");
  const auto outcome = repair_translation(set, context, reference);
  // m1 maps back to "A DOG SITS WORSE": slices {DOG, WORSE} vs {CAT, NOW}
  // leave "A SITS" on both sides after deleting one slice: 2/3.
  EXPECT_EQ(outcome.gates[0].skip_reason, "consistency");
  EXPECT_NEAR(*outcome.gates[0].consistency_score, 2.0 / 3.0, 1e-12);
  // m2 maps back to "A DOG SITS BAD" which equals the input translation.
  EXPECT_EQ(outcome.gates[1].skip_reason, "unchanged");
  EXPECT_EQ(outcome.status, RepairStatus::kNoCandidate);
}

TEST(Repair, RequiresAnAligner) {
  CandidateSet set(words("a"), words("A"));
  EXPECT_THROW(repair_translation(set, RepairContext{}), Error);
}

}  // namespace
}  // namespace transcheck
