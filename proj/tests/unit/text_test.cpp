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

#include "transcheck/text.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "transcheck/error.hpp"

namespace transcheck {
namespace {

TEST(TokenizeWords, SplitsPunctuationButKeepsNumerals) {
  EXPECT_EQ(tokenize_words("He paid 4.4 dollars, not 1,000."),
            (Tokens{"He", "paid", "4.4", "dollars", ",", "not", "1,000", "."}));
}

TEST(TokenizeWords, KeepsWordInternalApostrophesAndHyphens) {
  EXPECT_EQ(tokenize_words("don't self-driving (cars)"),
            (Tokens{"don't", "self-driving", "(", "cars", ")"}));
}

TEST(TokenizeWords, EmptyAndBlankInputYieldNothing) {
  EXPECT_TRUE(tokenize_words("").empty());
  EXPECT_TRUE(tokenize_words(" \t ").empty());
}

TEST(TokenizeChars, SplitsCodePointsAndKeepsAsciiRuns) {
  EXPECT_EQ(tokenize_chars("我有 4.4 个abc"), (Tokens{"我", "有", "4.4", "个", "abc"}));
}

TEST(LanguageProfile, CharacterScriptsUseCharacterTokens) {
  EXPECT_TRUE(LanguageProfile::for_tag("zh").character_tokens);
  EXPECT_TRUE(LanguageProfile::for_tag("zh-CN").character_tokens);
  EXPECT_FALSE(LanguageProfile::for_tag("en").character_tokens);
  EXPECT_FALSE(LanguageProfile::for_tag("de").character_tokens);
}

TEST(LanguageProfile, NumeralWords) {
  const auto en = LanguageProfile::for_tag("en");
  EXPECT_TRUE(en.is_numeral_word("two"));
  EXPECT_TRUE(en.is_numeral_word("Six"));
  EXPECT_FALSE(en.is_numeral_word("kind"));
  EXPECT_TRUE(LanguageProfile::for_tag("zh").is_numeral_word("三"));
}

TEST(LanguageProfile, LoadNumeralsExtendsLexicon) {
  testing::TempDir dir;
  testing::write_text(dir / "nums.txt", "# German\nzwei\nDrei\n");
  auto de = LanguageProfile::for_tag("de");
  EXPECT_FALSE(de.is_numeral_word("zwei"));
  de.load_numerals(dir / "nums.txt");
  EXPECT_TRUE(de.is_numeral_word("zwei"));
  EXPECT_TRUE(de.is_numeral_word("drei"));
}

TEST(LanguageProfile, DetokenizeAttachesPunctuation) {
  const auto en = LanguageProfile::for_tag("en");
  EXPECT_EQ(en.detokenize(Tokens{"Hello", ",", "world", "(", "yes", ")", "."}),
            "Hello, world (yes).");
  EXPECT_EQ(LanguageProfile::for_tag("zh").detokenize(Tokens{"我", "有"}), "我有");
}

TEST(LanguageProfile, TokenizeDetokenizeRoundTrip) {
  const auto en = LanguageProfile::for_tag("en");
  std::mt19937 rng(11);
  const Tokens vocab{"cat", "dog", ",", ".", "4.4", "(", ")", "don't", "x-ray", "?"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    Tokens tokens;
    const int n = 1 + trial % 9;
    for (int i = 0; i < n; ++i) tokens.push_back(vocab[pick(rng)]);
    const Tokens again = en.tokenize(en.detokenize(tokens));
    // Re-tokenizing may only merge nothing and lose nothing.
    EXPECT_EQ(join_tokens(again, ""), join_tokens(tokens, ""));
  }
}

TEST(Numerals, Patterns) {
  EXPECT_TRUE(is_numeral_pattern("4"));
  EXPECT_TRUE(is_numeral_pattern("4.4"));
  EXPECT_TRUE(is_numeral_pattern("1,000"));
  EXPECT_TRUE(is_numeral_pattern("-3"));
  EXPECT_FALSE(is_numeral_pattern("4a"));
  EXPECT_FALSE(is_numeral_pattern("."));
  EXPECT_FALSE(is_numeral_pattern(""));
}

TEST(ParseDouble, RejectsTrailingGarbage) {
  EXPECT_DOUBLE_EQ(parse_double("0.25", "test"), 0.25);
  EXPECT_THROW(parse_double("0.25x", "test"), Error);
  EXPECT_THROW(parse_double("", "test"), Error);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 0.963, 1e-12, 123456.789}) {
    EXPECT_EQ(parse_double(format_double(v), "test"), v);
  }
}

TEST(SplitFields, KeepsEmptyFields) {
  const auto fields = split_fields("a\t\tb");
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_EQ(fields[1], "");
}

}  // namespace
}  // namespace transcheck
