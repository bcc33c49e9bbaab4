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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace transcheck {

using Tokens = std::vector<std::string>;
using TokenView = std::span<const std::string>;

// Splits on whitespace and separates punctuation into standalone tokens.
// Decimal points and digit-group separators inside numerals ("4.4",
// "1,000") and word-internal apostrophes and hyphens stay attached.
Tokens tokenize_words(std::string_view text);

// One token per UTF-8 code point, whitespace dropped. Runs of ASCII letters
// and digits (including numerals with separators) are kept whole.
Tokens tokenize_chars(std::string_view text);

std::string join_tokens(TokenView tokens, std::string_view separator = " ");

std::string to_lower_ascii(std::string_view text);

// Shortest round-trip decimal representation.
std::string format_double(double value);

// Parses the whole field as a double; throws kParse naming `context`.
double parse_double(std::string_view field, std::string_view context);

// Splits on a single character, keeping empty fields.
std::vector<std::string_view> split_fields(std::string_view line, char separator = '\t');

// Decimal numeral, optionally signed, with ',' or '.' separators.
bool is_numeral_pattern(std::string_view token);

// Per-language tokenization and numeral vocabulary.
struct LanguageProfile {
  std::string tag;
  bool character_tokens = false;
  std::set<std::string> numeral_words;  // stored lowercase

  // Known scripts without word spacing get character tokens; "en" and "zh"
  // carry built-in numeral words.
  static LanguageProfile for_tag(std::string_view tag);

  Tokens tokenize(std::string_view text) const;
  // Word-spaced languages attach closing punctuation to the previous token.
  std::string detokenize(TokenView tokens) const;
  bool is_numeral_word(std::string_view token) const;

  // One numeral word per line; '#' starts a comment.
  void load_numerals(const std::filesystem::path& path);
};

}  // namespace transcheck
