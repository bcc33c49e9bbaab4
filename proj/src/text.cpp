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

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>

#include "transcheck/error.hpp"

namespace transcheck {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kDegenerateVector: return "degenerate-vector";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kInvalidSentence: return "invalid-sentence";
    case ErrorKind::kInvalidTranslation: return "invalid-translation";
    case ErrorKind::kCalibration: return "calibration";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kMapBackUnavailable: return "map-back-unavailable";
    case ErrorKind::kGreyBoxUnavailable: return "grey-box-unavailable";
    case ErrorKind::kTransient: return "transient";
    case ErrorKind::kPermanent: return "permanent";
    case ErrorKind::kMalformedResponse: return "malformed-response";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}
// Non-ASCII bytes count as word characters.
bool is_word_char(char c) {
  return static_cast<unsigned char>(c) >= 0x80 || is_ascii_alnum(c);
}
bool is_punct(char c) {
  return static_cast<unsigned char>(c) < 0x80 && std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte
}

}  // namespace

Tokens tokenize_words(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (is_space(c)) {
      flush();
      continue;
    }
    if (!is_punct(c)) {
      current.push_back(c);
      continue;
    }
    const bool has_prev = !current.empty();
    const bool has_next = i + 1 < text.size();
    const char prev = has_prev ? current.back() : '\0';
    const char next = has_next ? text[i + 1] : '\0';
    const bool numeric_separator =
        (c == '.' || c == ',') && has_prev && has_next && is_digit(prev) && is_digit(next);
    const bool word_joiner =
        (c == '\'' || c == '-') && has_prev && has_next && is_word_char(prev) && is_word_char(next);
    if (numeric_separator || word_joiner) {
      current.push_back(c);
      continue;
    }
    flush();
    out.emplace_back(1, c);
  }
  flush();
  return out;
}

Tokens tokenize_chars(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (is_ascii_alnum(c)) {
      std::size_t j = i + 1;
      while (j < text.size()) {
        if (is_ascii_alnum(text[j])) {
          ++j;
        } else if ((text[j] == '.' || text[j] == ',') && j + 1 < text.size() &&
                   is_digit(text[j - 1]) && is_digit(text[j + 1])) {
          ++j;
        } else {
          break;
        }
      }
      out.emplace_back(text.substr(i, j - i));
      i = j;
      continue;
    }
    const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(c)), text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::string join_tokens(TokenView tokens, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.append(separator);
    out.append(tokens[i]);
  }
  return out;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string format_double(double value) {
  std::array<char, 32> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

double parse_double(std::string_view field, std::string_view context) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (field.empty() || result.ec != std::errc() || result.ptr != end) {
    throw Error(ErrorKind::kParse,
                std::string(context) + ": not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char separator) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(separator, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool is_numeral_pattern(std::string_view token) {
  std::size_t i = 0;
  if (!token.empty() && (token[0] == '+' || token[0] == '-')) i = 1;
  if (i >= token.size() || !is_digit(token[i])) return false;
  bool prev_digit = false;
  for (; i < token.size(); ++i) {
    const char c = token[i];
    if (is_digit(c)) {
      prev_digit = true;
    } else if ((c == '.' || c == ',') && prev_digit) {
      prev_digit = false;
    } else {
      return false;
    }
  }
  return prev_digit;
}

namespace {

constexpr std::array kEnglishNumerals = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty",
    "thirty",  "forty",   "fifty",     "sixty",    "seventy",  "eighty",  "ninety",
    "hundred", "thousand", "million",  "billion",  "dozen",
};

constexpr std::array kChineseNumerals = {
    "零", "〇", "一", "二", "两", "三", "四", "五", "六", "七",
    "八", "九", "十", "百", "千", "万", "亿",
};

constexpr std::array kCharacterScripts = {"zh", "ja", "th", "lo", "km", "my"};

}  // namespace

LanguageProfile LanguageProfile::for_tag(std::string_view tag) {
  LanguageProfile profile;
  profile.tag = std::string(tag);
  const std::string primary = to_lower_ascii(tag.substr(0, tag.find_first_of("-_")));
  profile.character_tokens =
      std::find(kCharacterScripts.begin(), kCharacterScripts.end(), primary) !=
      kCharacterScripts.end();
  if (primary == "en") {
    profile.numeral_words.insert(kEnglishNumerals.begin(), kEnglishNumerals.end());
  } else if (primary == "zh") {
    profile.numeral_words.insert(kChineseNumerals.begin(), kChineseNumerals.end());
  }
  return profile;
}

Tokens LanguageProfile::tokenize(std::string_view text) const {
  return character_tokens ? tokenize_chars(text) : tokenize_words(text);
}

std::string LanguageProfile::detokenize(TokenView tokens) const {
  if (character_tokens) return join_tokens(tokens, "");
  auto closes = [](std::string_view t) {
    return t.size() == 1 && std::string_view(".,!?;:%)]}").find(t.front()) != std::string_view::npos;
  };
  auto opens = [](std::string_view t) {
    return t.size() == 1 && std::string_view("([{").find(t.front()) != std::string_view::npos;
  };
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && !closes(tokens[i]) && !opens(tokens[i - 1])) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool LanguageProfile::is_numeral_word(std::string_view token) const {
  return numeral_words.contains(to_lower_ascii(token));
}

void LanguageProfile::load_numerals(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open numeral lexicon " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto tokens = tokenize_words(line);
    if (tokens.empty() || tokens.front() == "#") continue;
    numeral_words.insert(to_lower_ascii(tokens.front()));
  }
}

}  // namespace transcheck
