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

#include "transcheck/diff_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "transcheck/error.hpp"

namespace transcheck {

namespace {

// suffix[i][j] = LCS length of a[i..] and b[j..], row-major (m + 1 columns).
std::vector<std::uint32_t> suffix_lcs_table(TokenView a, TokenView b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::uint32_t> table((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return table[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }
  return table;
}

void collect_slices(TokenView tokens, const std::vector<bool>& matched,
                    std::vector<DiffSlice>& out) {
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (matched[i]) {
      ++i;
      continue;
    }
    DiffSlice slice;
    slice.start = i;
    while (i < tokens.size() && !matched[i]) slice.tokens.push_back(tokens[i++]);
    out.push_back(std::move(slice));
  }
}

}  // namespace

DiffSlices word_diff(TokenView a, TokenView b) {
  const auto table = suffix_lcs_table(a, b);
  const std::size_t m = b.size();
  auto at = [&](std::size_t i, std::size_t j) { return table[i * (m + 1) + j]; };

  std::vector<bool> matched_a(a.size(), false);
  std::vector<bool> matched_b(b.size(), false);
  DiffSlices result;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j] && at(i, j) == at(i + 1, j + 1) + 1) {
      matched_a[i] = matched_b[j] = true;
      result.common.push_back(a[i]);
      ++i;
      ++j;
    } else if (at(i + 1, j) >= at(i, j + 1)) {
      ++i;
    } else {
      ++j;
    }
  }
  collect_slices(a, matched_a, result.slices_a);
  collect_slices(b, matched_b, result.slices_b);
  return result;
}

std::size_t lcs_length(TokenView a, TokenView b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

std::size_t edit_distance(TokenView a, TokenView b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> curr(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, substitute});
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double lcs_metric(TokenView a, TokenView b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return static_cast<double>(lcs_length(a, b)) / static_cast<double>(longest);
}

double ed_metric(TokenView a, TokenView b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

BagOfWords bag_of_words(TokenView tokens) {
  BagOfWords bag;
  for (const auto& token : tokens) ++bag[token];
  return bag;
}

// ---------------------------------------------------------------------------
// IdfTable

IdfTable IdfTable::from_frequencies(std::size_t corpus_size,
                                    std::map<std::string, std::size_t> doc_freq) {
  IdfTable table;
  table.uniform_ = false;
  table.corpus_size_ = corpus_size;
  for (auto& [token, freq] : doc_freq) {
    if (freq > corpus_size) {
      throw Error(ErrorKind::kInvalidInput,
                  "document frequency of '" + token + "' exceeds the corpus size");
    }
    table.doc_freq_.emplace(token, freq);
  }
  return table;
}

double IdfTable::weight(std::string_view token) const {
  if (uniform_) return 1.0;
  const double numerator = static_cast<double>(corpus_size_) + 1.0;
  auto it = doc_freq_.find(token);
  const double freq = it == doc_freq_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log(numerator / (freq + 1.0));
}

std::optional<std::size_t> IdfTable::doc_freq(std::string_view token) const {
  auto it = doc_freq_.find(token);
  if (it == doc_freq_.end()) return std::nullopt;
  return it->second;
}

void IdfTable::write(std::ostream& out) const {
  if (uniform_) {
    out << "# uniform\n";
    return;
  }
  out << "# corpus_size\t" << corpus_size_ << '\n';
  for (const auto& [token, freq] : doc_freq_) out << token << '\t' << freq << '\n';
}

void IdfTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write idf table " + path.string());
  write(out);
}

IdfTable IdfTable::read(std::istream& in, std::string_view source_name) {
  std::optional<std::size_t> corpus_size;
  bool uniform = false;
  std::map<std::string, std::size_t> freqs;
  std::string line;
  std::size_t line_number = 0;
  auto parse_count = [&](std::string_view field, const std::string& where) {
    const double value = parse_double(field, where);
    if (value < 0 || value != std::floor(value)) {
      throw Error(ErrorKind::kParse, where + ": expected a non-negative integer");
    }
    return static_cast<std::size_t>(value);
  };
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    const auto fields = split_fields(line);
    if (line.starts_with("# ") || line == "#") {
      if (fields[0] == "# uniform") uniform = true;
      if (fields.size() == 2 && fields[0] == "# corpus_size") {
        corpus_size = parse_count(fields[1], where);
      }
      continue;
    }
    if (fields.size() != 2) throw Error(ErrorKind::kParse, where + ": expected token<TAB>doc_freq");
    freqs[std::string(fields[0])] = parse_count(fields[1], where);
  }
  if (uniform) return IdfTable::uniform();
  if (!corpus_size) {
    throw Error(ErrorKind::kParse, std::string(source_name) + ": missing '# corpus_size' header");
  }
  return from_frequencies(*corpus_size, std::move(freqs));
}

IdfTable IdfTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open idf table " + path.string());
  return read(in, path.string());
}

IdfTable build_idf(std::span<const Tokens> sentences) {
  std::map<std::string, std::size_t> freqs;
  for (const auto& sentence : sentences) {
    const std::set<std::string> unique(sentence.begin(), sentence.end());
    for (const auto& token : unique) ++freqs[token];
  }
  return IdfTable::from_frequencies(sentences.size(), std::move(freqs));
}

TfidfScore tfidf_metric(TokenView a, TokenView b, const IdfTable& idf) {
  if (a.empty() && b.empty()) {
    throw Error(ErrorKind::kInvalidInput, "tfidf_metric: both texts are empty");
  }
  const BagOfWords bag_a = bag_of_words(a);
  const BagOfWords bag_b = bag_of_words(b);
  std::set<std::string_view> vocabulary;
  for (const auto& [token, count] : bag_a) vocabulary.insert(token);
  for (const auto& [token, count] : bag_b) vocabulary.insert(token);

  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::string_view token : vocabulary) {
    const double weight = idf.weight(token);
    auto ia = bag_a.find(std::string(token));
    auto ib = bag_b.find(std::string(token));
    const double xa = ia == bag_a.end() ? 0.0 : weight * static_cast<double>(ia->second);
    const double xb = ib == bag_b.end() ? 0.0 : weight * static_cast<double>(ib->second);
    dot += xa * xb;
    norm_a += xa * xa;
    norm_b += xb * xb;
  }
  if (norm_a == 0.0 || norm_b == 0.0) {
    return {bag_a == bag_b ? 1.0 : 0.0, true};
  }
  // sqrt(x * x) == x exactly, so identical bags score exactly 1.
  const double cosine = dot / std::sqrt(norm_a * norm_b);
  return {std::clamp(cosine, 0.0, 1.0), false};
}

// ---------------------------------------------------------------------------
// BLEU

NgramPrecision modified_precision(TokenView reference, TokenView candidate, std::size_t n) {
  NgramPrecision result;
  if (n == 0 || candidate.size() < n) return result;
  auto count_ngrams = [n](TokenView tokens) {
    std::map<std::vector<std::string_view>, std::size_t> counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::vector<std::string_view> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                         tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
      ++counts[std::move(gram)];
    }
    return counts;
  };
  const auto candidate_counts = count_ngrams(candidate);
  const auto reference_counts = count_ngrams(reference);
  for (const auto& [gram, count] : candidate_counts) {
    result.total += count;
    auto it = reference_counts.find(gram);
    if (it != reference_counts.end()) result.matched += std::min(count, it->second);
  }
  return result;
}

double bleu_directional(TokenView reference, TokenView candidate) {
  if (reference.empty() || candidate.empty()) {
    throw Error(ErrorKind::kInvalidInput, "bleu: empty input");
  }
  const std::size_t c = candidate.size();
  const std::size_t r = reference.size();
  const std::size_t orders = std::min<std::size_t>(4, std::max(c, r));
  const double weight = 1.0 / static_cast<double>(orders);
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    const NgramPrecision p = modified_precision(reference, candidate, n);
    if (p.matched == 0) return 0.0;
    log_sum += weight * std::log(p.value());
  }
  const double brevity =
      c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return brevity * std::exp(log_sum);
}

double bleu_metric(TokenView a, TokenView b) {
  return std::max(bleu_directional(a, b), bleu_directional(b, a));
}

// ---------------------------------------------------------------------------
// Metric dispatch

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::kLcs: return "LCS";
    case Metric::kEd: return "ED";
    case Metric::kTfidf: return "TFIDF";
    case Metric::kBleu: return "BLEU";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "LCS") return Metric::kLcs;
  if (upper == "ED") return Metric::kEd;
  if (upper == "TFIDF" || upper == "TF-IDF") return Metric::kTfidf;
  if (upper == "BLEU") return Metric::kBleu;
  throw Error(ErrorKind::kConfig, "unknown metric '" + std::string(name) + "'");
}

std::vector<Metric> parse_metric_list(std::string_view names) {
  if (to_lower_ascii(names) == "all") return {kAllMetrics.begin(), kAllMetrics.end()};
  std::vector<Metric> metrics;
  for (auto field : split_fields(names, ',')) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    if (field.empty()) continue;
    const Metric metric = parse_metric(field);
    if (std::find(metrics.begin(), metrics.end(), metric) == metrics.end()) {
      metrics.push_back(metric);
    }
  }
  if (metrics.empty()) throw Error(ErrorKind::kConfig, "no metric selected");
  return metrics;
}

MetricValue compute_metric(Metric metric, TokenView a, TokenView b, const IdfTable& idf) {
  if (a.empty() || b.empty()) return {a.empty() && b.empty() ? 1.0 : 0.0, false};
  switch (metric) {
    case Metric::kLcs: return {lcs_metric(a, b), false};
    case Metric::kEd: return {ed_metric(a, b), false};
    case Metric::kTfidf: {
      const TfidfScore s = tfidf_metric(a, b, idf);
      return {s.score, s.degenerate};
    }
    case Metric::kBleu: return {bleu_metric(a, b), false};
  }
  return {0.0, false};
}

}  // namespace transcheck
