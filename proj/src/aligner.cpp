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

#include "transcheck/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "transcheck/error.hpp"

namespace transcheck {

// ---------------------------------------------------------------------------
// AlignmentTable

AlignmentTable::AlignmentTable(std::vector<AlignmentLink> links, std::size_t source_length,
                               std::size_t target_length)
    : links_(std::move(links)), source_length_(source_length), target_length_(target_length) {
  for (const auto& link : links_) {
    if (link.source >= source_length_ || link.target >= target_length_) {
      throw Error(ErrorKind::kInvalidInput,
                  "alignment link " + std::to_string(link.source) + "-" +
                      std::to_string(link.target) + " is out of bounds");
    }
  }
  std::sort(links_.begin(), links_.end(), [](const AlignmentLink& a, const AlignmentLink& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });
}

std::vector<AlignmentLink> AlignmentTable::links_for(std::size_t source) const {
  std::vector<AlignmentLink> out;
  for (const auto& link : links_) {
    if (link.source == source) out.push_back(link);
  }
  return out;
}

std::string AlignmentTable::to_string() const {
  std::string out;
  for (const auto& link : links_) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(link.source) + "-" + std::to_string(link.target);
  }
  return out;
}

AlignmentTable AlignmentTable::parse(std::string_view line, std::size_t source_length,
                                     std::size_t target_length) {
  std::vector<AlignmentLink> links;
  std::istringstream fields{std::string(line)};
  for (std::string field; fields >> field;) {
    const auto dash = field.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == field.size()) {
      throw Error(ErrorKind::kParse, "bad alignment link '" + field + "'");
    }
    const double s = parse_double(std::string_view(field).substr(0, dash), "alignment link");
    const double t = parse_double(std::string_view(field).substr(dash + 1), "alignment link");
    if (s < 0 || t < 0 || s != std::floor(s) || t != std::floor(t)) {
      throw Error(ErrorKind::kParse, "bad alignment link '" + field + "'");
    }
    links.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(t), 1.0});
  }
  return AlignmentTable(std::move(links), source_length, target_length);
}

// ---------------------------------------------------------------------------
// LexiconModel

const LexiconModel::Row* LexiconModel::row(std::string_view source) const {
  auto it = table_.find(source);
  return it == table_.end() ? nullptr : &it->second;
}

double LexiconModel::probability(std::string_view source, std::string_view target) const {
  const Row* r = row(source);
  if (r == nullptr) return 0.0;
  auto it = r->find(target);
  return it == r->end() ? 0.0 : it->second;
}

void LexiconModel::write(std::ostream& out) const {
  out << "# iterations\t" << iterations_ << '\n';
  out << "# corpus_size\t" << corpus_size_ << '\n';
  for (const auto& [source, targets] : table_) {
    for (const auto& [target, p] : targets) {
      out << source << '\t' << target << '\t' << format_double(p) << '\n';
    }
  }
}

void LexiconModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write lexicon model " + path.string());
  write(out);
}

LexiconModel LexiconModel::read(std::istream& in, std::string_view source_name) {
  LexiconModel model;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    const auto fields = split_fields(line);
    if (line.starts_with("# ")) {
      if (fields.size() == 2 && fields[0] == "# iterations") {
        model.iterations_ = static_cast<std::size_t>(parse_double(fields[1], where));
      } else if (fields.size() == 2 && fields[0] == "# corpus_size") {
        model.corpus_size_ = static_cast<std::size_t>(parse_double(fields[1], where));
      }
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorKind::kParse, where + ": expected source<TAB>target<TAB>probability");
    }
    const double p = parse_double(fields[2], where);
    if (p < 0.0 || p > 1.0) throw Error(ErrorKind::kParse, where + ": probability outside [0, 1]");
    model.table_[std::string(fields[0])][std::string(fields[1])] = p;
  }
  return model;
}

LexiconModel LexiconModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open lexicon model " + path.string());
  return read(in, path.string());
}

// ---------------------------------------------------------------------------
// Training

namespace {

class Vocabulary {
 public:
  std::size_t id(const std::string& word) {
    auto [it, inserted] = ids_.emplace(word, words_.size());
    if (inserted) words_.push_back(word);
    return it->second;
  }
  const std::string& word(std::size_t id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> words_;
};

// Sparse row sorted by target id.
struct SparseRow {
  std::vector<std::size_t> targets;
  std::vector<double> values;

  std::size_t slot(std::size_t target) const {
    return static_cast<std::size_t>(
        std::lower_bound(targets.begin(), targets.end(), target) - targets.begin());
  }
};

}  // namespace

LexiconModel train_lexicon(std::span<const ParallelPair> corpus, std::size_t iterations) {
  if (corpus.empty()) throw Error(ErrorKind::kTraining, "train_lexicon: empty corpus");
  if (iterations < 1) throw Error(ErrorKind::kTraining, "train_lexicon: iterations must be >= 1");

  Vocabulary source_vocab;
  Vocabulary target_vocab;
  std::vector<std::vector<std::size_t>> sources;
  std::vector<std::vector<std::size_t>> targets;
  for (const auto& pair : corpus) {
    std::vector<std::size_t> s;
    std::vector<std::size_t> t;
    for (const auto& w : pair.source) s.push_back(source_vocab.id(w));
    for (const auto& w : pair.target) t.push_back(target_vocab.id(w));
    sources.push_back(std::move(s));
    targets.push_back(std::move(t));
  }

  std::vector<SparseRow> prob(source_vocab.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    for (std::size_t e : sources[k]) {
      prob[e].targets.insert(prob[e].targets.end(), targets[k].begin(), targets[k].end());
    }
  }
  for (auto& row : prob) {
    std::sort(row.targets.begin(), row.targets.end());
    row.targets.erase(std::unique(row.targets.begin(), row.targets.end()), row.targets.end());
    row.values.assign(row.targets.size(),
                      row.targets.empty() ? 0.0 : 1.0 / static_cast<double>(row.targets.size()));
  }

  LexiconModel model;
  model.iterations_ = iterations;
  model.corpus_size_ = corpus.size();

  std::vector<std::vector<double>> counts(prob.size());
  std::vector<double> totals(prob.size());
  std::vector<std::size_t> slots;
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    for (std::size_t e = 0; e < prob.size(); ++e) counts[e].assign(prob[e].targets.size(), 0.0);
    std::fill(totals.begin(), totals.end(), 0.0);

    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const auto& s = sources[k];
      for (std::size_t f : targets[k]) {
        slots.resize(s.size());
        double denominator = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
          slots[i] = prob[s[i]].slot(f);
          denominator += prob[s[i]].values[slots[i]];
        }
        if (denominator <= 0.0) continue;
        for (std::size_t i = 0; i < s.size(); ++i) {
          const double c = prob[s[i]].values[slots[i]] / denominator;
          counts[s[i]][slots[i]] += c;
          totals[s[i]] += c;
        }
      }
    }

    double drift = 0.0;
    for (std::size_t e = 0; e < prob.size(); ++e) {
      if (totals[e] <= 0.0) continue;
      double sum = 0.0;
      for (std::size_t j = 0; j < prob[e].values.size(); ++j) {
        prob[e].values[j] = counts[e][j] / totals[e];
        sum += prob[e].values[j];
      }
      drift = std::max(drift, std::abs(sum - 1.0));
    }
    model.drift_.push_back(drift);
  }

  for (std::size_t e = 0; e < prob.size(); ++e) {
    auto& row = model.table_[source_vocab.word(e)];
    for (std::size_t j = 0; j < prob[e].targets.size(); ++j) {
      row.emplace(target_vocab.word(prob[e].targets[j]), prob[e].values[j]);
    }
  }
  return model;
}

std::vector<ParallelPair> read_parallel(std::istream& in, const LanguageProfile& source_profile,
                                        const LanguageProfile& target_profile) {
  std::vector<ParallelPair> pairs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view source;
    std::string_view target;
    if (auto bar = line.find(" ||| "); bar != std::string::npos) {
      source = std::string_view(line).substr(0, bar);
      target = std::string_view(line).substr(bar + 5);
    } else if (auto tab = line.find('\t'); tab != std::string::npos) {
      source = std::string_view(line).substr(0, tab);
      target = std::string_view(line).substr(tab + 1);
    } else {
      throw Error(ErrorKind::kParse,
                  "parallel line " + std::to_string(line_number) + ": expected a separator");
    }
    pairs.push_back({source_profile.tokenize(source), target_profile.tokenize(target)});
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Alignment

AlignmentTable align(TokenView source, TokenView target, const LexiconModel& model,
                     const AlignOptions& options) {
  std::vector<AlignmentLink> links;
  const double source_length = static_cast<double>(source.size());
  const double target_length = static_cast<double>(target.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto* row = model.row(source[i]);
    if (row == nullptr) continue;
    std::optional<std::size_t> best;
    double best_p = 0.0;
    double best_distance = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) {
      auto it = row->find(target[j]);
      if (it == row->end()) continue;
      const double p = it->second;
      const double distance = std::abs(static_cast<double>(i) / source_length -
                                       static_cast<double>(j) / target_length);
      if (!best || p > best_p || (p == best_p && distance < best_distance)) {
        best = j;
        best_p = p;
        best_distance = distance;
      }
    }
    if (best && best_p >= options.floor) links.push_back({i, *best, best_p});
  }
  return AlignmentTable(std::move(links), source.size(), target.size());
}

AlignmentTable LexicalAligner::align(TokenView source, TokenView target) const {
  return transcheck::align(source, target, model_, options_);
}

namespace {

std::string pair_key(TokenView source, TokenView target) {
  return join_tokens(source) + '\x1f' + join_tokens(target);
}

}  // namespace

void FileAligner::add(TokenView source, TokenView target, AlignmentTable table) {
  tables_.insert_or_assign(pair_key(source, target), std::move(table));
}

FileAligner FileAligner::load(const std::filesystem::path& parallel,
                              const std::filesystem::path& alignments,
                              const LanguageProfile& source_profile,
                              const LanguageProfile& target_profile) {
  std::ifstream pin(parallel);
  if (!pin) throw Error(ErrorKind::kIo, "cannot open parallel file " + parallel.string());
  std::ifstream ain(alignments);
  if (!ain) throw Error(ErrorKind::kIo, "cannot open alignment file " + alignments.string());
  const auto pairs = read_parallel(pin, source_profile, target_profile);
  FileAligner aligner;
  std::string line;
  for (const auto& pair : pairs) {
    if (!std::getline(ain, line)) {
      throw Error(ErrorKind::kParse, "alignment file has fewer lines than the parallel file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    aligner.add(pair.source, pair.target,
                AlignmentTable::parse(line, pair.source.size(), pair.target.size()));
  }
  return aligner;
}

AlignmentTable FileAligner::align(TokenView source, TokenView target) const {
  auto it = tables_.find(pair_key(source, target));
  if (it == tables_.end()) return AlignmentTable({}, source.size(), target.size());
  return it->second;
}

std::optional<TargetSpan> get_translated_word(std::size_t index, const AlignmentTable& table,
                                              TokenView target) {
  if (index >= table.source_length()) {
    throw Error(ErrorKind::kInvalidInput, "source index out of bounds");
  }
  const auto links = table.links_for(index);
  if (links.empty()) return std::nullopt;
  TargetSpan span;
  span.begin = links.front().target;
  span.end = links.front().target + 1;
  for (const auto& link : links) {
    span.begin = std::min(span.begin, link.target);
    span.end = std::max(span.end, link.target + 1);
  }
  span.low_confidence = span.end - span.begin != links.size();
  if (span.end > target.size()) {
    throw Error(ErrorKind::kInvalidInput, "alignment does not match the target sequence");
  }
  span.tokens.assign(target.begin() + static_cast<std::ptrdiff_t>(span.begin),
                     target.begin() + static_cast<std::ptrdiff_t>(span.end));
  return span;
}

}  // namespace transcheck
