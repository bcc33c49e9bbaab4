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

#include "transcheck/embedding_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <iterator>
#include <thread>
#include <tuple>

#include "transcheck/error.hpp"
#include "transcheck/text.hpp"

namespace transcheck {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine_with_norms(std::span<const double> a, std::span<const double> b, double norm_a,
                         double norm_b) {
  return dot(a, b) / (norm_a * norm_b);
}

bool is_integer(std::string_view field) {
  return !field.empty() &&
         std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInvalidInput, "cosine_similarity: dimension mismatch (" +
                                              std::to_string(a.size()) + " vs " +
                                              std::to_string(b.size()) + ")");
  }
  const double norm_a = norm(a);
  const double norm_b = norm(b);
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw Error(ErrorKind::kDegenerateVector, "cosine_similarity: zero-norm vector");
  }
  return cosine_with_norms(a, b, norm_a, norm_b);
}

double cosine_similarity(const WordVector& a, const WordVector& b) {
  return cosine_similarity(a.vector, b.vector);
}

// ---------------------------------------------------------------------------
// EmbeddingModel

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open embedding file " + path.string());
  return parse(in, path.string(), lowercase);
}

EmbeddingModel EmbeddingModel::parse(std::istream& in, std::string_view source_name,
                                     bool lowercase) {
  EmbeddingModel model;
  std::string line;
  std::size_t line_number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;  // blank line
    std::vector<std::string> components;
    for (std::string field; fields >> field;) components.push_back(std::move(field));

    if (first) {
      first = false;
      if (components.size() == 1 && is_integer(token) && is_integer(components[0]) &&
          components[0] != "1") {
        // word2vec-style "<count> <dim>" header
        continue;
      }
    }

    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    if (components.empty()) {
      throw Error(ErrorKind::kParse, where + ": token '" + token + "' has no components");
    }
    if (model.dimension_ != 0 && components.size() != model.dimension_) {
      throw Error(ErrorKind::kParse, where + ": expected " + std::to_string(model.dimension_) +
                                         " components, found " +
                                         std::to_string(components.size()));
    }
    WordVector entry;
    entry.word = lowercase ? to_lower_ascii(token) : token;
    entry.vector.reserve(components.size());
    for (const auto& field : components) entry.vector.push_back(parse_double(field, where));
    model.add(std::move(entry));
  }
  return model;
}

void EmbeddingModel::add(WordVector entry) {
  if (dimension_ == 0) {
    dimension_ = entry.vector.size();
  } else if (entry.vector.size() != dimension_) {
    throw Error(ErrorKind::kInvalidInput, "embedding '" + entry.word + "' has dimension " +
                                              std::to_string(entry.vector.size()) +
                                              ", model dimension is " +
                                              std::to_string(dimension_));
  }
  if (auto it = index_.find(entry.word); it != index_.end()) {
    vectors_[it->second] = std::move(entry);
    return;
  }
  index_.emplace(entry.word, vectors_.size());
  vectors_.push_back(std::move(entry));
}

const std::vector<double>* EmbeddingModel::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &vectors_[it->second].vector;
}

// ---------------------------------------------------------------------------
// SimilarityCorpus

SimilarityCorpus::SimilarityCorpus(double threshold, std::vector<SimilarityPair> pairs)
    : threshold_(threshold), pairs_(std::move(pairs)) {
  if (!(threshold_ > 0.0 && threshold_ <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "similarity threshold must lie in (0, 1], got " + format_double(threshold_));
  }
  for (auto& pair : pairs_) {
    if (pair.word_a == pair.word_b) {
      throw Error(ErrorKind::kInvalidInput, "self-pair '" + pair.word_a + "' in corpus");
    }
    if (pair.word_b < pair.word_a) std::swap(pair.word_a, pair.word_b);
    if (pair.sim_model1 < threshold_ || pair.sim_model2 < threshold_) {
      throw Error(ErrorKind::kInvalidInput, "pair (" + pair.word_a + ", " + pair.word_b +
                                                ") is below the corpus threshold");
    }
  }
  std::sort(pairs_.begin(), pairs_.end(), [](const auto& x, const auto& y) {
    return std::tie(x.word_a, x.word_b) < std::tie(y.word_a, y.word_b);
  });
  auto dup = std::adjacent_find(pairs_.begin(), pairs_.end(), [](const auto& x, const auto& y) {
    return x.word_a == y.word_a && x.word_b == y.word_b;
  });
  if (dup != pairs_.end()) {
    throw Error(ErrorKind::kInvalidInput,
                "duplicate pair (" + dup->word_a + ", " + dup->word_b + ") in corpus");
  }

  for (const auto& pair : pairs_) {
    partners_[pair.word_a].push_back({pair.word_b, pair.min_similarity()});
    partners_[pair.word_b].push_back({pair.word_a, pair.min_similarity()});
  }
  for (auto& [word, list] : partners_) {
    std::sort(list.begin(), list.end(), [](const Replacement& x, const Replacement& y) {
      if (x.similarity != y.similarity) return x.similarity > y.similarity;
      return x.word < y.word;
    });
  }
}

std::vector<Replacement> SimilarityCorpus::lookup(std::string_view word) const {
  auto it = partners_.find(std::string(word));
  return it == partners_.end() ? std::vector<Replacement>{} : it->second;
}

void SimilarityCorpus::write(std::ostream& out) const {
  out << "# threshold\t" << format_double(threshold_) << '\n';
  for (const auto& pair : pairs_) {
    out << pair.word_a << '\t' << pair.word_b << '\t' << format_double(pair.sim_model1) << '\t'
        << format_double(pair.sim_model2) << '\n';
  }
}

void SimilarityCorpus::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write corpus " + path.string());
  write(out);
}

SimilarityCorpus SimilarityCorpus::read(std::istream& in, std::string_view source_name) {
  double threshold = 0.0;
  bool have_threshold = false;
  double min_seen = 1.0;
  std::vector<SimilarityPair> pairs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    const auto fields = split_fields(line);
    if (line.starts_with("# ") || line == "#") {
      if (fields.size() == 2 && fields[0] == "# threshold") {
        threshold = parse_double(fields[1], where);
        have_threshold = true;
      }
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorKind::kParse, where + ": expected 4 tab-separated fields");
    }
    SimilarityPair pair{std::string(fields[0]), std::string(fields[1]),
                        parse_double(fields[2], where), parse_double(fields[3], where)};
    min_seen = std::min(min_seen, pair.min_similarity());
    pairs.push_back(std::move(pair));
  }
  // Files without a threshold line get the tightest threshold their pairs admit.
  if (!have_threshold) threshold = pairs.empty() ? 1.0 : std::max(min_seen, 1e-12);
  return SimilarityCorpus(threshold, std::move(pairs));
}

SimilarityCorpus SimilarityCorpus::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open corpus " + path.string());
  return read(in, path.string());
}

// ---------------------------------------------------------------------------
// build_corpus

SimilarityCorpus build_corpus(const EmbeddingModel& model1, const EmbeddingModel& model2,
                              double threshold, unsigned workers) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "similarity threshold must lie in (0, 1], got " + format_double(threshold));
  }

  struct Entry {
    const std::string* word;
    const std::vector<double>* v1;
    const std::vector<double>* v2;
    double n1;
    double n2;
  };
  std::vector<Entry> vocab;
  for (const auto& entry : model1.entries()) {
    const auto* other = model2.find(entry.word);
    if (other == nullptr) continue;
    const double n1 = norm(entry.vector);
    const double n2 = norm(*other);
    if (n1 == 0.0 || n2 == 0.0) continue;
    vocab.push_back({&entry.word, &entry.vector, other, n1, n2});
  }
  std::sort(vocab.begin(), vocab.end(),
            [](const Entry& x, const Entry& y) { return *x.word < *y.word; });

  workers = std::max(1u, workers);
  std::vector<std::vector<SimilarityPair>> partial(workers);
  auto scan = [&](unsigned worker) {
    for (std::size_t i = worker; i < vocab.size(); i += workers) {
      const Entry& a = vocab[i];
      for (std::size_t j = i + 1; j < vocab.size(); ++j) {
        const Entry& b = vocab[j];
        const double s1 = cosine_with_norms(*a.v1, *b.v1, a.n1, b.n1);
        if (s1 < threshold) continue;
        const double s2 = cosine_with_norms(*a.v2, *b.v2, a.n2, b.n2);
        if (s2 < threshold) continue;
        partial[worker].push_back({*a.word, *b.word, s1, s2});
      }
    }
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(scan, w);
  }

  std::vector<SimilarityPair> pairs;
  for (auto& chunk : partial) {
    std::move(chunk.begin(), chunk.end(), std::back_inserter(pairs));
  }
  return SimilarityCorpus(threshold, std::move(pairs));
}

}  // namespace transcheck
