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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "transcheck/error.hpp"
#include "transcheck/text.hpp"

namespace transcheck {
namespace {

TEST(Cosine, HandComputedValue) {
  // 32 / (sqrt(14) * sqrt(77))
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6};
  EXPECT_NEAR(cosine_similarity(a, b), 0.974631846, 1e-9);
  EXPECT_NEAR(cosine_similarity(a, b), 32.0 / (std::sqrt(14.0) * std::sqrt(77.0)), 1e-15);
}

TEST(Cosine, IdenticalAndOpposite) {
  const std::vector<double> a{0.3, -1.2, 2.0};
  const std::vector<double> neg{-0.3, 1.2, -2.0};
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  EXPECT_NEAR(cosine_similarity(a, neg), -1.0, 1e-12);
}

TEST(Cosine, Errors) {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{1, 2, 3};
  const std::vector<double> zero{0, 0};
  try {
    cosine_similarity(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
  try {
    cosine_similarity(a, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateVector);
  }
}

TEST(Cosine, MatchesOracleAndIsSymmetricAndBounded) {
  std::mt19937 rng(3);
  std::normal_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(8), b(8);
    for (auto& x : a) x = value(rng);
    for (auto& x : b) x = value(rng);
    const double s = cosine_similarity(a, b);
    EXPECT_NEAR(s, testing::oracle_cosine(a, b), 1e-12);
    EXPECT_DOUBLE_EQ(s, cosine_similarity(b, a));
    EXPECT_LE(std::abs(s), 1.0);
  }
}

TEST(EmbeddingModel, ParsesGloveAndWord2VecText) {
  std::istringstream glove("cat 1 0 0\ndog 0.9 0.1 0\n");
  const auto g = EmbeddingModel::parse(glove, "glove");
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.dimension(), 3u);
  std::istringstream w2v("2 3\nCat 1 0 0\ndog 0.9 0.1 0\n");
  const auto w = EmbeddingModel::parse(w2v, "w2v", /*lowercase=*/true);
  EXPECT_EQ(w.size(), 2u);
  EXPECT_NE(w.find("cat"), nullptr);
}

TEST(EmbeddingModel, RejectsDimensionMismatch) {
  std::istringstream in("cat 1 0 0\ndog 1 0\n");
  EXPECT_THROW(EmbeddingModel::parse(in, "bad"), Error);
}

EmbeddingModel model_from(const std::map<std::string, std::vector<double>>& vectors) {
  std::ostringstream text;
  for (const auto& [word, v] : vectors) {
    text << word;
    for (double x : v) text << ' ' << format_double(x);
    text << '\n';
  }
  std::istringstream in(text.str());
  return EmbeddingModel::parse(in, "generated");
}

TEST(BuildCorpus, MatchesBruteForceOnRandomModels) {
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 0.15);
  std::map<std::string, std::vector<double>> v1, v2;
  // Words cluster around a few centres so that some pairs clear the threshold.
  for (int w = 0; w < 60; ++w) {
    const int centre = w % 6;
    std::vector<double> a(6, 0.0), b(6, 0.0);
    a[centre] = 1.0;
    b[centre] = 1.0;
    for (auto& x : a) x += noise(rng);
    for (auto& x : b) x += noise(rng);
    v1["w" + std::to_string(w)] = a;
    v2["w" + std::to_string(w)] = b;
  }
  v1["only1"] = {1, 0, 0, 0, 0, 0};
  const auto m1 = model_from(v1);
  const auto m2 = model_from(v2);
  for (unsigned workers : {1u, 4u}) {
    const auto corpus = build_corpus(m1, m2, 0.9, workers);
    std::size_t expected = 0;
    for (auto a = v2.begin(); a != v2.end(); ++a) {
      for (auto b = std::next(a); b != v2.end(); ++b) {
        const double s1 = testing::oracle_cosine(v1.at(a->first), v1.at(b->first));
        const double s2 = testing::oracle_cosine(a->second, b->second);
        if (s1 >= 0.9 && s2 >= 0.9) {
          ++expected;
          bool found = false;
          for (const auto& p : corpus.pairs()) {
            if (p.word_a == a->first && p.word_b == b->first) {
              found = true;
              EXPECT_NEAR(p.sim_model1, s1, 1e-12);
              EXPECT_NEAR(p.sim_model2, s2, 1e-12);
            }
          }
          EXPECT_TRUE(found) << a->first << " " << b->first;
        }
      }
    }
    EXPECT_GT(expected, 0u);
    EXPECT_EQ(corpus.size(), expected);
    for (const auto& p : corpus.pairs()) {
      EXPECT_LT(p.word_a, p.word_b);
      EXPECT_NE(p.word_a, "only1");
      EXPECT_NE(p.word_b, "only1");
    }
  }
}

TEST(BuildCorpus, ThresholdIsInclusive) {
  // cos = 0.8 exactly for (1,0) and (0.8,0.6).
  const auto m = model_from({{"a", {1.0, 0.0}}, {"b", {0.8, 0.6}}});
  EXPECT_EQ(build_corpus(m, m, 0.8).size(), 1u);
  EXPECT_EQ(build_corpus(m, m, 0.81).size(), 0u);
}

TEST(SimilarityCorpus, LookupOrdersBySimilarityThenWord) {
  const SimilarityCorpus corpus(0.9, {{"cat", "dog", 0.95, 0.93},
                                      {"cat", "kitten", 0.97, 0.99},
                                      {"bird", "cat", 0.93, 0.95},
                                      {"cat", "puppy", 0.91, 0.96}});
  const auto partners = corpus.lookup("cat");
  ASSERT_EQ(partners.size(), 4u);
  EXPECT_EQ(partners[0].word, "kitten");
  EXPECT_EQ(partners[1].word, "bird");  // 0.93 ties with dog, lexicographic
  EXPECT_EQ(partners[2].word, "dog");
  EXPECT_EQ(partners[3].word, "puppy");
  EXPECT_TRUE(corpus.lookup("zebra").empty());
}

TEST(SimilarityCorpus, ValidatesPairs) {
  EXPECT_THROW(SimilarityCorpus(0.9, {{"a", "a", 0.95, 0.95}}), Error);
  EXPECT_THROW(SimilarityCorpus(0.9, {{"a", "b", 0.85, 0.95}}), Error);
  EXPECT_THROW(SimilarityCorpus(0.9, {{"a", "b", 0.95, 0.95}, {"b", "a", 0.95, 0.95}}), Error);
}

TEST(SimilarityCorpus, WriteReadRoundTrip) {
  const SimilarityCorpus corpus(0.9, {{"good", "fine", 0.9123456789, 0.95}, {"#", "x", 0.99, 0.99}});
  std::ostringstream out;
  corpus.write(out);
  std::istringstream in(out.str());
  const auto again = SimilarityCorpus::read(in);
  EXPECT_EQ(again.threshold(), corpus.threshold());
  ASSERT_EQ(again.size(), corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) EXPECT_EQ(again.pairs()[k], corpus.pairs()[k]);
}

}  // namespace
}  // namespace transcheck
