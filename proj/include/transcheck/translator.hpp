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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "transcheck/text.hpp"

namespace transcheck {

enum class TranslatorKind { kMock, kRemote };
enum class Capability { kBlackBox, kGreyBox };

// How to reach a translator. Loaded from key=value files:
//   kind=mock|remote  endpoint=<mock config path or URL>  protocol=transcheck|libretranslate
//   source=en  target=zh  capability=black-box|grey-box  rate_limit=10  timeout=30  id=<name>
struct TranslatorProfile {
  TranslatorKind kind = TranslatorKind::kMock;
  std::string endpoint;
  std::string protocol = "transcheck";
  std::string source_language = "en";
  std::string target_language = "zh";
  Capability capability = Capability::kBlackBox;
  double rate_limit = 10.0;  // requests per second
  double timeout_seconds = 30.0;
  std::string id;  // backend id override

  // Throws kConfig on an empty endpoint, a non-positive rate limit or timeout,
  // or an unknown protocol.
  void validate() const;

  // Relative mock endpoints resolve against the profile's directory.
  static TranslatorProfile load(const std::filesystem::path& path);
  static TranslatorProfile parse(std::istream& in, const std::filesystem::path& base_dir,
                                 std::string_view source_name = "<stream>");
};

struct TranslationRecord {
  std::string input;
  std::string output;
  std::optional<double> probability;  // grey-box only
  std::string timestamp;              // UTC, ISO 8601
  std::string backend;
  std::string source_language;
  std::string target_language;
};

struct BackendResponse {
  std::string output;
  std::optional<double> probability;
};

class TranslatorBackend {
 public:
  virtual ~TranslatorBackend() = default;
  // Throws kTransient, kPermanent or kMalformedResponse.
  virtual BackendResponse call(const std::string& text, const std::string& source_language,
                               const std::string& target_language) = 0;
  virtual std::string id() const = 0;
};

// Deterministic dictionary translator for offline runs. Config lines:
//   src → tgt  |  src -> tgt                 phrase rules, longest match wins
//   word -> replacement WHEN trigger         mistranslate when trigger co-occurs
//   PATTERN = p                              probability when PATTERN is in the output
//   * = p                                    default probability
//   @unknown = copy|error                    words without a rule
// '#' starts a comment line.
class MockTranslator final : public TranslatorBackend {
 public:
  struct Injection {
    std::string word;
    Tokens replacement;
    std::string trigger;
  };
  struct ProbabilityRule {
    Tokens pattern;  // contiguous output tokens
    double probability = 0.0;
  };
  enum class UnknownPolicy { kCopy, kError };

  struct Config {
    std::vector<std::pair<Tokens, Tokens>> rules;
    std::vector<Injection> injections;
    std::vector<ProbabilityRule> probabilities;
    std::optional<double> default_probability;
    UnknownPolicy unknown = UnknownPolicy::kCopy;
    std::string fingerprint;  // hash of the config text

    static Config parse(std::istream& in, std::string_view source_name = "<stream>");
    static Config load(const std::filesystem::path& path);
  };

  MockTranslator(Config config, LanguageProfile source, LanguageProfile target,
                 std::string name = "mock");

  BackendResponse call(const std::string& text, const std::string& source_language,
                       const std::string& target_language) override;
  std::string id() const override;

  // Throws kPermanent for an uncovered word under the error policy.
  Tokens translate_tokens(TokenView source) const;
  std::optional<double> probability_for(TokenView output) const;

 private:
  Config config_;
  LanguageProfile source_;
  LanguageProfile target_;
  std::string name_;
  std::unordered_map<std::string, Tokens> rules_;
  std::size_t longest_rule_ = 1;
};

// JSON over HTTP. Protocol "transcheck" posts {text, source, target} and
// reads {translation, probability?}; "libretranslate" posts
// {q, source, target, format} and reads {translatedText}. A bearer token is
// sent when TRANSCHECK_API_KEY is set.
class RemoteTranslator final : public TranslatorBackend {
 public:
  explicit RemoteTranslator(const TranslatorProfile& profile);

  BackendResponse call(const std::string& text, const std::string& source_language,
                       const std::string& target_language) override;
  std::string id() const override;

 private:
  std::string base_url_;
  std::string path_;
  std::string protocol_;
  double timeout_seconds_;
  std::string id_;
};

class Clock {
 public:
  using Duration = std::chrono::nanoseconds;
  virtual ~Clock() = default;
  virtual Duration now() const = 0;
  virtual void sleep_for(Duration duration) = 0;
};

class SystemClock final : public Clock {
 public:
  Duration now() const override;
  void sleep_for(Duration duration) override;
};

// Sliding-window limiter: at most floor(rate) calls in any one-second window,
// or one call per 1/rate seconds when rate < 1.
class RateLimiter {
 public:
  RateLimiter(double rate, Clock& clock);
  void acquire();

 private:
  std::size_t limit_;
  Clock::Duration window_;
  Clock& clock_;
  std::mutex mutex_;
  std::deque<Clock::Duration> calls_;
};

// Append-only JSONL store of TranslationRecord keyed by backend, languages
// and input text. Safe for concurrent lookups and inserts.
class TranslationCache {
 public:
  TranslationCache() = default;  // in memory only
  // Loads existing records; malformed lines are skipped with a warning.
  explicit TranslationCache(const std::filesystem::path& path);

  std::optional<TranslationRecord> find(std::string_view backend, std::string_view source_language,
                                        std::string_view target_language,
                                        std::string_view text) const;
  void insert(const TranslationRecord& record);
  std::size_t size() const;
  std::size_t skipped_lines() const { return skipped_lines_; }

 private:
  static std::string key(std::string_view backend, std::string_view source_language,
                         std::string_view target_language, std::string_view text);

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, TranslationRecord> records_;
  std::ofstream out_;
  std::size_t skipped_lines_ = 0;
};

std::string record_to_json(const TranslationRecord& record);
TranslationRecord record_from_json(std::string_view line);

struct RetryPolicy {
  std::size_t max_retries = 3;
  Clock::Duration initial_backoff = std::chrono::milliseconds(200);
  double multiplier = 2.0;
};

struct ClientCounters {
  std::size_t requests = 0;
  std::size_t cache_hits = 0;
  std::size_t backend_calls = 0;
  std::size_t retries = 0;
};

// Cache, rate limit and retries in front of a backend. Shareable across
// threads.
class TranslationClient {
 public:
  TranslationClient(TranslatorProfile profile, std::unique_ptr<TranslatorBackend> backend,
                    std::shared_ptr<TranslationCache> cache = nullptr,
                    std::shared_ptr<Clock> clock = nullptr, RetryPolicy retry = {});

  // Throws kInvalidInput on empty text, kTransient after exhausted retries,
  // kPermanent, kMalformedResponse on empty output, kGreyBoxUnavailable when
  // a grey-box profile receives no probability.
  TranslationRecord translate(const std::string& text);

  ClientCounters counters() const;
  const TranslatorProfile& profile() const { return profile_; }
  const TranslatorBackend& backend() const { return *backend_; }

 private:
  BackendResponse call_with_retry(const std::string& text);

  TranslatorProfile profile_;
  std::unique_ptr<TranslatorBackend> backend_;
  std::shared_ptr<TranslationCache> cache_;
  std::shared_ptr<Clock> clock_;
  RetryPolicy retry_;
  RateLimiter limiter_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> retries_{0};
};

std::unique_ptr<TranslatorBackend> make_backend(const TranslatorProfile& profile);

// `cache_path` empty keeps the cache in memory.
std::unique_ptr<TranslationClient> make_client(const TranslatorProfile& profile,
                                               const std::filesystem::path& cache_path = {});

}  // namespace transcheck
