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

#include "transcheck/translator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "transcheck/error.hpp"

namespace transcheck {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Tokens split_whitespace(std::string_view s) {
  Tokens out;
  std::istringstream in{std::string(s)};
  for (std::string token; in >> token;) out.push_back(std::move(token));
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

// ---------------------------------------------------------------------------
// TranslatorProfile

void TranslatorProfile::validate() const {
  if (endpoint.empty()) throw Error(ErrorKind::kConfig, "translator profile: endpoint is empty");
  if (!(rate_limit > 0.0)) throw Error(ErrorKind::kConfig, "translator profile: rate_limit must be > 0");
  if (!(timeout_seconds > 0.0)) {
    throw Error(ErrorKind::kConfig, "translator profile: timeout must be > 0");
  }
  if (kind == TranslatorKind::kRemote && protocol != "transcheck" && protocol != "libretranslate") {
    throw Error(ErrorKind::kConfig, "translator profile: unknown protocol '" + protocol + "'");
  }
  if (source_language.empty() || target_language.empty()) {
    throw Error(ErrorKind::kConfig, "translator profile: language tags must be set");
  }
}

TranslatorProfile TranslatorProfile::parse(std::istream& in, const std::filesystem::path& base_dir,
                                           std::string_view source_name) {
  TranslatorProfile profile;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::kConfig, where + ": expected key=value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key == "kind") {
      if (value == "mock") {
        profile.kind = TranslatorKind::kMock;
      } else if (value == "remote") {
        profile.kind = TranslatorKind::kRemote;
      } else {
        throw Error(ErrorKind::kConfig, where + ": kind must be mock or remote");
      }
    } else if (key == "endpoint") {
      profile.endpoint = value;
    } else if (key == "protocol") {
      profile.protocol = value;
    } else if (key == "source") {
      profile.source_language = value;
    } else if (key == "target") {
      profile.target_language = value;
    } else if (key == "capability") {
      if (value == "black-box") {
        profile.capability = Capability::kBlackBox;
      } else if (value == "grey-box") {
        profile.capability = Capability::kGreyBox;
      } else {
        throw Error(ErrorKind::kConfig, where + ": capability must be black-box or grey-box");
      }
    } else if (key == "rate_limit") {
      profile.rate_limit = parse_double(value, where);
    } else if (key == "timeout") {
      profile.timeout_seconds = parse_double(value, where);
    } else if (key == "id") {
      profile.id = value;
    } else {
      throw Error(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
    }
  }
  if (profile.kind == TranslatorKind::kMock && !profile.endpoint.empty()) {
    const std::filesystem::path endpoint(profile.endpoint);
    if (endpoint.is_relative()) profile.endpoint = (base_dir / endpoint).lexically_normal().string();
  }
  profile.validate();
  return profile;
}

TranslatorProfile TranslatorProfile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open translator profile " + path.string());
  return parse(in, path.parent_path(), path.string());
}

// ---------------------------------------------------------------------------
// MockTranslator

MockTranslator::Config MockTranslator::Config::parse(std::istream& in,
                                                     std::string_view source_name) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  Config config;
  config.fingerprint = fnv1a_hex(content);

  std::istringstream lines(content);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_number);

    if (text.front() == '@') {
      const auto eq = text.find('=');
      if (eq == std::string_view::npos || trim(text.substr(0, eq)) != "@unknown") {
        throw Error(ErrorKind::kConfig, where + ": unknown directive");
      }
      const std::string_view value = trim(text.substr(eq + 1));
      if (value == "copy") {
        config.unknown = UnknownPolicy::kCopy;
      } else if (value == "error") {
        config.unknown = UnknownPolicy::kError;
      } else {
        throw Error(ErrorKind::kConfig, where + ": @unknown must be copy or error");
      }
      continue;
    }

    std::size_t arrow = text.find("→");
    std::size_t arrow_width = 3;
    if (arrow == std::string_view::npos) {
      arrow = text.find("->");
      arrow_width = 2;
    }
    if (arrow != std::string_view::npos) {
      const Tokens lhs = split_whitespace(text.substr(0, arrow));
      std::string_view rhs = text.substr(arrow + arrow_width);
      if (lhs.empty()) throw Error(ErrorKind::kConfig, where + ": empty rule source");
      if (const auto when = rhs.find(" WHEN "); when != std::string_view::npos) {
        const Tokens replacement = split_whitespace(rhs.substr(0, when));
        const Tokens trigger = split_whitespace(rhs.substr(when + 6));
        if (lhs.size() != 1 || trigger.size() != 1 || replacement.empty()) {
          throw Error(ErrorKind::kConfig, where + ": expected 'word -> replacement WHEN trigger'");
        }
        config.injections.push_back({lhs.front(), replacement, trigger.front()});
      } else {
        Tokens target = split_whitespace(rhs);
        if (target.empty()) throw Error(ErrorKind::kConfig, where + ": empty rule target");
        config.rules.emplace_back(lhs, std::move(target));
      }
      continue;
    }

    const auto eq = text.rfind('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kConfig, where + ": expected a rule, an injection or 'PATTERN = p'");
    }
    const std::string_view pattern = trim(text.substr(0, eq));
    const double p = parse_double(trim(text.substr(eq + 1)), where);
    if (p < 0.0 || p > 1.0) throw Error(ErrorKind::kConfig, where + ": probability outside [0, 1]");
    if (pattern == "*") {
      config.default_probability = p;
    } else {
      Tokens tokens = split_whitespace(pattern);
      if (tokens.empty()) throw Error(ErrorKind::kConfig, where + ": empty probability pattern");
      config.probabilities.push_back({std::move(tokens), p});
    }
  }
  return config;
}

MockTranslator::Config MockTranslator::Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open mock translator config " + path.string());
  return parse(in, path.string());
}

MockTranslator::MockTranslator(Config config, LanguageProfile source, LanguageProfile target,
                               std::string name)
    : config_(std::move(config)),
      source_(std::move(source)),
      target_(std::move(target)),
      name_(std::move(name)) {
  for (const auto& [lhs, rhs] : config_.rules) {
    rules_.insert_or_assign(join_tokens(lhs), rhs);
    longest_rule_ = std::max(longest_rule_, lhs.size());
  }
}

std::string MockTranslator::id() const { return name_ + ":" + config_.fingerprint; }

Tokens MockTranslator::translate_tokens(TokenView source) const {
  auto trigger_present = [&](const std::string& trigger, std::size_t self) {
    const std::string wanted = to_lower_ascii(trigger);
    for (std::size_t k = 0; k < source.size(); ++k) {
      if (k != self && to_lower_ascii(source[k]) == wanted) return true;
    }
    return false;
  };

  Tokens out;
  std::size_t pos = 0;
  while (pos < source.size()) {
    const Injection* injection = nullptr;
    for (const auto& candidate : config_.injections) {
      if (to_lower_ascii(candidate.word) == to_lower_ascii(source[pos]) &&
          trigger_present(candidate.trigger, pos)) {
        injection = &candidate;
        break;
      }
    }
    if (injection != nullptr) {
      out.insert(out.end(), injection->replacement.begin(), injection->replacement.end());
      ++pos;
      continue;
    }

    bool matched = false;
    for (std::size_t len = std::min(longest_rule_, source.size() - pos); len >= 1; --len) {
      const std::string phrase = join_tokens(source.subspan(pos, len));
      auto it = rules_.find(phrase);
      if (it == rules_.end()) it = rules_.find(to_lower_ascii(phrase));
      if (it != rules_.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
        pos += len;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (config_.unknown == UnknownPolicy::kError) {
      throw Error(ErrorKind::kPermanent, "mock translator has no rule for '" + source[pos] + "'");
    }
    out.push_back(source[pos]);
    ++pos;
  }
  return out;
}

std::optional<double> MockTranslator::probability_for(TokenView output) const {
  for (const auto& rule : config_.probabilities) {
    const auto found = std::search(output.begin(), output.end(), rule.pattern.begin(),
                                   rule.pattern.end());
    if (found != output.end()) return rule.probability;
  }
  return config_.default_probability;
}

BackendResponse MockTranslator::call(const std::string& text, const std::string&,
                                     const std::string&) {
  const Tokens output = translate_tokens(source_.tokenize(text));
  return {target_.detokenize(output), probability_for(output)};
}

// ---------------------------------------------------------------------------
// RemoteTranslator

RemoteTranslator::RemoteTranslator(const TranslatorProfile& profile)
    : protocol_(profile.protocol), timeout_seconds_(profile.timeout_seconds) {
  const auto scheme = profile.endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorKind::kConfig, "remote endpoint must be an http(s) URL: " + profile.endpoint);
  }
  const auto slash = profile.endpoint.find('/', scheme + 3);
  base_url_ = profile.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : profile.endpoint.substr(slash);
  if (protocol_ == "libretranslate" && path_ == "/") path_ = "/translate";
  id_ = profile.id.empty() ? "remote:" + profile.endpoint : profile.id;
}

std::string RemoteTranslator::id() const { return id_; }

BackendResponse RemoteTranslator::call(const std::string& text, const std::string& source_language,
                                       const std::string& target_language) {
  httplib::Client client(base_url_);
  const auto seconds = static_cast<time_t>(timeout_seconds_);
  const auto micros = static_cast<time_t>((timeout_seconds_ - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  const char* key = std::getenv("TRANSCHECK_API_KEY");
  json body;
  if (protocol_ == "libretranslate") {
    body = {{"q", text}, {"source", source_language}, {"target", target_language},
            {"format", "text"}};
    if (key != nullptr && *key != '\0') body["api_key"] = key;
  } else {
    body = {{"text", text}, {"source", source_language}, {"target", target_language}};
  }
  if (key != nullptr && *key != '\0') headers.emplace("Authorization", std::string("Bearer ") + key);

  const auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) {
    throw Error(ErrorKind::kTransient,
                "request to " + base_url_ + " failed: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw Error(ErrorKind::kTransient, "translator returned HTTP " + std::to_string(status));
  }
  if (status != 200) {
    throw Error(ErrorKind::kPermanent, "translator rejected the request with HTTP " +
                                           std::to_string(status));
  }

  BackendResponse response;
  try {
    const json reply = json::parse(result->body);
    const char* field = protocol_ == "libretranslate" ? "translatedText" : "translation";
    response.output = reply.at(field).get<std::string>();
    if (auto p = reply.find("probability"); p != reply.end() && !p->is_null()) {
      response.probability = p->get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedResponse, std::string("unreadable translator reply: ") + e.what());
  }
  if (response.probability && (*response.probability < 0.0 || *response.probability > 1.0)) {
    throw Error(ErrorKind::kMalformedResponse, "translator probability outside [0, 1]");
  }
  return response;
}

// ---------------------------------------------------------------------------
// Clock and RateLimiter

Clock::Duration SystemClock::now() const {
  return std::chrono::duration_cast<Duration>(
      std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(Duration duration) { std::this_thread::sleep_for(duration); }

RateLimiter::RateLimiter(double rate, Clock& clock) : clock_(clock) {
  if (!(rate > 0.0)) throw Error(ErrorKind::kConfig, "rate limit must be > 0");
  if (rate >= 1.0) {
    limit_ = static_cast<std::size_t>(std::floor(rate));
    window_ = std::chrono::seconds(1);
  } else {
    limit_ = 1;
    window_ = std::chrono::duration_cast<Clock::Duration>(std::chrono::duration<double>(1.0 / rate));
  }
}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  for (;;) {
    const auto now = clock_.now();
    while (!calls_.empty() && calls_.front() + window_ <= now) calls_.pop_front();
    if (calls_.size() < limit_) {
      calls_.push_back(now);
      return;
    }
    clock_.sleep_for(calls_.front() + window_ - now);
  }
}

// ---------------------------------------------------------------------------
// TranslationCache

std::string record_to_json(const TranslationRecord& record) {
  json j = {{"backend", record.backend},
            {"input", record.input},
            {"output", record.output},
            {"source_language", record.source_language},
            {"target_language", record.target_language},
            {"timestamp", record.timestamp}};
  j["probability"] = record.probability ? json(*record.probability) : json(nullptr);
  return j.dump();
}

TranslationRecord record_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    TranslationRecord record;
    record.backend = j.at("backend").get<std::string>();
    record.input = j.at("input").get<std::string>();
    record.output = j.at("output").get<std::string>();
    record.source_language = j.at("source_language").get<std::string>();
    record.target_language = j.at("target_language").get<std::string>();
    record.timestamp = j.value("timestamp", "");
    if (auto p = j.find("probability"); p != j.end() && !p->is_null()) {
      record.probability = p->get<double>();
    }
    return record;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad translation record: ") + e.what());
  }
}

std::string TranslationCache::key(std::string_view backend, std::string_view source_language,
                                  std::string_view target_language, std::string_view text) {
  std::string k;
  k.reserve(backend.size() + source_language.size() + target_language.size() + text.size() + 3);
  k.append(backend).push_back('\x1f');
  k.append(source_language).push_back('\x1f');
  k.append(target_language).push_back('\x1f');
  k.append(text);
  return k;
}

TranslationCache::TranslationCache(const std::filesystem::path& path) {
  if (std::ifstream in(path); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto record = record_from_json(line);
        auto k = key(record.backend, record.source_language, record.target_language, record.input);
        records_.insert_or_assign(std::move(k), std::move(record));
      } catch (const Error&) {
        ++skipped_lines_;
      }
    }
    if (skipped_lines_ > 0) {
      spdlog::warn("translation cache {}: skipped {} malformed lines", path.string(),
                   skipped_lines_);
    }
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorKind::kIo, "cannot append to translation cache " + path.string());
}

std::optional<TranslationRecord> TranslationCache::find(std::string_view backend,
                                                        std::string_view source_language,
                                                        std::string_view target_language,
                                                        std::string_view text) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(key(backend, source_language, target_language, text));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::insert(const TranslationRecord& record) {
  std::unique_lock lock(mutex_);
  auto k = key(record.backend, record.source_language, record.target_language, record.input);
  if (records_.contains(k)) return;
  records_.emplace(std::move(k), record);
  if (out_.is_open()) {
    out_ << record_to_json(record) << '\n';
    out_.flush();
  }
}

std::size_t TranslationCache::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

// ---------------------------------------------------------------------------
// TranslationClient

TranslationClient::TranslationClient(TranslatorProfile profile,
                                     std::unique_ptr<TranslatorBackend> backend,
                                     std::shared_ptr<TranslationCache> cache,
                                     std::shared_ptr<Clock> clock, RetryPolicy retry)
    : profile_(std::move(profile)),
      backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<TranslationCache>()),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      retry_(retry),
      limiter_(profile_.rate_limit, *clock_) {
  profile_.validate();
}

BackendResponse TranslationClient::call_with_retry(const std::string& text) {
  auto backoff = retry_.initial_backoff;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      limiter_.acquire();
      ++backend_calls_;
      return backend_->call(text, profile_.source_language, profile_.target_language);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kTransient) throw;
      if (attempt >= retry_.max_retries) {
        throw Error(ErrorKind::kTransient, std::string(e.what()) + " (after " +
                                               std::to_string(attempt + 1) + " attempts)");
      }
      ++retries_;
      spdlog::debug("transient translator failure, retrying: {}", e.what());
      clock_->sleep_for(backoff);
      backoff = std::chrono::duration_cast<Clock::Duration>(backoff * retry_.multiplier);
    }
  }
}

TranslationRecord TranslationClient::translate(const std::string& text) {
  if (trim(text).empty()) throw Error(ErrorKind::kInvalidInput, "translate: empty text");
  ++requests_;
  const std::string backend_id = backend_->id();
  auto record = cache_->find(backend_id, profile_.source_language, profile_.target_language, text);
  if (record) {
    ++cache_hits_;
  } else {
    BackendResponse response = call_with_retry(text);
    if (trim(response.output).empty()) {
      throw Error(ErrorKind::kMalformedResponse, "translator returned an empty translation");
    }
    record = TranslationRecord{text,
                               std::move(response.output),
                               response.probability,
                               utc_timestamp(),
                               backend_id,
                               profile_.source_language,
                               profile_.target_language};
    cache_->insert(*record);
  }
  if (profile_.capability == Capability::kBlackBox) {
    record->probability.reset();
  } else if (!record->probability) {
    throw Error(ErrorKind::kGreyBoxUnavailable,
                "grey-box profile but the translator returned no probability");
  }
  return *record;
}

ClientCounters TranslationClient::counters() const {
  return {requests_.load(), cache_hits_.load(), backend_calls_.load(), retries_.load()};
}

std::unique_ptr<TranslatorBackend> make_backend(const TranslatorProfile& profile) {
  profile.validate();
  if (profile.kind == TranslatorKind::kRemote) return std::make_unique<RemoteTranslator>(profile);
  auto config = MockTranslator::Config::load(profile.endpoint);
  const std::string name = profile.id.empty() ? "mock" : profile.id;
  return std::make_unique<MockTranslator>(std::move(config),
                                          LanguageProfile::for_tag(profile.source_language),
                                          LanguageProfile::for_tag(profile.target_language), name);
}

std::unique_ptr<TranslationClient> make_client(const TranslatorProfile& profile,
                                               const std::filesystem::path& cache_path) {
  auto cache = cache_path.empty() ? std::make_shared<TranslationCache>()
                                  : std::make_shared<TranslationCache>(cache_path);
  return std::make_unique<TranslationClient>(profile, make_backend(profile), std::move(cache));
}

}  // namespace transcheck
