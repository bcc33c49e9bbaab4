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

#include "transcheck/pos_tagger.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "transcheck/error.hpp"

extern char** environ;

namespace transcheck {

namespace {

struct LexiconEntry {
  const char* word;
  const char* tag;
};

// Closed-class words plus a handful of frequent open-class ones.
constexpr LexiconEntry kBuiltinLexicon[] = {
    {"the", "DT"}, {"a", "DT"}, {"an", "DT"}, {"this", "DT"}, {"that", "DT"},
    {"these", "DT"}, {"those", "DT"}, {"every", "DT"}, {"each", "DT"}, {"some", "DT"},
    {"any", "DT"}, {"no", "DT"}, {"another", "DT"}, {"all", "DT"}, {"both", "DT"},
    {"i", "PRP"}, {"you", "PRP"}, {"he", "PRP"}, {"she", "PRP"}, {"it", "PRP"},
    {"we", "PRP"}, {"they", "PRP"}, {"me", "PRP"}, {"him", "PRP"}, {"us", "PRP"},
    {"them", "PRP"}, {"my", "PRP$"}, {"your", "PRP$"}, {"his", "PRP$"}, {"her", "PRP$"},
    {"its", "PRP$"}, {"our", "PRP$"}, {"their", "PRP$"},
    {"in", "IN"}, {"on", "IN"}, {"at", "IN"}, {"of", "IN"}, {"for", "IN"}, {"with", "IN"},
    {"by", "IN"}, {"from", "IN"}, {"about", "IN"}, {"into", "IN"}, {"over", "IN"},
    {"under", "IN"}, {"after", "IN"}, {"before", "IN"}, {"between", "IN"},
    {"through", "IN"}, {"during", "IN"}, {"without", "IN"}, {"near", "IN"}, {"than", "IN"},
    {"because", "IN"}, {"if", "IN"}, {"while", "IN"}, {"to", "TO"},
    {"and", "CC"}, {"or", "CC"}, {"but", "CC"}, {"nor", "CC"},
    {"can", "MD"}, {"could", "MD"}, {"will", "MD"}, {"would", "MD"}, {"shall", "MD"},
    {"should", "MD"}, {"may", "MD"}, {"might", "MD"}, {"must", "MD"},
    {"is", "VBZ"}, {"are", "VBP"}, {"am", "VBP"}, {"was", "VBD"}, {"were", "VBD"},
    {"be", "VB"}, {"been", "VBN"}, {"being", "VBG"}, {"do", "VBP"}, {"does", "VBZ"},
    {"did", "VBD"}, {"have", "VBP"}, {"has", "VBZ"}, {"had", "VBD"},
    {"like", "VBP"}, {"likes", "VBZ"}, {"play", "VBP"}, {"plays", "VBZ"}, {"see", "VBP"},
    {"sees", "VBZ"}, {"saw", "VBD"}, {"make", "VBP"}, {"makes", "VBZ"}, {"made", "VBD"},
    {"go", "VBP"}, {"goes", "VBZ"}, {"went", "VBD"}, {"get", "VBP"}, {"gets", "VBZ"},
    {"got", "VBD"}, {"know", "VBP"}, {"knows", "VBZ"}, {"knew", "VBD"}, {"think", "VBP"},
    {"thinks", "VBZ"}, {"thought", "VBD"}, {"say", "VBP"}, {"says", "VBZ"}, {"said", "VBD"},
    {"take", "VBP"}, {"takes", "VBZ"}, {"took", "VBD"}, {"eat", "VBP"}, {"eats", "VBZ"},
    {"ate", "VBD"}, {"read", "VBP"}, {"reads", "VBZ"}, {"write", "VBP"},
    {"writes", "VBZ"}, {"wrote", "VBD"}, {"love", "VBP"}, {"loves", "VBZ"},
    {"want", "VBP"}, {"wants", "VBZ"}, {"need", "VBP"}, {"needs", "VBZ"},
    {"give", "VBP"}, {"gives", "VBZ"}, {"gave", "VBD"}, {"find", "VBP"},
    {"finds", "VBZ"}, {"found", "VBD"}, {"tell", "VBP"}, {"tells", "VBZ"}, {"told", "VBD"},
    {"buy", "VBP"}, {"buys", "VBZ"}, {"bought", "VBD"},
    {"not", "RB"}, {"very", "RB"}, {"too", "RB"}, {"also", "RB"}, {"often", "RB"},
    {"never", "RB"}, {"always", "RB"}, {"here", "RB"}, {"now", "RB"}, {"then", "RB"},
    {"so", "RB"}, {"just", "RB"}, {"there", "EX"},
    {"who", "WP"}, {"what", "WP"}, {"which", "WDT"}, {"where", "WRB"}, {"when", "WRB"},
    {"how", "WRB"}, {"why", "WRB"},
    {"good", "JJ"}, {"bad", "JJ"}, {"new", "JJ"}, {"old", "JJ"}, {"big", "JJ"},
    {"small", "JJ"}, {"great", "JJ"}, {"little", "JJ"}, {"long", "JJ"}, {"short", "JJ"},
    {"high", "JJ"}, {"low", "JJ"}, {"large", "JJ"}, {"young", "JJ"}, {"fine", "JJ"},
    {"nice", "JJ"}, {"happy", "JJ"}, {"sad", "JJ"}, {"red", "JJ"}, {"blue", "JJ"},
    {"green", "JJ"}, {"black", "JJ"}, {"white", "JJ"}, {"other", "JJ"}, {"same", "JJ"},
    {"different", "JJ"}, {"many", "JJ"}, {"much", "JJ"}, {"more", "JJR"}, {"most", "JJS"},
    {"better", "JJR"}, {"best", "JJS"},
    {"one", "CD"}, {"two", "CD"}, {"three", "CD"}, {"four", "CD"}, {"five", "CD"},
    {"six", "CD"}, {"seven", "CD"}, {"eight", "CD"}, {"nine", "CD"}, {"ten", "CD"},
    {"eleven", "CD"}, {"twelve", "CD"}, {"twenty", "CD"}, {"hundred", "CD"},
    {"thousand", "CD"}, {"million", "CD"},
    {"men", "NNS"}, {"women", "NNS"}, {"people", "NNS"}, {"children", "NNS"},
    {"news", "NN"}, {"research", "NN"}, {"work", "NN"},
};

std::string punctuation_tag(std::string_view token) {
  if (token == "." || token == "!" || token == "?") return ".";
  if (token == ",") return ",";
  if (token == ":" || token == ";" || token == "-" || token == "...") return ":";
  if (token == "(" || token == "[" || token == "{") return "-LRB-";
  if (token == ")" || token == "]" || token == "}") return "-RRB-";
  if (token == "\"" || token == "'" || token == "`") return "''";
  if (token == "$") return "$";
  if (token == "#") return "#";
  return "SYM";
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || !std::ispunct(u)) return false;
  }
  return true;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "king", "thing" and "red" are not inflected forms: their stems lack a vowel.
bool stem_has_vowel(std::string_view lower, std::size_t suffix_length) {
  return lower.substr(0, lower.size() - suffix_length).find_first_of("aeiouy") !=
         std::string_view::npos;
}

std::string suffix_tag(std::string_view lower) {
  if (ends_with(lower, "ly")) return "RB";
  if (ends_with(lower, "ing") && stem_has_vowel(lower, 3)) return "VBG";
  if (ends_with(lower, "ed") && stem_has_vowel(lower, 2)) return "VBD";
  for (std::string_view suffix : {"ous", "ful", "ive", "able", "ible", "al", "ic", "less"}) {
    if (ends_with(lower, suffix)) return "JJ";
  }
  if (ends_with(lower, "est")) return "JJS";
  if (ends_with(lower, "s") && !ends_with(lower, "ss") && !ends_with(lower, "us") &&
      !ends_with(lower, "is")) {
    return "NNS";
  }
  return "NN";
}

}  // namespace

// ---------------------------------------------------------------------------
// LexiconTagger

LexiconTagger::LexiconTagger() {
  for (const auto& entry : kBuiltinLexicon) lexicon_.emplace(entry.word, entry.tag);
}

LexiconTagger LexiconTagger::rules_only() { return LexiconTagger(RulesOnly{}); }

void LexiconTagger::add(std::string word, std::string tag) {
  lexicon_.insert_or_assign(std::move(word), std::move(tag));
}

void LexiconTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open tagger lexicon " + path.string());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line.front() == '#' && line.find('\t') == std::string::npos)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorKind::kParse,
                  path.string() + ":" + std::to_string(line_number) + ": expected word<TAB>tag");
    }
    add(std::string(fields[0]), std::string(fields[1]));
  }
}

std::pair<std::string, bool> LexiconTagger::base_tag(std::string_view token,
                                                     bool sentence_initial) const {
  if (is_numeral_pattern(token)) return {"CD", false};
  if (is_punctuation_token(token)) return {punctuation_tag(token), false};
  if (auto it = lexicon_.find(std::string(token)); it != lexicon_.end()) return {it->second, true};
  const std::string lower = to_lower_ascii(token);
  if (auto it = lexicon_.find(lower); it != lexicon_.end()) return {it->second, true};
  const bool capitalised = std::isupper(static_cast<unsigned char>(token.front())) != 0;
  if (capitalised && !sentence_initial) return {"NNP", false};
  return {suffix_tag(lower), false};
}

Tags LexiconTagger::tag(TokenView tokens) const {
  Tags tags;
  std::vector<bool> from_lexicon;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw Error(ErrorKind::kInvalidSentence, "empty token");
    auto [tag, known] = base_tag(tokens[i], i == 0);
    tags.push_back(std::move(tag));
    from_lexicon.push_back(known);
  }
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string& prev = tags[i - 1];
    if (to_lower_ascii(tokens[i]) == "one" && (prev == "DT" || prev.starts_with("JJ"))) {
      tags[i] = "NN";
    } else if (!from_lexicon[i] && tags[i] == "NNS" && prev == "PRP") {
      tags[i] = "VBZ";
    }
  }
  return tags;
}

// ---------------------------------------------------------------------------
// ProcessTagger

struct ProcessTagger::Channel {
  pid_t pid = -1;
  FILE* to_child = nullptr;
  FILE* from_child = nullptr;
};

ProcessTagger::ProcessTagger(const std::string& command) : channel_(std::make_unique<Channel>()) {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0) throw Error(ErrorKind::kIo, "pipe() failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorKind::kIo, "pipe() failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

  std::string shell = "/bin/sh";
  std::string flag = "-c";
  std::string cmd = command;
  char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
  const int rc = posix_spawn(&channel_->pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw Error(ErrorKind::kIo, "cannot start tagger process: " + command);
  }
  channel_->to_child = fdopen(in_pipe[1], "w");
  channel_->from_child = fdopen(out_pipe[0], "r");
}

ProcessTagger::~ProcessTagger() {
  if (channel_->to_child != nullptr) std::fclose(channel_->to_child);
  if (channel_->from_child != nullptr) std::fclose(channel_->from_child);
  if (channel_->pid > 0) {
    int status = 0;
    waitpid(channel_->pid, &status, 0);
  }
}

Tags ProcessTagger::tag(TokenView tokens) const {
  std::lock_guard lock(mutex_);
  const std::string request = join_tokens(tokens) + "\n";
  // A dead child would raise SIGPIPE on write.
  std::signal(SIGPIPE, SIG_IGN);
  if (std::fputs(request.c_str(), channel_->to_child) == EOF ||
      std::fflush(channel_->to_child) != 0) {
    throw Error(ErrorKind::kIo, "tagger process closed its input");
  }
  std::string line;
  for (int c; (c = std::fgetc(channel_->from_child)) != EOF && c != '\n';) {
    line.push_back(static_cast<char>(c));
  }
  if (line.empty() && !tokens.empty()) {
    throw Error(ErrorKind::kIo, "tagger process returned no output");
  }
  std::istringstream fields(line);
  Tags tags;
  for (std::string field; fields >> field;) {
    const auto slash = field.rfind('/');
    if (slash != std::string::npos && slash > 0 && slash + 1 < field.size() &&
        tags.size() < tokens.size() && field.compare(0, slash, tokens[tags.size()]) == 0) {
      field = field.substr(slash + 1);
    }
    tags.push_back(std::move(field));
  }
  if (tags.size() != tokens.size()) {
    throw Error(ErrorKind::kParse, "tagger process returned " + std::to_string(tags.size()) +
                                       " tags for " + std::to_string(tokens.size()) + " tokens");
  }
  return tags;
}

std::unique_ptr<PosTagger> make_tagger(std::string_view descriptor) {
  if (descriptor.empty() || descriptor == "baseline") return std::make_unique<LexiconTagger>();
  if (descriptor == "rules") return std::make_unique<LexiconTagger>(LexiconTagger::rules_only());
  if (descriptor.starts_with("baseline:")) {
    auto tagger = std::make_unique<LexiconTagger>();
    tagger->load(std::string(descriptor.substr(9)));
    return tagger;
  }
  if (descriptor.starts_with("process:")) {
    return std::make_unique<ProcessTagger>(std::string(descriptor.substr(8)));
  }
  throw Error(ErrorKind::kConfig, "unknown tagger descriptor '" + std::string(descriptor) + "'");
}

}  // namespace transcheck
