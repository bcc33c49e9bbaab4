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

#include "transcheck/pipeline.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <set>
#include <sstream>

#include "support/fixtures.hpp"
#include "transcheck/error.hpp"

namespace transcheck {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int run_tool(const std::string& args) {
  const std::string command = std::string(TRANSCHECK_TOOL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::vector<json> out;
  std::istringstream in(testing::read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

TEST(Histogram, Buckets) {
  EXPECT_EQ(histogram_bucket(1.0), 20u);
  EXPECT_EQ(histogram_bucket(0.0), 0u);
  EXPECT_EQ(histogram_bucket(0.82), 16u);
  EXPECT_EQ(histogram_bucket(0.85), 17u);
  EXPECT_EQ(histogram_bucket(0.9999), 19u);
}

TEST(Histogram, CountsAndSkipsMalformedLines) {
  std::istringstream all_one(R"({"metric":"LCS","score":1.0}
{"metric":"LCS","score":1.0}
)");
  const auto ones = report_histogram(all_one);
  ASSERT_EQ(ones.counts.size(), 1u);
  EXPECT_EQ(ones.counts.at("LCS")[20], 2u);

  std::istringstream mixed(R"({"metric":"BLEU","score":0.82}
garbage
{"metric":"BLEU","score":0.84}
)");
  const auto h = report_histogram(mixed);
  EXPECT_EQ(h.malformed_lines, 1u);
  EXPECT_EQ(h.counts.at("BLEU")[16], 2u);
  std::size_t total = 0;
  for (auto c : h.counts.at("BLEU")) total += c;
  EXPECT_EQ(total, 2u);
  EXPECT_NE(h.to_csv().find("BLEU,0.80,0.85,2"), std::string::npos);
}

TEST(ParallelMap, KeepsOrderAndRethrowsLowestIndex) {
  const auto squares = parallel_map(100, 8, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < squares.size(); ++i) EXPECT_EQ(squares[i], i * i);
  try {
    parallel_map(50, 4, [](std::size_t i) -> int {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(ReadSentences, LineNumbersSurviveBlankLines) {
  testing::TempDir dir;
  testing::write_text(dir / "in.txt", "a cat .\n\n  \nthe dog .\n");
  const auto sentences = read_sentences(dir / "in.txt", LanguageProfile::for_tag("en"));
  ASSERT_EQ(sentences.size(), 2u);
  EXPECT_EQ(sentences[0].id, 1u);
  EXPECT_EQ(sentences[1].id, 4u);
}

TEST(RunConfig, ParsesAndValidates) {
  testing::TempDir dir;
  testing::write_text(dir / "in.txt", "");
  testing::write_text(dir / "rules", "a -> A\n");
  testing::write_text(dir / "profile", "kind=mock\nendpoint=rules\n");
  testing::write_text(dir / "corpus.tsv", "# threshold\t0.9\n");
  std::istringstream in("input=in.txt\ncorpus=corpus.tsv\ntranslator=profile\nmetrics=LCS,BLEU\n"
                        "max_test_mutants=3\nrepair_mode=probability\n");
  const auto config = RunConfig::parse(in, dir.path());
  EXPECT_EQ(config.input, dir / "in.txt");
  EXPECT_EQ(config.metrics, (std::vector<Metric>{Metric::kLcs, Metric::kBleu}));
  EXPECT_EQ(config.max_test_mutants, 3u);
  // Probability ranking needs a grey-box translator.
  EXPECT_THROW(config.validate(), Error);

  std::istringstream missing("input=in.txt\ncorpus=nowhere.tsv\ntranslator=profile\n");
  EXPECT_THROW(RunConfig::parse(missing, dir.path()).validate(), Error);
  std::istringstream unknown("colour=red\n");
  EXPECT_THROW(RunConfig::parse(unknown, dir.path()), Error);
}

TEST(RunPipeline, MissingCorpusFailsBeforeAnyStage) {
  testing::TempDir dir;
  testing::write_text(dir / "in.txt", "a cat .\n");
  testing::write_text(dir / "rules", "a -> A\n");
  testing::write_text(dir / "profile", "kind=mock\nendpoint=rules\n");
  testing::write_text(dir / "run.conf", "input=in.txt\ncorpus=missing.tsv\ntranslator=profile\n");
  EXPECT_THROW(run_pipeline(RunConfig::load(dir / "run.conf")), Error);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(run_tool("run --config " + (dir / "run.conf").string()), 1);
}

TEST(RunPipeline, EmptyInputSucceedsWithZeroCounts) {
  testing::TempDir dir;
  testing::write_text(dir / "in.txt", "");
  testing::write_text(dir / "rules", "a -> A\n");
  testing::write_text(dir / "profile", "kind=mock\nendpoint=rules\n");
  testing::write_text(dir / "corpus.tsv", "# threshold\t0.9\n");
  testing::write_text(dir / "run.conf", "input=in.txt\ncorpus=corpus.tsv\ntranslator=profile\n");
  const auto summary = run_pipeline(RunConfig::load(dir / "run.conf"));
  EXPECT_TRUE(summary.ok);
  EXPECT_EQ(summary.sentences_in, 0u);
  EXPECT_EQ(summary.mutants_emitted, 0u);
  EXPECT_EQ(summary.inputs_tested, 0u);
  for (const char* name : {"mutants.jsonl", "reports.jsonl", "repairs.jsonl", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / name)) << name;
  }
}

TEST(RunPipeline, StageFailureIsRecordedAndExitsTwo) {
  testing::TempDir dir;
  testing::write_text(dir / "in.txt", "the cat sleeps .\n");
  testing::write_text(dir / "rules", "@unknown = error\n");
  testing::write_text(dir / "profile", "kind=mock\nendpoint=rules\n");
  testing::write_text(dir / "corpus.tsv", "# threshold\t0.9\ncat\tdog\t0.95\t0.95\n");
  testing::write_text(dir / "run.conf", "input=in.txt\ncorpus=corpus.tsv\ntranslator=profile\n");
  const auto summary = run_pipeline(RunConfig::load(dir / "run.conf"));
  EXPECT_FALSE(summary.ok);
  EXPECT_EQ(summary.failed_stage, "translate");
  EXPECT_TRUE(fs::exists(dir / "out" / "mutants.jsonl"));
  EXPECT_EQ(json::parse(testing::read_text(dir / "out" / "summary.json"))["status"], "failed");
  EXPECT_EQ(run_tool("run --config " + (dir / "run.conf").string()), 2);
}

class MockRun : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::MockScenarioOptions options;
    options.sentences = 24;
    options.planted = 6;
    scenario_ = testing::write_mock_scenario(dir_.path(), options);
    summary_ = run_pipeline(RunConfig::load(scenario_.config));
    ASSERT_TRUE(summary_.ok) << summary_.error;
  }

  testing::TempDir dir_;
  testing::MockScenario scenario_;
  RunSummary summary_;
};

TEST_F(MockRun, FlagsExactlyThePlantedGroups) {
  std::set<std::size_t> flagged;
  for (const auto& report : read_reports(scenario_.output_dir / "reports.jsonl")) {
    if (report.is_bug) flagged.insert(report.sentence_id);
  }
  std::set<std::size_t> planted;
  for (const auto& bug : scenario_.planted) planted.insert(bug.sentence_id);
  EXPECT_EQ(flagged, planted);
  EXPECT_EQ(summary_.buggy_sentences.at("LCS"), planted.size());
}

TEST_F(MockRun, SummaryArithmetic) {
  EXPECT_EQ(summary_.sentences_in, 24u);
  EXPECT_EQ(summary_.mutants_generated, summary_.mutants_filtered + summary_.mutants_emitted);
  EXPECT_LE(summary_.bugs.at("LCS"), summary_.inputs_tested);
  EXPECT_EQ(summary_.inputs_tested, summary_.mutants_emitted);
  const auto on_disk = json::parse(testing::read_text(scenario_.output_dir / "summary.json"));
  EXPECT_EQ(on_disk["schema"], kSummarySchema);
  EXPECT_EQ(on_disk["counts"]["mutants_emitted"], summary_.mutants_emitted);
}

TEST_F(MockRun, ArtifactsCarrySchemas) {
  for (const auto& [file, schema] :
       std::vector<std::pair<std::string, std::string_view>>{{"mutants.jsonl", kMutantSchema},
                                                             {"reports.jsonl", kReportSchema},
                                                             {"repairs.jsonl", kRepairSchema}}) {
    const auto lines = read_jsonl(scenario_.output_dir / file);
    ASSERT_FALSE(lines.empty()) << file;
    for (const auto& line : lines) EXPECT_EQ(line["schema"], schema) << file;
  }
}

TEST_F(MockRun, RepairsThePlantedBugs) {
  std::size_t fixed = 0;
  for (const auto& line : read_jsonl(scenario_.output_dir / "repairs.jsonl")) {
    for (const auto& bug : scenario_.planted) {
      if (line["source"] == bug.buggy_source && line["status"] == "repaired" &&
          line["repaired_translation"] == bug.clean_translation) {
        ++fixed;
      }
    }
  }
  EXPECT_EQ(fixed, scenario_.planted.size());
}

TEST_F(MockRun, StagesFromPersistedArtifactsMatchTheFullRun) {
  const fs::path& d = dir_.path();
  const fs::path staged = d / "staged";
  fs::create_directories(staged);
  const std::string cache = " --cache " + (d / "cache.jsonl").string();
  const std::string profile = " --profile " + (d / "profile.txt").string();
  ASSERT_EQ(run_tool("mutate --input " + (d / "input.txt").string() + " --corpus " +
                     (d / "corpus.tsv").string() + " --out " + (staged / "mutants.jsonl").string()),
            0);
  ASSERT_EQ(run_tool("test --mutants " + (staged / "mutants.jsonl").string() + profile + cache +
                     " --out " + (staged / "reports.jsonl").string()),
            0);
  ASSERT_EQ(run_tool("repair --reports " + (staged / "reports.jsonl").string() + profile + cache +
                     " --corpus " + (d / "corpus.tsv").string() + " --out " +
                     (staged / "repairs.jsonl").string()),
            0);
  for (const char* name : {"mutants.jsonl", "reports.jsonl", "repairs.jsonl"}) {
    EXPECT_EQ(testing::read_text(staged / name), testing::read_text(scenario_.output_dir / name))
        << name;
  }
  ASSERT_EQ(run_tool("report --reports " + (staged / "reports.jsonl").string() + " --out " +
                     (staged / "hist.csv").string()),
            0);
  EXPECT_EQ(testing::read_text(staged / "hist.csv").rfind("metric,lower,upper,count", 0), 0u);
}

TEST(Cli, ValidationErrorsExitOne) {
  EXPECT_EQ(run_tool("mutate --input /nonexistent --corpus /nonexistent"), 1);
  EXPECT_EQ(run_tool("frobnicate"), 1);
  EXPECT_EQ(run_tool("--help"), 0);
}

TEST(DemoCorpus, MatchesTheGoldenSummary) {
  const fs::path demo = fs::path(TRANSCHECK_SOURCE_DIR) / "data" / "demo";
  testing::TempDir dir;
  auto config = RunConfig::load(demo / "run.conf");
  config.output_dir = dir / "out";
  config.cache.clear();
  const auto summary = run_pipeline(config);
  ASSERT_TRUE(summary.ok) << summary.error;
  auto actual = json::parse(summary.to_json());
  auto golden = json::parse(testing::read_text(demo / "golden_summary.json"));
  for (auto* doc : {&actual, &golden}) {
    doc->erase("timings_seconds");
    doc->erase("translator");
  }
  EXPECT_EQ(actual.dump(2), golden.dump(2));
}

}  // namespace
}  // namespace transcheck
