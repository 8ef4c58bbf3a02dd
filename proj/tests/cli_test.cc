// Copyright 2026 The M2D Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "m2d/dsynts.h"
#include "m2d/realizer.h"
#include "test_util.h"

namespace m2d {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path Scratch() {
  fs::path dir = fs::temp_directory_path() / ("m2d_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

RunResult Cli(const std::string& args, const std::string& env = "") {
  fs::path out = Scratch() / "stdout.txt";
  fs::path err = Scratch() / "stderr.txt";
  std::string cmd = env + " '" + std::string(M2D_CLI_PATH) + "' " + args + " >'" + out.string() + "' 2>'" +
                    err.string() + "'";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testing_util::ReadFile(out);
  r.err = testing_util::ReadFile(err);
  return r;
}

std::string Fixture(const std::string& name) { return (testing_util::FixtureDir() / name).string(); }

std::string Config(const std::string& preset) { return Fixture("configs/" + preset + ".json"); }

fs::path WriteScratch(const std::string& name, const std::string& text) {
  fs::path p = Scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(CliGenerateTest, EstRepeatsTheMonolog) {
  Story story = testing_util::LoadStory("garden.json");
  MorphLexicon morph = MorphLexicon::Load(testing_util::DataDir() / "morph.json");
  std::string monolog;
  for (const DsyntTree& t : story.sentences) monolog += Realize(t, morph, story.characters).text + "\n";
  RunResult r = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("est"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = Lines(r.out);
  ASSERT_EQ(lines.size(), story.sentences.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string prefix = i % 2 ? "S2: " : "S1: ";
    ASSERT_EQ(lines[i].substr(0, 4), prefix);
    EXPECT_EQ(lines[i].substr(4), Lines(monolog)[i]);
  }
}

TEST(CliGenerateTest, SquirrelChattyGolden) {
  fs::path trace = Scratch() / "golden_trace.json";
  RunResult r = Cli("generate --story " + Fixture("squirrel.json") + " --config " + Config("chatty") + " --seed 7" +
                    " --trace " + trace.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, testing_util::ReadFile(testing_util::GoldenDir() / "squirrel_chatty_seed7.txt"));
  json doc = json::parse(testing_util::ReadFile(trace));
  int acks = 0;
  for (const json& turn : doc["turns"]) {
    for (const json& s : turn["sentences"]) {
      for (const json& m : s["markers"]) acks += m.get<std::string>().rfind("ack_", 0) == 0;
    }
  }
  EXPECT_GE(acks, 1);
}

TEST(CliGenerateTest, TraceReproducesTranscript) {
  for (const char* preset : {"est", "basic", "chatty", "extravert_vs_default", "introvert_vs_default"}) {
    fs::path trace = Scratch() / "trace.json";
    fs::path out = Scratch() / "transcript.txt";
    RunResult r = Cli("generate --story " + Fixture("fox.json") + " --config " + Config(preset) + " --trace " +
                      trace.string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::string rebuilt;
    json doc = json::parse(testing_util::ReadFile(trace));
    for (const json& turn : doc["turns"]) {
      rebuilt += turn["speaker"].get<std::string>() + ":";
      for (const json& s : turn["sentences"]) rebuilt += " " + s["text"].get<std::string>();
      rebuilt += "\n";
    }
    EXPECT_EQ(rebuilt, testing_util::ReadFile(out)) << preset;
    EXPECT_EQ(doc["preset"], preset);
    EXPECT_EQ(doc["seed"], 7);
    EXPECT_FALSE(doc["decisions"].empty() && std::string(preset) != "est" && std::string(preset) != "basic");
  }
}

TEST(CliGenerateTest, IdenticalAcrossProcesses) {
  std::string first_trace;
  std::string first_out;
  for (int i = 0; i < 5; ++i) {
    fs::path trace = Scratch() / ("det" + std::to_string(i) + ".json");
    RunResult r = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("chatty") + " --seed 123" +
                      " --trace " + trace.string());
    ASSERT_EQ(r.code, 0);
    if (i == 0) {
      first_trace = testing_util::ReadFile(trace);
      first_out = r.out;
    } else {
      EXPECT_EQ(testing_util::ReadFile(trace), first_trace);
      EXPECT_EQ(r.out, first_out);
    }
  }
}

TEST(CliGenerateTest, SeedFlagOverridesConfig) {
  RunResult a = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("chatty"));
  RunResult b = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("chatty") + " --seed 7");
  RunResult c = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("chatty") + " --seed 8");
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(CliGenerateTest, MissingStory) {
  std::string path = (Scratch() / "no_such_story.json").string();
  RunResult r = Cli("generate --story " + path + " --config " + Config("est"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path), std::string::npos);
}

TEST(CliGenerateTest, BadConfig) {
  fs::path cfg = WriteScratch("bad_config.json", R"({"preset": "chatty", "overrides": {"chunk": 0}})");
  RunResult r = Cli("generate --story " + Fixture("garden.json") + " --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("overrides.chunk"), std::string::npos);
}

TEST(CliGenerateTest, ClampWarning) {
  fs::path cfg = WriteScratch("clamp_config.json", R"({"preset": "est", "overrides": {"ratio": 1.2}})");
  RunResult r = Cli("generate --story " + Fixture("garden.json") + " --config " + cfg.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning: overrides.ratio"), std::string::npos);
}

TEST(CliGenerateTest, LexiconDirOverride) {
  RunResult r = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("est"),
                    "M2D_LEXICON_DIR=" + (Scratch() / "empty").string());
  EXPECT_EQ(r.code, 2);
  RunResult ok = Cli("generate --story " + Fixture("garden.json") + " --config " + Config("est"),
                     "M2D_LEXICON_DIR=" + testing_util::DataDir().string());
  EXPECT_EQ(ok.code, 0);
}

std::string DuplicateSubjectStory() {
  json doc = json::parse(testing_util::ReadFile(testing_util::FixtureDir() / "feature_rows" / "corrections.json"));
  doc["sentences"][0]["children"].push_back(
      {{"rel", "I"}, {"node", {{"lexeme", "fox"}, {"class", "noun"}, {"features", json::object()}, {"children", json::array()}}}});
  return doc.dump();
}

TEST(CliValidateTest, CleanFixture) {
  RunResult r = Cli("validate --story " + Fixture("squirrel.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0 diagnostics\n");
}

TEST(CliValidateTest, DuplicateSubject) {
  fs::path story = WriteScratch("dup.json", DuplicateSubjectStory());
  RunResult r = Cli("validate --story " + story.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "sentence 0 / duplicate-subject: 'be' has more than one I child\n1 diagnostics\n");
  RunResult g = Cli("generate --story " + story.string() + " --config " + Config("est"));
  EXPECT_EQ(g.code, 1);
}

TEST(CliValidateTest, Unparseable) {
  fs::path story = WriteScratch("broken.json", "{\"title\": ");
  RunResult r = Cli("validate --story " + story.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(story.string()), std::string::npos);
}

TEST(CliCompareTest, MarkersGrowWithPreset) {
  fs::path out = Scratch() / "compare.json";
  RunResult r =
      Cli("compare --story " + Fixture("garden.json") + " --presets est,basic,chatty --seed 3 --json " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Lines(r.out).size(), 4u);
  json reports = json::parse(testing_util::ReadFile(out));
  ASSERT_EQ(reports.size(), 3u);
  auto markers = [&](const json& rep) {
    int n = 0;
    for (const char* s : {"S1", "S2"}) n += rep["speakers"][s]["features"].value("markers", 0);
    return n;
  };
  EXPECT_EQ(reports[0]["preset"], "est");
  EXPECT_EQ(markers(reports[0]), 0);
  EXPECT_GT(markers(reports[2]), 0);
  EXPECT_EQ(reports[0]["transformations"], 0);
}

TEST(CliCompareTest, ExtravertTalksMore) {
  fs::path out = Scratch() / "compare_personality.json";
  RunResult r = Cli("compare --story " + Fixture("garden.json") +
                    " --presets extravert_vs_default,introvert_vs_default --seed 3 --json " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  json reports = json::parse(testing_util::ReadFile(out));
  EXPECT_GT(reports[0]["speakers"]["S1"]["tokens"].get<int>(), reports[1]["speakers"]["S1"]["tokens"].get<int>());
}

TEST(CliCompareTest, SinglePresetIsUsageError) {
  RunResult r = Cli("compare --story " + Fixture("garden.json") + " --presets est --seed 1");
  EXPECT_EQ(r.code, 2);
  RunResult unknown = Cli("compare --story " + Fixture("garden.json") + " --presets est,grumpy --seed 1");
  EXPECT_EQ(unknown.code, 2);
}

TEST(CliTest, NoSubcommand) {
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("generate --story x").code, 2);
  EXPECT_EQ(Cli("--help").code, 0);
}

}  // namespace
}  // namespace m2d
