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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "m2d/dialog.h"
#include "m2d/dsynts.h"
#include "m2d/personality.h"
#include "m2d/report.h"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIoError = 2;

struct Failure {
  int code;
  std::string message;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIoError, "cannot open " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << data)) throw Failure{kIoError, "cannot write " + path};
}

m2d::Story LoadStory(const std::string& path) {
  std::string text = ReadFile(path);
  try {
    return m2d::ParseStory(text, {.validate = false}).story;
  } catch (const m2d::ParseError& e) {
    throw Failure{kIoError, path + ": " + e.what()};
  }
}

m2d::Resources LoadResources() {
  try {
    return m2d::Resources::Load(m2d::Resources::DefaultDir());
  } catch (const std::exception& e) {
    throw Failure{kIoError, e.what()};
  }
}

m2d::Dialog Build(const m2d::Story& story, const m2d::ParameterSet& params, std::uint64_t seed,
                  const m2d::Resources& res) {
  try {
    return m2d::BuildDialog(story, params, seed, res);
  } catch (const std::invalid_argument& e) {
    throw Failure{kInvalid, e.what()};
  }
}

int Generate(const std::string& story_path, const std::string& config_path, const std::string& trace_path,
             const std::optional<std::uint64_t>& seed_flag, const std::string& out_path) {
  m2d::Resources res = LoadResources();
  m2d::Story story = LoadStory(story_path);
  m2d::LoadedConfig config;
  try {
    config = m2d::LoadParams(ReadFile(config_path), res.markers);
  } catch (const m2d::ConfigError& e) {
    throw Failure{kIoError, config_path + ": " + e.what()};
  }
  for (const std::string& w : config.warnings) std::cerr << "warning: " << w << "\n";
  std::uint64_t seed = seed_flag ? *seed_flag : config.seed.value_or(0);
  m2d::Dialog dialog = Build(story, config.params, seed, res);
  std::string transcript = m2d::RenderTranscript(dialog);
  if (out_path.empty()) {
    std::cout << transcript;
  } else {
    WriteFile(out_path, transcript);
  }
  if (!trace_path.empty()) WriteFile(trace_path, m2d::SerializeTrace(dialog));
  return kOk;
}

int Compare(const std::string& story_path, const std::string& presets, std::uint64_t seed,
            const std::string& json_path) {
  std::vector<std::string> names;
  std::stringstream ss(presets);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) names.push_back(name);
  }
  if (names.size() < 2) throw Failure{kIoError, "compare needs at least two presets"};
  m2d::Resources res = LoadResources();
  m2d::Story story = LoadStory(story_path);
  std::vector<m2d::RunReport> reports;
  for (const std::string& name : names) {
    m2d::ParameterSet params;
    try {
      params = m2d::Preset(name);
    } catch (const m2d::UnknownPreset& e) {
      throw Failure{kIoError, e.what()};
    }
    m2d::Dialog dialog = Build(story, params, seed, res);
    reports.push_back(m2d::ReportFromTrace(m2d::SerializeTrace(dialog), res.markers));
  }
  std::cout << m2d::ReportTable(reports);
  if (!json_path.empty()) WriteFile(json_path, m2d::ReportJson(reports));
  return kOk;
}

int Validate(const std::string& story_path) {
  m2d::Story story = LoadStory(story_path);
  std::size_t count = 0;
  for (std::size_t i = 0; i < story.sentences.size(); ++i) {
    for (const m2d::Diagnostic& d : m2d::ValidateTree(story.sentences[i], &story.characters)) {
      std::cout << "sentence " << i << " " << d.path.ToString() << " " << d.rule << ": " << d.message << "\n";
      ++count;
    }
  }
  std::cout << count << " diagnostics\n";
  return count == 0 ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monolog-to-dialog generator"};
  app.require_subcommand(1);

  std::string story, config, trace, out, presets, json_out;
  std::optional<std::uint64_t> seed;
  std::uint64_t compare_seed = 0;

  CLI::App* generate = app.add_subcommand("generate", "Convert a story into a dialog transcript");
  generate->add_option("--story", story, "Story file (JSON DSyntS)")->required();
  generate->add_option("--config", config, "Parameter file")->required();
  generate->add_option("--trace", trace, "Write the JSON trace here");
  generate->add_option("--seed", seed, "Seed (overrides the config)");
  generate->add_option("--out", out, "Write the transcript here instead of stdout");

  CLI::App* compare = app.add_subcommand("compare", "Report feature counts for several presets");
  compare->add_option("--story", story, "Story file")->required();
  compare->add_option("--presets", presets, "Comma-separated preset names")->required();
  compare->add_option("--seed", compare_seed, "Seed")->required();
  compare->add_option("--json", json_out, "Write the reports as JSON here");

  CLI::App* validate = app.add_subcommand("validate", "Check every sentence of a story");
  validate->add_option("--story", story, "Story file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  try {
    if (generate->parsed()) return Generate(story, config, trace, seed, out);
    if (compare->parsed()) return Compare(story, presets, compare_seed, json_out);
    if (validate->parsed()) return Validate(story);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}
