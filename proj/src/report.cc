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

#include "m2d/report.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace m2d {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kQuestionFeatures = {"wh_with_answer", "provoking", "tag_questions",
                                                               "rhetorical_question"};

Speaker ParseSpeaker(const std::string& s) { return s == "S2" ? Speaker::kS2 : Speaker::kS1; }

}  // namespace

std::string SerializeTrace(const Dialog& dialog) {
  json doc;
  doc["preset"] = dialog.params.preset;
  doc["seed"] = dialog.seed;
  json alloc = json::array();
  for (Speaker s : dialog.allocation.speakers) alloc.push_back(ToString(s));
  doc["allocation"] = alloc;
  json turns = json::array();
  for (const DialogTurn& t : dialog.turns) {
    json turn;
    turn["speaker"] = ToString(t.speaker);
    json sentences = json::array();
    for (const TraceSentence& s : t.sentences) {
      json j;
      j["text"] = s.text;
      j["sources"] = s.sources;
      j["fragment"] = s.fragment;
      j["tag"] = s.tag;
      j["transforms"] = s.transforms;
      j["markers"] = s.markers;
      sentences.push_back(j);
    }
    turn["sentences"] = sentences;
    turns.push_back(turn);
  }
  doc["turns"] = turns;
  json decisions = json::array();
  for (const SpeakerDecision& d : dialog.decisions) {
    decisions.push_back({{"speaker", ToString(d.speaker)},
                         {"feature", d.decision.feature},
                         {"sentence", d.decision.sentence},
                         {"accepted", d.decision.accepted},
                         {"reason", ToString(d.decision.reason)}});
  }
  doc["decisions"] = decisions;
  return doc.dump(2) + "\n";
}

std::string TranscriptFromTrace(std::string_view trace) {
  json doc = json::parse(trace.begin(), trace.end());
  std::string out;
  for (const json& turn : doc.at("turns")) {
    out += turn.at("speaker").get<std::string>() + ":";
    for (const json& s : turn.at("sentences")) out += " " + s.at("text").get<std::string>();
    out += '\n';
  }
  return out;
}

int SpeakerReport::count(const std::string& feature) const {
  auto it = features.find(feature);
  return it == features.end() ? 0 : it->second;
}

std::size_t CountTokens(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = c == ' ' || c == '\n' || c == '\t';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

RunReport ReportFromTrace(std::string_view trace, const MarkerInventory& inventory) {
  json doc = json::parse(trace.begin(), trace.end());
  RunReport r;
  r.preset = doc.value("preset", "");
  r.seed = doc.value("seed", std::uint64_t{0});
  std::size_t total_content = 0;
  for (const json& turn : doc.at("turns")) {
    SpeakerReport& sp = r.speakers[static_cast<int>(ParseSpeaker(turn.at("speaker").get<std::string>()))];
    for (const json& s : turn.at("sentences")) {
      ++sp.sentences;
      sp.tokens += CountTokens(s.at("text").get<std::string>());
      if (s.at("tag").get<std::string>().empty() && s.at("fragment").get<std::size_t>() == 0) {
        std::size_t n = s.at("sources").size();
        sp.content += n;
        total_content += n;
      }
      for (const json& t : s.at("transforms")) {
        std::string id = t.get<std::string>();
        ++sp.features[id];
        ++r.transformations;
        if (std::find(kQuestionFeatures.begin(), kQuestionFeatures.end(), id) != kQuestionFeatures.end()) {
          ++sp.features["questions"];
        }
      }
      for (const json& m : s.at("markers")) {
        std::string id = m.get<std::string>();
        const MarkerSpec* spec = inventory.find(id);
        ++sp.features[spec ? spec->group : id];
        ++sp.features["markers"];
        ++r.transformations;
      }
    }
  }
  r.achieved_ratio = total_content == 0 ? 0 : static_cast<double>(r.speakers[0].content) / total_content;
  return r;
}

std::string ReportJson(const std::vector<RunReport>& reports) {
  json arr = json::array();
  for (const RunReport& r : reports) {
    json j;
    j["preset"] = r.preset;
    j["seed"] = r.seed;
    j["achieved_ratio"] = r.achieved_ratio;
    j["transformations"] = r.transformations;
    for (Speaker s : {Speaker::kS1, Speaker::kS2}) {
      const SpeakerReport& sp = r.speaker(s);
      j["speakers"][std::string(ToString(s))] = {
          {"tokens", sp.tokens}, {"sentences", sp.sentences}, {"content", sp.content}, {"features", sp.features}};
    }
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string ReportTable(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %6s %9s %9s %8s %10s %16s\n", "preset", "ratio", "S1 tokens", "S2 tokens",
                "markers", "questions", "transformations");
  out << line;
  for (const RunReport& r : reports) {
    int markers = r.speakers[0].count("markers") + r.speakers[1].count("markers");
    int questions = r.speakers[0].count("questions") + r.speakers[1].count("questions");
    std::snprintf(line, sizeof line, "%-22s %6.2f %9zu %9zu %8d %10d %16d\n", r.preset.c_str(), r.achieved_ratio,
                  r.speakers[0].tokens, r.speakers[1].tokens, markers, questions, r.transformations);
    out << line;
  }
  return out.str();
}

}  // namespace m2d
