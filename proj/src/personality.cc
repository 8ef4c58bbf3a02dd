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

#include "m2d/personality.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace m2d {

using json = nlohmann::json;

namespace {

// Marker groups in the shipped inventory with a personality level.
constexpr std::array<std::string_view, 10> kMarkerFeatures = {
    "ack_casual", "ack_formal", "filled_pauses", "uncertainty", "downtoners",
    "downtoner_like", "adjective_softeners", "emphasizers", "stance", "ingroup"};

FeatureProfile Uniform(double f) {
  FeatureProfile p;
  for (std::string_view id : kElaborationFeatures) p.frequencies[std::string(id)] = f;
  for (std::string_view id : kMarkerFeatures) p.frequencies[std::string(id)] = f;
  p.caps = DefaultCaps();
  return p;
}

enum class Pole { kExtravert, kIntrovert };

// Personality features: id and whether the extravert level is high.
const std::vector<std::pair<std::string, bool>>& PersonalityRows() {
  static const std::vector<std::pair<std::string, bool>> rows = {
      {"adjective_softeners", false}, {"exclamation", true},      {"tag_questions", true},
      {"ack_casual", true},           {"ack_formal", false},      {"downtoners", false},
      {"downtoner_like", true},       {"uncertainty", false},     {"filled_pauses", false},
      {"emphasizers", true},          {"ingroup", true},          {"wh_with_answer", true},
      {"provoking", true},            {"rhetorical_question", false}, {"paraphrase", true},
      {"repetition", false},          {"affirm_adjective", true}, {"corrections", true},
      {"lexical_choice", true},
  };
  return rows;
}

FeatureProfile Personality(Pole pole, const Levels& levels) {
  FeatureProfile p = Uniform(levels.standard);
  for (const auto& [id, extravert_high] : PersonalityRows()) {
    bool high = (pole == Pole::kExtravert) == extravert_high;
    p.frequencies[id] = high ? levels.high : levels.low;
  }
  if (pole == Pole::kExtravert) {
    p.vocabulary = {SynonymPolicy::kMaxLength, 0};
  } else {
    p.vocabulary = {SynonymPolicy::kMinLength, 5000};
  }
  return p;
}

ParameterSet Base(std::string_view name) {
  ParameterSet ps;
  ps.preset = std::string(name);
  ps.speakers = {Uniform(0), Uniform(0)};
  return ps;
}

void Basic(ParameterSet& ps) {
  ps.split = ps.merge = ps.pronominalize = ps.postprocess = true;
  ps.chunk = 2;
}

double Clamp(double v, double lo, double hi, const std::string& field, std::vector<std::string>& warnings) {
  double c = std::clamp(v, lo, hi);
  if (c != v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s: %g clamped to %g", field.c_str(), v, c);
    warnings.emplace_back(buf);
  }
  return c;
}

double NumberField(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

bool BoolField(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field, "expected true or false");
  return v.get<bool>();
}

std::int64_t IntegerField(const json& v, const std::string& field) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(field, "expected an integer");
  return v.get<std::int64_t>();
}

void ApplySpeaker(const json& doc, const std::string& path, const MarkerInventory& inventory, FeatureProfile& p,
                  std::vector<std::string>& warnings) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    std::string field = path + "." + key;
    if (key == "caps") {
      if (!value.is_object()) throw ConfigError(field, "expected an object");
      for (const auto& [group, cap] : value.items()) {
        auto it = p.caps.find(group);
        if (it == p.caps.end()) throw ConfigError(field + "." + group, "unknown cap group");
        std::int64_t n = IntegerField(cap, field + "." + group);
        if (n < 0) throw ConfigError(field + "." + group, "cap must be non-negative");
        it->second.cap = static_cast<int>(n);
      }
    } else if (key == "vocabulary") {
      if (!value.is_object()) throw ConfigError(field, "expected an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "policy") {
          auto policy = v.is_string() ? ParseSynonymPolicy(v.get<std::string>()) : std::nullopt;
          if (!policy) throw ConfigError(field + ".policy", "expected any|max-frequency|min-length|max-length");
          p.vocabulary.order = *policy;
        } else if (k == "max_rank") {
          std::int64_t n = IntegerField(v, field + ".max_rank");
          if (n < 0) throw ConfigError(field + ".max_rank", "must be non-negative");
          p.vocabulary.max_rank = static_cast<int>(n);
        } else {
          throw ConfigError(field + "." + k, "unknown field");
        }
      }
    } else if (IsKnownFeature(key, inventory)) {
      p.frequencies[key] = Clamp(NumberField(value, field), 0, 1, field, warnings);
    } else {
      throw ConfigError(field, "unknown feature id");
    }
  }
}

}  // namespace

double FeatureProfile::frequency(std::string_view feature) const {
  auto it = frequencies.find(feature);
  return it == frequencies.end() ? 0 : it->second;
}

const std::string* FeatureProfile::group_of(std::string_view feature) const {
  for (const auto& [id, group] : caps) {
    if (std::find(group.members.begin(), group.members.end(), feature) != group.members.end()) return &id;
  }
  return nullptr;
}

std::string_view ToString(Speaker s) { return s == Speaker::kS1 ? "S1" : "S2"; }

std::map<std::string, CapGroup, std::less<>> DefaultCaps() {
  return {
      {"questions", {{"wh_with_answer", "provoking", "rhetorical_question"}, 3}},
      {"tags", {{"tag_questions"}, 3}},
      {"entrainment", {{"repetition", "paraphrase"}, 3}},
      {"extrapolation", {{"state_change"}, 2}},
      {"interactions", {{"affirm_adjective", "corrections"}, 2}},
      {"acknowledgments", {{"ack_casual", "ack_formal"}, 3}},
      {"hedges", {{"downtoners", "downtoner_like", "adjective_softeners", "uncertainty"}, 3}},
      {"disfluencies", {{"filled_pauses"}, 3}},
      {"emphasis", {{"emphasizers", "stance", "emphasizer_great"}, 3}},
      {"ingroup", {{"ingroup"}, 2}},
      {"exclamation", {{"exclamation"}, 4}},
      {"lexical", {{"lexical_choice"}, 3}},
  };
}

std::vector<std::string> PresetNames() {
  return {"est", "basic", "chatty", "extravert_vs_default", "introvert_vs_default"};
}

ParameterSet Preset(std::string_view name, const Levels& levels) {
  ParameterSet ps = Base(name);
  if (name == "est") return ps;
  Basic(ps);
  if (name == "basic") return ps;
  if (name == "chatty") {
    ps.speakers = {Uniform(levels.standard), Uniform(levels.standard)};
    return ps;
  }
  if (name == "extravert_vs_default" || name == "introvert_vs_default") {
    bool extravert = name == "extravert_vs_default";
    ps.ratio = extravert ? 0.7 : 0.3;
    ps.chunk = 3;
    ps.speakers = {Personality(extravert ? Pole::kExtravert : Pole::kIntrovert, levels), Uniform(levels.standard)};
    return ps;
  }
  throw UnknownPreset(std::string(name));
}

std::string_view ToString(RejectReason r) {
  switch (r) {
    case RejectReason::kNone:
      return "none";
    case RejectReason::kFrequencyDraw:
      return "frequency-draw";
    case RejectReason::kGroupCap:
      return "group-cap";
    case RejectReason::kConstraint:
      return "constraint";
  }
  return "none";
}

FeatureSampler::FeatureSampler(const FeatureProfile& profile, std::uint64_t seed, std::string_view stream)
    : profile_(&profile), seed_(seed), stream_(stream) {}

int FeatureSampler::used(std::string_view group) const {
  auto it = used_.find(group);
  return it == used_.end() ? 0 : it->second;
}

bool FeatureSampler::cap_left(std::string_view feature) const {
  const std::string* group = profile_->group_of(feature);
  if (!group) return true;
  return used(*group) < profile_->caps.find(*group)->second.cap;
}

FeatureDecision FeatureSampler::Decide(std::string_view feature, std::size_t sentence, bool constraint_ok) {
  auto it = rngs_.find(feature);
  if (it == rngs_.end()) {
    it = rngs_.emplace(std::string(feature), Rng::ForStage(seed_, stream_ + "/" + std::string(feature))).first;
  }
  double u = it->second.Uniform();
  FeatureDecision d{std::string(feature), sentence, false, RejectReason::kNone};
  if (!constraint_ok) {
    d.reason = RejectReason::kConstraint;
  } else if (u >= profile_->frequency(feature)) {
    d.reason = RejectReason::kFrequencyDraw;
  } else if (!cap_left(feature)) {
    d.reason = RejectReason::kGroupCap;
  } else {
    d.accepted = true;
    if (const std::string* group = profile_->group_of(feature)) ++used_[*group];
  }
  return d;
}

std::vector<FeatureDecision> SampleFeatures(const FeatureProfile& profile, const std::vector<FeatureCandidate>& candidates,
                                            std::uint64_t seed) {
  FeatureSampler sampler(profile, seed, "sample");
  std::vector<FeatureDecision> out;
  for (const FeatureCandidate& c : candidates) out.push_back(sampler.Decide(c.feature, c.sentence, c.constraint_ok));
  return out;
}

bool IsKnownFeature(std::string_view feature, const MarkerInventory& inventory) {
  if (std::find(kElaborationFeatures.begin(), kElaborationFeatures.end(), feature) != kElaborationFeatures.end()) {
    return true;
  }
  if (inventory.find(feature)) return true;
  std::vector<std::string> groups = inventory.groups();
  return std::find(groups.begin(), groups.end(), feature) != groups.end();
}

LoadedConfig LoadParams(std::string_view document, const MarkerInventory& inventory) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "preset" && key != "seed" && key != "overrides" && key != "speaker_overrides") {
      throw ConfigError(key, "unknown field");
    }
  }
  LoadedConfig out;
  std::string preset = "est";
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("preset", "expected a string");
    preset = doc["preset"].get<std::string>();
  }
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    out.seed = s.get<std::uint64_t>();
  }
  json overrides = doc.value("overrides", json::object());
  if (!overrides.is_object()) throw ConfigError("overrides", "expected an object");

  Levels levels;
  if (overrides.contains("levels")) {
    const json& l = overrides["levels"];
    if (!l.is_object()) throw ConfigError("overrides.levels", "expected an object");
    for (const auto& [k, v] : l.items()) {
      std::string field = "overrides.levels." + k;
      double x = Clamp(NumberField(v, field), 0, 1, field, out.warnings);
      if (k == "high") {
        levels.high = x;
      } else if (k == "low") {
        levels.low = x;
      } else if (k == "default") {
        levels.standard = x;
      } else {
        throw ConfigError(field, "unknown level");
      }
    }
  }
  try {
    out.params = Preset(preset, levels);
  } catch (const UnknownPreset& e) {
    throw ConfigError("preset", e.what());
  }
  ParameterSet& ps = out.params;
  for (const auto& [key, value] : overrides.items()) {
    std::string field = "overrides." + key;
    if (key == "levels") {
      continue;
    } else if (key == "ratio") {
      ps.ratio = Clamp(NumberField(value, field), 0.1, 0.9, field, out.warnings);
    } else if (key == "chunk") {
      std::int64_t n = IntegerField(value, field);
      if (n < 1) throw ConfigError(field, "must be at least 1");
      ps.chunk = static_cast<int>(n);
    } else if (key == "split_threshold") {
      std::int64_t n = IntegerField(value, field);
      if (n < 1) throw ConfigError(field, "must be at least 1");
      ps.split_threshold = static_cast<std::size_t>(n);
    } else if (key == "split") {
      ps.split = BoolField(value, field);
    } else if (key == "merge") {
      ps.merge = BoolField(value, field);
    } else if (key == "pronominalize") {
      ps.pronominalize = BoolField(value, field);
    } else if (key == "postprocess") {
      ps.postprocess = BoolField(value, field);
    } else if (key == "em_dash") {
      ps.em_dash = BoolField(value, field);
    } else {
      throw ConfigError(field, "unknown field");
    }
  }
  json speakers = doc.value("speaker_overrides", json::object());
  if (!speakers.is_object()) throw ConfigError("speaker_overrides", "expected an object");
  for (const auto& [key, value] : speakers.items()) {
    std::string field = "speaker_overrides." + key;
    if (key == "S1") {
      ApplySpeaker(value, field, inventory, ps.profile(Speaker::kS1), out.warnings);
    } else if (key == "S2") {
      ApplySpeaker(value, field, inventory, ps.profile(Speaker::kS2), out.warnings);
    } else {
      throw ConfigError(field, "expected S1 or S2");
    }
  }
  return out;
}

}  // namespace m2d
