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

#ifndef M2D_PERSONALITY_H_
#define M2D_PERSONALITY_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "m2d/rng.h"
#include "m2d/transforms.h"

namespace m2d {

// Elaboration and styling features that are not pragmatic markers, in the
// order the dialog engine evaluates them.
inline constexpr std::array<std::string_view, 11> kElaborationFeatures = {
    "wh_with_answer", "provoking",  "tag_questions",    "rhetorical_question", "repetition", "paraphrase",
    "state_change",   "affirm_adjective", "corrections", "lexical_choice",      "exclamation"};

struct CapGroup {
  std::vector<std::string> members;
  int cap = 0;

  bool operator==(const CapGroup&) const = default;
};

struct FeatureProfile {
  // Feature id -> frequency in [0, 1]. A feature id is an elaboration
  // feature, a marker group id or a single marker id.
  std::map<std::string, double, std::less<>> frequencies;
  // Group id -> members and per-dialog cap for this speaker.
  std::map<std::string, CapGroup, std::less<>> caps;
  VocabularyPolicy vocabulary;

  double frequency(std::string_view feature) const;
  // Cap group containing `feature`, if any.
  const std::string* group_of(std::string_view feature) const;

  bool operator==(const FeatureProfile&) const = default;
};

enum class Speaker { kS1 = 0, kS2 = 1 };

std::string_view ToString(Speaker s);
inline Speaker Other(Speaker s) { return s == Speaker::kS1 ? Speaker::kS2 : Speaker::kS1; }

struct ParameterSet {
  std::string preset;
  double ratio = 0.5;
  int chunk = 1;
  std::size_t split_threshold = 10;
  bool split = false;
  bool merge = false;
  bool pronominalize = false;
  bool postprocess = false;
  // Render dash truncation as an em-dash instead of "---".
  bool em_dash = false;
  std::array<FeatureProfile, 2> speakers;

  const FeatureProfile& profile(Speaker s) const { return speakers[static_cast<int>(s)]; }
  FeatureProfile& profile(Speaker s) { return speakers[static_cast<int>(s)]; }

  bool operator==(const ParameterSet&) const = default;
};

// Frequencies used for the ordinal levels of the personality presets.
struct Levels {
  double high = 0.8;
  double low = 0.1;
  double standard = 0.3;
};

class UnknownPreset : public std::invalid_argument {
 public:
  explicit UnknownPreset(const std::string& name) : std::invalid_argument("unknown preset '" + name + "'") {}
};

// est | basic | chatty | extravert_vs_default | introvert_vs_default
ParameterSet Preset(std::string_view name, const Levels& levels = {});
std::vector<std::string> PresetNames();
// Cap groups shared by every preset.
std::map<std::string, CapGroup, std::less<>> DefaultCaps();

enum class RejectReason { kNone, kFrequencyDraw, kGroupCap, kConstraint };

std::string_view ToString(RejectReason r);

struct FeatureDecision {
  std::string feature;
  std::size_t sentence = 0;
  bool accepted = false;
  RejectReason reason = RejectReason::kNone;

  bool operator==(const FeatureDecision&) const = default;
};

// Per-speaker sampling state for one dialog. Each feature draws from its own
// stream, so changing one frequency leaves every other feature's draws alone.
// Order of checks: syntactic constraint, frequency draw, group cap.
class FeatureSampler {
 public:
  FeatureSampler(const FeatureProfile& profile, std::uint64_t seed, std::string_view stream);

  FeatureDecision Decide(std::string_view feature, std::size_t sentence, bool constraint_ok);
  bool enabled(std::string_view feature) const { return profile_->frequency(feature) > 0; }
  int used(std::string_view group) const;
  bool cap_left(std::string_view feature) const;

 private:
  const FeatureProfile* profile_;
  std::uint64_t seed_;
  std::string stream_;
  std::map<std::string, Rng, std::less<>> rngs_;
  std::map<std::string, int, std::less<>> used_;
};

struct FeatureCandidate {
  std::string feature;
  std::size_t sentence = 0;
  bool constraint_ok = true;
};

std::vector<FeatureDecision> SampleFeatures(const FeatureProfile& profile, const std::vector<FeatureCandidate>& candidates,
                                            std::uint64_t seed);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& reason)
      : std::runtime_error(field + ": " + reason), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct LoadedConfig {
  ParameterSet params;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;
};

// Config document:
//   {"preset": name, "seed": int, "overrides": {field: value},
//    "speaker_overrides": {"S1": {...}, "S2": {...}}}
// Overrides: ratio, chunk, split_threshold, split, merge, pronominalize,
// postprocess, em_dash, levels {high, low, default}. Speaker overrides map
// feature ids to frequencies plus "caps" {group: n} and "vocabulary"
// {policy, max_rank}. Out-of-range numbers are clamped with a warning.
LoadedConfig LoadParams(std::string_view document, const MarkerInventory& inventory);

// True for elaboration features, marker groups and marker ids.
bool IsKnownFeature(std::string_view feature, const MarkerInventory& inventory);

}  // namespace m2d

#endif  // M2D_PERSONALITY_H_
