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

#ifndef M2D_REPORT_H_
#define M2D_REPORT_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "m2d/dialog.h"

namespace m2d {

// JSON trace: seed, preset, allocation, turns with per-sentence
// transformation chains and marker ids, and every FeatureDecision.
std::string SerializeTrace(const Dialog& dialog);

// Rebuilds the transcript from a serialized trace alone.
std::string TranscriptFromTrace(std::string_view trace);

struct SpeakerReport {
  // Feature id -> realized count. Markers count under their group id;
  // "markers" and "questions" hold the totals.
  std::map<std::string, int> features;
  std::size_t tokens = 0;
  std::size_t sentences = 0;
  // Source sentences carried by this speaker.
  std::size_t content = 0;

  int count(const std::string& feature) const;
};

struct RunReport {
  std::string preset;
  std::uint64_t seed = 0;
  std::array<SpeakerReport, 2> speakers;
  // Share of source sentences carried by S1.
  double achieved_ratio = 0;
  int transformations = 0;

  const SpeakerReport& speaker(Speaker s) const { return speakers[static_cast<int>(s)]; }
};

// Recounts everything from the serialized trace.
RunReport ReportFromTrace(std::string_view trace, const MarkerInventory& inventory);

std::string ReportJson(const std::vector<RunReport>& reports);
std::string ReportTable(const std::vector<RunReport>& reports);

std::size_t CountTokens(std::string_view text);

}  // namespace m2d

#endif  // M2D_REPORT_H_
