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

#ifndef M2D_TESTS_TEST_UTIL_H_
#define M2D_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "m2d/dsynts.h"
#include "m2d/realizer.h"
#include "m2d/story_state.h"
#include "m2d/transforms.h"

namespace m2d::testing_util {

inline std::filesystem::path DataDir() { return M2D_DEFAULT_DATA_DIR; }
inline std::filesystem::path FixtureDir() { return M2D_FIXTURE_DIR; }
inline std::filesystem::path GoldenDir() { return M2D_GOLDEN_DIR; }

inline const MorphLexicon& Morph() {
  static const MorphLexicon lex = MorphLexicon::Load(DataDir() / "morph.json");
  return lex;
}

inline const Lexicon& Lex() {
  static const Lexicon lex = Lexicon::Load(DataDir() / "lexicon.json");
  return lex;
}

inline const MarkerInventory& Markers() {
  static const MarkerInventory inv = MarkerInventory::Load(DataDir() / "markers.json");
  return inv;
}

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Story LoadStory(const std::string& name) { return ParseStory(ReadFile(FixtureDir() / name)).story; }

}  // namespace m2d::testing_util

#endif  // M2D_TESTS_TEST_UTIL_H_
