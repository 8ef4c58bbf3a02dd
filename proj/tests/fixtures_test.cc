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

#include "m2d/dsynts.h"
#include "m2d/realizer.h"
#include "test_util.h"

namespace m2d {
namespace {

using testing_util::FixtureDir;
using testing_util::ReadFile;

std::vector<std::string> RealizeAll(const Story& s) {
  std::vector<std::string> out;
  for (const DsyntTree& t : s.sentences) out.push_back(Realize(t, testing_util::Morph(), s.characters).text);
  return out;
}

TEST(FixtureTest, GardenMonolog) {
  Story s = ParseStory(ReadFile(FixtureDir() / "garden.json")).story;
  const std::vector<std::string> expected = {
      "The radishes charmed the butterflies.",
      "The communal garden was weedy.",
      "It rained.",
      "The communal garden was swampy.",
      "It rained.",
      "The productive gardener planted the plants.",
      "The gardener planted the chards the lettuces and the spinach.",
      "The pleased gardener did not expect for the chards the lettuces and the spinach to grow.",
      "The chards the lettuces and the spinach sprouted.",
      "The gardener mistakenly dug the chards the lettuces and the spinach.",
      "The surprised gardener saw for the chards the lettuces and the spinach to sprout.",
      "The communal garden was not weedy.",
      "The communal garden was not swampy.",
      "The communal garden was productive.",
      "The gardener was proud.",
      "The eager gardener wanted to reap the lettuces.",
      "The radishes were droopy.",
      "The gardener planned to remove the radishes.",
      "The thoughtful gardener thought the flowers charmed the butterflies.",
  };
  EXPECT_EQ(RealizeAll(s), expected);
  EXPECT_EQ(SerializeStory(ParseStory(SerializeStory(s)).story), SerializeStory(s));
}

TEST(FixtureTest, SquirrelMonolog) {
  Story s = ParseStory(ReadFile(FixtureDir() / "squirrel.json")).story;
  const std::vector<std::string> expected = {
      "I placed the steely bowl on the deck in order for Benjamin to drink the bowl's water.",
      "The steely bowl was popular.",
      "The birds drank the bowl's water.",
      "The birds bathed themselves in the steely bowl.",
      "The birds organized themselves on the deck's railing in order for the birds to wait.",
      "The squirrels drank the bowl's water.",
      "The squirrel approached the steely bowl.",
      "The crazy squirrel was startled because the squirrel saw the squirrel's reflection.",
      "The crazy squirrel leaped because the squirrel was startled.",
      "The crazy squirrel fell over the deck's railing because the squirrel leaped because the squirrel was startled.",
      "The crazy squirrel held the deck's railing with the squirrel's paw.",
      "The squirrel's paw slipped off the deck's railing.",
      "The crazy squirrel fell.",
  };
  EXPECT_EQ(RealizeAll(s), expected);
}

TEST(FixtureTest, AllFixturesRoundTripAndValidate) {
  for (const char* name : {"garden.json", "squirrel.json", "fox.json", "orchard.json"}) {
    std::string doc = ReadFile(FixtureDir() / name);
    Story s = ParseStory(doc).story;
    EXPECT_EQ(SerializeStory(s), doc) << name;
    for (const DsyntTree& t : s.sentences) EXPECT_TRUE(ValidateTree(t, &s.characters).empty());
    for (const std::string& text : RealizeAll(s)) EXPECT_EQ(Postprocess(text), Postprocess(Postprocess(text)));
  }
}

}  // namespace
}  // namespace m2d
