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

#include "m2d/dsynts.h"

#include <gtest/gtest.h>

#include "m2d/builder.h"
#include "m2d/realizer.h"
#include "test_util.h"

namespace m2d {
namespace {

using namespace build;

Node StoreTree() {
  return Verb("run").I(Noun("man")).Attr(Prep("to").II(Noun("store").Attr(Adj("big"))));
}

bool HasRule(const std::vector<Diagnostic>& diags, const std::string& rule) {
  for (const Diagnostic& d : diags) {
    if (d.rule == rule) return true;
  }
  return false;
}

TEST(ParseStoryTest, MinimalDocument) {
  ParseResult r = ParseStory(R"({"title": "t", "characters": [],
    "sentences": [{"lexeme": "rain", "class": "verb", "features": {"tense": "past"}, "children": []}]})");
  ASSERT_EQ(r.story.sentences.size(), 1u);
  EXPECT_TRUE(r.story.characters.empty());
  EXPECT_EQ(r.story.sentences[0].lexeme, "rain");
  EXPECT_EQ(r.story.sentences[0].feature("tense"), "past");
}

TEST(ParseStoryTest, IllegalRelationIsNamed) {
  try {
    ParseStory(R"({"title": "t", "characters": [], "sentences": [
      {"lexeme": "run", "class": "verb", "features": {}, "children": [
        {"rel": "IV", "node": {"lexeme": "man", "class": "noun", "features": {}, "children": []}}]}]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.reason().find("IV"), std::string::npos);
    EXPECT_NE(e.where().find("children[0].rel"), std::string::npos);
  }
}

TEST(ParseStoryTest, SyntaxErrorHasLineAndColumn) {
  try {
    ParseStory("{\n  \"title\": \"t\",\n  oops\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseStoryTest, RejectsBadValuesAndRefs) {
  EXPECT_THROW(ParseStory(R"({"title": "t", "characters": [], "sentences": [
      {"lexeme": "run", "class": "verb", "features": {"tense": "later"}, "children": []}]})"),
               ParseError);
  EXPECT_THROW(ParseStory(R"({"title": "t", "characters": [], "sentences": [
      {"lexeme": "fox", "class": "noun", "ref": "fox", "features": {}, "children": []}]})"),
               ParseError);
  EXPECT_THROW(ParseStory(R"({"title": "t", "characters": [], "sentences": []})"), ParseError);
  EXPECT_THROW(ParseStory(R"({"title": "t", "characters": [
      {"id": "a", "lexeme": "a", "gender": "masc", "number": "sg", "proper": false},
      {"id": "a", "lexeme": "b", "gender": "masc", "number": "sg", "proper": false}],
      "sentences": [{"lexeme": "rain", "class": "verb", "features": {}, "children": []}]})"),
               ParseError);
}

TEST(ParseStoryTest, UnknownKeysStrictVersusLax) {
  const char* doc = R"({"title": "t", "extra": 1, "characters": [],
    "sentences": [{"lexeme": "rain", "class": "verb", "features": {}, "children": []}]})";
  EXPECT_THROW(ParseStory(doc), ParseError);
  ParseResult lax = ParseStory(doc, ParseOptions{.strict = false});
  EXPECT_EQ(lax.warnings.size(), 1u);
}

TEST(SerializeTest, RoundTripAndCanonical) {
  Story s;
  s.title = "store";
  s.characters.push_back({"man", "man", Gender::kMasc, Number::kSg, false});
  Node t = StoreTree();
  t.children[0].node.ref = "man";
  s.sentences.push_back(t);
  std::string doc = SerializeStory(s);
  Story back = ParseStory(doc).story;
  EXPECT_EQ(back, s);
  EXPECT_EQ(SerializeStory(back), doc);

  Node reordered = t;
  reordered.features = {{"tense", "past"}};
  Story s2 = s;
  s2.sentences[0] = reordered;
  EXPECT_EQ(SerializeStory(s2), doc);
}

TEST(ValidateTest, CleanAndViolations) {
  EXPECT_TRUE(ValidateTree(Verb("run").I(Noun("man"))).empty());
  auto two = ValidateTree(Verb("run").I(Noun("man")).I(Noun("dog")));
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].rule, "duplicate-subject");
  auto mismatch = ValidateTree(Noun("man").F("tense", "past"));
  ASSERT_EQ(mismatch.size(), 1u);
  EXPECT_EQ(mismatch[0].rule, "feature-class-mismatch");
  EXPECT_TRUE(HasRule(ValidateTree(Verb("run").I(Noun("man").Article("some"))), "illegal-feature-value"));
  EXPECT_TRUE(HasRule(ValidateTree(Verb("run").I(Noun("man").F("colour", "red"))), "unknown-feature"));
  std::vector<CharacterDecl> none;
  EXPECT_TRUE(HasRule(ValidateTree(Verb("run").I(Noun("man").Ref("ghost")), &none), "unknown-ref"));
  auto nested = ValidateTree(Verb("run").I(Noun("man")).Attr(Prep("to").II(Adj("x").F("article", "def"))));
  ASSERT_EQ(nested.size(), 1u);
  EXPECT_EQ(nested[0].path.ToString(), "/1/0");
}

TEST(FindNodesTest, NounsInPreOrder) {
  Node t = StoreTree();
  auto paths = FindNodes(t, [](const Node& n) { return n.word_class == WordClass::kNoun; });
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(Resolve(t, paths[0]).lexeme, "man");
  EXPECT_EQ(Resolve(t, paths[1]).lexeme, "store");
  EXPECT_TRUE(FindNodes(t, [](const Node&) { return false; }).empty());
  EXPECT_EQ(FindNodes(t, [](const Node&) { return true; }).size(), CountNodes(t));
  EXPECT_EQ(CountNodes(t), 5u);
}

TEST(PruneTest, RemovesAttrAndKeepsInput) {
  Node t = StoreTree();
  Node before = t;
  auto big = FindNodes(t, [](const Node& n) { return n.lexeme == "big"; });
  Node pruned = Prune(t, big);
  EXPECT_EQ(t, before);
  EXPECT_EQ(CountNodes(pruned), CountNodes(t) - 1);
  Node expected = Verb("run").I(Noun("man")).Attr(Prep("to").II(Noun("store")));
  EXPECT_EQ(pruned, expected);
  EXPECT_EQ(Realize(pruned, testing_util::Morph()).text, Realize(expected, testing_util::Morph()).text);
  EXPECT_EQ(Realize(pruned, testing_util::Morph()).text, "The man ran to the store.");
}

TEST(PruneTest, EdgeCases) {
  Node t = StoreTree();
  EXPECT_EQ(Prune(t, {}), t);
  EXPECT_THROW(Prune(t, {NodePath{}}), InvalidPath);
  EXPECT_THROW(Prune(t, {NodePath{{7}}}), InvalidPath);
  EXPECT_THROW(Prune(t, {NodePath{{1}}, NodePath{{1, 0}}}), InvalidPath);
  Node two = Prune(t, {NodePath{{0}}, NodePath{{1, 0, 0}}});
  EXPECT_EQ(CountNodes(two), 3u);
}

}  // namespace
}  // namespace m2d
