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

#include "m2d/dialog.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "m2d/builder.h"
#include "m2d/report.h"
#include "test_util.h"

namespace m2d {
namespace {

using namespace build;
using testing_util::Lex;
using testing_util::Morph;

const Resources& Res() {
  static const Resources res = Resources::Load(testing_util::DataDir());
  return res;
}

const std::vector<CharacterDecl>& Cast() {
  static const std::vector<CharacterDecl> cast = {
      {"garden", "garden", Gender::kNeut, Number::kSg, false},
      {"gardener", "gardener", Gender::kFem, Number::kSg, false},
      {"man", "man", Gender::kMasc, Number::kSg, false},
      {"store", "store", Gender::kNeut, Number::kSg, false},
      {"crops", "chard", Gender::kNeut, Number::kPl, false},
      {"apples", "apple", Gender::kNeut, Number::kPl, false},
      {"fox", "fox", Gender::kMasc, Number::kSg, false},
  };
  return cast;
}

std::string Say(const Node& t) { return Realize(t, Morph(), Cast()).text; }
std::string SayPost(const Node& t) { return Postprocess(Say(t)); }

Node Garden() { return Noun("garden").Ref("garden"); }
Node Swampy() { return Copula(Garden(), "swampy"); }

// Independent re-derivation of the quota walk: the floor passes to whichever
// speaker lags furthest behind quota * done / n after each run.
std::vector<Speaker> AllocationOracle(std::size_t n, double ratio, int chunk, Rng rng) {
  ratio = std::min(0.9, std::max(0.1, ratio));
  std::size_t q1 = static_cast<std::size_t>(std::llround(ratio * n));
  q1 = std::min(n - 1, std::max<std::size_t>(1, q1));
  std::map<Speaker, std::size_t> quota = {{Speaker::kS1, q1}, {Speaker::kS2, n - q1}};
  std::map<Speaker, std::size_t> given;
  std::vector<Speaker> out;
  Speaker cur = Speaker::kS1;
  while (out.size() < n) {
    if (given[cur] == quota[cur]) cur = Other(cur);
    std::size_t run = std::min(1 + rng.Below(chunk), quota[cur] - given[cur]);
    out.insert(out.end(), run, cur);
    given[cur] += run;
    double lag_cur = double(quota[cur]) * out.size() / n - given[cur];
    double lag_other = double(quota[Other(cur)]) * out.size() / n - given[Other(cur)];
    if (lag_other >= lag_cur) cur = Other(cur);
  }
  return out;
}

TEST(AllocateTest, EqualRatioAlternates) {
  Rng rng(1);
  AllocationPlan plan = Allocate(16, 0.5, 1, rng);
  ASSERT_EQ(plan.speakers.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(plan.speakers[i], i % 2 ? Speaker::kS2 : Speaker::kS1) << i;
  EXPECT_EQ(plan.count(Speaker::kS1), 8u);
  EXPECT_EQ(plan.turns().size(), 16u);
}

TEST(AllocateTest, SeventyPercent) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = Rng::ForStage(seed, "allocate");
    AllocationPlan plan = Allocate(10, 0.7, 2, rng);
    EXPECT_EQ(plan.count(Speaker::kS1), 7u);
    EXPECT_EQ(plan.count(Speaker::kS2), 3u);
    EXPECT_EQ(plan.speakers, AllocationOracle(10, 0.7, 2, Rng::ForStage(seed, "allocate"))) << seed;
  }
}

TEST(AllocateTest, RatioIsClamped) {
  Rng rng(3);
  AllocationPlan plan = Allocate(10, 1.0, 1, rng);
  EXPECT_EQ(plan.count(Speaker::kS1), 9u);
  EXPECT_GE(plan.count(Speaker::kS2), 1u);
}

TEST(AllocateTest, MatchesOracle) {
  Rng params(77);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + params.Below(30);
    double ratio = params.Uniform();
    int chunk = 1 + static_cast<int>(params.Below(4));
    Rng rng(trial);
    AllocationPlan plan = Allocate(n, ratio, chunk, rng);
    EXPECT_EQ(plan.speakers, AllocationOracle(n, ratio, chunk, Rng(trial))) << trial;
    double clamped = std::min(0.9, std::max(0.1, ratio));
    std::size_t q1 = std::min(n - 1, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(clamped * n))));
    EXPECT_EQ(plan.count(Speaker::kS1), q1) << trial;
  }
}

TEST(AllocateTest, EqualSplitIsBalanced) {
  for (std::size_t n = 1; n < 40; ++n) {
    Rng rng(n);
    AllocationPlan plan = Allocate(n, 0.5, 1, rng);
    long diff = static_cast<long>(plan.count(Speaker::kS1)) - static_cast<long>(plan.count(Speaker::kS2));
    EXPECT_LE(std::abs(diff), 1) << n;
  }
}

TEST(QuestionTest, PrepositionalObjectBecomesWhere) {
  Node tree = Verb("run").I(Noun("man").Ref("man")).Attr(Prep("to").II(Noun("store").Ref("store").Attr(Adj("big"))));
  EXPECT_EQ(Say(tree), "The man ran to the big store.");
  NodePath store{{1, 0}};
  ASSERT_EQ(Resolve(tree, store).lexeme, "store");
  QuestionAnswer qa = MakeWhQuestion(tree, store, Cast());
  EXPECT_EQ(Say(qa.question), "The man ran where?");
  EXPECT_EQ(Say(qa.answer), "The man ran to the big store.");
  EXPECT_EQ(WhTarget(tree), store);
}

TEST(QuestionTest, PredicateAdjective) {
  QuestionAnswer qa = MakeWhQuestion(Swampy(), *WhTarget(Swampy()), Cast());
  EXPECT_EQ(Say(qa.question), "How was the garden?");
  EXPECT_EQ(Say(qa.answer), "The garden was swampy.");
}

TEST(QuestionTest, SubjectAndObject) {
  Node tree = Verb("plant").I(Noun("gardener").Ref("gardener")).II(Noun("plant").Pl());
  QuestionAnswer subject = MakeWhQuestion(tree, NodePath{{0}}, Cast());
  EXPECT_EQ(Say(subject.question), "Who planted the plants?");
  QuestionAnswer object = MakeWhQuestion(tree, NodePath{{1}}, Cast());
  EXPECT_EQ(Say(object.question), "The gardener planted what?");
}

TEST(QuestionTest, MainVerbIsUnsupported) {
  EXPECT_THROW(MakeWhQuestion(Swampy(), NodePath{}, Cast()), UnsupportedTarget);
}

TEST(TagTest, Copula) { EXPECT_EQ(SayPost(MakeTagQuestion(Swampy(), Cast(), Morph())), "The garden was swampy, wasn't it?"); }

TEST(TagTest, PluralAction) {
  Node crops = Noun("chard").Pl().Ref("crops").Coord(Noun("lettuce").Pl()).Coord(Noun("spinach"));
  Node tree = Verb("sprout").I(crops);
  EXPECT_EQ(Say(tree), "The chards the lettuces and the spinach sprouted.");
  EXPECT_EQ(SayPost(MakeTagQuestion(tree, Cast(), Morph())),
            "The chards the lettuces and the spinach sprouted, didn't they?");
}

TEST(TagTest, NegativeClauseGetsPositiveTag) {
  Node tree = Copula(Noun("garden").Ref("garden").Attr(Adj("communal")), "weedy").Neg();
  EXPECT_EQ(Say(MakeTagQuestion(tree, Cast(), Morph())), "The communal garden was not weedy, was it?");
  Node neg_adj = Verb("be").I(Garden()).II(Adj("weedy").Neg());
  EXPECT_EQ(Say(MakeTagQuestion(neg_adj, Cast(), Morph())), "The garden was not weedy, was it?");
}

TEST(TagTest, PresentTense) {
  Node tree = Verb("like", "present").I(Noun("gardener").Ref("gardener")).II(Noun("apple").Pl());
  EXPECT_EQ(SayPost(MakeTagQuestion(tree, Cast(), Morph())), "The gardener likes the apples, doesn't she?");
}

TEST(TagTest, QuestionsAreUnsupported) {
  Node q = Swampy();
  q.features["mood"] = "quest";
  EXPECT_THROW(MakeTagQuestion(q, Cast(), Morph()), UnsupportedTarget);
}

TEST(ProvokingTest, DeterministicPerSeed) {
  std::string first = ProvokingLines(Rng::ForStage(6, "provoking.lines")).Next();
  EXPECT_EQ(first, "I don't really remember this part, can you tell it?");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(ProvokingLines(Rng::ForStage(6, "provoking.lines")).Next(), first);
}

TEST(ProvokingTest, DrawsWithoutReplacement) {
  const std::size_t k = ProvokingLines::Inventory().size();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ProvokingLines lines{Rng(seed)};
    std::vector<std::string> drawn;
    for (std::size_t i = 0; i < 3 * k; ++i) drawn.push_back(lines.Next());
    for (std::size_t round = 0; round < 3; ++round) {
      std::vector<std::string> block(drawn.begin() + round * k, drawn.begin() + (round + 1) * k);
      std::vector<std::string> inventory = ProvokingLines::Inventory();
      std::sort(block.begin(), block.end());
      std::sort(inventory.begin(), inventory.end());
      EXPECT_EQ(block, inventory) << seed;
    }
  }
}

TEST(RhetoricalTest, Embeds) {
  EXPECT_EQ(Say(MakeRhetoricalQuestion(Swampy())), "I thought everybody knew that the garden was swampy?");
}

TEST(RepetitionTest, VerbatimAndParaphrase) {
  Rng rng(0);
  EXPECT_EQ(Say(MakeRepetition(Swampy(), RepetitionMode::kVerbatim, Lex(), {}, rng).tree),
            "Yeah, the garden was swampy.");
  Repetition p = MakeRepetition(Swampy(), RepetitionMode::kParaphrase, Lex(), {}, rng);
  EXPECT_EQ(Say(p.tree), "Right, the garden was boggy.");
  EXPECT_EQ(p.from, "swampy");
  EXPECT_EQ(p.to, "boggy");
}

TEST(RepetitionTest, ParaphraseFallsBackToVerbatim) {
  Rng rng(0);
  Node tree = Verb("rain").I(Pron("it"));
  Repetition p = MakeRepetition(tree, RepetitionMode::kParaphrase, Lex(), {}, rng);
  EXPECT_EQ(Say(p.tree), "Right, it rained.");
  EXPECT_FALSE(p.to.has_value());
}

TEST(StateChangeTest, Fox) {
  Story fox = testing_util::LoadStory("fox.json");
  StoryDatabase db = StoryDatabase::Build(fox, Lex());
  std::optional<DsyntTree> t = MakeStateChange(db, "fox", 9);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(Realize(*t, Morph(), fox.characters).text, "Now, the fox is sad.");
  EXPECT_FALSE(MakeStateChange(db, "cheese", 9).has_value());
}

TEST(StateChangeTest, Weedless) {
  Story garden = testing_util::LoadStory("garden.json");
  StoryDatabase db = StoryDatabase::Build(garden, Lex());
  std::optional<DsyntTree> t = MakeStateChange(db, "garden", 1);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(Realize(*t, Morph(), garden.characters).text, "Now, the garden is weedless.");
}

TEST(CorrectionTest, Productive) {
  std::optional<CorrectionPair> c = MakeCorrectionPair(Copula(Garden(), "productive"));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(Say(c->false_statement), "The garden was not productive.");
  EXPECT_EQ(kRebuttal + " " + Say(c->correction),
            "I don't think that's quite right, actually. I think the garden was productive.");
}

TEST(CorrectionTest, NegativeInput) {
  std::optional<CorrectionPair> c = MakeCorrectionPair(Copula(Noun("fox").Ref("fox"), "hungry").Neg());
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(Say(c->false_statement), "The fox was hungry.");
  EXPECT_EQ(Say(c->correction), "I think the fox was not hungry.");
}

TEST(CorrectionTest, ActionSentence) {
  EXPECT_FALSE(MakeCorrectionPair(Verb("dig").I(Noun("gardener").Ref("gardener")).II(Noun("plant").Pl())));
}

Node Apples() {
  return Copula(Noun("apple").Pl().Ref("apples").Attr(Adj("red")), "tasty")
      .Coord(Verb("eat").I(Noun("gardener").Ref("gardener")).II(Pron("they")));
}

TEST(AffirmTest, TableExample) {
  Rng rng(0);
  std::optional<Affirmation> a = MakeAffirmation(Apples(), Lex(), {}, rng);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(Say(a->truncated), "The red apples were tasty and ---");
  EXPECT_EQ(Say(a->affirm), "Just delicious, really.");
  ASSERT_TRUE(a->resume.has_value());
  EXPECT_EQ(Say(*a->resume), "Yeah, and the gardener ate them.");
}

TEST(AffirmTest, NoSynonym) {
  Rng rng(0);
  EXPECT_FALSE(MakeAffirmation(Copula(Garden(), "communal"), Lex(), {}, rng).has_value());
  EXPECT_FALSE(MakeAffirmation(Verb("rain").I(Pron("it")), Lex(), {}, rng).has_value());
}

TEST(AffirmTest, DeterministicChoice) {
  VocabularyPolicy any{SynonymPolicy::kAny, 0};
  Rng first_rng(17);
  std::string first = MakeAffirmation(Apples(), Lex(), any, first_rng)->synonym;
  for (int i = 0; i < 100; ++i) {
    Rng rng(17);
    EXPECT_EQ(MakeAffirmation(Apples(), Lex(), any, rng)->synonym, first);
  }
}

std::vector<std::string> SentenceTexts(const std::string& text) {
  std::vector<std::string> out;
  Story story = ParseStory(text).story;
  for (const DsyntTree& t : story.sentences) out.push_back(Realize(t, Res().morph, story.characters).text);
  return out;
}

TEST(BuildDialogTest, EstKeepsTheMonolog) {
  std::string text = testing_util::ReadFile(testing_util::FixtureDir() / "garden.json");
  Story story = ParseStory(text).story;
  Dialog d = BuildDialog(story, Preset("est"), 7, Res());
  std::vector<std::string> out;
  std::size_t s1 = 0;
  for (const TraceSentence* s : d.sentences()) {
    out.push_back(s->text);
    s1 += s->speaker == Speaker::kS1;
    EXPECT_TRUE(s->transforms.empty());
    EXPECT_TRUE(s->markers.empty());
  }
  EXPECT_EQ(out, SentenceTexts(text));
  EXPECT_LE(std::abs(static_cast<long>(2 * s1) - static_cast<long>(out.size())), 1);
  for (std::size_t i = 0; i < d.allocation.speakers.size(); ++i) {
    EXPECT_EQ(d.allocation.speakers[i], i % 2 ? Speaker::kS2 : Speaker::kS1);
  }
}

TEST(BuildDialogTest, ChattyHasMarkerAndQuestion) {
  Story story = testing_util::LoadStory("garden.json");
  RunReport r = ReportFromTrace(SerializeTrace(BuildDialog(story, Preset("chatty"), 7, Res())), Res().markers);
  EXPECT_GE(r.speakers[0].count("markers") + r.speakers[1].count("markers"), 1);
  EXPECT_GE(r.speakers[0].count("questions") + r.speakers[1].count("questions"), 1);
}

TEST(BuildDialogTest, EchoesTakeMarkersButNoSecondAcknowledgment) {
  Story story = testing_util::LoadStory("squirrel.json");
  int echo_markers = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dialog d = BuildDialog(story, Preset("introvert_vs_default"), seed, Res());
    for (const TraceSentence* s : d.sentences()) {
      if (s->tag != "repetition" && s->tag != "paraphrase") continue;
      int initial = 0;
      for (const std::string& id : s->markers) {
        const MarkerSpec* m = Res().markers.find(id);
        ASSERT_NE(m, nullptr);
        EXPECT_NE(m->group, "ack_casual") << s->text;
        EXPECT_NE(m->group, "ack_formal") << s->text;
        initial += m->slot == MarkerSlot::kInitial;
      }
      EXPECT_LE(initial, 1) << s->text;
      echo_markers += static_cast<int>(s->markers.size());
    }
  }
  EXPECT_GT(echo_markers, 0);
}

TEST(BuildDialogTest, Deterministic) {
  Story story = testing_util::LoadStory("squirrel.json");
  Dialog first = BuildDialog(story, Preset("chatty"), 11, Res());
  std::string transcript = RenderTranscript(first);
  std::string trace = SerializeTrace(first);
  for (int i = 0; i < 100; ++i) {
    Dialog d = BuildDialog(story, Preset("chatty"), 11, Res());
    ASSERT_EQ(RenderTranscript(d), transcript);
    ASSERT_EQ(SerializeTrace(d), trace);
  }
}

TEST(BuildDialogTest, SpeakersFollowTurns) {
  Story story = testing_util::LoadStory("garden.json");
  Dialog d = BuildDialog(story, Preset("extravert_vs_default"), 3, Res());
  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    if (i > 0) EXPECT_NE(d.turns[i].speaker, d.turns[i - 1].speaker);
    for (const TraceSentence& s : d.turns[i].sentences) EXPECT_EQ(s.speaker, d.turns[i].speaker);
  }
}

TEST(BuildDialogTest, QuestionsSpanSpeakers) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const char* name : {"garden.json", "squirrel.json", "fox.json"}) {
      Story story = testing_util::LoadStory(name);
      std::vector<const TraceSentence*> all = BuildDialog(story, Preset("chatty"), seed, Res()).sentences();
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i]->tag == "wh_with_answer") {
          ASSERT_LT(i + 1, all.size());
          EXPECT_NE(all[i]->speaker, all[i + 1]->speaker) << name << " " << seed;
        }
        if (all[i]->tag == "corrections" && all[i]->text == kRebuttal) {
          ASSERT_GT(i, 0u);
          EXPECT_NE(all[i]->speaker, all[i - 1]->speaker) << name << " " << seed;
        }
      }
    }
  }
}

TEST(BuildDialogTest, InvalidStoryThrows) {
  Story story = testing_util::LoadStory("garden.json");
  story.sentences[0].children.push_back(Edge{Relation::kI, Noun("fox")});
  EXPECT_THROW(BuildDialog(story, Preset("est"), 0, Res()), std::invalid_argument);
}

TEST(BuildDialogTest, TraceRendersTranscript) {
  for (const std::string& preset : PresetNames()) {
    Story story = testing_util::LoadStory("fox.json");
    Dialog d = BuildDialog(story, Preset(preset), 5, Res());
    EXPECT_EQ(TranscriptFromTrace(SerializeTrace(d)), RenderTranscript(d)) << preset;
  }
}

}  // namespace
}  // namespace m2d
