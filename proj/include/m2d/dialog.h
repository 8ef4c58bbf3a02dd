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

#ifndef M2D_DIALOG_H_
#define M2D_DIALOG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "m2d/dsynts.h"
#include "m2d/personality.h"
#include "m2d/realizer.h"
#include "m2d/rng.h"
#include "m2d/story_state.h"
#include "m2d/transforms.h"

namespace m2d {

struct Resources {
  MorphLexicon morph;
  Lexicon lexicon;
  MarkerInventory markers;

  // Reads morph.json, lexicon.json and markers.json from `dir`.
  static Resources Load(const std::filesystem::path& dir);
  // $M2D_LEXICON_DIR when set, otherwise the built-in data directory.
  static std::filesystem::path DefaultDir();
};

// ---- Allocation ----

struct AllocationPlan {
  std::vector<Speaker> speakers;  // one per source sentence

  // Maximal runs of one speaker, as [begin, end) index pairs.
  std::vector<std::pair<std::size_t, std::size_t>> turns() const;
  std::size_t count(Speaker s) const;
};

// Greedy quota allocation. Each speaker's quota is round(ratio * n) clamped
// to [1, n - 1] (all sentences go to S1 when n == 1). The floor is kept for
// an rng-drawn run of 1..chunk sentences; then the speaker lagging furthest
// behind its expected share takes over, ties switching speakers.
AllocationPlan Allocate(std::size_t sentences, double ratio, int chunk, Rng& rng);

// ---- Question generation ----

class UnsupportedTarget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct QuestionAnswer {
  DsyntTree question;
  DsyntTree answer;
};

// Noun in a prepositional phrase: the phrase becomes "where" (locative or
// directional preposition) or keeps the preposition with "who"/"what", and
// the other ATTR modifiers of the clause are pruned. Predicate or attributive
// adjective: "How was <noun>?". Subject or object noun: "who"/"what" in situ.
QuestionAnswer MakeWhQuestion(const DsyntTree& tree, const NodePath& target,
                              const std::vector<CharacterDecl>& characters);

// Preferred target for MakeWhQuestion: predicate adjective, then a
// prepositional complement, then the object, then the subject.
std::optional<NodePath> WhTarget(const DsyntTree& tree);

// Appends "<aux> [not] <pronoun>" with flipped polarity and question
// punctuation. Throws UnsupportedTarget for non-declarative trees.
DsyntTree MakeTagQuestion(const DsyntTree& tree, const std::vector<CharacterDecl>& characters,
                          const MorphLexicon& morph);

// Canned requests for the other speaker to continue, drawn without
// replacement; the inventory refills once every line has been used.
class ProvokingLines {
 public:
  explicit ProvokingLines(Rng rng) : rng_(rng) {}
  static const std::vector<std::string>& Inventory();
  std::string Next();

 private:
  Rng rng_;
  std::vector<std::size_t> left_;
};

// "I thought everybody knew that <clause>?"
DsyntTree MakeRhetoricalQuestion(const DsyntTree& tree);

// ---- Entrainment and extrapolation ----

enum class RepetitionMode { kVerbatim, kParaphrase };

struct Repetition {
  DsyntTree tree;
  std::optional<std::string> from;
  std::optional<std::string> to;
};

// Verbatim copies get "yeah"; paraphrases substitute one synonym and get
// "right", falling back to a "right" verbatim copy when nothing substitutes.
Repetition MakeRepetition(const DsyntTree& tree, RepetitionMode mode, const Lexicon& lexicon,
                          const VocabularyPolicy& policy, Rng& rng);

// "Now, the fox is sad." from the most recent state of `character` holding
// at `position`; none without states or antonym.
std::optional<DsyntTree> MakeStateChange(const StoryDatabase& db, const std::string& character, std::size_t position);

inline const std::string kRebuttal = "I don't think that's quite right, actually.";

struct CorrectionPair {
  DsyntTree false_statement;
  DsyntTree correction;  // the original with an "I think" preface
};

// Copula and stative trees only.
std::optional<CorrectionPair> MakeCorrectionPair(const DsyntTree& tree);

struct Affirmation {
  DsyntTree truncated;                // "The red apples were tasty and ---"
  DsyntTree affirm;                   // "Just delicious, really."
  std::optional<DsyntTree> resume;    // "Yeah, and the gardener ate them."
  std::string adjective;
  std::string synonym;
};

std::optional<Affirmation> MakeAffirmation(const DsyntTree& tree, const Lexicon& lexicon,
                                           const VocabularyPolicy& policy, Rng& rng);

// ---- Dialog assembly ----

struct TraceSentence {
  std::string text;
  Speaker speaker = Speaker::kS1;
  // Source sentence indices this sentence realizes or was derived from.
  std::vector<std::size_t> sources;
  // Position among the sentences carrying the same source content; only
  // fragment 0 of a content sentence counts as the source's carrier.
  std::size_t fragment = 0;
  // Elaboration feature that produced the sentence; empty for content.
  std::string tag;
  std::vector<std::string> transforms;
  std::vector<std::string> markers;  // marker ids
  std::optional<DsyntTree> tree;     // absent for canned lines

  bool content() const { return tag.empty(); }
};

struct DialogTurn {
  Speaker speaker = Speaker::kS1;
  std::vector<TraceSentence> sentences;
};

struct SpeakerDecision {
  Speaker speaker = Speaker::kS1;
  // For elaboration features `decision.sentence` is a source sentence index;
  // for markers, lexical choice and exclamation it indexes the dialog's
  // sentences in order.
  FeatureDecision decision;
};

struct Dialog {
  std::vector<DialogTurn> turns;
  ParameterSet params;
  std::uint64_t seed = 0;
  AllocationPlan allocation;
  std::vector<SpeakerDecision> decisions;

  std::vector<const TraceSentence*> sentences() const;
};

// Stages: deaggregate, allocate, elaborate, aggregate within turns,
// pronominalize, lexical choice, markers, exclamation, realize, postprocess.
// Throws std::invalid_argument when a source sentence fails validation.
Dialog BuildDialog(const Story& story, const ParameterSet& params, std::uint64_t seed, const Resources& resources);

// "S1: text text\nS2: ...\n"
std::string RenderTranscript(const Dialog& dialog);

}  // namespace m2d

#endif  // M2D_DIALOG_H_
