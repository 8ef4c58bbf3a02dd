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

#ifndef M2D_TRANSFORMS_H_
#define M2D_TRANSFORMS_H_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "m2d/dsynts.h"
#include "m2d/realizer.h"
#include "m2d/rng.h"
#include "m2d/story_state.h"

namespace m2d {

// ---- Aggregation and deaggregation ----

// Returns [tree] when CountNodes(tree) <= max_nodes. Otherwise detaches
// "because" clauses (recursively) and root verb coordinations into separate
// sentences, copying the subject into each conjunct.
std::vector<DsyntTree> SplitLong(const DsyntTree& tree, std::size_t max_nodes);

// Coordinates two declarative sentences with the same subject (lexeme and
// ref). Copula + adjective pairs with equal tense become an adjective
// coordination ("was swampy, and not productive"); anything else becomes a
// VP coordination with b's subject dropped.
std::optional<DsyntTree> MergePair(const DsyntTree& a, const DsyntTree& b);

// ---- Referring expressions ----

struct SalienceContext {
  // Recent referents, most recent first.
  std::vector<SalientReferent> recent;
  // Characters mentioned anywhere earlier in the dialog.
  std::set<std::string> mentioned;
  // Characters already pronominalized in the current turn.
  std::set<std::string> pronominalized;
};

struct PronominalizeResult {
  DsyntTree tree;
  std::vector<std::string> replaced;  // character ids, in linear order
};

PronominalizeResult Pronominalize(const DsyntTree& tree, const SalienceContext& ctx,
                                  const std::vector<CharacterDecl>& characters, const MorphLexicon& morph);

// ---- Lexical choice ----

struct VocabularyPolicy {
  SynonymPolicy order = SynonymPolicy::kMaxFrequency;
  // Synonyms ranked above this are skipped (0 = no limit).
  int max_rank = 0;

  bool operator==(const VocabularyPolicy&) const = default;
};

struct Substitution {
  DsyntTree tree;
  std::optional<std::string> from;
  std::optional<std::string> to;
};

// Replaces at most one content word (adjective, non-copula verb, or noun not
// bound to a character). The word is drawn by rng; its replacement is the
// first candidate under the policy, rng breaking ties.
Substitution SubstituteSynonym(const DsyntTree& tree, const Lexicon& lexicon, const VocabularyPolicy& policy,
                               Rng& rng);

// ---- Pragmatic markers ----

enum class MarkerSlot { kInitial, kPreAdjective, kPreVerb, kFinal };

std::string_view ToString(MarkerSlot s);
std::optional<MarkerSlot> ParseMarkerSlot(std::string_view s);

struct MarkerSpec {
  std::string id;
  std::string surface;
  MarkerSlot slot = MarkerSlot::kInitial;
  // none | requires-adjective | requires-attributive-adjective |
  // requires-predicate-adjective | requires-declarative |
  // requires-verbal-root | requires-turn-initial
  std::string constraint = "none";
  std::string group;
  // comma | space | ellipsis
  std::string sep = "comma";
};

class MarkerInventory {
 public:
  // Throws std::runtime_error on duplicate ids, unknown slots/constraints or
  // a pre-adjective marker without an adjective constraint.
  static MarkerInventory FromJson(std::string_view document);
  static MarkerInventory Load(const std::filesystem::path& file);

  const MarkerSpec* find(std::string_view id) const;
  std::vector<const MarkerSpec*> group(std::string_view group_id) const;
  // Group ids in first-appearance order.
  std::vector<std::string> groups() const;
  const std::vector<MarkerSpec>& specs() const { return specs_; }

 private:
  std::vector<MarkerSpec> specs_;
};

struct MarkerContext {
  bool turn_initial = true;
  // Slots already filled in this sentence. At most two initial markers and
  // one marker in each other slot.
  std::vector<MarkerSlot> used_slots;
};

int SlotLimit(MarkerSlot slot);

struct ConstraintViolation {
  std::string constraint;
};

// Declarative: verbal root, not a question or imperative, no tag.
bool IsDeclarative(const DsyntTree& tree);

std::optional<ConstraintViolation> CheckMarker(const DsyntTree& tree, const MarkerSpec& spec,
                                               const MarkerContext& ctx = {});

std::variant<DsyntTree, ConstraintViolation> InsertMarker(const DsyntTree& tree, const MarkerSpec& spec,
                                                          const MarkerContext& ctx = {});

}  // namespace m2d

#endif  // M2D_TRANSFORMS_H_
