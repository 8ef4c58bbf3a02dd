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

#ifndef M2D_STORY_STATE_H_
#define M2D_STORY_STATE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "m2d/dsynts.h"

namespace m2d {

struct SynonymEntry {
  std::string word;
  int freq_rank = 0;  // 1 = most frequent
  int length = 0;

  bool operator==(const SynonymEntry&) const = default;
};

enum class SynonymPolicy { kAny, kMaxFrequency, kMinLength, kMaxLength };

std::string_view ToString(SynonymPolicy p);
std::optional<SynonymPolicy> ParseSynonymPolicy(std::string_view s);

// Antonym pairs, synonym lists and the closed list of body-part nouns.
class Lexicon {
 public:
  // Throws std::runtime_error when a word has two different antonyms, is its
  // own antonym or lists itself as a synonym.
  static Lexicon FromJson(std::string_view document);
  static Lexicon Load(const std::filesystem::path& file);

  std::optional<std::string> antonym_of(std::string_view adjective) const;
  // Ordered per policy: file order, ascending frequency rank, ascending
  // length, descending length. Ties keep the lower frequency rank first.
  std::vector<SynonymEntry> synonyms_of(std::string_view lexeme, SynonymPolicy policy) const;
  bool is_body_part(std::string_view noun) const;

  const std::map<std::string, std::string, std::less<>>& antonyms() const { return antonyms_; }
  const std::map<std::string, std::vector<SynonymEntry>, std::less<>>& synonyms() const { return synonyms_; }

 private:
  std::map<std::string, std::string, std::less<>> antonyms_;
  std::map<std::string, std::vector<SynonymEntry>, std::less<>> synonyms_;
  std::set<std::string, std::less<>> body_parts_;
};

struct StateAssertion {
  std::string adjective;
  std::size_t sentence = 0;
  bool affirmed = true;
};

struct ActorRecord {
  std::string id;
  // Current states in first-assertion order, each with the sentence index of
  // its latest assertion.
  std::vector<std::pair<std::string, std::size_t>> states;
  std::set<std::string> possessions;
  std::set<std::string> body_parts;
  std::vector<std::size_t> mentions;
  // Every assertion, including negated ones, in story order.
  std::vector<StateAssertion> history;

  // States holding after sentence `position` (inclusive).
  std::vector<std::pair<std::string, std::size_t>> StatesAt(std::size_t position) const;
};

struct SalientReferent {
  std::string id;
  Gender gender = Gender::kNeut;
  Number number = Number::kSg;

  bool operator==(const SalientReferent&) const = default;
};

// Character ids mentioned in `tree`, pre-order, first occurrence only. Both
// ref'd nodes and possessor features count.
std::vector<std::string> MentionedCharacters(const DsyntTree& tree);

class StoryDatabase {
 public:
  static StoryDatabase Build(const Story& story, const Lexicon& lexicon);

  const ActorRecord* record(std::string_view id) const;
  const std::map<std::string, ActorRecord, std::less<>>& records() const { return records_; }
  const Lexicon& lexicon() const { return *lexicon_; }
  const Story& story() const { return *story_; }

  std::optional<std::string> antonym_of(std::string_view adjective) const { return lexicon_->antonym_of(adjective); }
  std::vector<SynonymEntry> synonyms_of(std::string_view lexeme, SynonymPolicy policy) const {
    return lexicon_->synonyms_of(lexeme, policy);
  }

  // Characters mentioned in sentences [position - window, position), most
  // recent first; within one sentence, document order.
  std::vector<SalientReferent> salient_referents(std::size_t position, std::size_t window) const;

 private:
  const Story* story_ = nullptr;
  const Lexicon* lexicon_ = nullptr;
  std::map<std::string, ActorRecord, std::less<>> records_;
  std::vector<std::vector<std::string>> sentence_mentions_;
};

}  // namespace m2d

#endif  // M2D_STORY_STATE_H_
