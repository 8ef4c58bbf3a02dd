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

#include "m2d/story_state.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace m2d {

using json = nlohmann::json;

namespace {

void Mentions(const Node& node, std::vector<std::string>& out) {
  auto add = [&](const std::string& id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  if (node.ref) add(*node.ref);
  if (!node.feature("possessor").empty()) add(node.feature("possessor"));
  for (const Edge& e : node.children) Mentions(e.node, out);
}

// Predicate adjectives of a copula, following adjective coordination.
void PredicateAdjectives(const Node& adj, bool clause_neg, std::vector<std::pair<std::string, bool>>& out) {
  out.emplace_back(adj.lexeme, !(clause_neg || adj.has("polarity", "neg")));
  for (const Edge& e : adj.children) {
    if (e.rel == Relation::kCoord && e.node.word_class == WordClass::kAdjective) {
      PredicateAdjectives(e.node, clause_neg, out);
    }
  }
}

void CollectStates(const Node& node, std::size_t sentence, std::map<std::string, ActorRecord, std::less<>>& records) {
  auto assert_state = [&](const std::string& id, const std::string& adj, bool affirmed) {
    auto it = records.find(id);
    if (it == records.end()) return;
    it->second.history.push_back({adj, sentence, affirmed});
  };
  if (node.ref) {
    for (const Edge& e : node.children) {
      if (e.rel == Relation::kAttr && e.node.word_class == WordClass::kAdjective) {
        assert_state(*node.ref, e.node.lexeme, !e.node.has("polarity", "neg"));
      }
    }
  }
  // Subject modifiers precede the predicate in linear order.
  const Node* subj = node.child(Relation::kI);
  if (subj) CollectStates(*subj, sentence, records);
  if (node.word_class == WordClass::kVerb && node.lexeme == "be") {
    const Node* pred = node.child(Relation::kII);
    if (subj && subj->ref && pred && pred->word_class == WordClass::kAdjective) {
      std::vector<std::pair<std::string, bool>> adjs;
      PredicateAdjectives(*pred, node.has("polarity", "neg"), adjs);
      for (const auto& [adj, affirmed] : adjs) assert_state(*subj->ref, adj, affirmed);
    }
  }
  for (const Edge& e : node.children) {
    if (e.rel != Relation::kI) CollectStates(e.node, sentence, records);
  }
}

void CollectPossessions(const Node& node, const Lexicon& lexicon,
                        std::map<std::string, ActorRecord, std::less<>>& records) {
  const std::string& owner = node.feature("possessor");
  if (!owner.empty()) {
    auto it = records.find(owner);
    if (it != records.end()) {
      if (lexicon.is_body_part(node.lexeme)) {
        it->second.body_parts.insert(node.lexeme);
      } else {
        it->second.possessions.insert(node.lexeme);
      }
    }
  }
  for (const Edge& e : node.children) CollectPossessions(e.node, lexicon, records);
}

std::vector<std::pair<std::string, std::size_t>> Replay(const std::vector<StateAssertion>& history,
                                                         std::size_t last) {
  std::vector<std::pair<std::string, std::size_t>> states;
  for (const StateAssertion& a : history) {
    if (a.sentence > last) break;
    auto it = std::find_if(states.begin(), states.end(), [&](const auto& s) { return s.first == a.adjective; });
    if (it != states.end() && a.affirmed) {
      it->second = a.sentence;
    } else if (it != states.end()) {
      states.erase(it);
    } else if (a.affirmed) {
      states.emplace_back(a.adjective, a.sentence);
    }
  }
  return states;
}

}  // namespace

std::string_view ToString(SynonymPolicy p) {
  switch (p) {
    case SynonymPolicy::kAny:
      return "any";
    case SynonymPolicy::kMaxFrequency:
      return "max-frequency";
    case SynonymPolicy::kMinLength:
      return "min-length";
    case SynonymPolicy::kMaxLength:
      return "max-length";
  }
  return "any";
}

std::optional<SynonymPolicy> ParseSynonymPolicy(std::string_view s) {
  for (SynonymPolicy p : {SynonymPolicy::kAny, SynonymPolicy::kMaxFrequency, SynonymPolicy::kMinLength,
                          SynonymPolicy::kMaxLength}) {
    if (ToString(p) == s) return p;
  }
  return std::nullopt;
}

Lexicon Lexicon::FromJson(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("lexicon: ") + e.what());
  }
  Lexicon lex;
  for (const json& pair : doc.value("antonyms", json::array())) {
    if (!pair.is_array() || pair.size() != 2) throw std::runtime_error("lexicon: antonym entries are pairs");
    std::string a = pair[0].get<std::string>(), b = pair[1].get<std::string>();
    if (a == b) throw std::runtime_error("lexicon: '" + a + "' is listed as its own antonym");
    for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      auto [it, inserted] = lex.antonyms_.emplace(x, y);
      if (!inserted && it->second != y) {
        throw std::runtime_error("lexicon: '" + x + "' has antonyms '" + it->second + "' and '" + y + "'");
      }
    }
  }
  const json synonyms = doc.value("synonyms", json::object());
  for (const auto& [word, entries] : synonyms.items()) {
    std::vector<SynonymEntry>& list = lex.synonyms_[word];
    for (const json& e : entries) {
      SynonymEntry s{e.at("word").get<std::string>(), e.at("freq_rank").get<int>(), 0};
      s.length = e.contains("len") ? e.at("len").get<int>() : static_cast<int>(s.word.size());
      if (s.word == word) throw std::runtime_error("lexicon: '" + word + "' is listed as its own synonym");
      list.push_back(std::move(s));
    }
  }
  for (const json& part : doc.value("body_parts", json::array())) lex.body_parts_.insert(part.get<std::string>());
  return lex;
}

Lexicon Lexicon::Load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open lexicon " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

std::optional<std::string> Lexicon::antonym_of(std::string_view adjective) const {
  auto it = antonyms_.find(adjective);
  if (it == antonyms_.end()) return std::nullopt;
  return it->second;
}

std::vector<SynonymEntry> Lexicon::synonyms_of(std::string_view lexeme, SynonymPolicy policy) const {
  auto it = synonyms_.find(lexeme);
  if (it == synonyms_.end()) return {};
  std::vector<SynonymEntry> out = it->second;
  auto by = [&](auto key) {
    std::stable_sort(out.begin(), out.end(), [&](const SynonymEntry& a, const SynonymEntry& b) {
      auto ka = key(a), kb = key(b);
      if (ka != kb) return ka < kb;
      return a.freq_rank < b.freq_rank;
    });
  };
  switch (policy) {
    case SynonymPolicy::kAny:
      break;
    case SynonymPolicy::kMaxFrequency:
      by([](const SynonymEntry& e) { return e.freq_rank; });
      break;
    case SynonymPolicy::kMinLength:
      by([](const SynonymEntry& e) { return e.length; });
      break;
    case SynonymPolicy::kMaxLength:
      by([](const SynonymEntry& e) { return -e.length; });
      break;
  }
  return out;
}

bool Lexicon::is_body_part(std::string_view noun) const { return body_parts_.count(noun) > 0; }

std::vector<std::pair<std::string, std::size_t>> ActorRecord::StatesAt(std::size_t position) const {
  return Replay(history, position);
}

std::vector<std::string> MentionedCharacters(const DsyntTree& tree) {
  std::vector<std::string> out;
  Mentions(tree, out);
  return out;
}

StoryDatabase StoryDatabase::Build(const Story& story, const Lexicon& lexicon) {
  StoryDatabase db;
  db.story_ = &story;
  db.lexicon_ = &lexicon;
  for (const CharacterDecl& c : story.characters) db.records_[c.id].id = c.id;
  for (std::size_t i = 0; i < story.sentences.size(); ++i) {
    const DsyntTree& tree = story.sentences[i];
    std::vector<std::string> mentioned = MentionedCharacters(tree);
    for (const std::string& id : mentioned) {
      auto it = db.records_.find(id);
      if (it != db.records_.end()) it->second.mentions.push_back(i);
    }
    db.sentence_mentions_.push_back(std::move(mentioned));
    CollectStates(tree, i, db.records_);
    CollectPossessions(tree, lexicon, db.records_);
  }
  for (auto& [id, rec] : db.records_) {
    rec.states = story.sentences.empty() ? decltype(rec.states){} : Replay(rec.history, story.sentences.size() - 1);
  }
  return db;
}

const ActorRecord* StoryDatabase::record(std::string_view id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<SalientReferent> StoryDatabase::salient_referents(std::size_t position, std::size_t window) const {
  std::vector<SalientReferent> out;
  std::size_t begin = position > window ? position - window : 0;
  for (std::size_t i = std::min(position, sentence_mentions_.size()); i-- > begin;) {
    for (const std::string& id : sentence_mentions_[i]) {
      bool seen = std::any_of(out.begin(), out.end(), [&](const SalientReferent& r) { return r.id == id; });
      const CharacterDecl* decl = story_->character(id);
      if (seen || !decl) continue;
      out.push_back({id, decl->gender, decl->number});
    }
  }
  return out;
}

}  // namespace m2d
