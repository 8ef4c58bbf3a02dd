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

#include <algorithm>
#include <cctype>
#include <set>

#include "m2d/realizer.h"

namespace m2d {

namespace {

bool IsWhLexeme(std::string_view s) {
  return s == "how" || s == "where" || s == "when" || s == "why" || s == "who" || s == "what";
}

struct Agreement {
  int person = 3;
  Number number = Number::kSg;
};

// Word sequence; punctuation tokens attach to the preceding word.
class Words {
 public:
  void Add(std::string w) {
    if (!w.empty()) items_.push_back(std::move(w));
  }
  void Append(const Words& other) { items_.insert(items_.end(), other.items_.begin(), other.items_.end()); }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  std::string& operator[](std::size_t i) { return items_[i]; }

  std::string Join() const {
    std::string out;
    for (const std::string& w : items_) {
      bool attach = w == "," || w == "." || w == "?" || w == "!";
      if (!out.empty() && !attach) out += ' ';
      out += w;
    }
    return out;
  }

 private:
  std::vector<std::string> items_;
};

enum class ClauseMode { kMain, kSubordinate, kInfinitive, kVpConjunct };

class SentenceRealizer {
 public:
  SentenceRealizer(const MorphLexicon& lexicon, const std::vector<CharacterDecl>& characters,
                   const RealizerOptions& options)
      : lexicon_(lexicon), characters_(characters), options_(options) {}

  RealizedSentence Run(const DsyntTree& tree) {
    Words words;
    Phrase(tree, Case::kNominative, ClauseMode::kMain, words);
    if (words.empty()) throw RealizationError(tree.lexeme, "empty realization");
    std::string text = words.Join();
    for (char& c : text) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        break;
      }
    }
    std::string punct = tree.feature("punct");
    if (punct.empty()) punct = tree.has("mood", "quest") ? "question" : "period";
    if (punct == "question") {
      text += "?";
    } else if (punct == "exclaim") {
      text += "!";
    } else if (punct == "trail") {
      text += options_.em_dash ? " —" : " ---";
    } else {
      text += ".";
    }
    return RealizedSentence{text, ""};
  }

 private:
  const CharacterDecl* Character(const std::optional<std::string>& id) const {
    if (!id) return nullptr;
    for (const CharacterDecl& c : characters_) {
      if (c.id == *id) return &c;
    }
    return nullptr;
  }
  const CharacterDecl* Character(const std::string& id) const {
    return id.empty() ? nullptr : Character(std::optional<std::string>(id));
  }

  // Sentence-level parentheticals (markers, tags) carry a position feature.
  void Appends(const Node& node, bool initial, Words& out) {
    for (const Edge& e : node.children) {
      if (e.rel != Relation::kAppend) continue;
      bool is_initial = e.node.has("position", "initial");
      if (is_initial != initial) continue;
      std::string sep = e.node.feature("sep");
      if (sep.empty()) sep = "comma";
      Words marker;
      if (e.node.has("form", "tag")) {
        TagClause(e.node, marker);
      } else {
        Phrase(e.node, Case::kNominative, ClauseMode::kSubordinate, marker);
      }
      if (initial) {
        out.Append(marker);
        if (sep == "comma") out.Add(",");
        if (sep == "ellipsis") out.Add("...");
      } else {
        if (sep == "comma") out.Add(",");
        if (sep == "ellipsis") out.Add("...");
        out.Append(marker);
      }
    }
  }

  void Phrase(const Node& node, Case c, ClauseMode mode, Words& out) {
    Appends(node, true, out);
    switch (node.word_class) {
      case WordClass::kVerb:
        Clause(node, mode, out);
        break;
      case WordClass::kNoun:
        NounPhrase(node, c, out);
        break;
      case WordClass::kPronoun:
        PronounPhrase(node, c, out);
        break;
      case WordClass::kAdjective:
      case WordClass::kAdverb:
      case WordClass::kNumeral:
        ModifierPhrase(node, out);
        break;
      case WordClass::kPreposition:
        PrepPhrase(node, out);
        break;
      case WordClass::kConjunction:
        ConjPhrase(node, out);
        break;
    }
    Appends(node, false, out);
  }

  Agreement SubjectAgreement(const Node* subject) const {
    Agreement a;
    if (!subject) return a;
    if (subject->child(Relation::kCoord)) {
      a.number = Number::kPl;
      return a;
    }
    if (subject->word_class == WordClass::kPronoun) {
      if (const PronounForms* p = FindPronoun(subject->lexeme)) {
        a.person = p->person;
        a.number = p->number;
        return a;
      }
    }
    if (subject->has("number", "pl")) {
      a.number = Number::kPl;
    } else if (subject->has("number", "sg")) {
      a.number = Number::kSg;
    } else if (const CharacterDecl* ch = Character(subject->ref)) {
      a.number = ch->number;
    }
    if (subject->has("person", "1")) a.person = 1;
    if (subject->has("person", "2")) a.person = 2;
    return a;
  }

  const PronounForms* FindPronoun(const std::string& form) const {
    if (const PronounForms* p = lexicon_.pronoun(form)) return p;
    return lexicon_.pronoun(Lower(form));
  }

  static std::string Lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  std::string BeForm(const std::string& tense, Agreement a) const {
    if (tense == "present") {
      if (a.person == 1 && a.number == Number::kSg) return "am";
      return (a.number == Number::kSg && a.person == 3) ? "is" : "are";
    }
    bool were = a.number == Number::kPl || a.person == 2;
    return were ? "were" : "was";
  }

  std::string DoForm(const std::string& tense, Agreement a) const {
    if (tense == "present") return (a.person == 3 && a.number == Number::kSg) ? "does" : "do";
    return "did";
  }

  std::string Tense(const Node& verb) const {
    std::string t = verb.feature("tense");
    return t.empty() ? "past" : t;
  }

  // Finite verb group: auxiliaries, negation and the inflected verb.
  void VerbGroup(const Node& verb, Agreement a, Words& out) {
    std::string tense = Tense(verb);
    bool neg = verb.has("polarity", "neg");
    bool be = verb.lexeme == "be";
    if (verb.has("mood", "imper")) {
      if (neg) {
        out.Add("do");
        out.Add("not");
      }
      out.Add(verb.lexeme);
      return;
    }
    if (tense == "future") {
      out.Add("will");
      if (neg) out.Add("not");
      out.Add(verb.lexeme);
      return;
    }
    if (be) {
      out.Add(BeForm(tense, a));
      if (neg) out.Add("not");
      return;
    }
    if (neg) {
      out.Add(DoForm(tense, a));
      out.Add("not");
      out.Add(verb.lexeme);
      return;
    }
    std::map<std::string, std::string> feats = {{"tense", tense},
                                                {"person", std::to_string(a.person)},
                                                {"number", std::string(ToString(a.number))}};
    out.Add(Inflect(verb.lexeme, WordClass::kVerb, feats, lexicon_));
  }

  static bool IsAdverbAttr(const Edge& e) {
    return e.rel == Relation::kAttr && e.node.word_class == WordClass::kAdverb;
  }

  // Objects, non-adverbial modifiers and further conjuncts of a verb.
  void VerbTail(const Node& verb, bool skip_wh, Words& out) {
    for (const Edge& e : verb.children) {
      if (e.rel == Relation::kIII) Phrase(e.node, Case::kAccusative, ClauseMode::kSubordinate, out);
    }
    for (const Edge& e : verb.children) {
      if (e.rel != Relation::kII) continue;
      if (skip_wh && IsWhWord(e.node)) continue;
      ClauseMode mode = e.node.has("form", "inf") ? ClauseMode::kInfinitive : ClauseMode::kSubordinate;
      Phrase(e.node, Case::kAccusative, mode, out);
    }
    for (const Edge& e : verb.children) {
      if (e.rel == Relation::kAttr && !IsAdverbAttr(e)) {
        ClauseMode mode = e.node.has("form", "inf") ? ClauseMode::kInfinitive : ClauseMode::kSubordinate;
        Phrase(e.node, Case::kAccusative, mode, out);
      }
    }
    Conjuncts(verb, out);
  }

  void Conjuncts(const Node& head, Words& out) {
    std::vector<const Node*> conjuncts;
    for (const Edge& e : head.children) {
      if (e.rel == Relation::kCoord) conjuncts.push_back(&e.node);
    }
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      const Node& conj = *conjuncts[i];
      bool last = i + 1 == conjuncts.size();
      bool list_comma = !options_.comma_free_coordination && conjuncts.size() > 1;
      if (conj.has("sep", "comma") || (list_comma && !last)) out.Add(",");
      if (last) out.Add("and");
      Words part;
      if (conj.word_class == WordClass::kVerb) {
        ClauseMode mode = conj.child(Relation::kI) ? ClauseMode::kSubordinate : ClauseMode::kVpConjunct;
        if (conj.has("form", "inf")) mode = ClauseMode::kInfinitive;
        Clause(conj, mode, part);
      } else {
        Node copy = conj;
        copy.features.erase("sep");
        Phrase(copy, Case::kAccusative, ClauseMode::kSubordinate, part);
      }
      out.Append(part);
    }
  }

  void Clause(const Node& verb, ClauseMode mode, Words& out) {
    if (verb.has("form", "tag")) {
      TagClause(verb, out);
      return;
    }
    const Node* subject = verb.child(Relation::kI);
    bool be = verb.lexeme == "be";
    if (mode == ClauseMode::kInfinitive || verb.has("form", "inf")) {
      if (subject) {
        out.Add("for");
        Phrase(*subject, Case::kAccusative, ClauseMode::kSubordinate, out);
      }
      for (const Edge& e : verb.children) {
        if (IsAdverbAttr(e)) Phrase(e.node, Case::kNominative, ClauseMode::kSubordinate, out);
      }
      if (verb.has("polarity", "neg")) out.Add("not");
      out.Add("to");
      out.Add(verb.lexeme);
      VerbTail(verb, false, out);
      return;
    }
    if (!subject && mode != ClauseMode::kVpConjunct && !verb.has("mood", "imper")) {
      throw RealizationError(verb.lexeme, "finite verb has no subject (I)");
    }
    Agreement agr = SubjectAgreement(subject);
    const Node* obj = verb.child(Relation::kII);
    bool fronted_wh = be && verb.has("mood", "quest") && obj && IsWhWord(*obj) && subject;
    if (fronted_wh) {
      // "How was the garden?"
      out.Add(obj->lexeme);
      VerbGroup(verb, agr, out);
      Phrase(*subject, Case::kNominative, ClauseMode::kSubordinate, out);
      VerbTail(verb, true, out);
      return;
    }
    if (subject && mode != ClauseMode::kVpConjunct) {
      Phrase(*subject, Case::kNominative, ClauseMode::kSubordinate, out);
    }
    if (!be) {
      for (const Edge& e : verb.children) {
        if (IsAdverbAttr(e)) Phrase(e.node, Case::kNominative, ClauseMode::kSubordinate, out);
      }
    }
    VerbGroup(verb, agr, out);
    if (be) {
      for (const Edge& e : verb.children) {
        if (IsAdverbAttr(e)) Phrase(e.node, Case::kNominative, ClauseMode::kSubordinate, out);
      }
    }
    VerbTail(verb, false, out);
  }

  // Inverted auxiliary + pronoun: "was not it" (contracted later).
  void TagClause(const Node& tag, Words& out) {
    const Node* pron = tag.child(Relation::kI);
    Agreement agr = SubjectAgreement(pron);
    std::string tense = Tense(tag);
    if (tense == "future") {
      out.Add("will");
    } else if (tag.lexeme == "be") {
      out.Add(BeForm(tense, agr));
    } else {
      out.Add(DoForm(tense, agr));
    }
    if (tag.has("polarity", "neg")) out.Add("not");
    if (pron) Phrase(*pron, Case::kNominative, ClauseMode::kSubordinate, out);
  }

  std::string PossessorDeterminer(const Node& noun) {
    const CharacterDecl* owner = Character(noun.feature("possessor"));
    if (!owner) return {};
    if (noun.has("possessor_pro", "yes")) {
      int person = 3;
      return lexicon_.pronoun_for(person, owner->number, owner->gender).possessive;
    }
    std::string name = CharacterPhrase(*owner);
    if (owner->number == Number::kPl && !name.empty() && name.back() == 's') return name + "'";
    return name + "'s";
  }

  std::string CharacterPhrase(const CharacterDecl& ch) const {
    std::map<std::string, std::string> feats = {{"number", std::string(ToString(ch.number))}};
    std::string head = ch.proper ? ch.lexeme : Inflect(ch.lexeme, WordClass::kNoun, feats, lexicon_);
    return ch.proper ? head : "the " + head;
  }

  void NounPhrase(const Node& noun, Case c, Words& out) {
    const CharacterDecl* ch = Character(noun.ref);
    bool proper = ch && ch->proper;
    Words np;
    bool analytic = false;
    std::string article = noun.feature("article");
    if (!noun.feature("possessor").empty()) {
      if (options_.analytic_possessives && !noun.has("possessor_pro", "yes")) {
        analytic = true;
        np.Add("the");
      } else {
        np.Add(PossessorDeterminer(noun));
      }
    } else if (!proper) {
      if (article.empty() || article == "def") {
        np.Add("the");
      } else if (article == "indef" && !noun.has("number", "pl")) {
        np.Add("a");
      }
    }
    for (const Edge& e : noun.children) {
      if (e.rel == Relation::kAttr && (e.node.word_class == WordClass::kAdjective ||
                                       e.node.word_class == WordClass::kNumeral ||
                                       e.node.word_class == WordClass::kAdverb)) {
        Phrase(e.node, Case::kNominative, ClauseMode::kSubordinate, np);
      }
    }
    std::map<std::string, std::string> feats = noun.features;
    if (!feats.count("number") && ch) feats["number"] = std::string(ToString(ch->number));
    np.Add(proper ? noun.lexeme : Inflect(noun.lexeme, WordClass::kNoun, feats, lexicon_));
    if (analytic) {
      np.Add("of");
      np.Add(CharacterPhrase(*Character(noun.feature("possessor"))));
    }
    if (np.size() >= 2 && np[0] == "a") {
      char first = static_cast<char>(std::tolower(static_cast<unsigned char>(np[1][0])));
      if (std::string_view("aeiou").find(first) != std::string_view::npos) np[0] = "an";
    }
    if (c == Case::kPossessive) np[np.size() - 1] += "'s";
    for (const Edge& e : noun.children) {
      if (e.rel == Relation::kAttr && e.node.word_class != WordClass::kAdjective &&
          e.node.word_class != WordClass::kNumeral && e.node.word_class != WordClass::kAdverb) {
        Phrase(e.node, Case::kAccusative, ClauseMode::kSubordinate, np);
      }
    }
    Conjuncts(noun, np);
    out.Append(np);
  }

  void PronounPhrase(const Node& pron, Case c, Words& out) {
    const PronounForms* p = FindPronoun(pron.lexeme);
    if (!p) {
      out.Add(pron.lexeme);
    } else if (c == Case::kNominative) {
      out.Add(p->nominative);
    } else if (c == Case::kAccusative) {
      out.Add(p->accusative);
    } else {
      out.Add(p->possessive);
    }
    for (const Edge& e : pron.children) {
      if (e.rel == Relation::kAttr) Phrase(e.node, Case::kAccusative, ClauseMode::kSubordinate, out);
    }
    Conjuncts(pron, out);
  }

  // Adjectives, adverbs and numerals: adverbial pre-modifiers, negation, head.
  void ModifierPhrase(const Node& node, Words& out) {
    for (const Edge& e : node.children) {
      if (e.rel == Relation::kAttr && e.node.word_class == WordClass::kAdverb) {
        Phrase(e.node, Case::kNominative, ClauseMode::kSubordinate, out);
      }
    }
    if (node.has("polarity", "neg")) out.Add("not");
    out.Add(node.lexeme);
    for (const Edge& e : node.children) {
      if ((e.rel == Relation::kAttr && e.node.word_class != WordClass::kAdverb) || e.rel == Relation::kII) {
        Phrase(e.node, Case::kAccusative, ClauseMode::kSubordinate, out);
      }
    }
    Conjuncts(node, out);
  }

  void PrepPhrase(const Node& prep, Words& out) {
    out.Add(prep.lexeme);
    for (const Edge& e : prep.children) {
      if (e.rel == Relation::kII || e.rel == Relation::kAttr) {
        Phrase(e.node, Case::kAccusative, ClauseMode::kSubordinate, out);
      }
    }
    Conjuncts(prep, out);
  }

  void ConjPhrase(const Node& conj, Words& out) {
    out.Add(conj.lexeme);
    for (const Edge& e : conj.children) {
      if (e.rel != Relation::kII && e.rel != Relation::kAttr) continue;
      ClauseMode mode = e.node.has("form", "inf") ? ClauseMode::kInfinitive : ClauseMode::kSubordinate;
      Phrase(e.node, Case::kNominative, mode, out);
    }
  }

  const MorphLexicon& lexicon_;
  const std::vector<CharacterDecl>& characters_;
  const RealizerOptions& options_;
};

}  // namespace

bool IsWhWord(const Node& node) {
  return (node.word_class == WordClass::kAdverb || node.word_class == WordClass::kPronoun) &&
         IsWhLexeme(node.lexeme);
}

RealizedSentence Realize(const DsyntTree& tree, const MorphLexicon& lexicon,
                         const std::vector<CharacterDecl>& characters,
                         const RealizerOptions& options) {
  SentenceRealizer r(lexicon, characters, options);
  return r.Run(tree);
}

}  // namespace m2d
