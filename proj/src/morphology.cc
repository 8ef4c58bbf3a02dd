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

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "m2d/realizer.h"

namespace m2d {

using json = nlohmann::json;

namespace {

bool IsVowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

int VowelGroups(std::string_view w) {
  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    bool v = IsVowel(c) || (c == 'y' && in_group);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

// plan -> planned, slip -> slipped; rain, leap, jump do not double.
bool DoublesFinalConsonant(std::string_view w) {
  if (w.size() < 3) return false;
  char last = w[w.size() - 1], mid = w[w.size() - 2], first = w[w.size() - 3];
  if (IsVowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
  return IsVowel(mid) && !IsVowel(first) && VowelGroups(w) == 1;
}

bool SibilantEnding(std::string_view w) {
  return EndsWith(w, "s") || EndsWith(w, "x") || EndsWith(w, "z") || EndsWith(w, "ch") ||
         EndsWith(w, "sh");
}

bool ConsonantY(std::string_view w) { return w.size() >= 2 && w.back() == 'y' && !IsVowel(w[w.size() - 2]); }

Number ParseNumber(const std::string& s) {
  if (s == "sg") return Number::kSg;
  if (s == "pl") return Number::kPl;
  throw std::runtime_error("morph lexicon: bad number '" + s + "'");
}

}  // namespace

std::string RegularPast(std::string_view v) {
  std::string w(v);
  if (EndsWith(w, "e")) return w + "d";
  if (ConsonantY(w)) return w.substr(0, w.size() - 1) + "ied";
  if (DoublesFinalConsonant(w)) return w + w.back() + "ed";
  return w + "ed";
}

std::string RegularThirdSingular(std::string_view v) {
  std::string w(v);
  if (ConsonantY(w)) return w.substr(0, w.size() - 1) + "ies";
  if (SibilantEnding(w) || EndsWith(w, "o")) return w + "es";
  return w + "s";
}

std::string RegularPlural(std::string_view n) {
  std::string w(n);
  if (ConsonantY(w)) return w.substr(0, w.size() - 1) + "ies";
  if (SibilantEnding(w)) return w + "es";
  return w + "s";
}

MorphLexicon MorphLexicon::FromJson(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("morph lexicon: ") + e.what());
  }
  MorphLexicon lex;
  for (const json& row : doc.value("irregular_verbs", json::array())) {
    if (!row.is_array() || row.size() != 4) {
      throw std::runtime_error("morph lexicon: irregular verb rows are [base, past, pp, 3sg]");
    }
    std::string base = row[0].get<std::string>();
    if (!lex.verbs_.emplace(base, VerbForms{row[1], row[2], row[3]}).second) {
      throw std::runtime_error("morph lexicon: duplicate irregular verb '" + base + "'");
    }
  }
  for (const json& row : doc.value("irregular_plurals", json::array())) {
    if (!row.is_array() || row.size() != 2) {
      throw std::runtime_error("morph lexicon: irregular plural rows are [singular, plural]");
    }
    std::string base = row[0].get<std::string>();
    if (!lex.plurals_.emplace(base, row[1].get<std::string>()).second) {
      throw std::runtime_error("morph lexicon: duplicate irregular plural '" + base + "'");
    }
  }
  for (const json& row : doc.value("pronouns", json::array())) {
    PronounForms p;
    p.nominative = row.at("nom").get<std::string>();
    p.accusative = row.at("acc").get<std::string>();
    p.possessive = row.at("gen").get<std::string>();
    p.person = row.at("person").get<int>();
    p.number = ParseNumber(row.at("number").get<std::string>());
    if (row.contains("gender")) {
      std::string g = row.at("gender").get<std::string>();
      p.gender = g == "masc" ? Gender::kMasc : g == "fem" ? Gender::kFem : Gender::kNeut;
    }
    lex.pronouns_.push_back(p);
  }
  // The paradigm must be total over person x number (x gender for 3sg).
  for (int person = 1; person <= 3; ++person) {
    for (Number n : {Number::kSg, Number::kPl}) {
      for (Gender g : {Gender::kMasc, Gender::kFem, Gender::kNeut}) {
        bool found = false;
        for (const PronounForms& p : lex.pronouns_) {
          bool gender_ok = !(person == 3 && n == Number::kSg) || (p.gender && *p.gender == g);
          if (p.person == person && p.number == n && gender_ok) found = true;
        }
        if (!found) {
          throw std::runtime_error("morph lexicon: pronoun paradigm has no entry for person " +
                                   std::to_string(person) + " " + std::string(ToString(n)) + " " +
                                   std::string(ToString(g)));
        }
      }
    }
  }
  return lex;
}

MorphLexicon MorphLexicon::Load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open morph lexicon " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

const VerbForms* MorphLexicon::irregular_verb(std::string_view base) const {
  auto it = verbs_.find(base);
  return it == verbs_.end() ? nullptr : &it->second;
}

const std::string* MorphLexicon::irregular_plural(std::string_view singular) const {
  auto it = plurals_.find(singular);
  return it == plurals_.end() ? nullptr : &it->second;
}

const PronounForms* MorphLexicon::pronoun(std::string_view form) const {
  for (const PronounForms& p : pronouns_) {
    if (p.nominative == form) return &p;
  }
  for (const PronounForms& p : pronouns_) {
    if (p.accusative == form || p.possessive == form) return &p;
  }
  return nullptr;
}

const PronounForms& MorphLexicon::pronoun_for(int person, Number number, Gender gender) const {
  for (const PronounForms& p : pronouns_) {
    if (p.person != person || p.number != number) continue;
    if (person == 3 && number == Number::kSg && (!p.gender || *p.gender != gender)) continue;
    return p;
  }
  throw std::logic_error("pronoun paradigm is incomplete");
}

std::string Inflect(std::string_view lexeme, WordClass word_class,
                    const std::map<std::string, std::string>& features,
                    const MorphLexicon& lexicon) {
  auto get = [&](const char* key) -> std::string {
    auto it = features.find(key);
    return it == features.end() ? std::string() : it->second;
  };
  switch (word_class) {
    case WordClass::kVerb: {
      std::string tense = get("tense");
      const VerbForms* irr = lexicon.irregular_verb(lexeme);
      if (tense == "past") return irr ? irr->past : RegularPast(lexeme);
      if (tense == "present") {
        std::string person = get("person");
        bool third_sg = (person.empty() || person == "3") && get("number") != "pl";
        if (!third_sg) return std::string(lexeme);
        return irr ? irr->present_3sg : RegularThirdSingular(lexeme);
      }
      return std::string(lexeme);
    }
    case WordClass::kNoun: {
      if (get("number") != "pl") return std::string(lexeme);
      if (const std::string* irr = lexicon.irregular_plural(lexeme)) return *irr;
      return RegularPlural(lexeme);
    }
    default:
      return std::string(lexeme);
  }
}

}  // namespace m2d
