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

#ifndef M2D_REALIZER_H_
#define M2D_REALIZER_H_

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "m2d/dsynts.h"

namespace m2d {

struct VerbForms {
  std::string past;
  std::string past_participle;
  std::string present_3sg;
};

enum class Case { kNominative, kAccusative, kPossessive };

struct PronounForms {
  std::string nominative;
  std::string accusative;
  std::string possessive;
  int person = 3;
  Number number = Number::kSg;
  std::optional<Gender> gender;  // only for 3rd person singular
};

// Irregular morphology plus the personal-pronoun paradigm.
class MorphLexicon {
 public:
  // Throws std::runtime_error on malformed input, duplicate base forms or an
  // incomplete paradigm.
  static MorphLexicon FromJson(std::string_view document);
  static MorphLexicon Load(const std::filesystem::path& file);

  const VerbForms* irregular_verb(std::string_view base) const;
  const std::string* irregular_plural(std::string_view singular) const;
  // Looks up by any case form ("him" finds the he/him/his entry).
  const PronounForms* pronoun(std::string_view form) const;
  const PronounForms& pronoun_for(int person, Number number, Gender gender) const;

 private:
  std::map<std::string, VerbForms, std::less<>> verbs_;
  std::map<std::string, std::string, std::less<>> plurals_;
  std::vector<PronounForms> pronouns_;
};

// Regular rules unless the lexicon lists an irregular form. Verbs read
// "tense", "person" and "number"; nouns read "number".
std::string Inflect(std::string_view lexeme, WordClass word_class,
                    const std::map<std::string, std::string>& features,
                    const MorphLexicon& lexicon);

std::string RegularPast(std::string_view verb);
std::string RegularThirdSingular(std::string_view verb);
std::string RegularPlural(std::string_view noun);

struct RealizerOptions {
  // "the chards the lettuces and the spinach" (on) vs.
  // "the chards, the lettuces and the spinach" (off).
  bool comma_free_coordination = true;
  // Render possessors as "the railing of the deck" for postprocess to fold.
  bool analytic_possessives = false;
  // Truncation mark for interrupted sentences.
  bool em_dash = false;
};

struct RealizedSentence {
  std::string text;
  std::string source;  // provenance token, filled in by the caller
};

class RealizationError : public std::runtime_error {
 public:
  RealizationError(const std::string& lexeme, const std::string& reason)
      : std::runtime_error("cannot realize '" + lexeme + "': " + reason), lexeme_(lexeme) {}
  const std::string& lexeme() const { return lexeme_; }

 private:
  std::string lexeme_;
};

RealizedSentence Realize(const DsyntTree& tree, const MorphLexicon& lexicon,
                         const std::vector<CharacterDecl>& characters = {},
                         const RealizerOptions& options = {});

// Contractions, possessive folding, a/an and whitespace/capitalization repair.
// Idempotent.
std::string Postprocess(std::string_view text);

bool IsWhWord(const Node& node);

}  // namespace m2d

#endif  // M2D_REALIZER_H_
