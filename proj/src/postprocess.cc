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

#include <array>
#include <cctype>
#include <sstream>
#include <utility>

#include "m2d/realizer.h"

namespace m2d {

namespace {

struct Contraction {
  std::string_view first;
  std::string_view second;
  std::string_view merged;
};

// Negations first so "it is not" becomes "it isn't" rather than "it's not".
constexpr std::array<Contraction, 19> kContractions = {{
    {"do", "not", "don't"},        {"does", "not", "doesn't"},   {"did", "not", "didn't"},
    {"is", "not", "isn't"},        {"are", "not", "aren't"},     {"was", "not", "wasn't"},
    {"were", "not", "weren't"},    {"has", "not", "hasn't"},     {"have", "not", "haven't"},
    {"had", "not", "hadn't"},      {"will", "not", "won't"},     {"would", "not", "wouldn't"},
    {"could", "not", "couldn't"},  {"should", "not", "shouldn't"}, {"can", "not", "can't"},
    {"it", "is", "it's"},          {"that", "is", "that's"},     {"there", "is", "there's"},
    {"what", "is", "what's"},
}};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsUpper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

bool IsWord(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Splits "deck." into ("deck", ".").
std::pair<std::string, std::string> SplitTrailingPunct(const std::string& tok) {
  std::size_t end = tok.size();
  while (end > 0 && std::ispunct(static_cast<unsigned char>(tok[end - 1])) && tok[end - 1] != '\'') --end;
  return {tok.substr(0, end), tok.substr(end)};
}

std::vector<std::string> Tokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void ApplyContractions(std::vector<std::string>& toks) {
  for (const Contraction& c : kContractions) {
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (Lower(toks[i]) != c.first) continue;
      auto [second, trail] = SplitTrailingPunct(toks[i + 1]);
      if (second != c.second) continue;
      std::string merged(c.merged);
      if (IsUpper(toks[i][0])) merged[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(merged[0])));
      toks[i] = merged + trail;
      toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }
}

// "the railing of the deck" -> "the deck's railing"; "the water of Benjamin"
// -> "Benjamin's water".
void FoldPossessives(std::vector<std::string>& toks) {
  for (std::size_t i = 0; i + 3 < toks.size(); ++i) {
    if (Lower(toks[i]) != "the" || !IsWord(toks[i + 1]) || toks[i + 2] != "of") continue;
    bool capital_the = IsUpper(toks[i][0]);
    std::string owner;
    std::string trail;
    std::size_t consumed;
    if (toks[i + 3] == "the" && i + 4 < toks.size()) {
      auto [word, punct] = SplitTrailingPunct(toks[i + 4]);
      if (!IsWord(word)) continue;
      owner = "the " + word;
      trail = punct;
      consumed = 5;
    } else {
      auto [word, punct] = SplitTrailingPunct(toks[i + 3]);
      if (!IsWord(word) || !IsUpper(word[0])) continue;
      owner = word;
      trail = punct;
      consumed = 4;
    }
    std::string poss = owner.back() == 's' ? owner + "'" : owner + "'s";
    if (capital_the && poss[0] == 't') poss[0] = 'T';
    std::string head = toks[i + 1] + trail;
    std::vector<std::string> repl;
    std::istringstream in(poss);
    std::string w;
    while (in >> w) repl.push_back(w);
    repl.push_back(head);
    toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(i),
               toks.begin() + static_cast<std::ptrdiff_t>(i + consumed));
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(i), repl.begin(), repl.end());
  }
}

void FixIndefiniteArticles(std::vector<std::string>& toks) {
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i] != "a" && toks[i] != "A") continue;
    char next = static_cast<char>(std::tolower(static_cast<unsigned char>(toks[i + 1][0])));
    if (std::string_view("aeiou").find(next) != std::string_view::npos) toks[i] += "n";
  }
}

bool IsTerminal(char c) { return c == '.' || c == '?' || c == '!'; }

}  // namespace

std::string Postprocess(std::string_view text) {
  std::vector<std::string> toks = Tokens(text);
  if (toks.empty()) return {};
  // Detached punctuation (" ," / " ?") rejoins the previous token.
  std::vector<std::string> joined;
  for (std::string& t : toks) {
    bool detached = (t == "," || t == "." || t == "?" || t == "!") && !joined.empty();
    if (detached) {
      joined.back() += t;
    } else {
      joined.push_back(std::move(t));
    }
  }
  toks = std::move(joined);
  ApplyContractions(toks);
  FoldPossessives(toks);
  FixIndefiniteArticles(toks);

  std::string out;
  for (const std::string& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  for (char& c : out) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  bool trailing_dash = out.size() >= 3 && (out.ends_with("---") || out.ends_with("—"));
  bool ellipsis = out.ends_with("...");
  if (!trailing_dash && !ellipsis) {
    // Collapse "?." style doubles to the first mark.
    std::size_t end = out.size();
    while (end > 0 && IsTerminal(out[end - 1])) --end;
    if (end == out.size()) {
      out += '.';
    } else {
      out = out.substr(0, end + 1);
    }
  }
  return out;
}

}  // namespace m2d
