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

#ifndef M2D_BUILDER_H_
#define M2D_BUILDER_H_

#include <string>
#include <utility>

#include "m2d/dsynts.h"

namespace m2d::build {

// Small fluent helpers for assembling trees in code:
//
//   Verb("run", "past").I(Noun("man")).Attr(Prep("to").II(Noun("store")))
//
class NodeBuilder {
 public:
  NodeBuilder(std::string lexeme, WordClass cls) {
    node_.lexeme = std::move(lexeme);
    node_.word_class = cls;
  }

  NodeBuilder& F(const std::string& key, std::string value) {
    node_.features[key] = std::move(value);
    return *this;
  }
  NodeBuilder& Ref(std::string id) {
    node_.ref = std::move(id);
    return *this;
  }
  NodeBuilder& Add(Relation rel, Node child) {
    node_.children.push_back(Edge{rel, std::move(child)});
    return *this;
  }
  NodeBuilder& I(Node child) { return Add(Relation::kI, std::move(child)); }
  NodeBuilder& II(Node child) { return Add(Relation::kII, std::move(child)); }
  NodeBuilder& III(Node child) { return Add(Relation::kIII, std::move(child)); }
  NodeBuilder& Attr(Node child) { return Add(Relation::kAttr, std::move(child)); }
  NodeBuilder& Append(Node child) { return Add(Relation::kAppend, std::move(child)); }
  NodeBuilder& Coord(Node child) { return Add(Relation::kCoord, std::move(child)); }

  NodeBuilder& Neg() { return F("polarity", "neg"); }
  NodeBuilder& Pl() { return F("number", "pl"); }
  NodeBuilder& Article(std::string a) { return F("article", std::move(a)); }

  Node node() const { return node_; }
  operator Node() const { return node_; }  // NOLINT(google-explicit-constructor)

 private:
  Node node_;
};

inline NodeBuilder Verb(std::string lexeme, std::string tense = "past") {
  NodeBuilder b(std::move(lexeme), WordClass::kVerb);
  b.F("tense", std::move(tense));
  return b;
}
inline NodeBuilder Inf(std::string lexeme) {
  NodeBuilder b(std::move(lexeme), WordClass::kVerb);
  b.F("form", "inf");
  return b;
}
inline NodeBuilder Noun(std::string lexeme, std::string article = "def") {
  NodeBuilder b(std::move(lexeme), WordClass::kNoun);
  b.F("article", std::move(article));
  return b;
}
inline NodeBuilder Adj(std::string lexeme) { return NodeBuilder(std::move(lexeme), WordClass::kAdjective); }
inline NodeBuilder Adv(std::string lexeme) { return NodeBuilder(std::move(lexeme), WordClass::kAdverb); }
inline NodeBuilder Prep(std::string lexeme) { return NodeBuilder(std::move(lexeme), WordClass::kPreposition); }
inline NodeBuilder Conj(std::string lexeme) { return NodeBuilder(std::move(lexeme), WordClass::kConjunction); }
inline NodeBuilder Pron(std::string lexeme) { return NodeBuilder(std::move(lexeme), WordClass::kPronoun); }

// Copula sentence "<subject> was <adjective>".
inline NodeBuilder Copula(Node subject, std::string adjective, std::string tense = "past") {
  return Verb("be", std::move(tense)).I(std::move(subject)).II(Adj(std::move(adjective)));
}

}  // namespace m2d::build

#endif  // M2D_BUILDER_H_
