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

#ifndef M2D_DSYNTS_H_
#define M2D_DSYNTS_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace m2d {

// Deep-syntactic structure (DSyntS) trees: one tree per sentence, nodes carry
// base-form lexemes plus grammatical features; edges carry the dependency
// relation (I = subject, II = object/complement, III = indirect object,
// ATTR = modifier, APPEND = parenthetical, COORD = further conjunct).

enum class WordClass {
  kVerb,
  kNoun,
  kAdjective,
  kAdverb,
  kPreposition,
  kConjunction,
  kPronoun,
  kNumeral,
};

enum class Relation { kI, kII, kIII, kAttr, kAppend, kCoord };

std::string_view ToString(WordClass c);
std::string_view ToString(Relation r);
std::optional<WordClass> ParseWordClass(std::string_view s);
std::optional<Relation> ParseRelation(std::string_view s);

struct Edge;

struct Node {
  std::string lexeme;
  WordClass word_class = WordClass::kNoun;
  std::map<std::string, std::string> features;
  std::optional<std::string> ref;
  std::vector<Edge> children;

  // Empty string when absent.
  const std::string& feature(const std::string& key) const;
  bool has(const std::string& key, std::string_view value) const;
  void set(const std::string& key, std::string value) {
    features[key] = std::move(value);
  }

  // First child with `rel`, or nullptr.
  const Node* child(Relation rel) const;
  Node* child(Relation rel);

  bool operator==(const Node& other) const;
};

struct Edge {
  Relation rel = Relation::kAttr;
  Node node;

  bool operator==(const Edge& other) const {
    return rel == other.rel && node == other.node;
  }
};

using DsyntTree = Node;

enum class Gender { kMasc, kFem, kNeut };
enum class Number { kSg, kPl };

std::string_view ToString(Gender g);
std::string_view ToString(Number n);

struct CharacterDecl {
  std::string id;
  std::string lexeme;
  Gender gender = Gender::kNeut;
  Number number = Number::kSg;
  bool proper = false;

  bool operator==(const CharacterDecl&) const = default;
};

struct Story {
  std::string title;
  std::vector<CharacterDecl> characters;
  std::vector<DsyntTree> sentences;

  const CharacterDecl* character(std::string_view id) const;
  bool operator==(const Story&) const = default;
};

// Sequence of child indices from the root.
struct NodePath {
  std::vector<std::size_t> steps;

  bool empty() const { return steps.empty(); }
  bool IsAncestorOf(const NodePath& other) const;
  std::string ToString() const;
  auto operator<=>(const NodePath&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& reason)
      : std::runtime_error(where + ": " + reason), where_(where), reason_(reason) {}
  const std::string& where() const { return where_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string where_;
  std::string reason_;
};

class InvalidPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  NodePath path;
  std::string rule;  // e.g. "duplicate-subject"
  std::string message;
};

struct ParseOptions {
  // Unknown object keys are errors when strict, warnings otherwise.
  bool strict = true;
  // Reject trees that fail ValidateTree. Off only for diagnostic listings.
  bool validate = true;
};

struct ParseResult {
  Story story;
  std::vector<std::string> warnings;
};

ParseResult ParseStory(std::string_view document, const ParseOptions& options = {});
std::string SerializeStory(const Story& story);

// Node-level JSON (used by traces and tests).
std::string SerializeTree(const DsyntTree& tree);

// Checks the node invariants. `characters` enables the unknown-ref rule.
std::vector<Diagnostic> ValidateTree(const DsyntTree& tree,
                                     const std::vector<CharacterDecl>* characters = nullptr);

using NodePredicate = std::function<bool(const Node&)>;

// Depth-first pre-order.
std::vector<NodePath> FindNodes(const DsyntTree& tree, const NodePredicate& predicate);

const Node& Resolve(const DsyntTree& tree, const NodePath& path);
Node& Resolve(DsyntTree& tree, const NodePath& path);
// Relation of the edge leading to `path`; throws InvalidPath for the root.
Relation RelationAt(const DsyntTree& tree, const NodePath& path);

// Returns a copy without the addressed subtrees. Paths must not nest and must
// not address the root.
DsyntTree Prune(const DsyntTree& tree, const std::vector<NodePath>& paths);

std::size_t CountNodes(const Node& node);

// Visits every node in pre-order.
void ForEachNode(const Node& node, const std::function<void(const Node&)>& fn);

}  // namespace m2d

#endif  // M2D_DSYNTS_H_
