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

#include "m2d/dsynts.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace m2d {

using json = nlohmann::json;

namespace {

constexpr std::string_view kClassNames[] = {"verb",        "noun",        "adjective",
                                            "adverb",      "preposition", "conjunction",
                                            "pronoun",     "numeral"};
constexpr std::string_view kRelationNames[] = {"I", "II", "III", "ATTR", "APPEND", "COORD"};

// Legal values per feature key. An empty set means "any non-empty string".
const std::map<std::string, std::set<std::string>>& FeatureTable() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"tense", {"past", "present", "future"}},
      {"number", {"sg", "pl"}},
      {"person", {"1", "2", "3"}},
      {"article", {"def", "indef", "none"}},
      {"polarity", {"affirm", "neg"}},
      {"mood", {"decl", "quest", "imper"}},
      {"possessor", {}},
      {"possessor_pro", {"yes", "no"}},
      {"punct", {"period", "question", "exclaim", "trail"}},
      {"form", {"finite", "inf", "tag"}},
      {"position", {"initial", "final"}},
      {"sep", {"comma", "space", "ellipsis", "none"}},
  };
  return table;
}

bool IsNominal(WordClass c) { return c == WordClass::kNoun || c == WordClass::kPronoun; }

// Byte offset -> "line L, column C" (both 1-based).
std::string LineColumn(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class StoryReader {
 public:
  StoryReader(const ParseOptions& options, std::vector<std::string>* warnings)
      : options_(options), warnings_(warnings) {}

  Story Read(const json& doc) {
    if (!doc.is_object()) throw ParseError("$", "top level must be an object");
    CheckKeys(doc, "$", {"title", "characters", "sentences"});
    Story story;
    story.title = RequireString(doc, "title", "$");
    if (doc.contains("characters")) {
      const json& chars = doc.at("characters");
      if (!chars.is_array()) throw ParseError("$.characters", "must be an array");
      std::set<std::string> seen;
      for (std::size_t i = 0; i < chars.size(); ++i) {
        std::string where = "$.characters[" + std::to_string(i) + "]";
        CharacterDecl decl = ReadCharacter(chars[i], where);
        if (!seen.insert(decl.id).second) {
          throw ParseError(where + ".id", "duplicate character id '" + decl.id + "'");
        }
        story.characters.push_back(std::move(decl));
      }
    }
    characters_ = &story.characters;
    if (!doc.contains("sentences") || !doc.at("sentences").is_array()) {
      throw ParseError("$.sentences", "missing sentence array");
    }
    const json& sents = doc.at("sentences");
    if (sents.empty()) throw ParseError("$.sentences", "story has no sentences");
    for (std::size_t i = 0; i < sents.size(); ++i) {
      std::string where = "$.sentences[" + std::to_string(i) + "]";
      story.sentences.push_back(ReadNode(sents[i], where));
    }
    for (std::size_t i = 0; options_.validate && i < story.sentences.size(); ++i) {
      auto diags = ValidateTree(story.sentences[i], &story.characters);
      if (!diags.empty()) {
        throw ParseError("$.sentences[" + std::to_string(i) + "] at " + diags[0].path.ToString(),
                         diags[0].rule + ": " + diags[0].message);
      }
    }
    return story;
  }

 private:
  void CheckKeys(const json& obj, const std::string& where,
                 std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      if (options_.strict) throw ParseError(where, "unknown key '" + key + "'");
      warnings_->push_back(where + ": ignoring unknown key '" + key + "'");
    }
  }

  static std::string RequireString(const json& obj, const std::string& key,
                                   const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
      throw ParseError(where + "." + key, "missing or non-string value");
    }
    return obj.at(key).get<std::string>();
  }

  CharacterDecl ReadCharacter(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where, "character must be an object");
    CheckKeys(obj, where, {"id", "lexeme", "gender", "number", "proper"});
    CharacterDecl decl;
    decl.id = RequireString(obj, "id", where);
    decl.lexeme = RequireString(obj, "lexeme", where);
    if (decl.id.empty()) throw ParseError(where + ".id", "empty id");
    std::string gender = obj.value("gender", "neut");
    if (gender == "masc") {
      decl.gender = Gender::kMasc;
    } else if (gender == "fem") {
      decl.gender = Gender::kFem;
    } else if (gender == "neut") {
      decl.gender = Gender::kNeut;
    } else {
      throw ParseError(where + ".gender", "unknown gender '" + gender + "'");
    }
    std::string number = obj.value("number", "sg");
    if (number == "sg") {
      decl.number = Number::kSg;
    } else if (number == "pl") {
      decl.number = Number::kPl;
    } else {
      throw ParseError(where + ".number", "unknown number '" + number + "'");
    }
    if (obj.contains("proper")) {
      if (!obj.at("proper").is_boolean()) throw ParseError(where + ".proper", "must be boolean");
      decl.proper = obj.at("proper").get<bool>();
    }
    return decl;
  }

  Node ReadNode(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where, "node must be an object");
    CheckKeys(obj, where, {"lexeme", "class", "features", "ref", "children"});
    Node node;
    node.lexeme = RequireString(obj, "lexeme", where);
    if (node.lexeme.empty()) throw ParseError(where + ".lexeme", "empty lexeme");
    std::string cls = RequireString(obj, "class", where);
    auto wc = ParseWordClass(cls);
    if (!wc) throw ParseError(where + ".class", "unknown word class '" + cls + "'");
    node.word_class = *wc;
    if (obj.contains("features")) {
      const json& feats = obj.at("features");
      if (!feats.is_object()) throw ParseError(where + ".features", "must be an object");
      for (const auto& [key, value] : feats.items()) {
        std::string fw = where + ".features." + key;
        auto it = FeatureTable().find(key);
        if (it == FeatureTable().end()) throw ParseError(fw, "unknown feature '" + key + "'");
        if (!value.is_string()) throw ParseError(fw, "feature values are strings");
        std::string v = value.get<std::string>();
        if (it->second.empty() ? v.empty() : !it->second.count(v)) {
          throw ParseError(fw, "illegal value '" + v + "' for feature '" + key + "'");
        }
        if (key == "possessor" && !HasCharacter(v)) {
          throw ParseError(fw, "undeclared character '" + v + "'");
        }
        node.features[key] = v;
      }
    }
    if (obj.contains("ref")) {
      if (!obj.at("ref").is_string()) throw ParseError(where + ".ref", "must be a string");
      std::string ref = obj.at("ref").get<std::string>();
      if (!HasCharacter(ref)) throw ParseError(where + ".ref", "undeclared character '" + ref + "'");
      node.ref = ref;
    }
    if (obj.contains("children")) {
      const json& kids = obj.at("children");
      if (!kids.is_array()) throw ParseError(where + ".children", "must be an array");
      for (std::size_t i = 0; i < kids.size(); ++i) {
        std::string cw = where + ".children[" + std::to_string(i) + "]";
        const json& edge = kids[i];
        if (!edge.is_object()) throw ParseError(cw, "edge must be an object");
        CheckKeys(edge, cw, {"rel", "node"});
        std::string rel = RequireString(edge, "rel", cw);
        auto r = ParseRelation(rel);
        if (!r) throw ParseError(cw + ".rel", "illegal relation label '" + rel + "'");
        if (!edge.contains("node")) throw ParseError(cw + ".node", "missing node");
        node.children.push_back(Edge{*r, ReadNode(edge.at("node"), cw + ".node")});
      }
    }
    return node;
  }

  bool HasCharacter(const std::string& id) const {
    return std::any_of(characters_->begin(), characters_->end(),
                       [&](const CharacterDecl& c) { return c.id == id; });
  }

  const ParseOptions& options_;
  std::vector<std::string>* warnings_;
  const std::vector<CharacterDecl>* characters_ = nullptr;
};

json NodeToJson(const Node& node) {
  json j = json::object();
  j["lexeme"] = node.lexeme;
  j["class"] = std::string(ToString(node.word_class));
  j["features"] = json::object();
  for (const auto& [k, v] : node.features) j["features"][k] = v;
  if (node.ref) j["ref"] = *node.ref;
  j["children"] = json::array();
  for (const Edge& e : node.children) {
    j["children"].push_back({{"rel", std::string(ToString(e.rel))}, {"node", NodeToJson(e.node)}});
  }
  return j;
}

void Validate(const Node& node, NodePath& path, const std::vector<CharacterDecl>* characters,
              std::vector<Diagnostic>& out) {
  auto report = [&](std::string rule, std::string message) {
    out.push_back(Diagnostic{path, std::move(rule), std::move(message)});
  };
  if (node.lexeme.empty()) report("empty-lexeme", "node has no lexeme");
  int subjects = 0;
  for (const Edge& e : node.children) subjects += e.rel == Relation::kI;
  if (subjects > 1) report("duplicate-subject", "'" + node.lexeme + "' has more than one I child");
  for (const auto& [key, value] : node.features) {
    auto it = FeatureTable().find(key);
    if (it == FeatureTable().end()) {
      report("unknown-feature", "unknown feature '" + key + "'");
      continue;
    }
    if (it->second.empty() ? value.empty() : !it->second.count(value)) {
      report("illegal-feature-value", "illegal value '" + value + "' for '" + key + "'");
    }
    bool verb_only = key == "tense" || key == "form";
    bool nominal_only = key == "article" || key == "number";
    if ((verb_only && node.word_class != WordClass::kVerb) ||
        (nominal_only && !IsNominal(node.word_class))) {
      report("feature-class-mismatch", "feature '" + key + "' not allowed on " +
                                           std::string(ToString(node.word_class)) + " '" +
                                           node.lexeme + "'");
    }
  }
  if (characters) {
    auto known = [&](const std::string& id) {
      return std::any_of(characters->begin(), characters->end(),
                         [&](const CharacterDecl& c) { return c.id == id; });
    };
    if (node.ref && !known(*node.ref)) report("unknown-ref", "undeclared character '" + *node.ref + "'");
    const std::string& poss = node.feature("possessor");
    if (!poss.empty() && !known(poss)) report("unknown-ref", "undeclared possessor '" + poss + "'");
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.steps.push_back(i);
    Validate(node.children[i].node, path, characters, out);
    path.steps.pop_back();
  }
}

void Find(const Node& node, NodePath& path, const NodePredicate& pred, std::vector<NodePath>& out) {
  if (pred(node)) out.push_back(path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.steps.push_back(i);
    Find(node.children[i].node, path, pred, out);
    path.steps.pop_back();
  }
}

}  // namespace

std::string_view ToString(WordClass c) { return kClassNames[static_cast<int>(c)]; }
std::string_view ToString(Relation r) { return kRelationNames[static_cast<int>(r)]; }

std::optional<WordClass> ParseWordClass(std::string_view s) {
  for (int i = 0; i < 8; ++i) {
    if (kClassNames[i] == s) return static_cast<WordClass>(i);
  }
  return std::nullopt;
}

std::optional<Relation> ParseRelation(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (kRelationNames[i] == s) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

std::string_view ToString(Gender g) {
  switch (g) {
    case Gender::kMasc: return "masc";
    case Gender::kFem: return "fem";
    case Gender::kNeut: return "neut";
  }
  return "neut";
}

std::string_view ToString(Number n) { return n == Number::kSg ? "sg" : "pl"; }

const std::string& Node::feature(const std::string& key) const {
  static const std::string kEmpty;
  auto it = features.find(key);
  return it == features.end() ? kEmpty : it->second;
}

bool Node::has(const std::string& key, std::string_view value) const {
  auto it = features.find(key);
  return it != features.end() && it->second == value;
}

const Node* Node::child(Relation rel) const {
  for (const Edge& e : children) {
    if (e.rel == rel) return &e.node;
  }
  return nullptr;
}

Node* Node::child(Relation rel) {
  for (Edge& e : children) {
    if (e.rel == rel) return &e.node;
  }
  return nullptr;
}

bool Node::operator==(const Node& other) const {
  return lexeme == other.lexeme && word_class == other.word_class &&
         features == other.features && ref == other.ref && children == other.children;
}

const CharacterDecl* Story::character(std::string_view id) const {
  for (const CharacterDecl& c : characters) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool NodePath::IsAncestorOf(const NodePath& other) const {
  return steps.size() < other.steps.size() &&
         std::equal(steps.begin(), steps.end(), other.steps.begin());
}

std::string NodePath::ToString() const {
  std::string out = "/";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += "/";
    out += std::to_string(steps[i]);
  }
  return out;
}

ParseResult ParseStory(std::string_view document, const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(LineColumn(document, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  ParseResult result;
  StoryReader reader(options, &result.warnings);
  result.story = reader.Read(doc);
  return result;
}

std::string SerializeStory(const Story& story) {
  json j = json::object();
  j["title"] = story.title;
  j["characters"] = json::array();
  for (const CharacterDecl& c : story.characters) {
    j["characters"].push_back({{"id", c.id},
                               {"lexeme", c.lexeme},
                               {"gender", std::string(ToString(c.gender))},
                               {"number", std::string(ToString(c.number))},
                               {"proper", c.proper}});
  }
  j["sentences"] = json::array();
  for (const DsyntTree& t : story.sentences) j["sentences"].push_back(NodeToJson(t));
  // nlohmann's default object is a std::map, so keys come out sorted.
  return j.dump(2) + "\n";
}

std::string SerializeTree(const DsyntTree& tree) { return NodeToJson(tree).dump(); }

std::vector<Diagnostic> ValidateTree(const DsyntTree& tree,
                                     const std::vector<CharacterDecl>* characters) {
  std::vector<Diagnostic> out;
  NodePath path;
  Validate(tree, path, characters, out);
  return out;
}

std::vector<NodePath> FindNodes(const DsyntTree& tree, const NodePredicate& predicate) {
  std::vector<NodePath> out;
  NodePath path;
  Find(tree, path, predicate, out);
  return out;
}

const Node& Resolve(const DsyntTree& tree, const NodePath& path) {
  const Node* node = &tree;
  for (std::size_t step : path.steps) {
    if (step >= node->children.size()) throw InvalidPath("path " + path.ToString() + " does not resolve");
    node = &node->children[step].node;
  }
  return *node;
}

Node& Resolve(DsyntTree& tree, const NodePath& path) {
  return const_cast<Node&>(Resolve(static_cast<const DsyntTree&>(tree), path));
}

Relation RelationAt(const DsyntTree& tree, const NodePath& path) {
  if (path.empty()) throw InvalidPath("the root has no incoming relation");
  NodePath parent{{path.steps.begin(), path.steps.end() - 1}};
  const Node& p = Resolve(tree, parent);
  if (path.steps.back() >= p.children.size()) throw InvalidPath("path " + path.ToString() + " does not resolve");
  return p.children[path.steps.back()].rel;
}

DsyntTree Prune(const DsyntTree& tree, const std::vector<NodePath>& paths) {
  for (const NodePath& p : paths) {
    if (p.empty()) throw InvalidPath("cannot prune the root");
    Resolve(tree, p);
  }
  for (const NodePath& a : paths) {
    for (const NodePath& b : paths) {
      if (a.IsAncestorOf(b)) throw InvalidPath("path " + a.ToString() + " contains " + b.ToString());
    }
  }
  DsyntTree out = tree;
  // Deepest and right-most first so earlier indices stay valid.
  std::vector<NodePath> sorted = paths;
  std::sort(sorted.begin(), sorted.end(), [](const NodePath& a, const NodePath& b) { return b < a; });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const NodePath& p : sorted) {
    NodePath parent{{p.steps.begin(), p.steps.end() - 1}};
    Node& node = Resolve(out, parent);
    node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(p.steps.back()));
  }
  return out;
}

std::size_t CountNodes(const Node& node) {
  std::size_t n = 1;
  for (const Edge& e : node.children) n += CountNodes(e.node);
  return n;
}

void ForEachNode(const Node& node, const std::function<void(const Node&)>& fn) {
  fn(node);
  for (const Edge& e : node.children) ForEachNode(e.node, fn);
}

}  // namespace m2d
