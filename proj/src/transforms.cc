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

#include "m2d/transforms.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace m2d {

using json = nlohmann::json;

namespace {

bool IsFiniteClause(const Node& n) {
  return n.word_class == WordClass::kVerb && !n.has("form", "inf") && !n.has("form", "tag") &&
         n.child(Relation::kI) != nullptr;
}

bool IsBecause(const Edge& e) {
  if (e.rel != Relation::kAttr || e.node.word_class != WordClass::kConjunction || e.node.lexeme != "because") {
    return false;
  }
  const Node* clause = e.node.child(Relation::kII);
  return clause && IsFiniteClause(*clause);
}

void Deaggregate(const Node& tree, std::vector<DsyntTree>& out) {
  Node main = tree;
  std::vector<Node> because;
  std::vector<Node> conjuncts;
  std::vector<Edge> kept;
  const Node* subject = tree.child(Relation::kI);
  for (const Edge& e : tree.children) {
    if (IsBecause(e)) {
      because.push_back(*e.node.child(Relation::kII));
    } else if (e.rel == Relation::kCoord && e.node.word_class == WordClass::kVerb && subject &&
               !e.node.has("form", "inf")) {
      Node c = e.node;
      c.features.erase("sep");
      if (!c.child(Relation::kI)) c.children.insert(c.children.begin(), Edge{Relation::kI, *subject});
      conjuncts.push_back(std::move(c));
    } else {
      kept.push_back(e);
    }
  }
  main.children = std::move(kept);
  if (because.empty() && conjuncts.empty()) {
    out.push_back(tree);
    return;
  }
  out.push_back(std::move(main));
  for (const Node& c : because) Deaggregate(c, out);
  for (const Node& c : conjuncts) Deaggregate(c, out);
}

bool IsDeclarativeRoot(const Node& t) {
  if (t.word_class != WordClass::kVerb || t.has("form", "inf") || t.has("form", "tag")) return false;
  if (t.has("mood", "quest") || t.has("mood", "imper") || t.has("punct", "question")) return false;
  for (const Edge& e : t.children) {
    if (e.rel == Relation::kAppend && e.node.has("form", "tag")) return false;
  }
  return true;
}

bool HasCoord(const Node& n) { return n.child(Relation::kCoord) != nullptr; }

// Copula whose only dependents are the subject and a predicate adjective.
const Node* BareCopulaAdjective(const Node& t) {
  if (t.lexeme != "be") return nullptr;
  const Node* pred = t.child(Relation::kII);
  if (!pred || pred->word_class != WordClass::kAdjective || HasCoord(*pred)) return nullptr;
  for (const Edge& e : t.children) {
    if (e.rel != Relation::kI && e.rel != Relation::kII) return nullptr;
  }
  return pred;
}

// Mention walk order: possessor, subject, then the remaining children.
template <typename Fn>
void WalkMentions(Node& node, Relation rel, Fn&& fn) {
  fn(node, rel);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (node.children[i].rel == Relation::kI) order.push_back(i);
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (node.children[i].rel != Relation::kI && node.children[i].rel != Relation::kAppend) order.push_back(i);
  }
  for (std::size_t i : order) WalkMentions(node.children[i].node, node.children[i].rel, fn);
}

bool Replaceable(const Node& n) {
  if (n.word_class != WordClass::kNoun || !n.ref) return false;
  for (const Edge& e : n.children) {
    bool adj = e.rel == Relation::kAttr &&
               (e.node.word_class == WordClass::kAdjective || e.node.word_class == WordClass::kNumeral);
    if (!adj && e.rel != Relation::kCoord) return false;
  }
  return true;
}

void CollectSynonymTargets(const Node& node, NodePath& path, bool in_append, const Lexicon& lexicon,
                           const VocabularyPolicy& policy, std::vector<NodePath>& out) {
  bool eligible = !in_append && !IsWhWord(node) &&
                  ((node.word_class == WordClass::kAdjective) ||
                   (node.word_class == WordClass::kVerb && node.lexeme != "be" && !node.has("form", "tag")) ||
                   (node.word_class == WordClass::kNoun && !node.ref));
  if (eligible) {
    for (const SynonymEntry& s : lexicon.synonyms_of(node.lexeme, policy.order)) {
      if (policy.max_rank == 0 || s.freq_rank <= policy.max_rank) {
        out.push_back(path);
        break;
      }
    }
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.steps.push_back(i);
    CollectSynonymTargets(node.children[i].node, path, in_append || node.children[i].rel == Relation::kAppend,
                          lexicon, policy, out);
    path.steps.pop_back();
  }
}

int PolicyKey(const SynonymEntry& e, SynonymPolicy p) {
  switch (p) {
    case SynonymPolicy::kAny:
      return 0;
    case SynonymPolicy::kMaxFrequency:
      return e.freq_rank;
    case SynonymPolicy::kMinLength:
      return e.length;
    case SynonymPolicy::kMaxLength:
      return -e.length;
  }
  return 0;
}

// Predicate adjective first, then any adjective outside parentheticals.
enum class AdjectiveKind { kAny, kAttributive, kPredicate };

Node* FindAdjective(Node& tree, AdjectiveKind kind) {
  if (kind != AdjectiveKind::kAttributive && tree.word_class == WordClass::kVerb && tree.lexeme == "be") {
    Node* pred = tree.child(Relation::kII);
    if (pred && pred->word_class == WordClass::kAdjective) return pred;
  }
  if (kind == AdjectiveKind::kAny && tree.word_class == WordClass::kAdjective) return &tree;
  for (Edge& e : tree.children) {
    if (e.rel == Relation::kAppend) continue;
    bool attributive = e.rel == Relation::kAttr && e.node.word_class == WordClass::kAdjective &&
                       (tree.word_class == WordClass::kNoun || tree.word_class == WordClass::kPronoun);
    if (attributive && kind != AdjectiveKind::kPredicate) return &e.node;
    if (kind == AdjectiveKind::kAny && e.node.word_class == WordClass::kAdjective) return &e.node;
    if (Node* found = FindAdjective(e.node, kind)) return found;
  }
  return nullptr;
}

AdjectiveKind KindFor(const std::string& constraint) {
  if (constraint == "requires-attributive-adjective") return AdjectiveKind::kAttributive;
  if (constraint == "requires-predicate-adjective") return AdjectiveKind::kPredicate;
  return AdjectiveKind::kAny;
}

const std::set<std::string>& KnownConstraints() {
  static const std::set<std::string> known = {"none",
                                              "requires-adjective",
                                              "requires-attributive-adjective",
                                              "requires-predicate-adjective",
                                              "requires-declarative",
                                              "requires-verbal-root",
                                              "requires-turn-initial"};
  return known;
}

bool ContainsMarker(const Node& node, const std::string& surface) {
  for (const Edge& e : node.children) {
    if ((e.rel == Relation::kAppend || e.rel == Relation::kAttr) && e.node.word_class == WordClass::kAdverb &&
        e.node.lexeme == surface) {
      return true;
    }
    if (ContainsMarker(e.node, surface)) return true;
  }
  return false;
}

}  // namespace

std::vector<DsyntTree> SplitLong(const DsyntTree& tree, std::size_t max_nodes) {
  if (CountNodes(tree) <= max_nodes) return {tree};
  std::vector<DsyntTree> out;
  Deaggregate(tree, out);
  for (const DsyntTree& t : out) {
    if (!ValidateTree(t).empty()) return {tree};
  }
  return out;
}

std::optional<DsyntTree> MergePair(const DsyntTree& a, const DsyntTree& b) {
  if (!IsDeclarativeRoot(a) || !IsDeclarativeRoot(b)) return std::nullopt;
  const Node* sa = a.child(Relation::kI);
  const Node* sb = b.child(Relation::kI);
  if (!sa || !sb || !sa->ref || sa->ref != sb->ref || sa->lexeme != sb->lexeme) return std::nullopt;
  for (const Edge& e : a.children) {
    if (e.rel == Relation::kCoord || e.rel == Relation::kAppend) return std::nullopt;
  }
  for (const Edge& e : b.children) {
    if (e.rel == Relation::kCoord || e.rel == Relation::kAppend) return std::nullopt;
  }
  DsyntTree out = a;
  out.features.erase("punct");
  const Node* pa = BareCopulaAdjective(a);
  const Node* pb = BareCopulaAdjective(b);
  if (pa && pb && a.feature("tense") == b.feature("tense")) {
    Node* adj = out.child(Relation::kII);
    if (a.has("polarity", "neg")) {
      out.features.erase("polarity");
      adj->set("polarity", "neg");
    }
    Node second = *pb;
    if (b.has("polarity", "neg")) second.set("polarity", "neg");
    second.set("sep", "comma");
    adj->children.push_back(Edge{Relation::kCoord, std::move(second)});
    return out;
  }
  Node vp = b;
  vp.features.erase("punct");
  vp.features.erase("mood");
  std::erase_if(vp.children, [](const Edge& e) { return e.rel == Relation::kI; });
  out.children.push_back(Edge{Relation::kCoord, std::move(vp)});
  return out;
}

PronominalizeResult Pronominalize(const DsyntTree& tree, const SalienceContext& ctx,
                                  const std::vector<CharacterDecl>& characters, const MorphLexicon& morph) {
  auto decl = [&](const std::string& id) -> const CharacterDecl* {
    for (const CharacterDecl& c : characters) {
      if (c.id == id) return &c;
    }
    return nullptr;
  };
  PronominalizeResult result{tree, {}};
  std::vector<std::string> earlier;
  auto salient_set = [&]() {
    std::vector<std::pair<std::string, std::pair<Gender, Number>>> s;
    auto add = [&](const std::string& id, Gender g, Number n) {
      for (const auto& x : s) {
        if (x.first == id) return;
      }
      s.push_back({id, {g, n}});
    };
    for (const SalientReferent& r : ctx.recent) add(r.id, r.gender, r.number);
    for (const std::string& id : ctx.pronominalized) {
      if (const CharacterDecl* d = decl(id)) add(id, d->gender, d->number);
    }
    for (const std::string& id : earlier) {
      if (const CharacterDecl* d = decl(id)) add(id, d->gender, d->number);
    }
    return s;
  };
  auto eligible = [&](const std::string& id) {
    const CharacterDecl* d = decl(id);
    if (!d) return false;
    bool seen = ctx.mentioned.count(id) || std::find(earlier.begin(), earlier.end(), id) != earlier.end();
    if (!seen) return false;
    auto s = salient_set();
    bool salient = false;
    int same = 0;
    for (const auto& [sid, gn] : s) {
      if (sid == id) salient = true;
      if (gn.first == d->gender && gn.second == d->number) ++same;
    }
    return salient && same == 1;
  };
  auto note = [&](const std::string& id) {
    if (std::find(earlier.begin(), earlier.end(), id) == earlier.end()) earlier.push_back(id);
  };
  WalkMentions(result.tree, Relation::kAttr, [&](Node& n, Relation) {
    const std::string owner = n.feature("possessor");
    if (!owner.empty()) {
      if (!n.has("possessor_pro", "yes") && eligible(owner)) {
        n.set("possessor_pro", "yes");
        result.replaced.push_back(owner);
      }
      note(owner);
    }
    if (n.ref && n.word_class == WordClass::kNoun) {
      std::string id = *n.ref;
      if (Replaceable(n) && eligible(id)) {
        const CharacterDecl* d = decl(id);
        const PronounForms& forms = morph.pronoun_for(3, d->number, d->gender);
        Node pron;
        pron.lexeme = forms.nominative;
        pron.word_class = WordClass::kPronoun;
        pron.ref = id;
        for (const Edge& e : n.children) {
          if (e.rel == Relation::kAppend) pron.children.push_back(e);
        }
        n = std::move(pron);
        result.replaced.push_back(id);
      }
      note(id);
    } else if (n.ref) {
      note(*n.ref);
    }
  });
  return result;
}

Substitution SubstituteSynonym(const DsyntTree& tree, const Lexicon& lexicon, const VocabularyPolicy& policy,
                               Rng& rng) {
  Substitution out{tree, std::nullopt, std::nullopt};
  std::vector<NodePath> targets;
  NodePath path;
  CollectSynonymTargets(tree, path, false, lexicon, policy, targets);
  if (targets.empty()) return out;
  Node& node = Resolve(out.tree, targets[rng.Below(targets.size())]);
  std::vector<SynonymEntry> candidates;
  for (const SynonymEntry& s : lexicon.synonyms_of(node.lexeme, policy.order)) {
    if (policy.max_rank == 0 || s.freq_rank <= policy.max_rank) candidates.push_back(s);
  }
  int best = PolicyKey(candidates.front(), policy.order);
  std::vector<const SynonymEntry*> tied;
  for (const SynonymEntry& s : candidates) {
    if (PolicyKey(s, policy.order) == best) tied.push_back(&s);
  }
  const SynonymEntry* pick = tied.size() == 1 ? tied.front() : tied[rng.Below(tied.size())];
  out.from = node.lexeme;
  out.to = pick->word;
  node.lexeme = pick->word;
  return out;
}

std::string_view ToString(MarkerSlot s) {
  switch (s) {
    case MarkerSlot::kInitial:
      return "initial";
    case MarkerSlot::kPreAdjective:
      return "pre-adjective";
    case MarkerSlot::kPreVerb:
      return "pre-verb";
    case MarkerSlot::kFinal:
      return "final";
  }
  return "initial";
}

std::optional<MarkerSlot> ParseMarkerSlot(std::string_view s) {
  for (MarkerSlot m : {MarkerSlot::kInitial, MarkerSlot::kPreAdjective, MarkerSlot::kPreVerb, MarkerSlot::kFinal}) {
    if (ToString(m) == s) return m;
  }
  return std::nullopt;
}

MarkerInventory MarkerInventory::FromJson(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("marker inventory: ") + e.what());
  }
  MarkerInventory inv;
  std::set<std::string> ids;
  for (const json& m : doc.at("markers")) {
    MarkerSpec spec;
    spec.id = m.at("id").get<std::string>();
    spec.surface = m.at("surface").get<std::string>();
    std::string slot = m.at("slot").get<std::string>();
    auto parsed = ParseMarkerSlot(slot);
    if (!parsed) throw std::runtime_error("marker inventory: '" + spec.id + "' has unknown slot '" + slot + "'");
    spec.slot = *parsed;
    spec.constraint = m.value("constraint", "none");
    spec.group = m.at("group").get<std::string>();
    spec.sep = m.value("sep", "comma");
    if (!KnownConstraints().count(spec.constraint)) {
      throw std::runtime_error("marker inventory: '" + spec.id + "' has unknown constraint '" + spec.constraint + "'");
    }
    if (spec.slot == MarkerSlot::kPreAdjective && spec.constraint != "requires-adjective" &&
        spec.constraint != "requires-attributive-adjective" && spec.constraint != "requires-predicate-adjective") {
      throw std::runtime_error("marker inventory: pre-adjective marker '" + spec.id + "' needs an adjective constraint");
    }
    if (spec.slot == MarkerSlot::kPreVerb && spec.constraint != "requires-verbal-root") {
      throw std::runtime_error("marker inventory: pre-verb marker '" + spec.id + "' needs requires-verbal-root");
    }
    if (spec.sep != "comma" && spec.sep != "space" && spec.sep != "ellipsis") {
      throw std::runtime_error("marker inventory: '" + spec.id + "' has unknown separator '" + spec.sep + "'");
    }
    if (!ids.insert(spec.id).second) throw std::runtime_error("marker inventory: duplicate id '" + spec.id + "'");
    inv.specs_.push_back(std::move(spec));
  }
  return inv;
}

MarkerInventory MarkerInventory::Load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open marker inventory " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

const MarkerSpec* MarkerInventory::find(std::string_view id) const {
  for (const MarkerSpec& s : specs_) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<const MarkerSpec*> MarkerInventory::group(std::string_view group_id) const {
  std::vector<const MarkerSpec*> out;
  for (const MarkerSpec& s : specs_) {
    if (s.group == group_id) out.push_back(&s);
  }
  return out;
}

std::vector<std::string> MarkerInventory::groups() const {
  std::vector<std::string> out;
  for (const MarkerSpec& s : specs_) {
    if (std::find(out.begin(), out.end(), s.group) == out.end()) out.push_back(s.group);
  }
  return out;
}

bool IsDeclarative(const DsyntTree& tree) { return IsDeclarativeRoot(tree); }

int SlotLimit(MarkerSlot slot) { return slot == MarkerSlot::kInitial ? 2 : 1; }

std::optional<ConstraintViolation> CheckMarker(const DsyntTree& tree, const MarkerSpec& spec,
                                               const MarkerContext& ctx) {
  const std::string& c = spec.constraint;
  Node probe = tree;
  bool adjective_constraint = c == "requires-adjective" || c == "requires-attributive-adjective" ||
                              c == "requires-predicate-adjective";
  if (adjective_constraint && !FindAdjective(probe, KindFor(c))) return ConstraintViolation{c};
  if (c == "requires-declarative" && !IsDeclarativeRoot(tree)) return ConstraintViolation{c};
  if (c == "requires-verbal-root" &&
      (tree.word_class != WordClass::kVerb || tree.has("form", "inf") || tree.has("form", "tag"))) {
    return ConstraintViolation{c};
  }
  if (c == "requires-turn-initial" && !ctx.turn_initial) return ConstraintViolation{c};
  if (ContainsMarker(tree, spec.surface)) return ConstraintViolation{"unique-marker"};
  if (std::count(ctx.used_slots.begin(), ctx.used_slots.end(), spec.slot) >= SlotLimit(spec.slot)) {
    return ConstraintViolation{"slot-taken"};
  }
  return std::nullopt;
}

std::variant<DsyntTree, ConstraintViolation> InsertMarker(const DsyntTree& tree, const MarkerSpec& spec,
                                                          const MarkerContext& ctx) {
  if (auto v = CheckMarker(tree, spec, ctx)) return *v;
  DsyntTree out = tree;
  Node marker;
  marker.lexeme = spec.surface;
  marker.word_class = WordClass::kAdverb;
  switch (spec.slot) {
    case MarkerSlot::kInitial:
    case MarkerSlot::kFinal:
      marker.set("position", spec.slot == MarkerSlot::kInitial ? "initial" : "final");
      marker.set("sep", spec.sep);
      out.children.push_back(Edge{Relation::kAppend, std::move(marker)});
      break;
    case MarkerSlot::kPreAdjective: {
      Node* adj = FindAdjective(out, KindFor(spec.constraint));
      adj->children.insert(adj->children.begin(), Edge{Relation::kAttr, std::move(marker)});
      break;
    }
    case MarkerSlot::kPreVerb:
      out.children.insert(out.children.begin(), Edge{Relation::kAttr, std::move(marker)});
      break;
  }
  return out;
}

}  // namespace m2d
