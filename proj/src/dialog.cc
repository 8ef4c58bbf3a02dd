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

#include "m2d/dialog.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>

namespace m2d {

namespace {

Node MakeNode(std::string lexeme, WordClass c) {
  Node n;
  n.lexeme = std::move(lexeme);
  n.word_class = c;
  return n;
}

Node Parenthetical(std::string lexeme, WordClass c, const char* position, const char* sep) {
  Node n = MakeNode(std::move(lexeme), c);
  n.set("position", position);
  n.set("sep", sep);
  return n;
}

void DropAppends(Node& n) {
  std::erase_if(n.children, [](const Edge& e) { return e.rel == Relation::kAppend; });
}

bool IsLocative(std::string_view prep) {
  static const std::set<std::string, std::less<>> kLocative = {
      "to",     "in",     "at",     "on",     "into",   "onto",  "over",    "off",   "from",
      "under",  "near",   "by",     "through", "toward", "towards", "across", "behind", "inside",
      "outside", "around", "along", "above",  "below",  "beside", "up",      "down"};
  return kLocative.count(prep) > 0;
}

bool IsPerson(const Node& noun, const std::vector<CharacterDecl>& characters) {
  if (!noun.ref) return false;
  for (const CharacterDecl& c : characters) {
    if (c.id == *noun.ref) return c.gender != Gender::kNeut;
  }
  return false;
}

NodePath Child(const NodePath& p, std::size_t i) {
  NodePath out = p;
  out.steps.push_back(i);
  return out;
}

NodePath Parent(const NodePath& p) {
  NodePath out = p;
  out.steps.pop_back();
  return out;
}

// Nominative pronoun lexeme agreeing with `subject`.
std::string PronounFor(const Node& subject, const std::vector<CharacterDecl>& characters, const MorphLexicon& morph) {
  if (subject.word_class == WordClass::kPronoun) return subject.lexeme;
  if (subject.child(Relation::kCoord)) return morph.pronoun_for(3, Number::kPl, Gender::kNeut).nominative;
  Gender g = Gender::kNeut;
  Number n = subject.has("number", "pl") ? Number::kPl : Number::kSg;
  if (subject.ref) {
    for (const CharacterDecl& c : characters) {
      if (c.id != *subject.ref) continue;
      g = c.gender;
      if (!subject.has("number", "sg") && !subject.has("number", "pl")) n = c.number;
    }
  }
  return morph.pronoun_for(3, n, g).nominative;
}

const std::set<std::string, std::less<>>& StativeVerbs() {
  static const std::set<std::string, std::less<>> kStative = {"be",   "want", "like", "love", "know",
                                                              "need", "own",  "have", "expect"};
  return kStative;
}

std::vector<std::string> Candidates(const Lexicon& lexicon, const std::string& word, const VocabularyPolicy& policy) {
  std::vector<std::string> out;
  for (const SynonymEntry& e : lexicon.synonyms_of(word, policy.order)) {
    if (policy.max_rank == 0 || e.freq_rank <= policy.max_rank) out.push_back(e.word);
  }
  return out;
}

}  // namespace

// ---- Resources ----

Resources Resources::Load(const std::filesystem::path& dir) {
  return Resources{MorphLexicon::Load(dir / "morph.json"), Lexicon::Load(dir / "lexicon.json"),
                   MarkerInventory::Load(dir / "markers.json")};
}

std::filesystem::path Resources::DefaultDir() {
  if (const char* env = std::getenv("M2D_LEXICON_DIR"); env && *env) return env;
  return M2D_DEFAULT_DATA_DIR;
}

// ---- Allocation ----

std::vector<std::pair<std::size_t, std::size_t>> AllocationPlan::turns() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (i == 0 || speakers[i] != speakers[i - 1]) {
      out.emplace_back(i, i + 1);
    } else {
      out.back().second = i + 1;
    }
  }
  return out;
}

std::size_t AllocationPlan::count(Speaker s) const {
  return static_cast<std::size_t>(std::count(speakers.begin(), speakers.end(), s));
}

AllocationPlan Allocate(std::size_t n, double ratio, int chunk, Rng& rng) {
  AllocationPlan plan;
  if (n == 0) return plan;
  if (n == 1) {
    plan.speakers.push_back(Speaker::kS1);
    return plan;
  }
  ratio = std::clamp(ratio, 0.1, 0.9);
  chunk = std::max(chunk, 1);
  std::size_t q1 = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  q1 = std::clamp<std::size_t>(q1, 1, n - 1);
  std::array<std::size_t, 2> quota = {q1, n - q1};
  std::array<std::size_t, 2> given = {0, 0};
  Speaker cur = Speaker::kS1;
  auto idx = [](Speaker s) { return static_cast<int>(s); };
  while (plan.speakers.size() < n) {
    if (given[idx(cur)] == quota[idx(cur)]) cur = Other(cur);
    std::size_t run = 1 + rng.Below(static_cast<std::size_t>(chunk));
    run = std::min(run, quota[idx(cur)] - given[idx(cur)]);
    for (std::size_t k = 0; k < run; ++k) plan.speakers.push_back(cur);
    given[idx(cur)] += run;
    double done = static_cast<double>(plan.speakers.size());
    auto deficit = [&](Speaker s) {
      return static_cast<double>(quota[idx(s)]) * done / static_cast<double>(n) - static_cast<double>(given[idx(s)]);
    };
    Speaker other = Other(cur);
    cur = deficit(other) >= deficit(cur) ? other : cur;
  }
  return plan;
}

// ---- Questions ----

std::optional<NodePath> WhTarget(const DsyntTree& tree) {
  if (tree.word_class != WordClass::kVerb) return std::nullopt;
  const NodePath root;
  if (tree.lexeme == "be") {
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      const Edge& e = tree.children[i];
      if (e.rel == Relation::kII && e.node.word_class == WordClass::kAdjective) return Child(root, i);
    }
  }
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    const Edge& e = tree.children[i];
    if (e.rel != Relation::kAttr || e.node.word_class != WordClass::kPreposition) continue;
    for (std::size_t j = 0; j < e.node.children.size(); ++j) {
      const Edge& c = e.node.children[j];
      if (c.rel == Relation::kII && c.node.word_class == WordClass::kNoun) return Child(Child(root, i), j);
    }
  }
  for (Relation rel : {Relation::kII, Relation::kI}) {
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      const Edge& e = tree.children[i];
      if (e.rel == rel && e.node.word_class == WordClass::kNoun) return Child(root, i);
    }
  }
  return std::nullopt;
}

QuestionAnswer MakeWhQuestion(const DsyntTree& tree, const NodePath& target,
                              const std::vector<CharacterDecl>& characters) {
  if (target.empty()) throw UnsupportedTarget("the root cannot be questioned");
  const Node& node = Resolve(tree, target);
  DsyntTree q = tree;
  DropAppends(q);
  q.features.erase("punct");
  q.set("mood", "quest");
  NodePath noun_path = target;
  if (node.word_class == WordClass::kPreposition) {
    const Node* complement = node.child(Relation::kII);
    if (!complement || complement->word_class != WordClass::kNoun) {
      throw UnsupportedTarget("preposition '" + node.lexeme + "' has no noun complement");
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (&node.children[i].node == complement) noun_path = Child(target, i);
    }
  }
  const Node& noun = Resolve(tree, noun_path);
  switch (noun.word_class) {
    case WordClass::kAdjective: {
      NodePath parent = Parent(noun_path);
      const Node& head = Resolve(tree, parent);
      Relation rel = RelationAt(tree, noun_path);
      Node subject;
      std::string tense = tree.feature("tense");
      if (rel == Relation::kII && head.word_class == WordClass::kVerb && head.lexeme == "be") {
        const Node* s = head.child(Relation::kI);
        if (!s) throw UnsupportedTarget("copula without subject");
        subject = *s;
        if (!head.feature("tense").empty()) tense = head.feature("tense");
      } else if (rel == Relation::kAttr && head.word_class == WordClass::kNoun) {
        subject = head;
        std::erase_if(subject.children, [&](const Edge& e) { return e.node == noun; });
      } else {
        throw UnsupportedTarget("adjective '" + noun.lexeme + "' is neither predicative nor attributive");
      }
      DropAppends(subject);
      Node be = MakeNode("be", WordClass::kVerb);
      be.set("tense", tense.empty() ? "past" : tense);
      be.set("mood", "quest");
      be.children.push_back(Edge{Relation::kI, subject});
      be.children.push_back(Edge{Relation::kII, MakeNode("how", WordClass::kAdverb)});
      return {be, tree};
    }
    case WordClass::kNoun:
      break;
    default:
      throw UnsupportedTarget("cannot question a " + std::string(ToString(noun.word_class)));
  }
  std::string wh = IsPerson(noun, characters) ? "who" : "what";
  NodePath parent = Parent(noun_path);
  const Node& head = Resolve(tree, parent);
  Relation rel = RelationAt(tree, noun_path);
  if (head.word_class == WordClass::kPreposition && rel == Relation::kII) {
    if (parent.empty()) throw UnsupportedTarget("preposition at the root");
    NodePath clause = Parent(parent);
    Node& verb = Resolve(q, clause);
    std::size_t pp_index = parent.steps.back();
    std::vector<Edge> kept;
    for (std::size_t i = 0; i < verb.children.size(); ++i) {
      const Edge& e = verb.children[i];
      if (i == pp_index) {
        if (IsLocative(head.lexeme) && wh == "what") {
          kept.push_back(Edge{Relation::kAttr, MakeNode("where", WordClass::kPronoun)});
        } else {
          Node pp = MakeNode(head.lexeme, WordClass::kPreposition);
          pp.children.push_back(Edge{Relation::kII, MakeNode(wh, WordClass::kPronoun)});
          kept.push_back(Edge{e.rel, pp});
        }
      } else if (e.rel != Relation::kAttr) {
        kept.push_back(e);
      }
    }
    verb.children = std::move(kept);
    return {q, tree};
  }
  if (head.word_class == WordClass::kVerb && (rel == Relation::kI || rel == Relation::kII)) {
    Node& slot = Resolve(q, noun_path);
    slot = MakeNode(wh, WordClass::kPronoun);
    return {q, tree};
  }
  throw UnsupportedTarget("noun '" + noun.lexeme + "' is not a subject, object or prepositional complement");
}

DsyntTree MakeTagQuestion(const DsyntTree& tree, const std::vector<CharacterDecl>& characters,
                          const MorphLexicon& morph) {
  if (!IsDeclarative(tree)) throw UnsupportedTarget("tag questions need a declarative clause");
  const Node* subject = tree.child(Relation::kI);
  if (!subject) throw UnsupportedTarget("tag questions need a subject");
  bool neg = tree.has("polarity", "neg");
  if (tree.lexeme == "be") {
    const Node* pred = tree.child(Relation::kII);
    if (pred && pred->has("polarity", "neg") && !pred->child(Relation::kCoord)) neg = true;
  }
  Node tag = MakeNode(tree.lexeme == "be" ? "be" : "do", WordClass::kVerb);
  tag.set("form", "tag");
  tag.set("tense", tree.feature("tense").empty() ? "past" : tree.feature("tense"));
  if (!neg) tag.set("polarity", "neg");
  tag.set("position", "final");
  tag.set("sep", "comma");
  tag.children.push_back(Edge{Relation::kI, MakeNode(PronounFor(*subject, characters, morph), WordClass::kPronoun)});
  DsyntTree out = tree;
  out.set("punct", "question");
  out.children.push_back(Edge{Relation::kAppend, std::move(tag)});
  return out;
}

const std::vector<std::string>& ProvokingLines::Inventory() {
  static const std::vector<std::string> kLines = {
      "I don't really remember this part, can you tell it?",
      "I forget what happened next, do you remember?",
      "Wait, how does this part go again?",
      "I'm not sure about the next bit, can you tell it?",
  };
  return kLines;
}

std::string ProvokingLines::Next() {
  if (left_.empty()) {
    for (std::size_t i = 0; i < Inventory().size(); ++i) left_.push_back(i);
  }
  std::size_t k = rng_.Below(left_.size());
  std::size_t line = left_[k];
  left_.erase(left_.begin() + static_cast<std::ptrdiff_t>(k));
  return Inventory()[line];
}

DsyntTree MakeRhetoricalQuestion(const DsyntTree& tree) {
  Node clause = tree;
  DropAppends(clause);
  clause.features.erase("punct");
  clause.features.erase("mood");
  Node that = MakeNode("that", WordClass::kConjunction);
  that.children.push_back(Edge{Relation::kII, std::move(clause)});
  Node know = MakeNode("know", WordClass::kVerb);
  know.set("tense", "past");
  know.children.push_back(Edge{Relation::kI, MakeNode("everybody", WordClass::kPronoun)});
  know.children.push_back(Edge{Relation::kII, std::move(that)});
  Node think = MakeNode("think", WordClass::kVerb);
  think.set("tense", "past");
  think.set("punct", "question");
  think.children.push_back(Edge{Relation::kI, MakeNode("I", WordClass::kPronoun)});
  think.children.push_back(Edge{Relation::kII, std::move(know)});
  return think;
}

// ---- Entrainment and extrapolation ----

Repetition MakeRepetition(const DsyntTree& tree, RepetitionMode mode, const Lexicon& lexicon,
                          const VocabularyPolicy& policy, Rng& rng) {
  Repetition out{tree, std::nullopt, std::nullopt};
  DropAppends(out.tree);
  std::string ack = "yeah";
  if (mode == RepetitionMode::kParaphrase) {
    Substitution s = SubstituteSynonym(out.tree, lexicon, policy, rng);
    out.tree = std::move(s.tree);
    out.from = s.from;
    out.to = s.to;
    ack = "right";
  }
  out.tree.children.insert(out.tree.children.begin(),
                           Edge{Relation::kAppend, Parenthetical(ack, WordClass::kAdverb, "initial", "comma")});
  return out;
}

std::optional<DsyntTree> MakeStateChange(const StoryDatabase& db, const std::string& character, std::size_t position) {
  const ActorRecord* rec = db.record(character);
  const CharacterDecl* decl = db.story().character(character);
  if (!rec || !decl) return std::nullopt;
  auto states = rec->StatesAt(position);
  if (states.empty()) return std::nullopt;
  auto latest = states.begin();
  for (auto it = states.begin(); it != states.end(); ++it) {
    if (it->second >= latest->second) latest = it;
  }
  std::optional<std::string> antonym = db.antonym_of(latest->first);
  if (!antonym) return std::nullopt;
  Node subject = MakeNode(decl->lexeme, WordClass::kNoun);
  subject.ref = decl->id;
  subject.set("article", "def");
  subject.set("number", std::string(ToString(decl->number)));
  Node be = MakeNode("be", WordClass::kVerb);
  be.set("tense", "present");
  be.children.push_back(Edge{Relation::kAppend, Parenthetical("now", WordClass::kAdverb, "initial", "comma")});
  be.children.push_back(Edge{Relation::kI, std::move(subject)});
  be.children.push_back(Edge{Relation::kII, MakeNode(*antonym, WordClass::kAdjective)});
  return be;
}

std::optional<CorrectionPair> MakeCorrectionPair(const DsyntTree& tree) {
  if (!IsDeclarative(tree) || !StativeVerbs().count(tree.lexeme) || tree.child(Relation::kCoord)) return std::nullopt;
  DsyntTree wrong = tree;
  DropAppends(wrong);
  Node* pred = wrong.lexeme == "be" ? wrong.child(Relation::kII) : nullptr;
  if (wrong.has("polarity", "neg")) {
    wrong.features.erase("polarity");
  } else if (pred && pred->has("polarity", "neg")) {
    pred->features.erase("polarity");
  } else {
    wrong.set("polarity", "neg");
  }
  DsyntTree right = tree;
  DropAppends(right);
  right.children.insert(right.children.begin(),
                        Edge{Relation::kAppend, Parenthetical("I think", WordClass::kAdverb, "initial", "space")});
  return CorrectionPair{std::move(wrong), std::move(right)};
}

std::optional<Affirmation> MakeAffirmation(const DsyntTree& tree, const Lexicon& lexicon,
                                           const VocabularyPolicy& policy, Rng& rng) {
  if (!IsDeclarative(tree) || tree.lexeme != "be") return std::nullopt;
  const Node* pred = tree.child(Relation::kII);
  if (!pred || pred->word_class != WordClass::kAdjective || pred->has("polarity", "neg") ||
      pred->child(Relation::kCoord)) {
    return std::nullopt;
  }
  std::vector<std::string> options = Candidates(lexicon, pred->lexeme, policy);
  if (options.empty()) return std::nullopt;
  std::string synonym = policy.order == SynonymPolicy::kAny ? options[rng.Below(options.size())] : options.front();

  Affirmation out;
  out.adjective = pred->lexeme;
  out.synonym = synonym;
  out.truncated = tree;
  DropAppends(out.truncated);
  std::vector<Node> conjuncts;
  for (const Edge& e : out.truncated.children) {
    if (e.rel == Relation::kCoord) conjuncts.push_back(e.node);
  }
  std::erase_if(out.truncated.children, [](const Edge& e) { return e.rel == Relation::kCoord; });
  out.truncated.set("punct", "trail");
  if (!conjuncts.empty()) {
    out.truncated.children.push_back(
        Edge{Relation::kAppend, Parenthetical("and", WordClass::kConjunction, "final", "space")});
    Node resume = conjuncts.front();
    if (!resume.child(Relation::kI)) {
      if (const Node* s = tree.child(Relation::kI)) resume.children.insert(resume.children.begin(), Edge{Relation::kI, *s});
    }
    if (resume.feature("tense").empty() && resume.word_class == WordClass::kVerb) {
      resume.set("tense", tree.feature("tense").empty() ? "past" : tree.feature("tense"));
    }
    resume.features.erase("sep");
    for (std::size_t i = 1; i < conjuncts.size(); ++i) resume.children.push_back(Edge{Relation::kCoord, conjuncts[i]});
    resume.children.insert(resume.children.begin(),
                           {Edge{Relation::kAppend, Parenthetical("yeah", WordClass::kAdverb, "initial", "comma")},
                            Edge{Relation::kAppend, Parenthetical("and", WordClass::kConjunction, "initial", "space")}});
    out.resume = std::move(resume);
  }
  Node affirm = MakeNode(synonym, WordClass::kAdjective);
  affirm.children.push_back(Edge{Relation::kAttr, MakeNode("just", WordClass::kAdverb)});
  affirm.children.push_back(Edge{Relation::kAppend, Parenthetical("really", WordClass::kAdverb, "final", "comma")});
  out.affirm = std::move(affirm);
  return out;
}

// ---- Dialog assembly ----

namespace {

enum class Actor { kOwn, kOther };

struct Elaboration {
  std::string_view feature;
  Actor actor;
};

// Evaluation order: questions, entrainment, extrapolation, interactions.
constexpr std::array<Elaboration, 9> kElaborations = {{
    {"wh_with_answer", Actor::kOther},
    {"provoking", Actor::kOther},
    {"tag_questions", Actor::kOwn},
    {"rhetorical_question", Actor::kOwn},
    {"repetition", Actor::kOther},
    {"paraphrase", Actor::kOther},
    {"state_change", Actor::kOwn},
    {"affirm_adjective", Actor::kOther},
    {"corrections", Actor::kOwn},
}};

struct Item {
  Speaker speaker = Speaker::kS1;
  std::optional<DsyntTree> tree;
  std::string canned;
  std::vector<std::size_t> sources;
  std::size_t fragment = 0;
  std::string tag;
  std::vector<std::string> transforms;
  std::vector<std::string> markers;
  bool elaborated = false;

  bool content() const { return tag.empty(); }
};

// Elaboration sentence. `anchor` marks the one sentence that records the
// feature among its transforms.
Item Elab(Speaker s, const Item& origin, std::string_view feature, bool anchor, std::optional<DsyntTree> tree,
          std::string canned = {}) {
  Item it;
  it.speaker = s;
  it.tree = std::move(tree);
  it.canned = std::move(canned);
  it.sources = origin.sources;
  it.tag = std::string(feature);
  if (anchor) it.transforms.push_back(std::string(feature));
  it.elaborated = true;
  return it;
}

class Engine {
 public:
  Engine(const Story& story, const ParameterSet& params, std::uint64_t seed, const Resources& res)
      : story_(story),
        params_(params),
        seed_(seed),
        res_(res),
        db_(StoryDatabase::Build(story, res.lexicon)),
        samplers_{FeatureSampler(params.profile(Speaker::kS1), seed, "S1"),
                  FeatureSampler(params.profile(Speaker::kS2), seed, "S2")},
        provoking_(Rng::ForStage(seed, "provoking.lines")) {}

  Dialog Run() {
    for (std::size_t i = 0; i < story_.sentences.size(); ++i) {
      auto diags = ValidateTree(story_.sentences[i], &story_.characters);
      if (!diags.empty()) {
        throw std::invalid_argument("sentence " + std::to_string(i) + " " + diags.front().path.ToString() + ": " +
                                    diags.front().message);
      }
    }
    Deaggregate();
    Rng alloc = Rng::ForStage(seed_, "allocate");
    dialog_.allocation = Allocate(story_.sentences.size(), params_.ratio, params_.chunk, alloc);
    for (Item& it : items_) it.speaker = dialog_.allocation.speakers[it.sources.front()];
    Elaborate();
    Aggregate();
    if (params_.pronominalize) PronominalizeAll();
    LexicalChoice();
    Markers();
    Exclamation();
    Assemble();
    dialog_.params = params_;
    dialog_.seed = seed_;
    return std::move(dialog_);
  }

 private:
  FeatureSampler& sampler(Speaker s) { return samplers_[static_cast<int>(s)]; }
  const FeatureProfile& profile(Speaker s) const { return params_.profile(s); }

  FeatureDecision Decide(Speaker s, std::string_view feature, std::size_t sentence, bool ok) {
    FeatureDecision d = sampler(s).Decide(feature, sentence, ok);
    dialog_.decisions.push_back({s, d});
    return d;
  }

  Rng& ChoiceRng(std::string_view stage) {
    auto it = choice_.find(stage);
    if (it == choice_.end()) it = choice_.emplace(std::string(stage), Rng::ForStage(seed_, std::string(stage))).first;
    return it->second;
  }

  bool Viable(const DsyntTree& tree) const {
    if (!ValidateTree(tree, &story_.characters).empty()) return false;
    try {
      Realize(tree, res_.morph, story_.characters);
    } catch (const RealizationError&) {
      return false;
    }
    return true;
  }

  void Deaggregate() {
    for (std::size_t i = 0; i < story_.sentences.size(); ++i) {
      const DsyntTree& tree = story_.sentences[i];
      std::vector<DsyntTree> parts = params_.split ? SplitLong(tree, params_.split_threshold) : std::vector{tree};
      for (std::size_t k = 0; k < parts.size(); ++k) {
        Item it;
        it.tree = parts[k];
        it.sources = {i};
        it.fragment = k;
        if (parts.size() > 1) it.transforms.push_back("split");
        items_.push_back(std::move(it));
      }
    }
  }

  std::size_t NextFragment(const std::vector<std::size_t>& sources) const {
    std::size_t n = 0;
    for (const Item& it : items_) {
      if (it.content() && it.sources == sources) n = std::max(n, it.fragment + 1);
    }
    return n;
  }

  bool TurnInitial(std::size_t i) const { return i == 0 || items_[i - 1].speaker != items_[i].speaker; }

  // Deferred edit of items_ for an accepted elaboration; nullopt from Plan
  // means the feature cannot apply to the sentence.
  using Apply = std::function<void()>;

  std::optional<Apply> Plan(std::string_view feature, std::size_t i, Speaker actor) {
    Item& it = items_[i];
    const DsyntTree& tree = *it.tree;
    Speaker owner = it.speaker;
    if (feature == "wh_with_answer") {
      if (!IsDeclarative(tree)) return std::nullopt;
      auto target = WhTarget(tree);
      if (!target) return std::nullopt;
      QuestionAnswer qa;
      try {
        qa = MakeWhQuestion(tree, *target, story_.characters);
      } catch (const UnsupportedTarget&) {
        return std::nullopt;
      }
      if (!Viable(qa.question)) return std::nullopt;
      return [this, i, actor, q = std::move(qa.question)] {
        items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i), Elab(actor, items_[i], "wh_with_answer", true, q));
      };
    }
    if (feature == "provoking") {
      if (!TurnInitial(i) || (i > 0 && !items_[i - 1].content())) return std::nullopt;
      return [this, i, actor] {
        items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i),
                      Elab(actor, items_[i], "provoking", true, std::nullopt, provoking_.Next()));
      };
    }
    if (feature == "tag_questions") {
      if (!IsDeclarative(tree)) return std::nullopt;
      DsyntTree tagged;
      try {
        tagged = MakeTagQuestion(tree, story_.characters, res_.morph);
      } catch (const UnsupportedTarget&) {
        return std::nullopt;
      }
      if (!Viable(tagged)) return std::nullopt;
      return [this, i, t = std::move(tagged)] {
        items_[i].tree = t;
        items_[i].transforms.push_back("tag_questions");
      };
    }
    if (feature == "rhetorical_question") {
      if (!IsDeclarative(tree)) return std::nullopt;
      DsyntTree q = MakeRhetoricalQuestion(tree);
      if (!Viable(q)) return std::nullopt;
      return [this, i, owner, q = std::move(q)] {
        items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i),
                      Elab(owner, items_[i], "rhetorical_question", true, q));
      };
    }
    if (feature == "repetition" || feature == "paraphrase") {
      if (!IsDeclarative(tree)) return std::nullopt;
      RepetitionMode mode = feature == "repetition" ? RepetitionMode::kVerbatim : RepetitionMode::kParaphrase;
      Repetition rep = MakeRepetition(tree, mode, res_.lexicon, profile(actor).vocabulary,
                                      ChoiceRng(std::string(feature) + ".choice/" + std::string(ToString(actor))));
      if (!Viable(rep.tree)) return std::nullopt;
      return [this, i, actor, feature, rep = std::move(rep)] {
        Item e = Elab(actor, items_[i], feature, true, rep.tree);
        items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(e));
      };
    }
    if (feature == "state_change") {
      for (const std::string& c : MentionedCharacters(tree)) {
        auto change = MakeStateChange(db_, c, it.sources.front());
        if (!change || !Viable(*change)) continue;
        return [this, i, owner, t = std::move(*change)] {
          items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i) + 1, Elab(owner, items_[i], "state_change", true, t));
        };
      }
      return std::nullopt;
    }
    if (feature == "affirm_adjective") {
      auto aff = MakeAffirmation(tree, res_.lexicon, profile(actor).vocabulary,
                                 ChoiceRng("affirm_adjective.choice/" + std::string(ToString(actor))));
      if (!aff || !Viable(aff->truncated) || (aff->resume && !Viable(*aff->resume))) return std::nullopt;
      return [this, i, actor, owner, a = std::move(*aff)] {
        std::size_t fragment = NextFragment(items_[i].sources);
        items_[i].tree = a.truncated;
        std::vector<Item> after = {Elab(actor, items_[i], "affirm_adjective", true, a.affirm)};
        if (a.resume) {
          Item resume;
          resume.speaker = owner;
          resume.tree = *a.resume;
          resume.sources = items_[i].sources;
          resume.fragment = fragment;
          resume.elaborated = true;
          after.push_back(std::move(resume));
        }
        items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i) + 1, after.begin(), after.end());
      };
    }
    if (feature == "corrections") {
      auto pair = MakeCorrectionPair(tree);
      if (!pair || !Viable(pair->false_statement) || !Viable(pair->correction)) return std::nullopt;
      return [this, i, owner, p = std::move(*pair)] {
        items_[i].tree = p.correction;
        items_[i].transforms.push_back("corrections");
        std::vector<Item> before = {Elab(Other(owner), items_[i], "corrections", false, p.false_statement),
                                    Elab(owner, items_[i], "corrections", false, std::nullopt, kRebuttal)};
        items_.insert(items_.begin() + static_cast<std::ptrdiff_t>(i), before.begin(), before.end());
      };
    }
    return std::nullopt;
  }

  void Elaborate() {
    for (const Elaboration& e : kElaborations) {
      for (std::size_t i = 0; i < items_.size(); ++i) {
        Item& it = items_[i];
        if (!it.content() || it.elaborated || !it.tree) continue;
        Speaker actor = e.actor == Actor::kOwn ? it.speaker : Other(it.speaker);
        if (!sampler(actor).enabled(e.feature)) continue;
        std::size_t source = it.sources.front();
        std::optional<Apply> apply = Plan(e.feature, i, actor);
        FeatureDecision d = Decide(actor, e.feature, source, apply.has_value());
        if (!d.accepted) continue;
        it.elaborated = true;
        (*apply)();
      }
    }
  }

  bool Mergeable(const Item& it) const {
    return it.content() && !it.elaborated && it.transforms.empty() && it.fragment == 0 && it.sources.size() == 1 &&
           it.tree && NextFragment(it.sources) == 1;
  }

  void Aggregate() {
    if (!params_.merge) return;
    for (std::size_t i = 0; i + 1 < items_.size(); ++i) {
      Item& a = items_[i];
      Item& b = items_[i + 1];
      if (a.speaker != b.speaker || !Mergeable(a) || !Mergeable(b)) continue;
      auto merged = MergePair(*a.tree, *b.tree);
      if (!merged || CountNodes(*merged) > params_.split_threshold || !Viable(*merged)) continue;
      a.tree = std::move(*merged);
      a.sources.push_back(b.sources.front());
      a.transforms.push_back("merge");
      items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }

  SalientReferent Referent(const std::string& id) const {
    const CharacterDecl* c = story_.character(id);
    return {id, c ? c->gender : Gender::kNeut, c ? c->number : Number::kSg};
  }

  void PronominalizeAll() {
    std::vector<std::vector<std::string>> mentions;
    SalienceContext ctx;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      Item& it = items_[i];
      if (TurnInitial(i)) ctx.pronominalized.clear();
      ctx.recent.clear();
      for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
        for (const std::string& id : mentions[i - back]) {
          bool seen = std::any_of(ctx.recent.begin(), ctx.recent.end(), [&](const auto& r) { return r.id == id; });
          if (!seen && story_.character(id)) ctx.recent.push_back(Referent(id));
        }
      }
      if (it.tree) {
        PronominalizeResult r = Pronominalize(*it.tree, ctx, story_.characters, res_.morph);
        if (!r.replaced.empty() && Viable(r.tree)) {
          it.tree = std::move(r.tree);
          it.transforms.push_back("pronominalize");
          ctx.pronominalized.insert(r.replaced.begin(), r.replaced.end());
        }
        mentions.push_back(MentionedCharacters(*it.tree));
      } else {
        mentions.push_back({});
      }
      ctx.mentioned.insert(mentions.back().begin(), mentions.back().end());
    }
  }

  void LexicalChoice() {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      Item& it = items_[i];
      if (!it.content() || it.elaborated || !it.tree || !sampler(it.speaker).enabled("lexical_choice")) continue;
      Substitution s = SubstituteSynonym(*it.tree, res_.lexicon, profile(it.speaker).vocabulary,
                                         ChoiceRng("lexical.choice/" + std::string(ToString(it.speaker))));
      bool ok = s.to.has_value() && Viable(s.tree);
      if (Decide(it.speaker, "lexical_choice", i, ok).accepted) {
        it.tree = std::move(s.tree);
        it.transforms.push_back("lexical_choice");
      }
    }
  }

  std::vector<std::string> MarkerFeatures(Speaker s) const {
    std::vector<std::string> out;
    for (const std::string& g : res_.markers.groups()) {
      if (profile(s).frequency(g) > 0) out.push_back(g);
    }
    for (const MarkerSpec& m : res_.markers.specs()) {
      if (profile(s).frequency(m.id) > 0 && std::find(out.begin(), out.end(), m.id) == out.end()) out.push_back(m.id);
    }
    return out;
  }

  void Markers() {
    std::array<std::vector<std::string>, 2> features = {MarkerFeatures(Speaker::kS1), MarkerFeatures(Speaker::kS2)};
    for (std::size_t i = 0; i < items_.size(); ++i) {
      Item& it = items_[i];
      if (!it.tree || it.tree->word_class != WordClass::kVerb || it.tree->has("punct", "trail")) continue;
      MarkerContext ctx{TurnInitial(i), {}};
      bool echo = it.tag == "repetition" || it.tag == "paraphrase";
      for (const Edge& e : it.tree->children) {
        if (e.rel != Relation::kAppend) continue;
        if (e.node.has("position", "initial")) ctx.used_slots.push_back(MarkerSlot::kInitial);
        if (e.node.has("position", "final")) ctx.used_slots.push_back(MarkerSlot::kFinal);
      }
      for (const std::string& f : features[static_cast<int>(it.speaker)]) {
        std::vector<const MarkerSpec*> members;
        if (const MarkerSpec* single = res_.markers.find(f)) {
          members = {single};
        } else {
          members = res_.markers.group(f);
        }
        std::vector<const MarkerSpec*> fits;
        for (const MarkerSpec* m : members) {
          if (echo && (m->group == "ack_casual" || m->group == "ack_formal")) continue;
          if (!CheckMarker(*it.tree, *m, ctx)) fits.push_back(m);
        }
        const MarkerSpec* pick = nullptr;
        if (!fits.empty()) {
          pick = fits[ChoiceRng("markers.choice/" + std::string(ToString(it.speaker))).Below(fits.size())];
        }
        bool ok = pick && Viable(std::get<DsyntTree>(InsertMarker(*it.tree, *pick, ctx)));
        if (!Decide(it.speaker, f, i, ok).accepted) continue;
        it.tree = std::get<DsyntTree>(InsertMarker(*it.tree, *pick, ctx));
        it.markers.push_back(pick->id);
        ctx.used_slots.push_back(pick->slot);
      }
    }
  }

  void Exclamation() {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      Item& it = items_[i];
      if (!it.content() || !it.tree || !sampler(it.speaker).enabled("exclamation")) continue;
      bool ok = IsDeclarative(*it.tree) && it.tree->feature("punct").empty();
      if (Decide(it.speaker, "exclamation", i, ok).accepted) {
        it.tree->set("punct", "exclaim");
        it.transforms.push_back("exclamation");
      }
    }
  }

  void Assemble() {
    RealizerOptions options;
    options.em_dash = params_.em_dash;
    for (Item& it : items_) {
      TraceSentence s;
      s.text = it.tree ? Realize(*it.tree, res_.morph, story_.characters, options).text : it.canned;
      if (params_.postprocess) s.text = Postprocess(s.text);
      s.speaker = it.speaker;
      s.sources = it.sources;
      s.fragment = it.fragment;
      s.tag = it.tag;
      s.transforms = it.transforms;
      s.markers = it.markers;
      s.tree = it.tree;
      if (dialog_.turns.empty() || dialog_.turns.back().speaker != it.speaker) {
        dialog_.turns.push_back(DialogTurn{it.speaker, {}});
      }
      dialog_.turns.back().sentences.push_back(std::move(s));
    }
  }

  const Story& story_;
  const ParameterSet& params_;
  std::uint64_t seed_;
  const Resources& res_;
  StoryDatabase db_;
  std::array<FeatureSampler, 2> samplers_;
  ProvokingLines provoking_;
  std::map<std::string, Rng, std::less<>> choice_;
  std::vector<Item> items_;
  Dialog dialog_;
};

}  // namespace

std::vector<const TraceSentence*> Dialog::sentences() const {
  std::vector<const TraceSentence*> out;
  for (const DialogTurn& t : turns) {
    for (const TraceSentence& s : t.sentences) out.push_back(&s);
  }
  return out;
}

Dialog BuildDialog(const Story& story, const ParameterSet& params, std::uint64_t seed, const Resources& resources) {
  return Engine(story, params, seed, resources).Run();
}

std::string RenderTranscript(const Dialog& dialog) {
  std::string out;
  for (const DialogTurn& t : dialog.turns) {
    out += ToString(t.speaker);
    out += ":";
    for (const TraceSentence& s : t.sentences) {
      out += ' ';
      out += s.text;
    }
    out += '\n';
  }
  return out;
}

}  // namespace m2d
