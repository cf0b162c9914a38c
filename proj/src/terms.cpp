#include <picheck/terms.hpp>

#include <picheck/syntax.hpp>

#include <algorithm>
#include <atomic>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>

namespace picheck {

// ---------------------------------------------------------------------------
// Names

namespace {

struct NameTable {
  std::shared_mutex mutex;
  std::deque<std::string> texts{std::string()};
  std::unordered_map<std::string_view, std::uint32_t> ids{{std::string_view(texts.front()), 0}};
};

NameTable& name_table() {
  static NameTable table;
  return table;
}

std::atomic<std::uint64_t> fresh_counter{0};

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Name::Name(std::string_view text) {
  NameTable& t = name_table();
  {
    std::shared_lock lock(t.mutex);
    auto it = t.ids.find(text);
    if (it != t.ids.end()) {
      id_ = it->second;
      text_ = &t.texts[id_];
      return;
    }
  }
  std::unique_lock lock(t.mutex);
  auto it = t.ids.find(text);
  if (it != t.ids.end()) {
    id_ = it->second;
    text_ = &t.texts[id_];
    return;
  }
  // Deque elements never move, so text_ stays valid.
  t.texts.emplace_back(text);
  id_ = static_cast<std::uint32_t>(t.texts.size() - 1);
  text_ = &t.texts.back();
  t.ids.emplace(std::string_view(t.texts.back()), id_);
}

const std::string& Name::empty_text() {
  static const std::string empty;
  return empty;
}

std::strong_ordering Name::operator<=>(const Name& other) const {
  if (id_ == other.id_) return std::strong_ordering::equal;
  int c = str().compare(other.str());
  return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string Name::stem() const {
  const std::string& s = str();
  auto pos = s.find('#');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

Name Name::fresh(std::string_view stem) {
  std::string base(stem);
  if (auto pos = base.find('#'); pos != std::string::npos) base.resize(pos);
  std::uint64_t k = fresh_counter.fetch_add(1, std::memory_order_relaxed);
  return Name(base + "#" + std::to_string(k));
}

void Name::reset_fresh_counter() { fresh_counter.store(0); }

// ---------------------------------------------------------------------------
// Aliases and symbols

std::strong_ordering Alias::operator<=>(const Alias& other) const {
  if (auto c = prefix <=> other.prefix; c != 0) return c;
  return base <=> other.base;
}

std::string Alias::str() const {
  std::string out = "@";
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) out.push_back('.');
    out.push_back(prefix[i]);
  }
  out.push_back(':');
  out += base.str();
  return out;
}

std::size_t arity(Symbol s) {
  switch (s) {
    case Symbol::fst:
    case Symbol::snd:
    case Symbol::h:
      return 1;
    default:
      return 2;
  }
}

std::string_view symbol_name(Symbol s) {
  switch (s) {
    case Symbol::pair: return "pair";
    case Symbol::fst: return "fst";
    case Symbol::snd: return "snd";
    case Symbol::enc: return "enc";
    case Symbol::dec: return "dec";
    case Symbol::mac: return "mac";
    case Symbol::h: return "h";
  }
  return "?";
}

std::optional<Symbol> symbol_from_name(std::string_view text) {
  for (Symbol s : {Symbol::pair, Symbol::fst, Symbol::snd, Symbol::enc, Symbol::dec, Symbol::mac,
                   Symbol::h}) {
    if (symbol_name(s) == text) return s;
  }
  return std::nullopt;
}

bool is_constructor(Symbol s) {
  return s == Symbol::pair || s == Symbol::enc || s == Symbol::mac || s == Symbol::h;
}

// ---------------------------------------------------------------------------
// Messages

struct Message::Node {
  Kind kind;
  Name name;
  Alias alias;
  Symbol symbol = Symbol::pair;
  std::vector<Message> args;
  std::size_t hash = 0;
  std::size_t size = 1;
  std::size_t height = 1;
  bool normal = true;
};

namespace {

// Root redex check for a node whose arguments are already normal.
bool root_redex(Symbol s, const std::vector<Message>& args) {
  switch (s) {
    case Symbol::fst:
    case Symbol::snd:
      return args[0].is_apply() && args[0].symbol() == Symbol::pair;
    case Symbol::dec:
      return args[0].is_apply() && args[0].symbol() == Symbol::enc && args[0].arg(1) == args[1];
    default:
      return false;
  }
}

}  // namespace

Message Message::name(Name n) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::name;
  node->name = n;
  node->hash = mix(1, std::hash<std::string>{}(n.str()));
  return Message(std::move(node));
}

Message Message::alias(Alias a) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::alias;
  node->hash = mix(mix(2, std::hash<std::string>{}(a.prefix)), std::hash<std::string>{}(a.base.str()));
  node->alias = std::move(a);
  return Message(std::move(node));
}

Message Message::apply(Symbol s, std::vector<Message> args) {
  if (args.size() != arity(s)) {
    throw Error(std::string(symbol_name(s)) + " expects " + std::to_string(arity(s)) +
                " argument(s)");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::apply;
  node->symbol = s;
  std::size_t h = mix(3, static_cast<std::size_t>(s));
  bool normal = true;
  for (const Message& a : args) {
    if (!a.valid()) throw Error("invalid message argument");
    h = mix(h, a.hash());
    normal = normal && a.is_normal();
    node->size += a.size();
    node->height = std::max(node->height, a.height() + 1);
  }
  node->normal = normal && !root_redex(s, args);
  node->hash = h;
  node->args = std::move(args);
  return Message(std::move(node));
}

Message::Kind Message::kind() const { return node_->kind; }
const Name& Message::as_name() const { return node_->name; }
const Alias& Message::as_alias() const { return node_->alias; }
Symbol Message::symbol() const { return node_->symbol; }
std::span<const Message> Message::args() const { return node_->args; }
std::size_t Message::hash() const { return node_->hash; }
bool Message::is_normal() const { return node_->normal; }
std::size_t Message::size() const { return node_->size; }
std::size_t Message::height() const { return node_->height; }

bool Message::operator==(const Message& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (node_->hash != other.node_->hash || node_->kind != other.node_->kind) return false;
  switch (node_->kind) {
    case Kind::name:
      return node_->name == other.node_->name;
    case Kind::alias:
      return node_->alias == other.node_->alias;
    case Kind::apply:
      return node_->symbol == other.node_->symbol && node_->args == other.node_->args;
  }
  return false;
}

std::strong_ordering Message::operator<=>(const Message& other) const {
  if (node_ == other.node_) return std::strong_ordering::equal;
  if (!node_) return std::strong_ordering::less;
  if (!other.node_) return std::strong_ordering::greater;
  if (auto c = node_->kind <=> other.node_->kind; c != 0) return c;
  switch (node_->kind) {
    case Kind::name:
      return node_->name <=> other.node_->name;
    case Kind::alias:
      return node_->alias <=> other.node_->alias;
    case Kind::apply:
      if (auto c = node_->symbol <=> other.node_->symbol; c != 0) return c;
      for (std::size_t i = 0; i < node_->args.size(); ++i) {
        if (auto c = node_->args[i] <=> other.node_->args[i]; c != 0) return c;
      }
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

std::string Message::str() const {
  if (!node_) return "<invalid>";
  switch (node_->kind) {
    case Kind::name:
      return node_->name.str();
    case Kind::alias:
      return node_->alias.str();
    case Kind::apply: {
      std::string out(symbol_name(node_->symbol));
      out.push_back('(');
      for (std::size_t i = 0; i < node_->args.size(); ++i) {
        if (i) out += ",";
        out += node_->args[i].str();
      }
      out.push_back(')');
      return out;
    }
  }
  return {};
}

Message pair(Message a, Message b) { return Message::apply(Symbol::pair, {std::move(a), std::move(b)}); }
Message fst(Message a) { return Message::apply(Symbol::fst, {std::move(a)}); }
Message snd(Message a) { return Message::apply(Symbol::snd, {std::move(a)}); }
Message enc(Message a, Message k) { return Message::apply(Symbol::enc, {std::move(a), std::move(k)}); }
Message dec(Message a, Message k) { return Message::apply(Symbol::dec, {std::move(a), std::move(k)}); }
Message mac(Message a, Message k) { return Message::apply(Symbol::mac, {std::move(a), std::move(k)}); }
Message hash_of(Message a) { return Message::apply(Symbol::h, {std::move(a)}); }

Message normalize(const Message& m) {
  if (m.is_normal()) return m;
  std::vector<Message> args;
  args.reserve(m.args().size());
  for (const Message& a : m.args()) args.push_back(normalize(a));
  if (root_redex(m.symbol(), args)) {
    // The contractum is a subterm of a normal form, hence normal.
    switch (m.symbol()) {
      case Symbol::fst: return args[0].arg(0);
      case Symbol::snd: return args[0].arg(1);
      case Symbol::dec: return args[0].arg(0);
      default: break;
    }
  }
  return Message::apply(m.symbol(), std::move(args));
}

bool eq_modulo_E(const Message& m, const Message& n) { return normalize(m) == normalize(n); }

void collect_names(const Message& m, std::set<Name>& out) {
  switch (m.kind()) {
    case Message::Kind::name: out.insert(m.as_name()); break;
    case Message::Kind::alias: break;
    case Message::Kind::apply:
      for (const Message& a : m.args()) collect_names(a, out);
      break;
  }
}

void collect_aliases(const Message& m, std::set<Alias>& out) {
  switch (m.kind()) {
    case Message::Kind::name: break;
    case Message::Kind::alias: out.insert(m.as_alias()); break;
    case Message::Kind::apply:
      for (const Message& a : m.args()) collect_aliases(a, out);
      break;
  }
}

std::set<Name> names_of(const Message& m) {
  std::set<Name> out;
  collect_names(m, out);
  return out;
}

std::set<Alias> aliases_of(const Message& m) {
  std::set<Alias> out;
  collect_aliases(m, out);
  return out;
}

bool mentions_name(const Message& m, const Name& n) {
  switch (m.kind()) {
    case Message::Kind::name: return m.as_name() == n;
    case Message::Kind::alias: return false;
    case Message::Kind::apply:
      for (const Message& a : m.args()) {
        if (mentions_name(a, n)) return true;
      }
      return false;
  }
  return false;
}

bool has_alias(const Message& m) {
  switch (m.kind()) {
    case Message::Kind::name: return false;
    case Message::Kind::alias: return true;
    case Message::Kind::apply:
      for (const Message& a : m.args()) {
        if (has_alias(a)) return true;
      }
      return false;
  }
  return false;
}

namespace {

template <typename Leaf>
Message rebuild(const Message& m, const Leaf& leaf) {
  if (!m.is_apply()) return leaf(m);
  std::vector<Message> args;
  args.reserve(m.args().size());
  bool changed = false;
  for (const Message& a : m.args()) {
    args.push_back(rebuild(a, leaf));
    changed = changed || !(args.back() == a);
  }
  return changed ? Message::apply(m.symbol(), std::move(args)) : m;
}

}  // namespace

Message replace_name(const Message& m, const Name& from, const Message& to) {
  return rebuild(m, [&](const Message& leaf) {
    return leaf.is_name() && leaf.as_name() == from ? to : leaf;
  });
}

Message rename_names(const Message& m, const std::map<Name, Name>& renaming) {
  if (renaming.empty()) return m;
  return rebuild(m, [&](const Message& leaf) {
    if (!leaf.is_name()) return leaf;
    auto it = renaming.find(leaf.as_name());
    return it == renaming.end() ? leaf : Message::name(it->second);
  });
}

// ---------------------------------------------------------------------------
// Substitutions

Substitution::Substitution(std::initializer_list<std::pair<const Alias, Message>> init) {
  for (const auto& [a, m] : init) set(a, m);
}

void Substitution::set(const Alias& a, Message m) {
  if (m.is_alias() && m.as_alias() == a) {
    map_.erase(a);
    return;
  }
  map_[a] = std::move(m);
}

const Message* Substitution::find(const Alias& a) const {
  auto it = map_.find(a);
  return it == map_.end() ? nullptr : &it->second;
}

std::vector<Alias> Substitution::domain() const {
  std::vector<Alias> out;
  out.reserve(map_.size());
  for (const auto& [a, m] : map_) out.push_back(a);
  return out;
}

Substitution Substitution::compose(const Substitution& then) const {
  Substitution out;
  for (const auto& [a, m] : map_) out.set(a, apply_substitution(m, then));
  for (const auto& [a, m] : then.map_) {
    if (!map_.count(a)) out.set(a, m);
  }
  return out;
}

Message apply_substitution(const Message& m, const Substitution& s) {
  if (s.empty()) return m;
  return rebuild(m, [&](const Message& leaf) {
    if (!leaf.is_alias()) return leaf;
    const Message* v = s.find(leaf.as_alias());
    return v ? *v : leaf;
  });
}

bool Frame::binds(const Name& n) const {
  return std::find(bound_names.begin(), bound_names.end(), n) != bound_names.end();
}

// ---------------------------------------------------------------------------
// Alias bijections

AliasBijection AliasBijection::identity(const std::vector<Alias>& dom) {
  AliasBijection b;
  for (const Alias& a : dom) b.add(a, a);
  return b;
}

void AliasBijection::add(const Alias& left, const Alias& right) {
  if (fwd_.count(left) || bwd_.count(right)) {
    throw Error("alias bijection already maps " + left.str() + " or " + right.str());
  }
  fwd_.emplace(left, right);
  bwd_.emplace(right, left);
}

const Alias* AliasBijection::forward(const Alias& a) const {
  auto it = fwd_.find(a);
  return it == fwd_.end() ? nullptr : &it->second;
}

const Alias* AliasBijection::backward(const Alias& a) const {
  auto it = bwd_.find(a);
  return it == bwd_.end() ? nullptr : &it->second;
}

AliasBijection AliasBijection::inverse() const {
  AliasBijection out;
  out.fwd_ = bwd_;
  out.bwd_ = fwd_;
  return out;
}

Substitution AliasBijection::as_substitution() const {
  Substitution s;
  for (const auto& [l, r] : fwd_) s.set(l, Message::alias(r));
  return s;
}

// ---------------------------------------------------------------------------
// Equalities and static equivalence

namespace {

void reject_bound(const Frame& f, const Message& m) {
  std::set<Name> names;
  collect_names(m, names);
  for (const Name& n : names) {
    if (f.binds(n)) throw Error("test mentions the private name " + n.str());
  }
}

bool mentions_any(const Message& m, const std::vector<Name>& names) {
  for (const Name& n : names) {
    if (mentions_name(m, n)) return true;
  }
  return false;
}

Message evaluate(const Frame& f, const Message& recipe) {
  return normalize(apply_substitution(recipe, f.subst));
}

}  // namespace

bool satisfies_equality(const Frame& f, const Message& m, const Message& n) {
  reject_bound(f, m);
  reject_bound(f, n);
  return evaluate(f, m) == evaluate(f, n);
}

std::set<Name> public_names(const Frame& f) {
  std::set<Name> names;
  for (const auto& [a, m] : f.subst.entries()) collect_names(m, names);
  for (const Name& b : f.bound_names) names.erase(b);
  return names;
}

namespace {

struct Saturation {
  Knowledge knowledge;
  std::vector<Message> collisions;  // recipes whose value was already known
};

Saturation saturate_with_collisions(const Frame& f) {
  Saturation out;
  std::unordered_map<Message, std::size_t> index;
  auto add = [&](Message recipe, Message value) {
    auto [it, inserted] = index.emplace(value, out.knowledge.entries.size());
    if (inserted) {
      out.knowledge.entries.push_back({std::move(recipe), std::move(value)});
    } else {
      out.collisions.push_back(std::move(recipe));
    }
  };
  for (const auto& [a, m] : f.subst.entries()) add(Message::alias(a), normalize(m));
  for (const Name& n : public_names(f)) add(Message::name(n), Message::name(n));

  // Analysis to fixpoint: projections of pairs, decryptions with deducible keys.
  std::size_t processed = 0;
  bool progress = true;
  std::set<std::size_t> pending_dec;
  while (progress) {
    progress = false;
    for (; processed < out.knowledge.entries.size(); ++processed) {
      const Message value = out.knowledge.entries[processed].value;
      const Message recipe = out.knowledge.entries[processed].recipe;
      if (value.is_apply() && value.symbol() == Symbol::pair) {
        add(fst(recipe), value.arg(0));
        add(snd(recipe), value.arg(1));
      } else if (value.is_apply() && value.symbol() == Symbol::enc) {
        pending_dec.insert(processed);
      }
      progress = true;
    }
    for (auto it = pending_dec.begin(); it != pending_dec.end();) {
      const auto& e = out.knowledge.entries[*it];
      Message key = e.value.arg(1);
      std::optional<Message> key_recipe;
      if (!mentions_any(key, f.bound_names) && !has_alias(key)) {
        key_recipe = key;
      } else {
        Frame probe{f.bound_names, f.subst};
        key_recipe = find_recipe(probe, out.knowledge, key);
      }
      if (key_recipe) {
        Message r = dec(e.recipe, *key_recipe);
        Message v = e.value.arg(0);
        it = pending_dec.erase(it);
        add(std::move(r), std::move(v));
        progress = true;
      } else {
        ++it;
      }
    }
    if (processed < out.knowledge.entries.size()) progress = true;
  }
  return out;
}

std::optional<Message> synthesize(const Frame& f,
                                  const std::unordered_map<Message, Message>& known,
                                  const Message& target) {
  if (!mentions_any(target, f.bound_names) && !has_alias(target)) return target;
  if (auto it = known.find(target); it != known.end()) return it->second;
  if (target.is_apply() && is_constructor(target.symbol())) {
    std::vector<Message> args;
    for (const Message& a : target.args()) {
      auto r = synthesize(f, known, a);
      if (!r) return std::nullopt;
      args.push_back(*r);
    }
    return Message::apply(target.symbol(), std::move(args));
  }
  return std::nullopt;
}

}  // namespace

Knowledge saturate(const Frame& f) { return saturate_with_collisions(f).knowledge; }

std::optional<Message> find_recipe(const Frame& f, const Knowledge& k, const Message& target) {
  std::unordered_map<Message, Message> known;
  for (const auto& e : k.entries) known.emplace(e.value, e.recipe);
  return synthesize(f, known, normalize(target));
}

std::optional<Message> find_recipe(const Frame& f, const Message& target) {
  return find_recipe(f, saturate(f), target);
}

namespace {

// A recipe for a saturated value other than its own entry: the value itself
// when public, or its top constructor over synthesized arguments.
std::optional<Message> rebuild(const Frame& f, const std::unordered_map<Message, Message>& known,
                               const Message& value) {
  if (!mentions_any(value, f.bound_names) && !has_alias(value)) return value;
  if (!value.is_apply() || !is_constructor(value.symbol())) return std::nullopt;
  std::vector<Message> args;
  for (const Message& a : value.args()) {
    auto r = synthesize(f, known, a);
    if (!r) return std::nullopt;
    args.push_back(*r);
  }
  return Message::apply(value.symbol(), std::move(args));
}

// Collisions plus a rebuild test for every saturated value that has one.
std::vector<Message> equality_witnesses(const Frame& f, const Saturation& sat) {
  std::vector<Message> out = sat.collisions;
  std::unordered_map<Message, Message> known;
  for (const auto& e : sat.knowledge.entries) known.emplace(e.value, e.recipe);
  for (const auto& e : sat.knowledge.entries) {
    auto r = rebuild(f, known, e.value);
    if (r && *r != e.recipe) out.push_back(*r);
  }
  return out;
}

// A test recipe with its value on both frames.
struct Probe {
  Message va;
  Message vb;
};

// Tests for each side: saturated recipes, equality witnesses, and one layer of
// every function symbol over saturated recipes. Values are computed from the
// atom values; composite recipes are only built for a witness.
class ProbeSet {
 public:
  // `atoms` and `collisions` hold recipes over a's aliases.
  // `collisions` also holds the constructor rebuilds of saturated values.
  void add_side(std::vector<Message> atoms, std::vector<Probe> atom_values,
                std::vector<Message> collisions, std::vector<Probe> collision_values) {
    std::size_t side = sides_.size();
    sides_.push_back({std::move(atoms), std::move(collisions)});
    const Side& sd = sides_.back();
    for (std::size_t i = 0; i < sd.atoms.size(); ++i) {
      push(atom_values[i], {side, Desc::atom, Symbol::h, i, 0});
    }
    for (std::size_t i = 0; i < sd.collisions.size(); ++i) {
      push(collision_values[i], {side, Desc::collision, Symbol::h, i, 0});
    }
    for (std::size_t i = 0; i < sd.atoms.size(); ++i) {
      const Probe& x = atom_values[i];
      for (Symbol s : {Symbol::fst, Symbol::snd, Symbol::h}) {
        push({value(s, {x.va}), value(s, {x.vb})}, {side, Desc::unary, s, i, 0});
      }
      for (std::size_t j = 0; j < sd.atoms.size(); ++j) {
        const Probe& y = atom_values[j];
        for (Symbol s : {Symbol::pair, Symbol::enc, Symbol::dec, Symbol::mac}) {
          push({value(s, {x.va, y.va}), value(s, {x.vb, y.vb})}, {side, Desc::binary, s, i, j});
        }
      }
    }
  }

  Message recipe(std::size_t k) const {
    const Desc& d = descs_[k];
    const Side& sd = sides_[d.side];
    switch (d.kind) {
      case Desc::atom: return sd.atoms[d.i];
      case Desc::collision: return sd.collisions[d.i];
      case Desc::unary: return Message::apply(d.symbol, {sd.atoms[d.i]});
      case Desc::binary: return Message::apply(d.symbol, {sd.atoms[d.i], sd.atoms[d.j]});
    }
    return {};
  }

  std::vector<Probe> probes;

 private:
  struct Side {
    std::vector<Message> atoms;
    std::vector<Message> collisions;
  };
  struct Desc {
    enum Kind : std::uint8_t { atom, collision, unary, binary };
    std::size_t side;
    Kind kind;
    Symbol symbol;
    std::size_t i, j;
  };

  static Message value(Symbol s, std::vector<Message> args) {
    return normalize(Message::apply(s, std::move(args)));
  }
  void push(Probe p, Desc d) {
    probes.push_back(std::move(p));
    descs_.push_back(d);
  }

  std::vector<Side> sides_;
  std::vector<Desc> descs_;
};

void check_bijection(const Frame& a, const Frame& b, const AliasBijection& rho) {
  if (rho.size() != a.subst.size() || rho.size() != b.subst.size()) {
    throw Error("alias bijection does not cover both frame domains");
  }
  for (const auto& [l, r] : rho.entries()) {
    if (!a.subst.contains(l) || !b.subst.contains(r)) {
      throw Error("alias bijection maps outside the frame domains: " + l.str() + " -> " +
                  r.str());
    }
  }
}

}  // namespace

std::optional<std::pair<Message, Message>> distinguishing_test(const Frame& a, const Frame& b,
                                                               const AliasBijection& rho) {
  check_bijection(a, b, rho);
  Substitution to_b = rho.as_substitution();
  Substitution to_a = rho.inverse().as_substitution();

  // Recipes are expressed over a's aliases.
  ProbeSet set;
  {
    Saturation sa = saturate_with_collisions(a);
    std::vector<Message> atoms;
    std::vector<Probe> atom_values, collision_values;
    for (const auto& e : sa.knowledge.entries) {
      atoms.push_back(e.recipe);
      atom_values.push_back({e.value, evaluate(b, apply_substitution(e.recipe, to_b))});
    }
    std::vector<Message> collisions = equality_witnesses(a, sa);
    for (const Message& r : collisions) {
      collision_values.push_back({evaluate(a, r), evaluate(b, apply_substitution(r, to_b))});
    }
    set.add_side(std::move(atoms), std::move(atom_values), std::move(collisions),
                 std::move(collision_values));
  }
  {
    Saturation sb = saturate_with_collisions(b);
    std::vector<Message> atoms, collisions;
    std::vector<Probe> atom_values, collision_values;
    for (const auto& e : sb.knowledge.entries) {
      Message r = apply_substitution(e.recipe, to_a);
      atom_values.push_back({evaluate(a, r), e.value});
      atoms.push_back(std::move(r));
    }
    for (const Message& rb : equality_witnesses(b, sb)) {
      Message r = apply_substitution(rb, to_a);
      collision_values.push_back({evaluate(a, r), evaluate(b, rb)});
      collisions.push_back(std::move(r));
    }
    set.add_side(std::move(atoms), std::move(atom_values), std::move(collisions),
                 std::move(collision_values));
  }

  // The equality partitions induced on both sides must coincide.
  std::unordered_map<Message, std::size_t> class_a, class_b;
  std::vector<std::size_t> rep_of_a, b_of_a;  // a-class -> first test, paired b-class
  std::vector<std::size_t> a_of_b;
  for (std::size_t i = 0; i < set.probes.size(); ++i) {
    const Message& va = set.probes[i].va;
    const Message& vb = set.probes[i].vb;
    auto [ia, new_a] = class_a.emplace(va, rep_of_a.size());
    auto [ib, new_b] = class_b.emplace(vb, a_of_b.size());
    if (new_a) {
      rep_of_a.push_back(i);
      b_of_a.push_back(ib->second);
    }
    if (new_b) a_of_b.push_back(ia->second);
    std::size_t ca = ia->second, cb = ib->second;
    if (b_of_a[ca] != cb) {
      // Equal on a (to the class representative) but not on b.
      return std::make_pair(set.recipe(rep_of_a[ca]), set.recipe(i));
    }
    if (a_of_b[cb] != ca) {
      for (std::size_t j = 0; j < i; ++j) {
        if (set.probes[j].vb == vb) return std::make_pair(set.recipe(j), set.recipe(i));
      }
    }
  }
  return std::nullopt;
}

bool static_equivalent(const Frame& a, const Frame& b, const AliasBijection& rho) {
  return !distinguishing_test(a, b, rho).has_value();
}

}  // namespace picheck
