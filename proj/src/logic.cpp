#include <picheck/logic.hpp>

#include <picheck/syntax.hpp>

#include <algorithm>
#include <unordered_map>

namespace picheck {

struct Formula::Node {
  Kind kind;
  Message lhs, rhs;
  std::vector<Formula> kids;
  ActionPattern pattern;
  std::optional<LocationLabel> loc;
};

const Formula::Node& Formula::expect(Kind k, const char* what) const {
  if (node_->kind != k) throw Error(std::string("formula is not a ") + what);
  return *node_;
}

Formula Formula::top() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::top;
  return Formula(n);
}

Formula Formula::bottom() { return neg(top()); }

Formula Formula::equal(Message lhs, Message rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::equal;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(n);
}

Formula Formula::conj(Formula left, Formula right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::conj;
  n->kids = {std::move(left), std::move(right)};
  return Formula(n);
}

Formula Formula::neg(Formula body) {
  if (body.kind() == Kind::neg) return body.body();
  auto n = std::make_shared<Node>();
  n->kind = Kind::neg;
  n->kids = {std::move(body)};
  return Formula(n);
}

Formula Formula::disj(Formula left, Formula right) {
  return neg(conj(neg(std::move(left)), neg(std::move(right))));
}

Formula Formula::implies(Formula left, Formula right) {
  return disj(neg(std::move(left)), std::move(right));
}

Formula Formula::diamond(ActionPattern pattern, std::optional<LocationLabel> loc, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::diamond;
  n->pattern = std::move(pattern);
  n->loc = std::move(loc);
  n->kids = {std::move(body)};
  return Formula(n);
}

Formula Formula::box(ActionPattern pattern, std::optional<LocationLabel> loc, Formula body) {
  return neg(diamond(std::move(pattern), std::move(loc), neg(std::move(body))));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const Message& Formula::lhs() const { return expect(Kind::equal, "equality").lhs; }
const Message& Formula::rhs() const { return expect(Kind::equal, "equality").rhs; }

const Formula& Formula::left() const { return expect(Kind::conj, "conjunction").kids[0]; }
const Formula& Formula::right() const { return expect(Kind::conj, "conjunction").kids[1]; }

const Formula& Formula::body() const {
  if (node_->kind != Kind::neg && node_->kind != Kind::diamond) {
    throw Error("formula has no body");
  }
  return node_->kids[0];
}

const ActionPattern& Formula::pattern() const {
  return expect(Kind::diamond, "modality").pattern;
}

const std::optional<LocationLabel>& Formula::location() const {
  return expect(Kind::diamond, "modality").loc;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string pattern_str(const ActionPattern& p) {
  switch (p.kind) {
    case ActionPattern::Kind::tau: return "tau";
    case ActionPattern::Kind::input: return p.channel.str() + "." + p.payload.str();
    case ActionPattern::Kind::output:
      return "out " + p.channel.str() + "(" + p.binder.str() + ")";
  }
  return {};
}

std::string modality_str(const Formula& d, char open, char close) {
  std::string s(1, open);
  s += pattern_str(d.pattern());
  if (d.location()) s += " @ " + d.location()->str();
  s.push_back(close);
  return s;
}

// Levels: 0 conjunction operand context, 1 prefix operand context.
std::string print(const Formula& phi, int level) {
  switch (phi.kind()) {
    case Formula::Kind::top: return "true";
    case Formula::Kind::equal: {
      std::string s = phi.lhs().str() + " = " + phi.rhs().str();
      return level > 0 ? "(" + s + ")" : s;
    }
    case Formula::Kind::conj: {
      std::string s = print(phi.left(), 0) + " & " + print(phi.right(), 0);
      return "(" + s + ")";
    }
    case Formula::Kind::neg: {
      const Formula& b = phi.body();
      if (b.kind() == Formula::Kind::top) return "false";
      if (b.kind() == Formula::Kind::equal) {
        std::string s = b.lhs().str() + " != " + b.rhs().str();
        return level > 0 ? "(" + s + ")" : s;
      }
      if (b.kind() == Formula::Kind::diamond) {
        return modality_str(b, '[', ']') + print(Formula::neg(b.body()), 1);
      }
      return "~" + print(b, 1);
    }
    case Formula::Kind::diamond: return modality_str(phi, '<', '>') + print(phi.body(), 1);
  }
  return {};
}

}  // namespace

std::string Formula::str() const { return print(*this, 0); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, Dialect dialect) : ts_(text), dialect_(dialect) {}

  Formula parse() {
    Formula phi = implication();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return phi;
  }

 private:
  Formula implication() {
    Formula lhs = disjunction();
    if (ts_.accept_punct("->")) return Formula::implies(lhs, implication());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (ts_.accept_punct("|")) lhs = Formula::disj(lhs, conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (ts_.accept_punct("&")) lhs = Formula::conj(lhs, unary());
    return lhs;
  }

  Formula unary() {
    if (ts_.accept_punct("~")) return Formula::neg(unary());
    if (ts_.accept_punct("<")) {
      auto [pattern, loc] = modality(">");
      return Formula::diamond(pattern, loc, unary());
    }
    if (ts_.accept_punct("[")) {
      auto [pattern, loc] = modality("]");
      return Formula::box(pattern, loc, unary());
    }
    return atom();
  }

  Formula atom() {
    if (ts_.accept_ident("true")) return Formula::top();
    if (ts_.accept_ident("false")) return Formula::bottom();
    if (ts_.accept_punct("(")) {
      Formula phi = implication();
      ts_.expect_punct(")");
      return phi;
    }
    Message lhs = message();
    if (ts_.accept_punct("=")) return Formula::equal(lhs, message());
    if (ts_.accept_punct("!=")) return Formula::neg(Formula::equal(lhs, message()));
    ts_.fail("expected '=' or '!='");
    return Formula::top();
  }

  Message message() {
    const Token start = ts_.peek();
    Message m = parse_message(ts_);
    if (has_alias(m)) throw ParseError("aliases cannot occur in formulas", start.line, start.column);
    return m;
  }

  std::pair<ActionPattern, std::optional<LocationLabel>> modality(std::string_view close) {
    ActionPattern p;
    const Token start = ts_.peek();
    if (ts_.accept_ident("tau")) {
      p.kind = ActionPattern::Kind::tau;
    } else if (ts_.accept_ident("out")) {
      p.kind = ActionPattern::Kind::output;
      p.channel = message();
      ts_.expect_punct("(");
      p.binder = Name(ts_.expect_identifier());
      ts_.expect_punct(")");
    } else {
      p.kind = ActionPattern::Kind::input;
      p.channel = message();
      ts_.accept_punct(".");
      p.payload = message();
    }
    std::optional<LocationLabel> loc;
    if (ts_.accept_punct("@")) loc = location_label();
    if (dialect_ == Dialect::fm && loc) {
      throw ParseError("locations are not allowed in fm formulas", start.line, start.column);
    }
    if (dialect_ == Dialect::hpfm && !loc) {
      throw ParseError("hpfm modalities need a location", start.line, start.column);
    }
    ts_.expect_punct(close);
    return {p, loc};
  }

  LocationLabel location_label() {
    if (ts_.accept_punct("(")) {
      LocationLabel l;
      l.first = location();
      ts_.expect_punct(",");
      l.second = location();
      ts_.expect_punct(")");
      return l;
    }
    return LocationLabel{location(), std::nullopt};
  }

  Location location() {
    Location loc;
    while (ts_.peek().kind == Token::Kind::number) {
      loc.prefix += bits(ts_.next().text);
      if (!ts_.accept_punct(".")) break;
    }
    ts_.expect_punct("[");
    if (ts_.peek().kind == Token::Kind::number) loc.branch = bits(ts_.next().text);
    ts_.expect_punct("]");
    return loc;
  }

  std::string bits(const std::string& digits) {
    for (char c : digits) {
      if (c != '0' && c != '1') ts_.fail("location digits must be 0 or 1");
    }
    return digits;
  }

  TokenStream ts_;
  Dialect dialect_;
};

}  // namespace

Formula parse_formula(std::string_view text, Dialect dialect) {
  return FormulaParser(text, dialect).parse();
}

// ---------------------------------------------------------------------------
// Syntactic queries

namespace {

void collect_free(const Formula& phi, std::vector<Name>& bound, std::set<Name>& out) {
  auto add = [&](const Message& m) {
    for (const Name& n : names_of(m)) {
      if (std::find(bound.begin(), bound.end(), n) == bound.end()) out.insert(n);
    }
  };
  switch (phi.kind()) {
    case Formula::Kind::top: break;
    case Formula::Kind::equal:
      add(phi.lhs());
      add(phi.rhs());
      break;
    case Formula::Kind::conj:
      collect_free(phi.left(), bound, out);
      collect_free(phi.right(), bound, out);
      break;
    case Formula::Kind::neg: collect_free(phi.body(), bound, out); break;
    case Formula::Kind::diamond: {
      const ActionPattern& p = phi.pattern();
      if (p.kind != ActionPattern::Kind::tau) add(p.channel);
      if (p.kind == ActionPattern::Kind::input) add(p.payload);
      if (p.kind == ActionPattern::Kind::output) bound.push_back(p.binder);
      collect_free(phi.body(), bound, out);
      if (p.kind == ActionPattern::Kind::output) bound.pop_back();
      break;
    }
  }
}

template <typename Pred>
bool all_nodes(const Formula& phi, Pred pred) {
  if (!pred(phi)) return false;
  switch (phi.kind()) {
    case Formula::Kind::conj: return all_nodes(phi.left(), pred) && all_nodes(phi.right(), pred);
    case Formula::Kind::neg:
    case Formula::Kind::diamond: return all_nodes(phi.body(), pred);
    default: return true;
  }
}

Message rename_message(const Message& m, const std::map<Name, Name>& renaming) {
  return renaming.empty() ? m : rename_names(m, renaming);
}

Formula rename_free(const Formula& phi, std::map<Name, Name> renaming) {
  switch (phi.kind()) {
    case Formula::Kind::top: return phi;
    case Formula::Kind::equal:
      return Formula::equal(rename_message(phi.lhs(), renaming),
                            rename_message(phi.rhs(), renaming));
    case Formula::Kind::conj:
      return Formula::conj(rename_free(phi.left(), renaming), rename_free(phi.right(), renaming));
    case Formula::Kind::neg: return Formula::neg(rename_free(phi.body(), renaming));
    case Formula::Kind::diamond: {
      ActionPattern p = phi.pattern();
      if (p.kind != ActionPattern::Kind::tau) p.channel = rename_message(p.channel, renaming);
      if (p.kind == ActionPattern::Kind::input) p.payload = rename_message(p.payload, renaming);
      if (p.kind == ActionPattern::Kind::output) renaming.erase(p.binder);
      return Formula::diamond(p, phi.location(), rename_free(phi.body(), renaming));
    }
  }
  return phi;
}

}  // namespace

std::set<Name> free_names(const Formula& phi) {
  std::vector<Name> bound;
  std::set<Name> out;
  collect_free(phi, bound, out);
  return out;
}

std::size_t modal_depth(const Formula& phi) {
  switch (phi.kind()) {
    case Formula::Kind::conj: return std::max(modal_depth(phi.left()), modal_depth(phi.right()));
    case Formula::Kind::neg: return modal_depth(phi.body());
    case Formula::Kind::diamond: return 1 + modal_depth(phi.body());
    default: return 0;
  }
}

bool in_simulation_fragment(const Formula& phi) {
  return all_nodes(phi, [](const Formula& f) {
    return f.kind() != Formula::Kind::neg || f.body().kind() == Formula::Kind::equal;
  });
}

bool diamond_only(const Formula& phi) {
  return all_nodes(phi, [](const Formula& f) { return f.kind() != Formula::Kind::neg; });
}

bool has_locations(const Formula& phi) {
  return !all_nodes(phi, [](const Formula& f) {
    return f.kind() != Formula::Kind::diamond || !f.location();
  });
}

bool all_located(const Formula& phi) {
  return all_nodes(phi, [](const Formula& f) {
    return f.kind() != Formula::Kind::diamond || f.location().has_value();
  });
}

namespace {

}  // namespace

Formula erase_locations(const Formula& phi) {
  switch (phi.kind()) {
    case Formula::Kind::conj:
      return Formula::conj(erase_locations(phi.left()), erase_locations(phi.right()));
    case Formula::Kind::neg: return Formula::neg(erase_locations(phi.body()));
    case Formula::Kind::diamond:
      return Formula::diamond(phi.pattern(), std::nullopt, erase_locations(phi.body()));
    default: return phi;
  }
}

const std::set<Name>& public_constants() {
  static const std::set<Name> pool = [] {
    std::set<Name> s;
    for (const char* n : {"a", "b", "c", "d", "p", "r", "ok", "getchallenge", "error"}) {
      s.insert(Name(n));
    }
    return s;
  }();
  return pool;
}

Formula instantiate_free(const Formula& phi, const std::set<Name>& constants) {
  std::map<Name, Name> renaming;
  for (const Name& n : free_names(phi)) {
    if (!constants.count(n)) renaming.emplace(n, Name::fresh(n.str()));
  }
  return renaming.empty() ? phi : rename_free(phi, renaming);
}

// ---------------------------------------------------------------------------
// Model checking

namespace {

bool is_static(const Formula& phi) {
  return all_nodes(phi, [](const Formula& f) { return f.kind() != Formula::Kind::diamond; });
}

void flatten_conj(const Formula& phi, std::vector<Formula>& out) {
  if (phi.kind() == Formula::Kind::conj) {
    flatten_conj(phi.left(), out);
    flatten_conj(phi.right(), out);
  } else {
    out.push_back(phi);
  }
}

Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::conj(acc, fs[i]);
  return acc;
}

// <pi>(S & R) == S & <pi>R when S has no modality and does not mention the
// variable bound by pi: frames only grow, so S keeps its truth value.
Formula hoist_static(const Formula& phi) {
  switch (phi.kind()) {
    case Formula::Kind::conj:
      return Formula::conj(hoist_static(phi.left()), hoist_static(phi.right()));
    case Formula::Kind::neg: return Formula::neg(hoist_static(phi.body()));
    case Formula::Kind::diamond: {
      Formula body = hoist_static(phi.body());
      std::vector<Formula> parts, hoisted, kept;
      flatten_conj(body, parts);
      const ActionPattern& p = phi.pattern();
      for (const Formula& f : parts) {
        bool binds = p.kind == ActionPattern::Kind::output && free_names(f).count(p.binder);
        (is_static(f) && !binds ? hoisted : kept).push_back(f);
      }
      if (hoisted.empty()) return Formula::diamond(p, phi.location(), body);
      hoisted.push_back(Formula::diamond(p, phi.location(), conj_all(kept)));
      return conj_all(hoisted);
    }
    default: return phi;
  }
}

Truth kleene_not(Truth t) {
  switch (t) {
    case Truth::no: return Truth::yes;
    case Truth::yes: return Truth::no;
    default: return Truth::unknown;
  }
}

using Env = std::map<Name, Message>;

Message apply_env(const Message& m, const Env& env) {
  if (env.empty()) return m;
  switch (m.kind()) {
    case Message::Kind::name: {
      auto it = env.find(m.as_name());
      return it == env.end() ? m : it->second;
    }
    case Message::Kind::alias: return m;
    case Message::Kind::apply: {
      std::vector<Message> args;
      for (const Message& a : m.args()) args.push_back(apply_env(a, env));
      return Message::apply(m.symbol(), std::move(args));
    }
  }
  return m;
}

class Checker {
 public:
  explicit Checker(const CheckBudget& budget) {
    opts_.bang_cap = budget.bang_unfold_cap;
    canon_.congruence_quotient = budget.congruence_quotient;
    canon_.with_copy_counts = true;
  }

  Truth run(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
            const Env& env) {
    return eval(a, canonical_key(a, canon_), s, phi, env, false);
  }

  CheckStats stats;

 private:
  const std::set<Name>& free_of(const Formula& phi) {
    auto it = free_cache_.find(phi.id());
    if (it == free_cache_.end()) it = free_cache_.emplace(phi.id(), free_names(phi)).first;
    return it->second;
  }

  std::string memo_key(const std::string& akey, const EventRelation& s, const Formula& phi,
                       const Env& env, bool static_only) {
    std::string key = akey;
    key += '\x1f';
    key += std::to_string(reinterpret_cast<std::uintptr_t>(phi.id()));
    key += static_only ? "!" : "?";
    for (const Name& n : free_of(phi)) {
      auto it = env.find(n);
      if (it == env.end()) continue;
      key += n.str() + "=" + it->second.str() + ";";
    }
    if (!s.empty()) {
      std::vector<std::string> pairs;
      for (const auto& [l, r] : s) pairs.push_back(l.str() + "~" + r.str());
      std::sort(pairs.begin(), pairs.end());
      for (const std::string& p : pairs) key += "|" + p;
    }
    return key;
  }

  Truth eval(const ExtendedProcess& a, const std::string& akey, const EventRelation& s,
             const Formula& phi, const Env& env, bool static_only) {
    switch (phi.kind()) {
      case Formula::Kind::top: return Truth::yes;
      case Formula::Kind::equal:
        return satisfies_equality(a.frame_view(), apply_env(phi.lhs(), env),
                                  apply_env(phi.rhs(), env))
                   ? Truth::yes
                   : Truth::no;
      case Formula::Kind::neg: return kleene_not(eval(a, akey, s, phi.body(), env, static_only));
      case Formula::Kind::conj: {
        Truth l = eval(a, akey, s, phi.left(), env, static_only);
        if (l == Truth::no) return Truth::no;
        Truth r = eval(a, akey, s, phi.right(), env, static_only);
        if (r == Truth::no) return Truth::no;
        return l == Truth::yes && r == Truth::yes ? Truth::yes : Truth::unknown;
      }
      case Formula::Kind::diamond: {
        if (static_only) return Truth::unknown;
        std::string key = memo_key(akey, s, phi, env, static_only);
        if (auto it = memo_.find(key); it != memo_.end()) {
          ++stats.memo_hits;
          return it->second;
        }
        ++stats.evaluations;
        Truth t = diamond(a, s, phi, env);
        memo_.emplace(std::move(key), t);
        return t;
      }
    }
    return Truth::unknown;
  }

  Truth diamond(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                const Env& env) {
    const ActionPattern& p = phi.pattern();
    std::vector<Transition> ts;
    Message channel, payload;
    switch (p.kind) {
      case ActionPattern::Kind::tau: ts = tau_steps(a, opts_); break;
      case ActionPattern::Kind::input:
        channel = apply_env(p.channel, env);
        payload = apply_env(p.payload, env);
        ts = input_steps(a, channel, payload, opts_);
        break;
      case ActionPattern::Kind::output:
        channel = apply_env(p.channel, env);
        ts = output_steps_on(a, channel, opts_);
        break;
    }
    Truth acc = Truth::no;
    for (Transition& t : ts) {
      ++stats.transitions;
      EventRelation next;
      if (phi.location()) {
        Event f{t.event.action, *phi.location()};
        bool matches = true;
        for (const auto& pr : s) {
          bool left = event_indep(pr.first, t.event);
          if (left != event_indep(pr.second, f)) {
            matches = false;
            break;
          }
          if (left) next.push_back(pr);
        }
        if (!matches) continue;
        next.emplace_back(t.event, f);
      }
      Env inner = env;
      if (p.kind == ActionPattern::Kind::output) {
        inner[p.binder] = Message::alias(t.event.action.alias);
      }
      if (t.beyond_cap) ++stats.beyond_cap;
      Truth r = eval(t.target, canonical_key(t.target, canon_), next, phi.body(), inner,
                     t.beyond_cap);
      if (r == Truth::yes) return Truth::yes;
      if (r == Truth::unknown) acc = Truth::unknown;
    }
    return acc;
  }

  StepOptions opts_;
  CanonicalOptions canon_;
  std::unordered_map<std::string, Truth> memo_;
  std::unordered_map<const void*, std::set<Name>> free_cache_;
};

}  // namespace

CheckResult evaluate(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                     const CheckBudget& budget) {
  return evaluate(a, s, phi, budget, {});
}

CheckResult evaluate(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                     const CheckBudget& budget, const std::map<Name, Message>& bindings) {
  CheckBudget b = budget;
  if (b.bang_unfold_cap == 0) b.bang_unfold_cap = static_cast<unsigned>(modal_depth(phi)) + 1;
  Formula prepared = hoist_static(phi);
  Checker checker(b);
  CheckResult result;
  result.truth = checker.run(rename_bound_apart(a), s, prepared, bindings);
  result.stats = checker.stats;
  result.stats.bang_cap = b.bang_unfold_cap;
  return result;
}

namespace {

bool decide(const CheckResult& r) {
  if (r.truth == Truth::unknown) {
    throw BudgetExceeded("the verdict depends on transitions beyond bang cap " +
                         std::to_string(r.stats.bang_cap));
  }
  return r.truth == Truth::yes;
}

}  // namespace

bool check_fm(const ExtendedProcess& a, const Formula& phi, const CheckBudget& budget) {
  if (has_locations(phi)) throw Error("fm formulas carry no locations");
  return decide(evaluate(a, {}, phi, budget));
}

bool check_hpfm(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                const CheckBudget& budget) {
  if (!all_located(phi)) throw Error("every hpfm modality needs a location");
  return decide(evaluate(a, s, phi, budget));
}

}  // namespace picheck
