#include <picheck/sos.hpp>

#include <picheck/syntax.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace picheck {

std::string Location::str() const {
  std::string out;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) out.push_back('.');
    out.push_back(prefix[i]);
  }
  return out + "[" + branch + "]";
}

std::string LocationLabel::str() const {
  if (!second) return first.str();
  return "(" + first.str() + "," + second->str() + ")";
}

ActionLabel ActionLabel::input(Message channel, Message payload) {
  ActionLabel l;
  l.kind = Kind::input;
  l.channel = std::move(channel);
  l.payload = std::move(payload);
  return l;
}

ActionLabel ActionLabel::output(Message channel, Alias alias) {
  ActionLabel l;
  l.kind = Kind::output;
  l.channel = std::move(channel);
  l.alias = std::move(alias);
  return l;
}

ActionLabel ActionLabel::tau() { return ActionLabel{}; }

bool ActionLabel::operator==(const ActionLabel& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::tau: return true;
    case Kind::input: return channel == other.channel && payload == other.payload;
    case Kind::output: return channel == other.channel && alias == other.alias;
  }
  return false;
}

std::strong_ordering ActionLabel::operator<=>(const ActionLabel& other) const {
  if (auto c = kind <=> other.kind; c != 0) return c;
  switch (kind) {
    case Kind::tau: return std::strong_ordering::equal;
    case Kind::input:
      if (auto c = channel <=> other.channel; c != 0) return c;
      return payload <=> other.payload;
    case Kind::output:
      if (auto c = channel <=> other.channel; c != 0) return c;
      return alias <=> other.alias;
  }
  return std::strong_ordering::equal;
}

std::string ActionLabel::str() const {
  switch (kind) {
    case Kind::tau: return "tau";
    case Kind::input: return channel.str() + "." + payload.str();
    case Kind::output: return "out " + channel.str() + "(" + alias.str() + ")";
  }
  return {};
}

std::set<Name> free_names(const ActionLabel& l) {
  std::set<Name> out;
  if (l.kind == ActionLabel::Kind::input) {
    collect_names(l.channel, out);
    collect_names(l.payload, out);
  } else if (l.kind == ActionLabel::Kind::output) {
    collect_names(l.channel, out);
  }
  return out;
}

std::set<Alias> free_aliases(const ActionLabel& l) {
  std::set<Alias> out;
  if (l.kind == ActionLabel::Kind::input) {
    collect_aliases(l.channel, out);
    collect_aliases(l.payload, out);
  } else if (l.kind == ActionLabel::Kind::output) {
    collect_aliases(l.channel, out);
  }
  return out;
}

std::strong_ordering Event::operator<=>(const Event& other) const {
  if (auto c = action <=> other.action; c != 0) return c;
  return location <=> other.location;
}

std::string Event::str() const { return action.str() + " @ " + location.str(); }

// ---------------------------------------------------------------------------
// Derivations

namespace {

struct Candidate {
  enum class Kind { input, output, tau };
  Kind kind;
  Location loc;   // tau: output side
  Location loc2;  // tau: input side
  Message channel;
  Message payload;
  std::vector<Name> extruded;
  unsigned max_copy = 0;
  Process residual;                              // output, tau
  std::function<Process(const Message&)> build;  // input
};

struct Want {
  bool out = false;
  bool in = false;
  bool tau = false;
  std::optional<Message> out_channel;  // normal form
  std::optional<Message> in_channel;   // normal form

  Want subcomponents() const {
    if (!tau) return *this;
    Want w;
    w.out = w.in = w.tau = true;
    return w;
  }

  bool keeps(const Candidate& c) const {
    switch (c.kind) {
      case Candidate::Kind::output:
        return out && (!out_channel || normalize(c.channel) == *out_channel);
      case Candidate::Kind::input:
        return in && (!in_channel || normalize(c.channel) == *in_channel);
      case Candidate::Kind::tau:
        return tau;
    }
    return false;
  }
};

void prefix_locations(Candidate& c, char bit) {
  c.loc.prefix.insert(c.loc.prefix.begin(), bit);
  if (c.kind == Candidate::Kind::tau) c.loc2.prefix.insert(c.loc2.prefix.begin(), bit);
}

template <typename Wrap>
void rewrap(Candidate& c, Wrap wrap) {
  if (c.kind == Candidate::Kind::input) {
    c.build = [inner = std::move(c.build), wrap](const Message& m) { return wrap(inner(m)); };
  } else {
    c.residual = wrap(c.residual);
  }
}

std::vector<Name> concat(const std::vector<Name>& a, const std::vector<Name>& b) {
  std::vector<Name> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Communications between an output side and an input side. `out_first`
// says whether the left component is the output.
void close(const std::vector<Candidate>& outs_side, const std::vector<Candidate>& ins_side,
           const std::function<Process(const Process&, const Process&)>& join,
           const std::string& out_bits, const std::string& in_bits, unsigned copy_floor,
           std::vector<Candidate>& result) {
  for (const Candidate& o : outs_side) {
    if (o.kind != Candidate::Kind::output) continue;
    Message ch = normalize(o.channel);
    for (const Candidate& i : ins_side) {
      if (i.kind != Candidate::Kind::input) continue;
      if (normalize(i.channel) != ch) continue;
      Candidate t;
      t.kind = Candidate::Kind::tau;
      t.loc = o.loc;
      t.loc.prefix.insert(0, out_bits);
      t.loc2 = i.loc;
      t.loc2.prefix.insert(0, in_bits);
      t.extruded = concat(o.extruded, i.extruded);
      t.max_copy = std::max({o.max_copy, i.max_copy, copy_floor});
      t.residual = join(o.residual, i.build(normalize(o.payload)));
      result.push_back(std::move(t));
    }
  }
}

std::vector<Candidate> derive(const Process& p, const Want& want) {
  std::vector<Candidate> result;
  switch (p.kind()) {
    case Process::Kind::nil:
      break;
    case Process::Kind::output: {
      Candidate c;
      c.kind = Candidate::Kind::output;
      c.channel = p.channel();
      c.payload = p.payload();
      c.residual = p.body();
      if (want.keeps(c)) result.push_back(std::move(c));
      break;
    }
    case Process::Kind::input: {
      Candidate c;
      c.kind = Candidate::Kind::input;
      c.channel = p.channel();
      c.build = [body = p.body(), x = p.binder()](const Message& m) {
        return substitute(body, x, m);
      };
      if (want.keeps(c)) result.push_back(std::move(c));
      break;
    }
    case Process::Kind::restrict: {
      Name z = Name::fresh(p.binder().str());
      Process opened = substitute(p.body(), p.binder(), Message::name(z));
      result = derive(opened, want);
      for (Candidate& c : result) c.extruded.insert(c.extruded.begin(), z);
      break;
    }
    case Process::Kind::match:
      if (eq_modulo_E(p.lhs(), p.rhs())) result = derive(p.body(), want);
      break;
    case Process::Kind::cond:
      result = derive(eq_modulo_E(p.lhs(), p.rhs()) ? p.left() : p.right(), want);
      break;
    case Process::Kind::sum: {
      for (int side = 0; side < 2; ++side) {
        for (Candidate& c : derive(side == 0 ? p.left() : p.right(), want)) {
          c.loc.branch.insert(c.loc.branch.begin(), side == 0 ? '0' : '1');
          result.push_back(std::move(c));
        }
      }
      break;
    }
    case Process::Kind::par: {
      Want sub = want.subcomponents();
      std::vector<Candidate> left = derive(p.left(), sub);
      std::vector<Candidate> right = derive(p.right(), sub);
      const Process& l = p.left();
      const Process& r = p.right();
      if (want.tau) {
        auto join_lr = [](const Process& a, const Process& b) { return Process::par(a, b); };
        auto join_rl = [](const Process& a, const Process& b) { return Process::par(b, a); };
        close(left, right, join_lr, "0", "1", 0, result);
        close(right, left, join_rl, "1", "0", 0, result);
      }
      for (Candidate& c : left) {
        if (!want.keeps(c)) continue;
        prefix_locations(c, '0');
        rewrap(c, [r](const Process& x) { return Process::par(x, r); });
        result.push_back(std::move(c));
      }
      for (Candidate& c : right) {
        if (!want.keeps(c)) continue;
        prefix_locations(c, '1');
        rewrap(c, [l](const Process& x) { return Process::par(l, x); });
        result.push_back(std::move(c));
      }
      break;
    }
    case Process::Kind::bang: {
      // Only the first fresh copy of P | !P acts; deeper copies are symmetric.
      const Process& body = p.body();
      unsigned n = p.copies();
      Want sub = want.subcomponents();
      std::vector<Candidate> first = derive(body, sub);
      if (want.tau) {
        std::vector<Candidate> second = derive(body, sub);
        Process rest = Process::bang(body, n + 2);
        auto join_12 = [rest](const Process& a, const Process& b) {
          return Process::par(a, Process::par(b, rest));
        };
        auto join_21 = [rest](const Process& a, const Process& b) {
          return Process::par(b, Process::par(a, rest));
        };
        close(first, second, join_12, "0", "10", n + 2, result);
        close(second, first, join_21, "10", "0", n + 2, result);
      }
      Process rest = Process::bang(body, n + 1);
      for (Candidate& c : first) {
        if (!want.keeps(c)) continue;
        prefix_locations(c, '0');
        c.max_copy = std::max(c.max_copy, n + 1);
        rewrap(c, [rest](const Process& x) { return Process::par(x, rest); });
        result.push_back(std::move(c));
      }
      break;
    }
  }
  return result;
}

void check_recipe(const ExtendedProcess& a, const Message& recipe) {
  std::set<Name> names;
  collect_names(recipe, names);
  for (const Name& n : a.bound_names) {
    if (names.count(n)) throw Error("recipe mentions the private name " + n.str());
  }
}

bool aliases_in_domain(const ExtendedProcess& a, const Message& recipe) {
  for (const Alias& al : aliases_of(recipe)) {
    if (!a.frame.contains(al)) return false;
  }
  return true;
}

Alias allocate_alias(const Substitution& frame, const std::string& prefix) {
  for (unsigned k = 1;; ++k) {
    Alias al{prefix, Name("l" + std::to_string(k))};
    if (!frame.contains(al)) return al;
  }
}

Transition make_output(const ExtendedProcess& a, Candidate& c, const Message& recipe,
                       const StepOptions& opts) {
  Transition t;
  Alias al = allocate_alias(a.frame, c.loc.prefix);
  t.event.action = ActionLabel::output(recipe, al);
  t.event.location.first = c.loc;
  t.target.bound_names = concat(a.bound_names, c.extruded);
  t.target.frame = a.frame;
  t.target.frame.set(al, normalize(c.payload));
  t.target.body = c.residual;
  t.beyond_cap = c.max_copy > opts.bang_cap;
  return t;
}

Transition make_tau(const ExtendedProcess& a, Candidate& c, const StepOptions& opts) {
  Transition t;
  t.event.action = ActionLabel::tau();
  t.event.location.first = c.loc;
  t.event.location.second = c.loc2;
  t.target.bound_names = concat(a.bound_names, c.extruded);
  t.target.frame = a.frame;
  t.target.body = c.residual;
  t.beyond_cap = c.max_copy > opts.bang_cap;
  return t;
}

}  // namespace

std::vector<Transition> output_and_tau_steps(const ExtendedProcess& a, const StepOptions& opts) {
  Want want;
  want.out = want.tau = true;
  std::vector<Candidate> cands = derive(a.body, want);
  std::vector<Transition> out;
  std::optional<Knowledge> knowledge;
  for (Candidate& c : cands) {
    if (c.kind == Candidate::Kind::tau) {
      out.push_back(make_tau(a, c, opts));
      continue;
    }
    Frame view{concat(a.bound_names, c.extruded), a.frame};
    if (!knowledge) knowledge = saturate(a.frame_view());
    std::optional<Message> recipe = find_recipe(view, *knowledge, c.channel);
    if (!recipe) continue;  // unobservable channel
    out.push_back(make_output(a, c, *recipe, opts));
  }
  return out;
}

std::vector<Transition> output_steps_on(const ExtendedProcess& a, const Message& channel_recipe,
                                        const StepOptions& opts) {
  check_recipe(a, channel_recipe);
  if (!aliases_in_domain(a, channel_recipe)) return {};
  Want want;
  want.out = true;
  want.out_channel = normalize(apply_substitution(channel_recipe, a.frame));
  std::vector<Transition> out;
  for (Candidate& c : derive(a.body, want)) out.push_back(make_output(a, c, channel_recipe, opts));
  return out;
}

std::vector<Transition> tau_steps(const ExtendedProcess& a, const StepOptions& opts) {
  Want want;
  want.tau = true;
  std::vector<Transition> out;
  for (Candidate& c : derive(a.body, want)) {
    if (c.kind == Candidate::Kind::tau) out.push_back(make_tau(a, c, opts));
  }
  return out;
}

std::vector<Transition> input_steps(const ExtendedProcess& a, const Message& channel_recipe,
                                    const Message& payload_recipe, const StepOptions& opts) {
  check_recipe(a, channel_recipe);
  check_recipe(a, payload_recipe);
  if (!aliases_in_domain(a, channel_recipe) || !aliases_in_domain(a, payload_recipe)) return {};
  Want want;
  want.in = true;
  want.in_channel = normalize(apply_substitution(channel_recipe, a.frame));
  Message payload = normalize(apply_substitution(payload_recipe, a.frame));
  std::vector<Transition> out;
  for (Candidate& c : derive(a.body, want)) {
    Transition t;
    t.event.action = ActionLabel::input(channel_recipe, payload_recipe);
    t.event.location.first = c.loc;
    t.target.bound_names = concat(a.bound_names, c.extruded);
    t.target.frame = a.frame;
    t.target.body = c.build(payload);
    t.beyond_cap = c.max_copy > opts.bang_cap;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Message> enabled_input_channels(const ExtendedProcess& a) {
  Want want;
  want.in = true;
  std::vector<Message> out;
  for (Candidate& c : derive(a.body, want)) {
    Message ch = normalize(c.channel);
    if (std::find(out.begin(), out.end(), ch) == out.end()) out.push_back(ch);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Transition> transitions_with_action(const ExtendedProcess& a, const ActionLabel& act,
                                                const StepOptions& opts) {
  switch (act.kind) {
    case ActionLabel::Kind::input:
      return input_steps(a, act.channel, act.payload, opts);
    case ActionLabel::Kind::output: {
      std::vector<Transition> out;
      for (Transition& t : output_steps_on(a, act.channel, opts)) {
        if (t.event.action.alias == act.alias) out.push_back(std::move(t));
      }
      return out;
    }
    case ActionLabel::Kind::tau:
      return tau_steps(a, opts);
  }
  return {};
}

ExtendedProcess step(const ExtendedProcess& a, const Event& e, const StepOptions& opts) {
  std::optional<ExtendedProcess> found;
  std::string key;
  for (Transition& t : transitions_with_action(a, e.action, opts)) {
    if (!(t.event == e)) continue;
    std::string k = canonical_key(t.target);
    if (!found) {
      found = std::move(t.target);
      key = std::move(k);
    } else if (k != key) {
      throw Error("event " + e.str() + " leads to distinct successors");
    }
  }
  if (!found) throw Error("event " + e.str() + " is not enabled");
  return *found;
}

Location parse_location(std::string_view text) {
  Location loc;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  while (i < text.size() && text[i] != '[') {
    char ch = text[i++];
    if (ch == '0' || ch == '1') {
      loc.prefix.push_back(ch);
    } else if (ch != '.' && !std::isspace(static_cast<unsigned char>(ch))) {
      throw Error("bad location '" + std::string(text) + "'");
    }
  }
  if (i >= text.size()) throw Error("bad location '" + std::string(text) + "': missing '['");
  ++i;
  while (i < text.size() && text[i] != ']') {
    char ch = text[i++];
    if (ch == '0' || ch == '1') {
      loc.branch.push_back(ch);
    } else if (ch != '.' && !std::isspace(static_cast<unsigned char>(ch))) {
      throw Error("bad location '" + std::string(text) + "'");
    }
  }
  if (i >= text.size()) throw Error("bad location '" + std::string(text) + "': missing ']'");
  ++i;
  skip_ws();
  if (i != text.size()) throw Error("bad location '" + std::string(text) + "'");
  return loc;
}

LtsGraph explore_lts(const ExtendedProcess& a, std::size_t depth,
                     const std::vector<std::pair<Message, Message>>& input_recipes,
                     const StepOptions& opts) {
  LtsGraph g;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<ExtendedProcess> states;
  auto intern = [&](const ExtendedProcess& s) {
    std::string key = canonical_key(s);
    auto [it, inserted] = index.emplace(key, states.size());
    if (inserted) {
      states.push_back(s);
      g.states.push_back(print_extended(s));
    }
    return std::make_pair(it->second, inserted);
  };
  std::deque<std::pair<std::size_t, std::size_t>> queue;  // state, depth
  queue.emplace_back(intern(a).first, 0);
  while (!queue.empty()) {
    auto [id, d] = queue.front();
    queue.pop_front();
    if (d >= depth) continue;
    ExtendedProcess s = states[id];
    std::vector<Transition> ts = output_and_tau_steps(s, opts);
    for (const auto& [ch, pl] : input_recipes) {
      bool usable = true;
      for (const Alias& al : aliases_of(ch)) usable = usable && s.frame.contains(al);
      for (const Alias& al : aliases_of(pl)) usable = usable && s.frame.contains(al);
      if (!usable) continue;
      for (Transition& t : input_steps(s, ch, pl, opts)) ts.push_back(std::move(t));
    }
    for (Transition& t : ts) {
      auto [to, inserted] = intern(t.target);
      g.edges.push_back({id, to, t.event});
      if (inserted) queue.emplace_back(to, d + 1);
    }
  }
  return g;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string to_dot(const LtsGraph& g) {
  std::ostringstream os;
  os << "digraph lts {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    os << "  s" << i << " [label=\"" << dot_escape(g.states[i]) << "\"];\n";
  }
  for (const auto& e : g.edges) {
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << dot_escape(e.event.str())
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace picheck
