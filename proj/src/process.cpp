#include <picheck/process.hpp>

#include <picheck/syntax.hpp>

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace picheck {

struct Process::Node {
  Kind kind = Kind::nil;
  Name binder;
  Message m1, m2;
  std::vector<Process> kids;
  unsigned copies = 0;
};

namespace {

const Process& nil_process() {
  static const Process p = Process::nil();
  return p;
}

}  // namespace

Process::Process() : node_(nil_process().node_) {}

Process Process::nil() {
  static const std::shared_ptr<const Node> node = std::make_shared<Node>();
  return Process(node);
}

Process Process::restrict(Name n, Process body) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::restrict;
  node->binder = n;
  node->kids = {std::move(body)};
  return Process(std::move(node));
}

Process Process::par(Process left, Process right) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::par;
  node->kids = {std::move(left), std::move(right)};
  return Process(std::move(node));
}

Process Process::bang(Process body, unsigned copies) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::bang;
  node->kids = {std::move(body)};
  node->copies = copies;
  return Process(std::move(node));
}

Process Process::match(Message lhs, Message rhs, Process body) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::match;
  node->m1 = std::move(lhs);
  node->m2 = std::move(rhs);
  node->kids = {std::move(body)};
  return Process(std::move(node));
}

Process Process::input(Message channel, Name binder, Process body) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::input;
  node->m1 = std::move(channel);
  node->binder = binder;
  node->kids = {std::move(body)};
  return Process(std::move(node));
}

Process Process::output(Message channel, Message payload, Process body) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::output;
  node->m1 = std::move(channel);
  node->m2 = std::move(payload);
  node->kids = {std::move(body)};
  return Process(std::move(node));
}

Process Process::sum(Process left, Process right) {
  if (!is_guarded(left) || !is_guarded(right)) throw Error("unguarded sum");
  auto node = std::make_shared<Node>();
  node->kind = Kind::sum;
  node->kids = {std::move(left), std::move(right)};
  return Process(std::move(node));
}

Process Process::cond(Message lhs, Message rhs, Process then_branch, Process else_branch) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::cond;
  node->m1 = std::move(lhs);
  node->m2 = std::move(rhs);
  node->kids = {std::move(then_branch), std::move(else_branch)};
  return Process(std::move(node));
}

Process::Kind Process::kind() const { return node_->kind; }
const Process& Process::body() const { return node_->kids.at(0); }
const Process& Process::left() const { return node_->kids.at(0); }
const Process& Process::right() const { return node_->kids.at(1); }
const Name& Process::binder() const { return node_->binder; }
const Message& Process::channel() const { return node_->m1; }
const Message& Process::payload() const { return node_->m2; }
const Message& Process::lhs() const { return node_->m1; }
const Message& Process::rhs() const { return node_->m2; }
unsigned Process::copies() const { return node_->copies; }

bool is_guarded(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::input:
    case Process::Kind::output:
    case Process::Kind::sum:
      return true;
    case Process::Kind::match:
    case Process::Kind::restrict:
      return is_guarded(p.body());
    default:
      return false;
  }
}

void collect_free_names(const Process& p, std::set<Name>& out) {
  switch (p.kind()) {
    case Process::Kind::nil:
      return;
    case Process::Kind::restrict: {
      std::set<Name> inner;
      collect_free_names(p.body(), inner);
      inner.erase(p.binder());
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Process::Kind::par:
    case Process::Kind::sum:
      collect_free_names(p.left(), out);
      collect_free_names(p.right(), out);
      return;
    case Process::Kind::bang:
      collect_free_names(p.body(), out);
      return;
    case Process::Kind::match:
      collect_names(p.lhs(), out);
      collect_names(p.rhs(), out);
      collect_free_names(p.body(), out);
      return;
    case Process::Kind::cond:
      collect_names(p.lhs(), out);
      collect_names(p.rhs(), out);
      collect_free_names(p.left(), out);
      collect_free_names(p.right(), out);
      return;
    case Process::Kind::input: {
      collect_names(p.channel(), out);
      std::set<Name> inner;
      collect_free_names(p.body(), inner);
      inner.erase(p.binder());
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Process::Kind::output:
      collect_names(p.channel(), out);
      collect_names(p.payload(), out);
      collect_free_names(p.body(), out);
      return;
  }
}

std::set<Name> free_names(const Process& p) {
  std::set<Name> out;
  collect_free_names(p, out);
  return out;
}

std::set<Name> free_names(const ExtendedProcess& a) {
  std::set<Name> out = free_names(a.body);
  for (const auto& [al, m] : a.frame.entries()) collect_names(m, out);
  for (const Name& n : a.bound_names) out.erase(n);
  return out;
}

bool contains_alias(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::nil:
      return false;
    case Process::Kind::restrict:
    case Process::Kind::bang:
      return contains_alias(p.body());
    case Process::Kind::par:
    case Process::Kind::sum:
      return contains_alias(p.left()) || contains_alias(p.right());
    case Process::Kind::match:
      return has_alias(p.lhs()) || has_alias(p.rhs()) || contains_alias(p.body());
    case Process::Kind::cond:
      return has_alias(p.lhs()) || has_alias(p.rhs()) || contains_alias(p.left()) ||
             contains_alias(p.right());
    case Process::Kind::input:
      return has_alias(p.channel()) || contains_alias(p.body());
    case Process::Kind::output:
      return has_alias(p.channel()) || has_alias(p.payload()) || contains_alias(p.body());
  }
  return false;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

Message subst_message(const Message& m, const std::map<Name, Message>& s) {
  if (!m.is_apply()) {
    if (m.is_name()) {
      auto it = s.find(m.as_name());
      if (it != s.end()) return it->second;
    }
    return m;
  }
  std::vector<Message> args;
  bool changed = false;
  for (const Message& a : m.args()) {
    args.push_back(subst_message(a, s));
    changed = changed || !(args.back() == a);
  }
  return changed ? Message::apply(m.symbol(), std::move(args)) : m;
}

struct Substituter {
  // Names occurring in the range; binders among them must be renamed.
  std::set<Name> range_names;

  Process binder_case(const Process& p, const std::map<Name, Message>& s, bool is_input) {
    std::map<Name, Message> inner = s;
    inner.erase(p.binder());
    Name binder = p.binder();
    Process body = p.body();
    if (range_names.count(binder) && !inner.empty()) {
      Name renamed = Name::fresh(binder.str());
      inner[binder] = Message::name(renamed);
      binder = renamed;
    }
    body = inner.empty() ? body : run(body, inner);
    if (is_input) return Process::input(subst_message(p.channel(), s), binder, body);
    return Process::restrict(binder, body);
  }

  Process run(const Process& p, const std::map<Name, Message>& s) {
    switch (p.kind()) {
      case Process::Kind::nil:
        return p;
      case Process::Kind::restrict:
        return binder_case(p, s, false);
      case Process::Kind::input:
        return binder_case(p, s, true);
      case Process::Kind::par:
        return Process::par(run(p.left(), s), run(p.right(), s));
      case Process::Kind::sum:
        return Process::sum(run(p.left(), s), run(p.right(), s));
      case Process::Kind::bang:
        return Process::bang(run(p.body(), s), p.copies());
      case Process::Kind::match:
        return Process::match(subst_message(p.lhs(), s), subst_message(p.rhs(), s),
                              run(p.body(), s));
      case Process::Kind::cond:
        return Process::cond(subst_message(p.lhs(), s), subst_message(p.rhs(), s),
                             run(p.left(), s), run(p.right(), s));
      case Process::Kind::output:
        return Process::output(subst_message(p.channel(), s), subst_message(p.payload(), s),
                               run(p.body(), s));
    }
    return p;
  }
};

}  // namespace

Process substitute(const Process& p, const std::map<Name, Message>& s) {
  if (s.empty()) return p;
  Substituter sub;
  for (const auto& [x, m] : s) collect_names(m, sub.range_names);
  return sub.run(p, s);
}

Process substitute(const Process& p, const Name& x, const Message& m) {
  return substitute(p, std::map<Name, Message>{{x, m}});
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class ProcessParser {
 public:
  explicit ProcessParser(TokenStream& ts) : ts_(ts) {}

  void parse_definitions() {
    while (ts_.accept_ident("def")) {
      std::string name = ts_.expect_identifier();
      ProcessDefinitions::Definition def;
      if (ts_.accept_punct("(")) {
        if (!ts_.is_punct(")")) {
          def.params.emplace_back(ts_.expect_identifier());
          while (ts_.accept_punct(",")) def.params.emplace_back(ts_.expect_identifier());
        }
        ts_.expect_punct(")");
      }
      ts_.expect_punct("=");
      def.body = parse_par();
      ts_.accept_punct(";");
      defs_.defs[name] = std::move(def);
    }
  }

  Process parse_par() {
    Process p = parse_sum();
    while (ts_.accept_punct("|")) p = Process::par(p, parse_sum());
    return p;
  }

  Process parse_sum() {
    Process p = parse_prefix();
    while (ts_.is_punct("+")) {
      if (!is_guarded(p)) ts_.fail("unguarded sum");
      ts_.next();
      Process q = parse_prefix();
      if (!is_guarded(q)) ts_.fail("unguarded sum");
      p = Process::sum(p, q);
    }
    return p;
  }

  std::vector<Name> parse_names() {
    std::vector<Name> names{Name(ts_.expect_identifier())};
    while (ts_.accept_punct(",")) names.emplace_back(ts_.expect_identifier());
    return names;
  }

  Process continuation() {
    if (ts_.accept_punct(".")) return parse_prefix();
    return Process::nil();
  }

  Process parse_prefix() {
    const Token& t = ts_.peek();
    if (t.kind == Token::Kind::number) {
      if (t.text != "0") ts_.fail("expected process");
      ts_.next();
      return Process::nil();
    }
    if (ts_.accept_punct("(")) {
      Process p = parse_par();
      ts_.expect_punct(")");
      return p;
    }
    if (ts_.accept_ident("new")) {
      std::vector<Name> names = parse_names();
      ts_.expect_punct(".");
      Process body = parse_prefix();
      for (auto it = names.rbegin(); it != names.rend(); ++it) body = Process::restrict(*it, body);
      return body;
    }
    if (ts_.accept_punct("!")) return Process::bang(parse_prefix());
    if (ts_.accept_punct("[")) {
      Message m = parse_message(ts_);
      ts_.expect_punct("=");
      Message n = parse_message(ts_);
      ts_.expect_punct("]");
      return Process::match(m, n, parse_prefix());
    }
    if (ts_.accept_ident("in")) {
      ts_.expect_punct("(");
      Message ch = parse_message(ts_);
      ts_.expect_punct(",");
      Name x(ts_.expect_identifier());
      ts_.expect_punct(")");
      return Process::input(ch, x, continuation());
    }
    if (ts_.accept_ident("out")) {
      ts_.expect_punct("(");
      Message ch = parse_message(ts_);
      ts_.expect_punct(",");
      Message payload = parse_message(ts_);
      ts_.expect_punct(")");
      return Process::output(ch, payload, continuation());
    }
    if (ts_.accept_ident("if")) {
      Message m = parse_message(ts_);
      ts_.expect_punct("=");
      Message n = parse_message(ts_);
      ts_.expect_ident("then");
      Process p = parse_prefix();
      ts_.expect_ident("else");
      Process q = parse_prefix();
      return Process::cond(m, n, p, q);
    }
    if (ts_.accept_ident("let")) {
      Name x(ts_.expect_identifier());
      ts_.expect_punct("=");
      Message m = parse_message(ts_);
      ts_.expect_ident("in");
      return substitute(parse_prefix(), x, m);
    }
    if (t.kind == Token::Kind::ident && !is_keyword(t.text)) {
      auto it = defs_.defs.find(t.text);
      if (it == defs_.defs.end()) ts_.fail("unknown process definition");
      ts_.next();
      std::vector<Message> args;
      if (ts_.accept_punct("(")) {
        if (!ts_.is_punct(")")) {
          args.push_back(parse_message(ts_));
          while (ts_.accept_punct(",")) args.push_back(parse_message(ts_));
        }
        ts_.expect_punct(")");
      }
      if (args.size() != it->second.params.size()) ts_.fail("wrong number of arguments");
      std::map<Name, Message> s;
      for (std::size_t i = 0; i < args.size(); ++i) s[it->second.params[i]] = args[i];
      return substitute(it->second.body, s);
    }
    ts_.fail("expected process");
  }

  // "{@p:b = M, ...}"
  Substitution parse_frame() {
    Substitution s;
    ts_.expect_punct("{");
    if (!ts_.is_punct("}")) {
      do {
        const Token& t = ts_.peek();
        if (t.kind != Token::Kind::alias) ts_.fail("expected alias");
        Alias a = ts_.next().alias;
        ts_.expect_punct("=");
        Message m = parse_message(ts_);
        if (has_alias(m)) ts_.fail("alias in the range of a frame");
        if (s.contains(a)) ts_.fail("alias bound twice in frame");
        s.set(a, normalize(m));
      } while (ts_.accept_punct(","));
    }
    ts_.expect_punct("}");
    return s;
  }

  ExtendedProcess parse_extended() {
    std::size_t start = ts_.position();
    std::vector<Name> bound;
    while (ts_.is_ident("new")) {
      ts_.next();
      std::vector<Name> names = parse_names();
      ts_.expect_punct(".");
      bound.insert(bound.end(), names.begin(), names.end());
    }
    std::size_t parens = 0;
    while (ts_.is_punct("(") && (ts_.is_punct("(", 1) || ts_.is_punct("{", 1))) {
      ts_.next();
      ++parens;
    }
    if (ts_.is_punct("{")) {
      ExtendedProcess a;
      a.bound_names = bound;
      a.frame = parse_frame();
      if (ts_.accept_punct("|")) {
        a.body = parse_par();
      }
      for (std::size_t i = 0; i < parens; ++i) ts_.expect_punct(")");
      return a;
    }
    ts_.reset(start);
    ExtendedProcess a;
    a.body = parse_par();
    return a;
  }

 private:
  TokenStream& ts_;
  ProcessDefinitions defs_;
};

void check_normal_form(const ExtendedProcess& a) {
  if (contains_alias(a.body)) throw Error("alias in plain process");
  for (const auto& [al, m] : a.frame.entries()) {
    if (has_alias(m)) throw Error("alias in the range of a frame");
  }
}

}  // namespace

ExtendedProcess parse_process(std::string_view text) {
  TokenStream ts(text);
  ProcessParser parser(ts);
  parser.parse_definitions();
  ExtendedProcess a = parser.parse_extended();
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  check_normal_form(a);
  return a;
}

Process parse_plain_process(std::string_view text) {
  TokenStream ts(text);
  ProcessParser parser(ts);
  parser.parse_definitions();
  Process p = parser.parse_par();
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  if (contains_alias(p)) throw Error("alias in plain process");
  return p;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

enum Level { level_par = 0, level_sum = 1, level_prefix = 2 };

std::string print_at(const Process& p, int level);

std::string wrap(const std::string& s, bool parens) { return parens ? "(" + s + ")" : s; }

std::string continuation_text(const Process& p) {
  if (p.is_nil()) return "";
  return "." + print_at(p, level_prefix);
}

std::string print_at(const Process& p, int level) {
  switch (p.kind()) {
    case Process::Kind::nil:
      return "0";
    case Process::Kind::restrict: {
      std::string names;
      Process q = p;
      while (q.kind() == Process::Kind::restrict) {
        if (!names.empty()) names += ",";
        names += q.binder().str();
        q = q.body();
      }
      return "new " + names + "." + print_at(q, level_prefix);
    }
    case Process::Kind::par:
      return wrap(print_at(p.left(), level_par) + " | " + print_at(p.right(), level_sum),
                  level > level_par);
    case Process::Kind::sum:
      return wrap(print_at(p.left(), level_sum) + " + " + print_at(p.right(), level_prefix),
                  level > level_sum);
    case Process::Kind::bang:
      return "!" + print_at(p.body(), level_prefix);
    case Process::Kind::match:
      return "[" + p.lhs().str() + " = " + p.rhs().str() + "] " + print_at(p.body(), level_prefix);
    case Process::Kind::cond:
      return "if " + p.lhs().str() + " = " + p.rhs().str() + " then " +
             print_at(p.left(), level_prefix) + " else " + print_at(p.right(), level_prefix);
    case Process::Kind::input:
      return "in(" + p.channel().str() + "," + p.binder().str() + ")" + continuation_text(p.body());
    case Process::Kind::output:
      return "out(" + p.channel().str() + "," + p.payload().str() + ")" +
             continuation_text(p.body());
  }
  return {};
}

}  // namespace

std::string print_process(const Process& p) { return print_at(p, level_par); }

std::string print_extended(const ExtendedProcess& a) {
  if (a.bound_names.empty() && a.frame.empty()) return print_process(a.body);
  std::string out;
  if (!a.bound_names.empty()) {
    out = "new ";
    for (std::size_t i = 0; i < a.bound_names.size(); ++i) {
      if (i) out += ",";
      out += a.bound_names[i].str();
    }
    out += ".(";
  }
  out += "{";
  bool first = true;
  for (const auto& [al, m] : a.frame.entries()) {
    if (!first) out += ", ";
    first = false;
    out += al.str() + " = " + m.str();
  }
  out += "} | " + print_at(a.body, level_sum);
  if (!a.bound_names.empty()) out += ")";
  return out;
}

// ---------------------------------------------------------------------------
// Canonical forms

namespace {

class Canonicalizer {
 public:
  explicit Canonicalizer(const CanonicalOptions& opts) : opts_(opts) {}

  std::string run(const ExtendedProcess& a) {
    for (const Name& n : a.bound_names) top_.emplace(n, std::string());
    // Top-level restrictions are numbered by first occurrence.
    std::string frame;
    for (const auto& [al, m] : a.frame.entries()) {
      frame += al.str();
      frame += '=';
      message(m, frame);
      frame += ';';
    }
    std::string body;
    process(a.body, body);
    std::string out = "nu" + std::to_string(top_count_);
    if (!opts_.congruence_quotient) {
      // Unused restrictions still count.
      std::size_t unused = 0;
      for (const auto& [n, label] : top_) unused += label.empty();
      out += "+" + std::to_string(unused);
    }
    out += "{" + frame + "}" + body;
    return out;
  }

 private:
  void name(const Name& n, std::string& out) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->first == n) {
        out += it->second;
        return;
      }
    }
    auto it = top_.find(n);
    if (it != top_.end()) {
      if (it->second.empty()) it->second = "$" + std::to_string(top_count_++);
      out += it->second;
      return;
    }
    out += n.str();
  }

  void message(const Message& m, std::string& out) {
    switch (m.kind()) {
      case Message::Kind::name:
        name(m.as_name(), out);
        return;
      case Message::Kind::alias:
        out += m.as_alias().str();
        return;
      case Message::Kind::apply:
        out += symbol_name(m.symbol());
        out += '(';
        for (std::size_t i = 0; i < m.args().size(); ++i) {
          if (i) out += ',';
          message(m.args()[i], out);
        }
        out += ')';
        return;
    }
  }

  void push(const Name& n) { scopes_.emplace_back(n, "%" + std::to_string(depth_++)); }
  void pop() {
    scopes_.pop_back();
    --depth_;
  }

  // Order of first free occurrence of `names` in p, following the printer's
  // traversal order. Stops once every name is placed.
  static void first_uses(const Process& p, const std::set<Name>& names, std::set<Name>& shadow,
                         std::vector<Name>& order) {
    if (order.size() == names.size()) return;
    auto visit_msg = [&](const Message& m) { first_uses_in(m, names, shadow, order); };
    auto under = [&](const Name& binder, const Process& body) {
      bool added = shadow.insert(binder).second;
      first_uses(body, names, shadow, order);
      if (added) shadow.erase(binder);
    };
    switch (p.kind()) {
      case Process::Kind::nil:
        return;
      case Process::Kind::restrict:
        under(p.binder(), p.body());
        return;
      case Process::Kind::input:
        visit_msg(p.channel());
        under(p.binder(), p.body());
        return;
      case Process::Kind::output:
        visit_msg(p.channel());
        visit_msg(p.payload());
        first_uses(p.body(), names, shadow, order);
        return;
      case Process::Kind::match:
        visit_msg(p.lhs());
        visit_msg(p.rhs());
        first_uses(p.body(), names, shadow, order);
        return;
      case Process::Kind::cond:
        visit_msg(p.lhs());
        visit_msg(p.rhs());
        first_uses(p.left(), names, shadow, order);
        first_uses(p.right(), names, shadow, order);
        return;
      case Process::Kind::par:
      case Process::Kind::sum:
        first_uses(p.left(), names, shadow, order);
        first_uses(p.right(), names, shadow, order);
        return;
      case Process::Kind::bang:
        first_uses(p.body(), names, shadow, order);
        return;
    }
  }

  static void first_uses_in(const Message& t, const std::set<Name>& names,
                            const std::set<Name>& shadow, std::vector<Name>& order) {
    if (t.is_name()) {
      const Name& n = t.as_name();
      if (names.count(n) && !shadow.count(n) &&
          std::find(order.begin(), order.end(), n) == order.end()) {
        order.push_back(n);
      }
    } else if (t.is_apply()) {
      for (const Message& a : t.args()) first_uses_in(a, names, shadow, order);
    }
  }

  void process(const Process& p, std::string& out) {
    switch (p.kind()) {
      case Process::Kind::nil:
        out += '0';
        return;
      case Process::Kind::restrict: {
        std::vector<Name> chain;
        Process q = p;
        while (q.kind() == Process::Kind::restrict) {
          chain.push_back(q.binder());
          q = q.body();
        }
        if (opts_.congruence_quotient) {
          std::set<Name> set(chain.begin(), chain.end());
          std::vector<Name> order;
          std::set<Name> shadow;
          first_uses(q, set, shadow, order);
          for (const Name& n : chain) {
            if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
          }
          // Duplicate binders: the innermost one wins, as in the original.
          std::vector<Name> dedup;
          for (const Name& n : order) {
            if (std::find(dedup.begin(), dedup.end(), n) == dedup.end()) dedup.push_back(n);
          }
          chain = dedup;
        }
        out += "nu" + std::to_string(chain.size()) + ".";
        for (const Name& n : chain) push(n);
        process(q, out);
        for (std::size_t i = 0; i < chain.size(); ++i) pop();
        return;
      }
      case Process::Kind::par:
        out += "(";
        process(p.left(), out);
        out += "|";
        process(p.right(), out);
        out += ")";
        return;
      case Process::Kind::sum:
        out += "(";
        process(p.left(), out);
        out += "+";
        process(p.right(), out);
        out += ")";
        return;
      case Process::Kind::bang:
        out += "!";
        if (opts_.with_copy_counts) out += std::to_string(p.copies());
        out += "(";
        process(p.body(), out);
        out += ")";
        return;
      case Process::Kind::match:
        out += "[";
        message(p.lhs(), out);
        out += "=";
        message(p.rhs(), out);
        out += "]";
        process(p.body(), out);
        return;
      case Process::Kind::cond:
        out += "if[";
        message(p.lhs(), out);
        out += "=";
        message(p.rhs(), out);
        out += "](";
        process(p.left(), out);
        out += ")(";
        process(p.right(), out);
        out += ")";
        return;
      case Process::Kind::input:
        out += "in(";
        message(p.channel(), out);
        out += ").";
        push(p.binder());
        process(p.body(), out);
        pop();
        return;
      case Process::Kind::output:
        out += "out(";
        message(p.channel(), out);
        out += ",";
        message(p.payload(), out);
        out += ").";
        process(p.body(), out);
        return;
    }
  }

  CanonicalOptions opts_;
  std::map<Name, std::string> top_;
  std::size_t top_count_ = 0;
  std::vector<std::pair<Name, std::string>> scopes_;
  std::size_t depth_ = 0;
};

}  // namespace

std::string canonical_key(const ExtendedProcess& a, const CanonicalOptions& opts) {
  return Canonicalizer(opts).run(a);
}

bool alpha_equal(const ExtendedProcess& a, const ExtendedProcess& b, const CanonicalOptions& opts) {
  return canonical_key(a, opts) == canonical_key(b, opts);
}

Process prune_nil(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::par: {
      Process l = prune_nil(p.left());
      Process r = prune_nil(p.right());
      if (l.is_nil()) return r;
      if (r.is_nil()) return l;
      if (l.same_node(p.left()) && r.same_node(p.right())) return p;
      return Process::par(l, r);
    }
    case Process::Kind::restrict: {
      Process b = prune_nil(p.body());
      if (b.is_nil()) return b;
      if (b.same_node(p.body())) return p;
      return Process::restrict(p.binder(), b);
    }
    default:
      return p;
  }
}

ExtendedProcess rename_bound_apart(const ExtendedProcess& a) {
  if (a.bound_names.empty()) return a;
  ExtendedProcess out;
  std::map<Name, Name> renaming;
  std::map<Name, Message> subst;
  for (const Name& n : a.bound_names) {
    Name z = Name::fresh(n.stem());
    renaming.emplace(n, z);
    subst.emplace(n, Message::name(z));
    out.bound_names.push_back(z);
  }
  for (const auto& [al, m] : a.frame.entries()) out.frame.set(al, rename_names(m, renaming));
  out.body = substitute(a.body, subst);
  return out;
}

}  // namespace picheck
