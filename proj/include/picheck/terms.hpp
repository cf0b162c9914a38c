#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace picheck {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Interned identifier. Ordering is lexicographic on the text so that
// enumeration orders do not depend on interning order.
class Name {
 public:
  Name() = default;
  explicit Name(std::string_view text);

  const std::string& str() const { return text_ ? *text_ : empty_text(); }
  std::uint32_t id() const { return id_; }

  bool operator==(const Name& other) const { return id_ == other.id_; }
  std::strong_ordering operator<=>(const Name& other) const;

  // A new name never returned before in this process: "<stem>#<k>".
  static Name fresh(std::string_view stem);
  // Strips any "#k" suffix.
  std::string stem() const;
  // Restarts the fresh counter; only call when no fresh names are live.
  static void reset_fresh_counter();

 private:
  static const std::string& empty_text();

  std::uint32_t id_ = 0;
  const std::string* text_ = nullptr;  // interned; stable for the process lifetime
};

struct Alias {
  std::string prefix;  // over {0,1}
  Name base;

  bool operator==(const Alias&) const = default;
  std::strong_ordering operator<=>(const Alias& other) const;
  std::string str() const;
};

enum class Symbol : std::uint8_t { pair, fst, snd, enc, dec, mac, h };

std::size_t arity(Symbol s);
std::string_view symbol_name(Symbol s);
std::optional<Symbol> symbol_from_name(std::string_view text);
bool is_constructor(Symbol s);

class Message {
 public:
  enum class Kind : std::uint8_t { name, alias, apply };

  Message() = default;
  static Message name(Name n);
  static Message name(std::string_view text) { return name(Name(text)); }
  static Message alias(Alias a);
  static Message apply(Symbol s, std::vector<Message> args);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  bool is_name() const { return kind() == Kind::name; }
  bool is_alias() const { return kind() == Kind::alias; }
  bool is_apply() const { return kind() == Kind::apply; }
  const Name& as_name() const;
  const Alias& as_alias() const;
  Symbol symbol() const;
  std::span<const Message> args() const;
  const Message& arg(std::size_t i) const { return args()[i]; }

  std::size_t hash() const;
  // Cached: true when no rewrite rule applies anywhere in the term.
  bool is_normal() const;
  std::size_t size() const;
  std::size_t height() const;

  bool operator==(const Message& other) const;
  std::strong_ordering operator<=>(const Message& other) const;

  std::string str() const;

 private:
  struct Node;
  explicit Message(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct MessageHash {
  std::size_t operator()(const Message& m) const { return m.hash(); }
};

Message pair(Message a, Message b);
Message fst(Message a);
Message snd(Message a);
Message enc(Message a, Message k);
Message dec(Message a, Message k);
Message mac(Message a, Message k);
Message hash_of(Message a);

Message normalize(const Message& m);
bool eq_modulo_E(const Message& m, const Message& n);

void collect_names(const Message& m, std::set<Name>& out);
void collect_aliases(const Message& m, std::set<Alias>& out);
std::set<Name> names_of(const Message& m);
std::set<Alias> aliases_of(const Message& m);
bool mentions_name(const Message& m, const Name& n);
bool has_alias(const Message& m);

// Replaces every occurrence of the name `from` by `to`.
Message replace_name(const Message& m, const Name& from, const Message& to);
Message rename_names(const Message& m, const std::map<Name, Name>& renaming);

// Finite map on aliases; identity outside its domain.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const Alias, Message>> init);

  void set(const Alias& a, Message m);
  const Message* find(const Alias& a) const;
  bool contains(const Alias& a) const { return find(a) != nullptr; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  std::vector<Alias> domain() const;
  const std::map<Alias, Message>& entries() const { return map_; }

  // (this ∘ then): applying the result equals applying this, then `then`.
  Substitution compose(const Substitution& then) const;

  bool operator==(const Substitution&) const = default;

 private:
  std::map<Alias, Message> map_;
};

Message apply_substitution(const Message& m, const Substitution& s);

// The attacker-visible part of an extended process.
struct Frame {
  std::vector<Name> bound_names;
  Substitution subst;

  bool binds(const Name& n) const;
};

// Parser for the textual message grammar. Throws ParseError.
Message parse_message(std::string_view text);

// Bijection between the alias domains of two frames.
class AliasBijection {
 public:
  AliasBijection() = default;
  static AliasBijection identity(const std::vector<Alias>& dom);

  // Throws if either side is already mapped.
  void add(const Alias& left, const Alias& right);
  const Alias* forward(const Alias& a) const;
  const Alias* backward(const Alias& a) const;
  std::size_t size() const { return fwd_.size(); }
  const std::map<Alias, Alias>& entries() const { return fwd_; }
  AliasBijection inverse() const;
  Substitution as_substitution() const;

  bool operator==(const AliasBijection& other) const { return fwd_ == other.fwd_; }
  std::strong_ordering operator<=>(const AliasBijection& other) const {
    return fwd_ <=> other.fwd_;
  }

 private:
  std::map<Alias, Alias> fwd_;
  std::map<Alias, Alias> bwd_;
};

// Equality test A ⊨ m = n. Throws if m or n mentions a bound name.
bool satisfies_equality(const Frame& f, const Message& m, const Message& n);

// Attacker knowledge of a frame after analysis saturation: each entry is a
// recipe (over aliases and public names) and the normal form it evaluates to.
struct Knowledge {
  struct Entry {
    Message recipe;
    Message value;
  };
  std::vector<Entry> entries;
};

Knowledge saturate(const Frame& f);

// A recipe deducing `target` from the frame, if one exists. Prefers small
// recipes; public terms are their own recipe.
std::optional<Message> find_recipe(const Frame& f, const Message& target);
std::optional<Message> find_recipe(const Frame& f, const Knowledge& k, const Message& target);

// The public names appearing free in the frame's range.
std::set<Name> public_names(const Frame& f);

bool static_equivalent(const Frame& a, const Frame& b, const AliasBijection& rho);

// A test (m, n) holding on exactly one side, when the frames differ.
std::optional<std::pair<Message, Message>> distinguishing_test(
    const Frame& a, const Frame& b, const AliasBijection& rho);

}  // namespace picheck

template <>
struct std::hash<picheck::Message> {
  std::size_t operator()(const picheck::Message& m) const { return m.hash(); }
};
template <>
struct std::hash<picheck::Name> {
  std::size_t operator()(const picheck::Name& n) const { return n.id(); }
};
