#pragma once

#include <picheck/terms.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace picheck {

class Process {
 public:
  enum class Kind : std::uint8_t { nil, restrict, par, bang, match, input, output, sum, cond };

  Process();  // nil
  static Process nil();
  static Process restrict(Name n, Process body);
  static Process par(Process left, Process right);
  // `copies` counts fresh copies already spawned from this replication.
  static Process bang(Process body, unsigned copies = 0);
  static Process match(Message lhs, Message rhs, Process body);
  static Process input(Message channel, Name binder, Process body);
  static Process output(Message channel, Message payload, Process body);
  // Both operands must be guarded; throws otherwise.
  static Process sum(Process left, Process right);
  static Process cond(Message lhs, Message rhs, Process then_branch, Process else_branch);

  Kind kind() const;
  bool is_nil() const { return kind() == Kind::nil; }
  const Process& body() const;  // restrict, bang, match, input, output
  const Process& left() const;  // par, sum, cond (then)
  const Process& right() const;  // par, sum, cond (else)
  const Name& binder() const;  // restrict, input
  const Message& channel() const;  // input, output
  const Message& payload() const;  // output
  const Message& lhs() const;  // match, cond
  const Message& rhs() const;  // match, cond
  unsigned copies() const;

  bool same_node(const Process& other) const { return node_ == other.node_; }

 private:
  struct Node;
  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Guarded processes: prefixes, and matches, sums and restrictions of them.
bool is_guarded(const Process& p);

std::set<Name> free_names(const Process& p);
void collect_free_names(const Process& p, std::set<Name>& out);
bool contains_alias(const Process& p);

// Capture-avoiding simultaneous substitution of names by messages.
Process substitute(const Process& p, const std::map<Name, Message>& s);
Process substitute(const Process& p, const Name& x, const Message& m);

struct ExtendedProcess {
  std::vector<Name> bound_names;
  Substitution frame;
  Process body;

  Frame frame_view() const { return Frame{bound_names, frame}; }
};

std::set<Name> free_names(const ExtendedProcess& a);

// Renames the top-level restricted names to fresh ones, so that no name
// supplied from outside can clash with them.
ExtendedProcess rename_bound_apart(const ExtendedProcess& a);

// Parses an extended process: optional leading restrictions over a frame
// "{@p:b = M, ...} | P", or a plain process. Definitions "def N(x,..) = P"
// may precede the main process.
ExtendedProcess parse_process(std::string_view text);
Process parse_plain_process(std::string_view text);

struct ProcessDefinitions {
  struct Definition {
    std::vector<Name> params;
    Process body;
  };
  std::map<std::string, Definition> defs;
};

std::string print_process(const Process& p);
std::string print_extended(const ExtendedProcess& a);

struct CanonicalOptions {
  // Identify permutations of adjacent restrictions and drop unused top-level
  // restrictions.
  bool congruence_quotient = true;
  // Record replication copy counters.
  bool with_copy_counts = true;
};

// Serialization invariant under renaming of bound names.
std::string canonical_key(const ExtendedProcess& a, const CanonicalOptions& opts = {});
bool alpha_equal(const ExtendedProcess& a, const ExtendedProcess& b,
                 const CanonicalOptions& opts = {});

// Rewrites 0|P and P|0 to P and drops restrictions over 0 outside guards.
Process prune_nil(const Process& p);

}  // namespace picheck
