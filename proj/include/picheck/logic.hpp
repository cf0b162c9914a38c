#pragma once

#include <picheck/indep.hpp>
#include <picheck/sos.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace picheck {

enum class Dialect : std::uint8_t { fm, hpfm };

// The action pattern of a modality: tau, a free input "M N", or an output
// "out M (x)" binding x in the body.
struct ActionPattern {
  enum class Kind : std::uint8_t { tau, input, output };
  Kind kind = Kind::tau;
  Message channel;
  Message payload;  // input
  Name binder;      // output
};

class Formula {
 public:
  enum class Kind : std::uint8_t { top, equal, conj, neg, diamond };

  static Formula top();
  static Formula bottom();
  static Formula equal(Message lhs, Message rhs);
  static Formula conj(Formula left, Formula right);
  // Strips a double negation.
  static Formula neg(Formula body);
  static Formula disj(Formula left, Formula right);
  static Formula implies(Formula left, Formula right);
  static Formula diamond(ActionPattern pattern, std::optional<LocationLabel> loc, Formula body);
  static Formula box(ActionPattern pattern, std::optional<LocationLabel> loc, Formula body);

  Kind kind() const;
  const Message& lhs() const;  // equal
  const Message& rhs() const;  // equal
  const Formula& left() const;  // conj
  const Formula& right() const;  // conj
  const Formula& body() const;  // neg, diamond
  const ActionPattern& pattern() const;  // diamond
  const std::optional<LocationLabel>& location() const;  // diamond

  // Identity of the shared node, stable for the lifetime of the formula.
  const void* id() const { return node_.get(); }

  std::string str() const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const Node& expect(Kind k, const char* what) const;
  std::shared_ptr<const Node> node_;
};

// Parses a formula. fm rejects location annotations; hpfm requires one on
// every modality. Throws ParseError.
Formula parse_formula(std::string_view text, Dialect dialect);

std::set<Name> free_names(const Formula& phi);
std::size_t modal_depth(const Formula& phi);
// Negation only directly above equalities.
bool in_simulation_fragment(const Formula& phi);
// Contains no negation at all.
bool diamond_only(const Formula& phi);
bool has_locations(const Formula& phi);
// Every modality carries a location.
bool all_located(const Formula& phi);
Formula erase_locations(const Formula& phi);

// Constants every corpus process and formula treats as public.
const std::set<Name>& public_constants();

// Renames each free name of phi outside `constants` to a fresh public
// constant, consistently.
Formula instantiate_free(const Formula& phi, const std::set<Name>& constants = public_constants());

struct CheckBudget {
  // Copies one replication may spawn along a path; 0 means modal depth + 1.
  unsigned bang_unfold_cap = 0;
  bool congruence_quotient = true;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

enum class Truth : std::uint8_t { no, yes, unknown };

struct CheckStats {
  std::size_t evaluations = 0;
  std::size_t memo_hits = 0;
  std::size_t transitions = 0;
  std::size_t beyond_cap = 0;
  unsigned bang_cap = 0;
};

struct CheckResult {
  Truth truth = Truth::unknown;
  CheckStats stats;
};

// Three-valued satisfaction: unknown when the answer depends on transitions
// beyond the replication cap. `s` pairs process events with formula events
// and is only consulted for located modalities.
CheckResult evaluate(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                     const CheckBudget& budget);
// As above, with phi's free variables bound to recipes over a's frame.
CheckResult evaluate(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                     const CheckBudget& budget, const std::map<Name, Message>& bindings);

// Throw BudgetExceeded when the answer is unknown, and Error when phi is not
// in the expected dialect.
bool check_fm(const ExtendedProcess& a, const Formula& phi, const CheckBudget& budget = {});
bool check_hpfm(const ExtendedProcess& a, const EventRelation& s, const Formula& phi,
                const CheckBudget& budget = {});

}  // namespace picheck
