#pragma once

#include <picheck/process.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace picheck {

// s[t]: s records parallel choices, t records sum choices.
struct Location {
  std::string prefix;
  std::string branch;

  bool operator==(const Location&) const = default;
  std::strong_ordering operator<=>(const Location&) const = default;
  std::string str() const;
};

// A single location, or (output, input) for a communication.
struct LocationLabel {
  Location first;
  std::optional<Location> second;

  bool is_pair() const { return second.has_value(); }
  bool operator==(const LocationLabel&) const = default;
  std::strong_ordering operator<=>(const LocationLabel&) const = default;
  std::string str() const;
};

struct ActionLabel {
  enum class Kind : std::uint8_t { input, output, tau };
  Kind kind = Kind::tau;
  Message channel;  // input, output
  Message payload;  // input
  Alias alias;      // output

  static ActionLabel input(Message channel, Message payload);
  static ActionLabel output(Message channel, Alias alias);
  static ActionLabel tau();

  bool operator==(const ActionLabel& other) const;
  std::strong_ordering operator<=>(const ActionLabel& other) const;
  std::string str() const;
};

std::set<Name> free_names(const ActionLabel& l);
std::set<Alias> free_aliases(const ActionLabel& l);

struct Event {
  ActionLabel action;
  LocationLabel location;

  bool operator==(const Event&) const = default;
  std::strong_ordering operator<=>(const Event& other) const;
  std::string str() const;
};

struct StepOptions {
  // Copies a single replication may spawn along a path; transitions needing
  // more are still produced but flagged.
  unsigned bang_cap = std::numeric_limits<unsigned>::max();
};

struct Transition {
  Event event;
  ExtendedProcess target;
  bool beyond_cap = false;
};

std::vector<Transition> output_and_tau_steps(const ExtendedProcess& a, const StepOptions& opts = {});

// Outputs whose channel equals the frame-applied recipe.
std::vector<Transition> output_steps_on(const ExtendedProcess& a, const Message& channel_recipe,
                                        const StepOptions& opts = {});
std::vector<Transition> tau_steps(const ExtendedProcess& a, const StepOptions& opts = {});
std::vector<Transition> input_steps(const ExtendedProcess& a, const Message& channel_recipe,
                                    const Message& payload_recipe, const StepOptions& opts = {});

// Channels on which some input prefix is currently enabled (frame-free terms).
std::vector<Message> enabled_input_channels(const ExtendedProcess& a);

// Transitions labelled e, all successors alpha-equal; throws otherwise.
ExtendedProcess step(const ExtendedProcess& a, const Event& e, const StepOptions& opts = {});

// The transitions sharing the action of `e` (inputs re-derived from recipes).
std::vector<Transition> transitions_with_action(const ExtendedProcess& a, const ActionLabel& act,
                                                const StepOptions& opts = {});

Location parse_location(std::string_view text);

// Graphviz export of the graph reached by output/tau steps and the given
// input recipes, up to `depth` steps.
struct LtsGraph {
  std::vector<std::string> states;  // printed states
  struct Edge {
    std::size_t from, to;
    Event event;
  };
  std::vector<Edge> edges;
};

LtsGraph explore_lts(const ExtendedProcess& a, std::size_t depth,
                     const std::vector<std::pair<Message, Message>>& input_recipes,
                     const StepOptions& opts = {});
std::string to_dot(const LtsGraph& g);

}  // namespace picheck
