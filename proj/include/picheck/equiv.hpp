#pragma once

#include <picheck/indep.hpp>
#include <picheck/logic.hpp>
#include <picheck/sos.hpp>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace picheck {

enum class GameRelation : std::uint8_t { i_sim, i_bisim, hp_sim, hp_bisim };

GameRelation parse_relation(std::string_view text);
std::string_view relation_name(GameRelation r);
bool is_bisimulation(GameRelation r);
bool is_history_preserving(GameRelation r);

struct GameConfig {
  GameRelation relation = GameRelation::i_sim;
  // Spoiler moves along any play.
  unsigned depth = 6;
  // Input payloads: 1 uses known atoms (aliases, their analyses, public
  // names), each further level adds one constructor layer.
  unsigned recipe_depth = 1;
  // Replication copies the spoiler may spawn; the duplicator is not capped.
  unsigned bang_cap = 4;
  // Restricts the spoiler to the moves realizing this formula's modalities.
  std::optional<Formula> hint;
};

// Throws Error unless every numeric field is positive and a hint, if any,
// has no negation above a modality.
void validate(const GameConfig& cfg);

enum class GameSide : std::uint8_t { left, right };

struct StrategyNode;
using Strategy = std::shared_ptr<const StrategyNode>;

// One spoiler move and a refutation of every admissible duplicator answer.
// An empty reply list means the duplicator cannot answer at all.
struct StrategyNode {
  // Set at the root only when the initial frames already differ: the
  // equality test, over the left frame's aliases, holding on one side only.
  std::optional<std::pair<Message, Message>> frame_test;
  GameSide side = GameSide::left;
  Event move;
  struct Reply {
    Event event;
    Strategy next;
  };
  std::vector<Reply> replies;
};

std::size_t strategy_size(const Strategy& s);
// Longest sequence of spoiler moves.
std::size_t strategy_depth(const Strategy& s);
std::string strategy_to_dot(const Strategy& s);

// A position the duplicator survived to the explored bound.
struct RelatedPosition {
  ExtendedProcess left;
  ExtendedProcess right;
  AliasBijection rho;  // left aliases to right aliases
  EventRelation history;  // empty for interleaving relations
};

struct GameStats {
  std::size_t positions = 0;
  std::size_t memo_hits = 0;
  std::size_t spoiler_moves = 0;
  std::size_t answers = 0;
  unsigned depth_searched = 0;
};

struct GameVerdict {
  enum class Outcome : std::uint8_t { related_up_to_bound, distinguished };
  Outcome outcome = Outcome::related_up_to_bound;
  Strategy strategy;  // distinguished
  std::vector<RelatedPosition> related;  // related_up_to_bound
  // No play was cut short by the depth bound.
  bool exhaustive = false;
  GameStats stats;

  bool distinguished() const { return outcome == Outcome::distinguished; }
};

GameVerdict play_game(const ExtendedProcess& a, const ExtendedProcess& b, const GameConfig& cfg);

// Re-executes the strategy against every admissible duplicator answer.
// True iff every play ends with the duplicator unable to answer. Throws
// Error when a spoiler move is not enabled.
bool replay_strategy(const ExtendedProcess& a, const ExtendedProcess& b, const Strategy& s,
                     GameRelation relation);

}  // namespace picheck
