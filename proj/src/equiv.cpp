#include <picheck/equiv.hpp>

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace picheck {

GameRelation parse_relation(std::string_view text) {
  if (text == "i-sim") return GameRelation::i_sim;
  if (text == "i-bisim") return GameRelation::i_bisim;
  if (text == "hp-sim") return GameRelation::hp_sim;
  if (text == "hp-bisim") return GameRelation::hp_bisim;
  throw Error("relation must be one of i-sim, i-bisim, hp-sim, hp-bisim");
}

std::string_view relation_name(GameRelation r) {
  switch (r) {
    case GameRelation::i_sim: return "i-sim";
    case GameRelation::i_bisim: return "i-bisim";
    case GameRelation::hp_sim: return "hp-sim";
    case GameRelation::hp_bisim: return "hp-bisim";
  }
  return "?";
}

bool is_bisimulation(GameRelation r) {
  return r == GameRelation::i_bisim || r == GameRelation::hp_bisim;
}

bool is_history_preserving(GameRelation r) {
  return r == GameRelation::hp_sim || r == GameRelation::hp_bisim;
}

void validate(const GameConfig& cfg) {
  if (cfg.depth == 0) throw Error("game depth must be positive");
  if (cfg.recipe_depth == 0) throw Error("recipe depth must be positive");
  if (cfg.bang_cap == 0) throw Error("bang cap must be positive");
  if (cfg.hint && !in_simulation_fragment(*cfg.hint)) {
    throw Error("a game hint must be in the simulation fragment");
  }
}

// ---------------------------------------------------------------------------
// Strategies

std::size_t strategy_size(const Strategy& s) {
  if (!s) return 0;
  std::size_t n = 1;
  for (const auto& r : s->replies) n += strategy_size(r.next);
  return n;
}

std::size_t strategy_depth(const Strategy& s) {
  if (!s) return 0;
  if (s->frame_test) return 0;
  std::size_t d = 0;
  for (const auto& r : s->replies) d = std::max(d, strategy_depth(r.next));
  return d + 1;
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

std::size_t emit_dot(const Strategy& s, std::ostringstream& os, std::size_t& counter) {
  std::size_t id = counter++;
  std::string label;
  if (s->frame_test) {
    label = "frames differ on " + s->frame_test->first.str() + " = " + s->frame_test->second.str();
  } else {
    label = std::string(s->side == GameSide::left ? "left: " : "right: ") + s->move.str();
  }
  os << "  n" << id << " [label=\"" << dot_escape(label) << "\"";
  if (!s->frame_test && s->replies.empty()) os << ", shape=box";
  os << "];\n";
  for (const auto& r : s->replies) {
    std::size_t child = emit_dot(r.next, os, counter);
    os << "  n" << id << " -> n" << child << " [label=\"" << dot_escape(r.event.str()) << "\"];\n";
  }
  return id;
}

}  // namespace

std::string strategy_to_dot(const Strategy& s) {
  std::ostringstream os;
  os << "digraph strategy {\n";
  if (s) {
    std::size_t counter = 0;
    emit_dot(s, os, counter);
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Positions and moves

namespace {

using Env = std::map<Name, Message>;

struct Position {
  ExtendedProcess left;
  ExtendedProcess right;
  AliasBijection rho;
  EventRelation history;
  // Remaining hint obligation and the aliases bound so far on the left.
  std::optional<Formula> goal;
  Env env;

  const ExtendedProcess& side(GameSide s) const { return s == GameSide::left ? left : right; }
};

Message bind_env(Message m, const Env& env) {
  for (const auto& [n, v] : env) m = replace_name(m, n, v);
  return m;
}

Message translate(const Message& m, const AliasBijection& rho, GameSide from) {
  Substitution s = from == GameSide::left ? rho.as_substitution() : rho.inverse().as_substitution();
  return apply_substitution(m, s);
}

// The duplicator's transitions carrying the translated action.
std::vector<Transition> answers_to(const ExtendedProcess& other, const Event& move,
                                   const AliasBijection& rho, GameSide from) {
  const ActionLabel& act = move.action;
  switch (act.kind) {
    case ActionLabel::Kind::tau: return tau_steps(other);
    case ActionLabel::Kind::output:
      return output_steps_on(other, translate(act.channel, rho, from));
    case ActionLabel::Kind::input:
      return input_steps(other, translate(act.channel, rho, from),
                         translate(act.payload, rho, from));
  }
  return {};
}

struct Answer {
  Event event;
  Position next;
};

// Successor position after spoiler event `e` on `from` and answer `f`, or
// nothing when the answer breaks the history or static-equivalence clauses.
std::optional<Position> advance(const Position& pos, GameSide from, const Transition& e,
                                const Transition& f, bool history_preserving) {
  const Transition& l = from == GameSide::left ? e : f;
  const Transition& r = from == GameSide::left ? f : e;
  Position next;
  next.left = l.target;
  next.right = r.target;
  next.rho = pos.rho;
  if (l.event.action.kind == ActionLabel::Kind::output) {
    next.rho.add(l.event.action.alias, r.event.action.alias);
  }
  if (history_preserving) {
    for (const auto& pr : pos.history) {
      bool li = event_indep(pr.first, l.event);
      if (li != event_indep(pr.second, r.event)) return std::nullopt;
      if (li) next.history.push_back(pr);
    }
    next.history.emplace_back(l.event, r.event);
  }
  if (!static_equivalent(next.left.frame_view(), next.right.frame_view(), next.rho)) {
    return std::nullopt;
  }
  return next;
}

std::vector<Answer> admissible_answers(const Position& pos, GameSide from, const Transition& e,
                                       bool history_preserving) {
  GameSide to = from == GameSide::left ? GameSide::right : GameSide::left;
  std::vector<Answer> out;
  for (const Transition& f : answers_to(pos.side(to), e.event, pos.rho, from)) {
    if (auto next = advance(pos, from, e, f, history_preserving)) {
      out.push_back({f.event, std::move(*next)});
    }
  }
  return out;
}

bool channel_is_known(const ExtendedProcess& a, const Message& channel,
                      const std::set<Name>& free) {
  for (const Name& n : names_of(channel)) {
    if (!free.count(n) &&
        std::find(a.bound_names.begin(), a.bound_names.end(), n) == a.bound_names.end()) {
      return false;
    }
  }
  return true;
}

constexpr Symbol constructors[] = {Symbol::pair, Symbol::enc, Symbol::mac, Symbol::h};

// Input payload recipes over `a`'s frame, one per value.
std::vector<Message> payload_pool(const ExtendedProcess& a, const std::set<Name>& public_pool,
                                  unsigned recipe_depth) {
  Frame f = a.frame_view();
  std::vector<Message> level;
  std::set<Message> values;
  auto add = [&](const Message& recipe, std::vector<Message>& into) {
    Message v = normalize(apply_substitution(recipe, a.frame));
    if (values.insert(v).second) into.push_back(recipe);
  };
  for (const Knowledge::Entry& e : saturate(f).entries) add(e.recipe, level);
  for (const Name& n : public_pool) add(Message::name(n), level);
  std::vector<Message> all = level;
  for (unsigned d = 1; d < recipe_depth; ++d) {
    std::vector<Message> fresh;
    for (Symbol s : constructors) {
      if (arity(s) == 1) {
        for (const Message& x : all) add(Message::apply(s, {x}), fresh);
      } else {
        for (const Message& x : all) {
          for (const Message& y : all) add(Message::apply(s, {x, y}), fresh);
        }
      }
    }
    all.insert(all.end(), fresh.begin(), fresh.end());
  }
  return all;
}

}  // namespace

// ---------------------------------------------------------------------------
// Solver

namespace {

class Solver {
 public:
  Solver(const GameConfig& cfg, std::set<Name> public_pool)
      : cfg_(cfg), public_pool_(std::move(public_pool)) {
    capped_.bang_cap = cfg.bang_cap;
  }

  // A strategy winning within `plies` spoiler moves, if the search finds one.
  Strategy attack(const Position& pos, unsigned plies) {
    if (plies == 0) {
      cut_ = true;
      return nullptr;
    }
    std::string key = memo_key(pos);
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      Entry& e = it->second;
      if (e.win && e.win_plies <= plies) {
        ++stats.memo_hits;
        return e.win;
      }
      if (e.lost_up_to >= plies) {
        ++stats.memo_hits;
        if (e.lost_up_to != UINT_MAX) cut_ = true;
        return nullptr;
      }
    } else {
      Entry fresh;
      fresh.pos = pos;
      it = memo_.emplace(key, std::move(fresh)).first;
    }
    ++stats.positions;

    bool outer_cut = cut_;
    cut_ = false;
    Strategy found = search(pos, plies);
    Entry& e = memo_.find(key)->second;
    if (found) {
      if (!e.win || e.win_plies > plies) {
        e.win = found;
        e.win_plies = plies;
      }
    } else {
      e.lost_up_to = cut_ ? std::max(e.lost_up_to, plies) : UINT_MAX;
    }
    cut_ = outer_cut || cut_;
    return found;
  }

  std::vector<RelatedPosition> survivors() const {
    std::vector<RelatedPosition> out;
    for (const auto& [key, e] : memo_) {
      if (e.win || e.lost_up_to == 0) continue;
      out.push_back({e.pos.left, e.pos.right, e.pos.rho, e.pos.history});
    }
    return out;
  }

  bool cut() const { return cut_; }

  GameStats stats;

 private:
  struct Entry {
    Position pos;
    unsigned lost_up_to = 0;
    Strategy win;
    unsigned win_plies = 0;
  };

  struct Move {
    GameSide side;
    Transition t;
    std::optional<Formula> goal;  // hint obligation after the move
    Env env;
  };

  std::string memo_key(const Position& pos) const {
    CanonicalOptions canon;
    std::string key = canonical_key(pos.left, canon);
    key += '\x1e';
    key += canonical_key(pos.right, canon);
    key += '\x1e';
    for (const auto& [l, r] : pos.rho.entries()) key += l.str() + ">" + r.str() + ";";
    std::vector<std::string> pairs;
    for (const auto& [l, r] : pos.history) pairs.push_back(l.str() + "~" + r.str());
    std::sort(pairs.begin(), pairs.end());
    for (const std::string& p : pairs) key += "|" + p;
    if (pos.goal) {
      key += '\x1e';
      key += std::to_string(reinterpret_cast<std::uintptr_t>(pos.goal->id()));
      for (const auto& [n, m] : pos.env) key += n.str() + "=" + m.str() + ";";
    }
    return key;
  }

  Strategy search(const Position& pos, unsigned plies) {
    bool hp = is_history_preserving(cfg_.relation);
    for (Move& m : moves(pos)) {
      ++stats.spoiler_moves;
      std::vector<Answer> answers = admissible_answers(pos, m.side, m.t, hp);
      auto node = std::make_shared<StrategyNode>();
      node->side = m.side;
      node->move = m.t.event;
      bool refuted = true;
      for (Answer& a : answers) {
        ++stats.answers;
        a.next.goal = m.goal;
        a.next.env = m.env;
        Strategy sub = attack(a.next, plies - 1);
        if (!sub) {
          refuted = false;
          break;
        }
        node->replies.push_back({a.event, sub});
      }
      if (refuted) return node;
    }
    return nullptr;
  }

  std::vector<Move> moves(const Position& pos) {
    std::vector<Move> out;
    if (pos.goal) {
      guided_moves(pos, *pos.goal, out);
      return out;
    }
    sides_moves(pos, GameSide::left, out);
    if (is_bisimulation(cfg_.relation)) sides_moves(pos, GameSide::right, out);
    return out;
  }

  void sides_moves(const Position& pos, GameSide side, std::vector<Move>& out) {
    const ExtendedProcess& a = pos.side(side);
    for (Transition& t : output_and_tau_steps(a, capped_)) {
      if (!t.beyond_cap) out.push_back({side, std::move(t), std::nullopt, {}});
    }
    std::set<Name> free = free_names(a);
    std::vector<Message> pool;
    bool pool_ready = false;
    Frame f = a.frame_view();
    for (const Message& ch : enabled_input_channels(a)) {
      if (!channel_is_known(a, ch, free)) continue;
      std::optional<Message> recipe = find_recipe(f, ch);
      if (!recipe) continue;
      if (!pool_ready) {
        pool = payload_pool(a, public_pool_, cfg_.recipe_depth);
        pool_ready = true;
      }
      for (const Message& payload : pool) {
        for (Transition& t : input_steps(a, *recipe, payload, capped_)) {
          if (!t.beyond_cap) out.push_back({side, std::move(t), std::nullopt, {}});
        }
      }
    }
  }

  // Moves realizing a top-level modality of the hint, on the left.
  void guided_moves(const Position& pos, const Formula& goal, std::vector<Move>& out) {
    switch (goal.kind()) {
      case Formula::Kind::conj:
        guided_moves(pos, goal.left(), out);
        guided_moves(pos, goal.right(), out);
        return;
      case Formula::Kind::diamond: break;
      default: return;
    }
    const ActionPattern& p = goal.pattern();
    std::vector<Transition> ts;
    switch (p.kind) {
      case ActionPattern::Kind::tau: ts = tau_steps(pos.left, capped_); break;
      case ActionPattern::Kind::output:
        ts = output_steps_on(pos.left, bind_env(p.channel, pos.env), capped_);
        break;
      case ActionPattern::Kind::input:
        ts = input_steps(pos.left, bind_env(p.channel, pos.env), bind_env(p.payload, pos.env),
                         capped_);
        break;
    }
    for (Transition& t : ts) {
      if (t.beyond_cap) continue;
      Env env = pos.env;
      if (p.kind == ActionPattern::Kind::output) {
        env[p.binder] = Message::alias(t.event.action.alias);
      }
      // A move whose target refutes the body cannot realize the modality.
      if (!has_locations(goal.body()) &&
          evaluate(t.target, {}, goal.body(), CheckBudget{}, env).truth == Truth::no) {
        continue;
      }
      out.push_back({GameSide::left, std::move(t), goal.body(), std::move(env)});
    }
  }

  GameConfig cfg_;
  std::set<Name> public_pool_;
  StepOptions capped_;
  std::unordered_map<std::string, Entry> memo_;
  bool cut_ = false;
};

std::set<Name> game_public_names(const ExtendedProcess& a, const ExtendedProcess& b,
                                 const std::optional<Formula>& hint) {
  std::set<Name> out = free_names(a);
  for (const Name& n : free_names(b)) out.insert(n);
  for (const Name& n : public_names(a.frame_view())) out.insert(n);
  for (const Name& n : public_names(b.frame_view())) out.insert(n);
  if (hint) {
    for (const Name& n : free_names(*hint)) out.insert(n);
  }
  // Two constants no process mentions.
  out.insert(Name("pub_one"));
  out.insert(Name("pub_two"));
  return out;
}

Position initial_position(const ExtendedProcess& a, const ExtendedProcess& b) {
  Position pos;
  pos.left = rename_bound_apart(a);
  pos.right = rename_bound_apart(b);
  std::vector<Alias> dom = pos.left.frame.domain();
  std::vector<Alias> cod = pos.right.frame.domain();
  if (dom.size() != cod.size()) throw Error("the two frames have different domains");
  for (std::size_t i = 0; i < dom.size(); ++i) pos.rho.add(dom[i], cod[i]);
  return pos;
}

}  // namespace

GameVerdict play_game(const ExtendedProcess& a, const ExtendedProcess& b, const GameConfig& cfg) {
  validate(cfg);
  Position root = initial_position(a, b);
  GameVerdict v;
  if (auto test = distinguishing_test(root.left.frame_view(), root.right.frame_view(), root.rho)) {
    auto node = std::make_shared<StrategyNode>();
    node->frame_test = *test;
    v.outcome = GameVerdict::Outcome::distinguished;
    v.strategy = node;
    v.exhaustive = true;
    return v;
  }
  if (cfg.hint) root.goal = *cfg.hint;
  Solver solver(cfg, game_public_names(a, b, cfg.hint));
  // Plain depth-first search at the full bound: strategies need not be
  // shortest, but iterative deepening repeats too much work.
  Strategy s = solver.attack(root, cfg.depth);
  v.stats = solver.stats;
  v.stats.depth_searched = cfg.depth;
  if (s) {
    v.outcome = GameVerdict::Outcome::distinguished;
    v.strategy = s;
    return v;
  }
  v.exhaustive = !solver.cut();
  v.outcome = GameVerdict::Outcome::related_up_to_bound;
  v.related = solver.survivors();
  return v;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

bool replay(const Position& pos, const StrategyNode& node, bool hp) {
  const ExtendedProcess& mover = pos.side(node.side);
  Transition t;
  t.event = node.move;
  t.target = step(mover, node.move);
  for (const Answer& a : admissible_answers(pos, node.side, t, hp)) {
    auto it = std::find_if(node.replies.begin(), node.replies.end(),
                           [&](const StrategyNode::Reply& r) { return r.event == a.event; });
    if (it == node.replies.end() || !it->next) return false;
    if (!replay(a.next, *it->next, hp)) return false;
  }
  return true;
}

}  // namespace

bool replay_strategy(const ExtendedProcess& a, const ExtendedProcess& b, const Strategy& s,
                     GameRelation relation) {
  if (!s) return false;
  Position root = initial_position(a, b);
  if (s->frame_test) {
    const auto& [m, n] = *s->frame_test;
    bool left = satisfies_equality(root.left.frame_view(), m, n);
    bool right = satisfies_equality(root.right.frame_view(), translate(m, root.rho, GameSide::left),
                                    translate(n, root.rho, GameSide::left));
    return left != right;
  }
  if (!static_equivalent(root.left.frame_view(), root.right.frame_view(), root.rho)) return true;
  return replay(root, *s, is_history_preserving(relation));
}

}  // namespace picheck
