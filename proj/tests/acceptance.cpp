// Acceptance runner: one PASS/FAIL line per criterion, exit code 1 if any
// criterion fails.

#include <picheck/corpus.hpp>
#include <picheck/equiv.hpp>
#include <picheck/syntax.hpp>

#include "frontier.hpp"
#include "oracles.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace picheck;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Accumulates the sub-checks of one criterion.
class Criterion {
 public:
  void require(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    notes_.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { notes_.push_back("     " + what); }

  bool report(int number, const std::string& title) const {
    std::cout << (pass_ ? "PASS " : "FAIL ") << number << " " << title << "\n";
    for (const std::string& n : notes_) std::cout << "       " << n << "\n";
    return pass_;
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
};

std::string seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << s << " s";
  return os.str();
}

ExtendedProcess model(const std::string& name, Side side) {
  return build_model(parse_model_name(name, side));
}

// "sat", "unsat", or the budget message.
std::string run_check(const ExtendedProcess& a, const Formula& phi, Dialect logic, unsigned cap,
                      double& elapsed) {
  Name::reset_fresh_counter();
  Stopwatch clock;
  std::string out;
  try {
    CheckBudget b;
    b.bang_unfold_cap = cap;
    bool sat = logic == Dialect::fm ? check_fm(a, phi, b) : check_hpfm(a, {}, phi, b);
    out = sat ? "sat" : "unsat";
  } catch (const BudgetExceeded& e) {
    out = std::string("budget exceeded (") + e.what() + ")";
  }
  elapsed = clock.seconds();
  return out;
}

// Checks `attack` on both sides of `model_name` at `cap` within `limit`
// seconds; when a side is undecided, also reports the exact verdict.
void attack_pair(Criterion& c, const std::string& attack, const std::string& model_name,
                 bool system_sat, bool spec_sat, unsigned cap, double limit) {
  const Attack& at = find_attack(attack);
  Formula phi = attack_formula(attack);
  for (Side side : {Side::system, Side::spec}) {
    bool want = side == Side::system ? system_sat : spec_sat;
    std::string side_name = side == Side::system ? "system" : "spec";
    ExtendedProcess a = model(model_name, side);
    double t = 0;
    std::string got = run_check(a, phi, at.dialect, cap, t);
    std::string expected = want ? "sat" : "unsat";
    std::string at_cap = cap ? "bang cap " + std::to_string(cap) : "the default cap";
    c.require(got == expected && t < limit, attack + " on " + model_name + "/" + side_name +
                                                " at " + at_cap + ": " + got + ", expected " +
                                                expected + ", " + seconds(t));
    if (got != "sat" && got != "unsat") {
      double t0 = 0;
      std::string exact = run_check(a, phi, at.dialect, 0, t0);
      c.note("at the exact default cap " + std::to_string(modal_depth(phi) + 1) + ": " + exact +
             ", " + seconds(t0));
    }
  }
}

GameVerdict timed_game(const ExtendedProcess& a, const ExtendedProcess& b, const GameConfig& cfg,
                       double& elapsed) {
  Name::reset_fresh_counter();
  Stopwatch clock;
  GameVerdict v = play_game(a, b, cfg);
  elapsed = clock.seconds();
  return v;
}

bool criterion_get() {
  Criterion c;
  attack_pair(c, "phi-get", "bac-get", true, false, 4, 60);
  return c.report(1, "getchallenge attack separates System_get from Spec_get (bang cap 4)");
}

bool criterion_ch() {
  Criterion c;
  attack_pair(c, "phi-ch", "bac-ch", true, false, 4, 60);
  return c.report(2, "channel attack separates System_ch from Spec_ch (bang cap 4)");
}

bool criterion_two() {
  Criterion c;
  attack_pair(c, "phi-2", "bac-two", true, false, 0, 30);
  GameConfig cfg;
  cfg.relation = GameRelation::i_sim;
  cfg.depth = 14;
  cfg.recipe_depth = 1;
  ExtendedProcess sys = model("bac-two", Side::system);
  ExtendedProcess spec = model("bac-two", Side::spec);
  double t = 0;
  GameVerdict v = timed_game(sys, spec, cfg, t);
  c.require(v.distinguished() && t < 300,
            std::string("i-sim game at depth 14, recipe depth 1: ") +
                (v.distinguished() ? "distinguished" : "related up to bound") + ", " + seconds(t));
  if (v.distinguished()) {
    c.require(replay_strategy(sys, spec, v.strategy, cfg.relation),
              "strategy replays against every duplicator answer (" +
                  std::to_string(strategy_size(v.strategy)) + " nodes)");
  }
  return c.report(3, "two-session system is not simulated by its specification");
}

bool criterion_psi_min() {
  Criterion c;
  attack_pair(c, "psi-min", "bac-min", true, false, 5, 300);
  return c.report(4, "box formula separates System_min from Spec_min (bang cap 5)");
}

bool criterion_chi() {
  Criterion c;
  attack_pair(c, "chi-feldhofer", "feldhofer-min", true, false, 5, 300);
  attack_pair(c, "chi-prime-feldhofer", "feldhofer-min", true, false, 5, 300);
  return c.report(5, "located formulas separate the Feldhofer models (bang cap 5)");
}

bool criterion_err() {
  Criterion c;
  attack_pair(c, "psi-err", "feldhofer-min-err", true, false, 5, 300);
  attack_pair(c, "chi-err", "feldhofer-min-err", true, false, 5, 300);
  return c.report(6, "error-message variant is separated by both logics (bang cap 5)");
}

bool criterion_nondist() {
  Criterion c;
  attack_pair(c, "phi-nondist", "bac-min", true, true, 5, 300);
  return c.report(7, "located formula holds on both System_min and Spec_min (bang cap 5)");
}

bool criterion_examples() {
  Criterion c;
  struct Row {
    const char* pair;
    GameRelation coarse;  // expected related
  };
  const Row rows[] = {
      {"seq-vs-par", GameRelation::i_bisim},
      {"nested-vs-flat", GameRelation::i_sim},
      {"two-outputs-vs-one", GameRelation::i_bisim},
      {"independence", GameRelation::i_sim},
  };
  for (const Row& row : rows) {
    const ExamplePair& e = find_example(row.pair);
    ExtendedProcess a = parse_process(e.left);
    ExtendedProcess b = parse_process(e.right);
    GameConfig cfg;
    cfg.depth = 6;
    cfg.relation = GameRelation::hp_sim;
    double t = 0;
    GameVerdict hp = timed_game(a, b, cfg, t);
    bool replayed = hp.distinguished() && replay_strategy(a, b, hp.strategy, cfg.relation);
    c.require(hp.distinguished() && replayed && t < 10,
              std::string(row.pair) + " hp-sim: " +
                  (hp.distinguished() ? "distinguished, strategy replays" : "related") + ", " +
                  seconds(t));
    cfg.relation = row.coarse;
    GameVerdict coarse = timed_game(a, b, cfg, t);
    c.require(!coarse.distinguished() && t < 10,
              std::string(row.pair) + " " + std::string(relation_name(row.coarse)) + ": " +
                  (coarse.distinguished() ? "distinguished" : "related up to depth 6") + ", " +
                  seconds(t));
    if (row.coarse == GameRelation::i_sim) {
      cfg.relation = GameRelation::i_bisim;
      GameVerdict bisim = timed_game(a, b, cfg, t);
      c.note(std::string(row.pair) + " i-bisim: " +
             (bisim.distinguished() ? "distinguished (the right side can move first)"
                                    : "related up to depth 6"));
    }
  }
  const ExamplePair& ind = find_example("independence");
  Formula phi = instantiate_free(parse_formula(ind.left_only_formula, Dialect::hpfm));
  Stopwatch clock;
  bool left = check_hpfm(parse_process(ind.left), {}, phi);
  bool right = check_hpfm(parse_process(ind.right), {}, phi);
  c.require(left && !right && clock.seconds() < 10,
            std::string("independence formula: left ") + (left ? "sat" : "unsat") + ", right " +
                (right ? "sat" : "unsat") + ", " + seconds(clock.seconds()));
  return c.report(8, "example pairs: history preservation separates, interleaving relates");
}

bool criterion_properties() {
  Criterion c;
  Stopwatch sweep;
  frontier::Violations v = frontier::check_corpus({});
  auto first = [](const std::vector<std::string>& xs) {
    return xs.empty() ? std::string() : ": " + xs.front();
  };
  std::string scope = " over " + std::to_string(v.states) + " corpus states to depth 4";
  c.require(v.diamond.empty(), "(a) concurrency diamonds, " + std::to_string(v.diamond.size()) +
                                   " violations" + scope + first(v.diamond));
  c.require(v.determinism.empty(), "(b) event determinism, " +
                                       std::to_string(v.determinism.size()) + " violations" +
                                       first(v.determinism));
  c.require(v.leakage.empty(), "(c) bound names in labels, " + std::to_string(v.leakage.size()) +
                                   " violations" + first(v.leakage));
  c.note("sweep took " + seconds(sweep.seconds()));

  for (const Attack& at : attacks()) {
    Formula phi = attack_formula(at.name);
    if (at.dialect != Dialect::fm || !in_simulation_fragment(phi)) continue;
    if (!at.system_satisfies || at.spec_satisfies) continue;
    GameConfig cfg;
    cfg.relation = GameRelation::i_sim;
    cfg.depth = static_cast<unsigned>(modal_depth(phi));
    cfg.bang_cap = at.bang_cap ? at.bang_cap : cfg.bang_cap;
    cfg.hint = phi;
    ExtendedProcess sys = model(at.model, Side::system);
    ExtendedProcess spec = model(at.model, Side::spec);
    double t = 0;
    GameVerdict g = timed_game(sys, spec, cfg, t);
    bool replayed = g.distinguished() && replay_strategy(sys, spec, g.strategy, cfg.relation);
    c.require(g.distinguished() && replayed,
              "(d) " + at.name + " on " + at.model + ": formula-guided i-sim game at depth " +
                  std::to_string(cfg.depth) + " " +
                  (g.distinguished() ? "distinguished, strategy replays" : "related") + ", " +
                  seconds(t));
  }

  oracle::FrameGenerator gen(2024);
  int disagreements = 0;
  for (int i = 0; i < 200; ++i) {
    Frame a = gen.frame(1 + i % 4);
    Frame b = gen.variant(a);
    std::vector<Message> atoms = {Message::name("a"), Message::name("b")};
    for (const Alias& al : a.subst.domain()) atoms.push_back(Message::alias(al));
    bool expected = oracle::brute_force_static_equivalent(a, b, atoms, 3);
    if (static_equivalent(a, b, AliasBijection::identity(a.subst.domain())) != expected) {
      ++disagreements;
    }
  }
  c.require(disagreements == 0, "(e) static equivalence vs depth-3 recipe enumeration on 200 "
                                "random frames, " +
                                    std::to_string(disagreements) + " disagreements");
  return c.report(9, "property suites");
}

bool criterion_first_example() {
  Criterion c;
  Stopwatch clock;
  ExtendedProcess a = parse_process("new m,n.(out(a,pair(m,n)) | in(m,x).[x=n] out(ok,ok))");
  std::vector<Transition> outs = output_and_tau_steps(a);
  bool one = outs.size() == 1 && outs[0].event.str() == "out a(@0:l1) @ 0[]" &&
             alpha_equal(outs[0].target,
                         parse_process("new m,n.({@0:l1 = pair(m,n)} | 0 | in(m,x).[x=n] "
                                       "out(ok,ok))"));
  c.require(one, "output binds the alias @0:l1 and reaches the displayed state");
  bool two = false;
  if (one) {
    std::vector<Transition> ins = input_steps(outs[0].target, parse_message("fst(@0:l1)"),
                                              parse_message("snd(@0:l1)"));
    two = ins.size() == 1 && ins[0].event.location.str() == "1[]" &&
          alpha_equal(ins[0].target,
                      parse_process("new m,n.({@0:l1 = pair(m,n)} | 0 | [n=n] out(ok,ok))"));
  }
  c.require(two, "input on fst(@0:l1) carrying snd(@0:l1) reaches the displayed state");
  c.require(clock.seconds() < 1, "took " + seconds(clock.seconds()));
  return c.report(10, "first worked example end to end");
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria = {
      criterion_get,      criterion_ch,         criterion_two,        criterion_psi_min,
      criterion_chi,      criterion_err,        criterion_nondist,    criterion_examples,
      criterion_properties, criterion_first_example,
  };
  int failed = 0;
  for (const auto& run : criteria) {
    bool pass = false;
    try {
      pass = run();
    } catch (const std::exception& e) {
      std::cout << "FAIL (unexpected error: " << e.what() << ")\n";
    }
    failed += !pass;
    std::cout.flush();
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << "\n";
  return failed ? 1 : 0;
}
