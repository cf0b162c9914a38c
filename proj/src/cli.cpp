#include <picheck/cli.hpp>
#include <picheck/corpus.hpp>
#include <picheck/syntax.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

namespace picheck {

using nlohmann::json;

bool is_report_verdict(std::string_view verdict) {
  return verdict == "sat" || verdict == "unsat" || verdict == "related-up-to-bound" ||
         verdict == "distinguished" || verdict == "error";
}

void to_json(json& j, const CheckReport& r) {
  j = json{{"command", r.command},   {"verdict", r.verdict}, {"elapsed_seconds", r.elapsed_seconds},
           {"budget", r.budget},     {"strategy", r.strategy}, {"message", r.message},
           {"version", r.version}};
}

void from_json(const json& j, CheckReport& r) {
  j.at("command").get_to(r.command);
  j.at("verdict").get_to(r.verdict);
  if (!is_report_verdict(r.verdict)) throw Error("unknown verdict '" + r.verdict + "'");
  j.at("elapsed_seconds").get_to(r.elapsed_seconds);
  r.budget = j.at("budget");
  r.strategy = j.at("strategy");
  j.at("message").get_to(r.message);
  j.at("version").get_to(r.version);
}

json strategy_to_json(const Strategy& s) {
  if (!s) return nullptr;
  json node;
  if (s->frame_test) {
    node["frame_test"] = {s->frame_test->first.str(), s->frame_test->second.str()};
    return node;
  }
  node["side"] = s->side == GameSide::left ? "left" : "right";
  node["move"] = s->move.str();
  json replies = json::array();
  for (const auto& r : s->replies) {
    replies.push_back({{"answer", r.event.str()}, {"next", strategy_to_json(r.next)}});
  }
  node["replies"] = std::move(replies);
  return node;
}

namespace {

// Bad input detected before any check runs; exits with code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

Dialect parse_logic(const std::string& text) {
  if (text == "fm") return Dialect::fm;
  if (text == "hpfm") return Dialect::hpfm;
  throw UsageError("logic must be fm or hpfm");
}

// Input errors (unknown names, syntax) are usage errors.
template <class F>
auto load(F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Checks shared by the subcommands and the regression table

CheckReport run_sat(const ExtendedProcess& a, const Formula& phi, Dialect logic, unsigned cap,
                    std::vector<std::string> command) {
  Name::reset_fresh_counter();
  CheckReport r;
  r.command = std::move(command);
  Stopwatch clock;
  try {
    if (logic == Dialect::fm && has_locations(phi)) throw Error("fm formulas carry no locations");
    if (logic == Dialect::hpfm && !all_located(phi)) {
      throw Error("every hpfm modality needs a location");
    }
    CheckBudget budget;
    budget.bang_unfold_cap = cap;
    CheckResult res = evaluate(a, {}, phi, budget);
    r.budget = {{"bang_cap", res.stats.bang_cap},
                {"evaluations", res.stats.evaluations},
                {"memo_hits", res.stats.memo_hits},
                {"transitions", res.stats.transitions},
                {"beyond_cap", res.stats.beyond_cap}};
    switch (res.truth) {
      case Truth::yes: r.verdict = "sat"; break;
      case Truth::no: r.verdict = "unsat"; break;
      case Truth::unknown:
        r.verdict = "error";
        r.message = "budget exceeded: the verdict depends on transitions beyond bang cap " +
                    std::to_string(res.stats.bang_cap);
        break;
    }
  } catch (const Error& e) {
    r.verdict = "error";
    r.message = e.what();
  }
  r.elapsed_seconds = clock.seconds();
  return r;
}

CheckReport run_equiv(const ExtendedProcess& a, const ExtendedProcess& b, const GameConfig& cfg,
                      std::vector<std::string> command, Strategy* strategy_out = nullptr) {
  Name::reset_fresh_counter();
  CheckReport r;
  r.command = std::move(command);
  Stopwatch clock;
  try {
    GameVerdict v = play_game(a, b, cfg);
    r.verdict = v.distinguished() ? "distinguished" : "related-up-to-bound";
    r.budget = {{"relation", std::string(relation_name(cfg.relation))},
                {"depth", cfg.depth},
                {"recipe_depth", cfg.recipe_depth},
                {"bang_cap", cfg.bang_cap},
                {"positions", v.stats.positions},
                {"memo_hits", v.stats.memo_hits},
                {"spoiler_moves", v.stats.spoiler_moves},
                {"answers", v.stats.answers},
                {"exhaustive", v.exhaustive}};
    if (v.distinguished()) {
      r.strategy = strategy_to_json(v.strategy);
      r.message = "strategy with " + std::to_string(strategy_size(v.strategy)) + " nodes, " +
                  std::to_string(strategy_depth(v.strategy)) + " spoiler moves deep";
      if (strategy_out) *strategy_out = v.strategy;
    } else {
      r.message = std::to_string(v.related.size()) + " related positions" +
                  (v.exhaustive ? ", no play reached the bound" : "");
    }
  } catch (const Error& e) {
    r.verdict = "error";
    r.message = e.what();
  }
  r.elapsed_seconds = clock.seconds();
  return r;
}

void print_report(const CheckReport& r, bool as_json, std::ostream& out) {
  if (as_json) {
    out << json(r).dump(2) << "\n";
    return;
  }
  out << r.verdict;
  if (!r.message.empty()) out << " (" << r.message << ")";
  out << " in " << r.elapsed_seconds << " s\n";
}

// ---------------------------------------------------------------------------
// Regression table

struct RegressCheck {
  std::string name;
  std::string expected;
  std::function<CheckReport()> run;
};

std::vector<RegressCheck> regression_table() {
  std::vector<RegressCheck> out;
  for (const Attack& at : attacks()) {
    for (Side side : {Side::system, Side::spec}) {
      bool holds = side == Side::system ? at.system_satisfies : at.spec_satisfies;
      std::string side_name = side == Side::system ? "system" : "spec";
      std::string name = at.name + " on " + at.model + "/" + side_name;
      out.push_back({name, holds ? "sat" : "unsat", [at, side, side_name] {
                       ExtendedProcess a = build_model(parse_model_name(at.model, side));
                       return run_sat(a, attack_formula(at.name), at.dialect, at.bang_cap,
                                      {"sat", "--model", at.model, "--side", side_name,
                                       "--attack", at.name, "--bang-cap",
                                       std::to_string(at.bang_cap)});
                     }});
    }
  }
  struct Game {
    const char* pair;
    GameRelation relation;
    bool distinguished;
  };
  const Game games[] = {
      {"seq-vs-par", GameRelation::hp_sim, true},
      {"seq-vs-par", GameRelation::i_bisim, false},
      {"nested-vs-flat", GameRelation::hp_sim, true},
      {"nested-vs-flat", GameRelation::i_sim, false},
      {"two-outputs-vs-one", GameRelation::hp_sim, true},
      {"two-outputs-vs-one", GameRelation::i_bisim, false},
      {"independence", GameRelation::hp_sim, true},
      {"independence", GameRelation::i_sim, false},
  };
  for (const Game& g : games) {
    std::string rel(relation_name(g.relation));
    out.push_back({std::string(g.pair) + " " + rel,
                   g.distinguished ? "distinguished" : "related-up-to-bound", [g, rel] {
                     const ExamplePair& e = find_example(g.pair);
                     GameConfig cfg;
                     cfg.relation = g.relation;
                     cfg.depth = 6;
                     return run_equiv(parse_process(e.left), parse_process(e.right), cfg,
                                      {"equiv", "--example", g.pair, "--relation", rel, "--depth",
                                       "6"});
                   }});
  }
  for (const ExamplePair& e : example_pairs()) {
    if (e.left_only_formula.empty()) continue;
    for (bool left : {true, false}) {
      out.push_back({e.name + " located formula on the " + (left ? "left" : "right"),
                     left ? "sat" : "unsat", [e, left] {
                       Formula phi =
                           instantiate_free(parse_formula(e.left_only_formula, Dialect::hpfm));
                       return run_sat(parse_process(left ? e.left : e.right), phi, Dialect::hpfm,
                                      0, {"sat", "--example", e.name, "--side",
                                          left ? "left" : "right", "--logic", "hpfm"});
                     }});
    }
  }
  out.push_back({"bac-two i-sim depth 14", "distinguished", [] {
                   GameConfig cfg;
                   cfg.relation = GameRelation::i_sim;
                   cfg.depth = 14;
                   cfg.recipe_depth = 1;
                   return run_equiv(build_model(parse_model_name("bac-two", Side::system)),
                                    build_model(parse_model_name("bac-two", Side::spec)), cfg,
                                    {"equiv", "--model", "bac-two", "--relation", "i-sim",
                                     "--depth", "14", "--recipe-depth", "1"});
                 }});
  return out;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PICHECK_THREADS")) {
    try {
      n = static_cast<unsigned>(std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      throw UsageError("PICHECK_THREADS must be a positive integer");
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

int run_regress(bool as_json, std::ostream& out) {
  std::vector<RegressCheck> table = regression_table();
  std::vector<CheckReport> reports(table.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < table.size(); i = next++) {
      try {
        reports[i] = table[i].run();
      } catch (const Error& e) {
        reports[i].verdict = "error";
        reports[i].message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned workers = worker_count(table.size());
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  bool all_pass = true;
  json rows = json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    bool pass = reports[i].verdict == table[i].expected;
    all_pass = all_pass && pass;
    if (as_json) {
      rows.push_back({{"check", table[i].name},
                      {"expected", table[i].expected},
                      {"pass", pass},
                      {"report", reports[i]}});
    } else {
      out << (pass ? "PASS " : "FAIL ") << table[i].name << ": " << reports[i].verdict;
      if (!pass) out << " (expected " << table[i].expected << ")";
      if (!reports[i].message.empty() && !pass) out << " [" << reports[i].message << "]";
      out << " " << reports[i].elapsed_seconds << " s\n";
    }
  }
  if (as_json) {
    out << json{{"checks", rows}, {"pass", all_pass}, {"version", tool_version}}.dump(2) << "\n";
  } else {
    out << (all_pass ? "all checks passed" : "some checks failed") << "\n";
  }
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Input selection

struct ProcessSource {
  std::string process_file;
  std::string model;
  std::string side = "system";
  std::string example;

  ExtendedProcess load_one() const {
    int given = !process_file.empty() + !model.empty() + !example.empty();
    if (given != 1) throw UsageError("give exactly one of --process, --model, --example");
    return load([&] {
      if (!process_file.empty()) return parse_process(read_file(process_file));
      if (!model.empty()) return build_model(parse_model_name(model, parse_side(side)));
      const ExamplePair& e = find_example(example);
      if (side == "left") return parse_process(e.left);
      if (side == "right") return parse_process(e.right);
      throw UsageError("with --example the side is left or right");
    });
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Name::reset_fresh_counter();
  CLI::App app{"Checker for located applied-pi processes", "picheck"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  bool as_json = false;

  // sat
  ProcessSource sat_src;
  std::string formula_file, attack, logic_text;
  unsigned sat_cap = 0;
  auto* sat = app.add_subcommand("sat", "Check a formula against a process");
  sat->add_option("--process", sat_src.process_file, "Process file");
  sat->add_option("--model", sat_src.model, "Corpus model name");
  sat->add_option("--example", sat_src.example, "Example pair name");
  sat->add_option("--side", sat_src.side, "system|spec, or left|right for examples");
  sat->add_option("--formula", formula_file, "Formula file");
  sat->add_option("--attack", attack, "Corpus attack formula");
  sat->add_option("--logic", logic_text, "fm|hpfm (default: from the formula)");
  sat->add_option("--bang-cap", sat_cap, "Copies per replication; 0 is exact (modal depth + 1)");
  sat->add_flag("--json", as_json, "Emit a JSON report");

  // equiv
  std::string left_file, right_file, eq_model, eq_example, relation_text = "i-sim", hint;
  std::string strategy_dot;
  GameConfig cfg;
  auto* equiv = app.add_subcommand("equiv", "Play the bounded equivalence game");
  equiv->add_option("--left", left_file, "Left process file");
  equiv->add_option("--right", right_file, "Right process file");
  equiv->add_option("--model", eq_model, "Corpus model: system against spec");
  equiv->add_option("--example", eq_example, "Example pair: left against right");
  equiv->add_option("--relation", relation_text, "i-sim|i-bisim|hp-sim|hp-bisim");
  equiv->add_option("--depth", cfg.depth, "Spoiler moves per play");
  equiv->add_option("--recipe-depth", cfg.recipe_depth, "Input payload recipe depth");
  equiv->add_option("--bang-cap", cfg.bang_cap, "Copies per replication for the spoiler");
  equiv->add_option("--hint", hint, "Corpus attack guiding the spoiler");
  equiv->add_option("--strategy-dot", strategy_dot, "Write the winning strategy as DOT");
  equiv->add_flag("--json", as_json, "Emit a JSON report");

  // lts
  ProcessSource lts_src;
  std::size_t lts_depth = 3;
  std::string lts_dot;
  unsigned lts_cap = 2;
  std::vector<std::string> lts_inputs;
  auto* lts = app.add_subcommand("lts", "Explore the labelled transition graph");
  lts->add_option("--process", lts_src.process_file, "Process file");
  lts->add_option("--model", lts_src.model, "Corpus model name");
  lts->add_option("--example", lts_src.example, "Example pair name");
  lts->add_option("--side", lts_src.side, "system|spec, or left|right for examples");
  lts->add_option("--depth", lts_depth, "Steps to explore");
  lts->add_option("--bang-cap", lts_cap, "Copies per replication");
  lts->add_option("--input", lts_inputs, "Input recipe CHANNEL=PAYLOAD (repeatable)");
  lts->add_option("--dot", lts_dot, "Write the graph as DOT");

  auto* list_models = app.add_subcommand("list-models", "List corpus models");
  auto* list_attacks = app.add_subcommand("list-attacks", "List corpus attack formulas");

  std::string show_model, show_side;
  auto* show = app.add_subcommand("show", "Print a model's source");
  show->add_option("--model", show_model, "Corpus model name")->required();
  show->add_option("--side", show_side, "system|spec (default: both)");

  auto* regress = app.add_subcommand("regress", "Run the regression table");
  regress->add_flag("--json", as_json, "Emit JSON");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sat->parsed()) {
      ExtendedProcess a = sat_src.load_one();
      if (formula_file.empty() == attack.empty()) {
        throw UsageError("give exactly one of --formula, --attack");
      }
      Dialect logic = Dialect::fm;
      Formula phi = load([&] {
        if (!attack.empty()) {
          logic = find_attack(attack).dialect;
          if (!logic_text.empty()) logic = parse_logic(logic_text);
          return attack_formula(attack);
        }
        std::string text = read_file(formula_file);
        logic = logic_text.empty() ? Dialect::fm : parse_logic(logic_text);
        return instantiate_free(parse_formula(text, logic));
      });
      std::vector<std::string> command = {"picheck"};
      command.insert(command.end(), args.begin(), args.end());
      print_report(run_sat(a, phi, logic, sat_cap, command), as_json, out);
      return 0;
    }
    if (equiv->parsed()) {
      int given = (!left_file.empty() || !right_file.empty()) + !eq_model.empty() +
                  !eq_example.empty();
      if (given != 1) throw UsageError("give --left/--right, --model or --example");
      auto [a, b] = load([&] {
        if (!eq_model.empty()) {
          return std::make_pair(build_model(parse_model_name(eq_model, Side::system)),
                                build_model(parse_model_name(eq_model, Side::spec)));
        }
        if (!eq_example.empty()) {
          const ExamplePair& e = find_example(eq_example);
          return std::make_pair(parse_process(e.left), parse_process(e.right));
        }
        if (left_file.empty() || right_file.empty()) {
          throw UsageError("--left and --right go together");
        }
        return std::make_pair(parse_process(read_file(left_file)),
                              parse_process(read_file(right_file)));
      });
      load([&] {
        cfg.relation = parse_relation(relation_text);
        if (!hint.empty()) cfg.hint = attack_formula(hint);
        validate(cfg);
        return 0;
      });
      std::vector<std::string> command = {"picheck"};
      command.insert(command.end(), args.begin(), args.end());
      Strategy strategy;
      CheckReport r = run_equiv(a, b, cfg, command, &strategy);
      if (!strategy_dot.empty() && strategy) write_file(strategy_dot, strategy_to_dot(strategy));
      print_report(r, as_json, out);
      return 0;
    }
    if (lts->parsed()) {
      ExtendedProcess a = lts_src.load_one();
      std::vector<std::pair<Message, Message>> inputs = load([&] {
        std::vector<std::pair<Message, Message>> v;
        for (const std::string& s : lts_inputs) {
          auto eq = s.find('=');
          if (eq == std::string::npos) throw UsageError("--input takes CHANNEL=PAYLOAD");
          v.emplace_back(parse_message(s.substr(0, eq)), parse_message(s.substr(eq + 1)));
        }
        return v;
      });
      StepOptions opts;
      opts.bang_cap = lts_cap;
      LtsGraph g = explore_lts(a, lts_depth, inputs, opts);
      if (!lts_dot.empty()) write_file(lts_dot, to_dot(g));
      out << g.states.size() << " states, " << g.edges.size() << " edges\n";
      return 0;
    }
    if (list_models->parsed()) {
      for (const std::string& n : model_names()) out << n << "\n";
      return 0;
    }
    if (list_attacks->parsed()) {
      for (const Attack& at : attacks()) {
        out << at.name << "  " << (at.dialect == Dialect::fm ? "fm" : "hpfm") << "  " << at.model
            << "  system " << (at.system_satisfies ? "sat" : "unsat") << ", spec "
            << (at.spec_satisfies ? "sat" : "unsat") << "\n";
      }
      return 0;
    }
    if (show->parsed()) {
      std::vector<Side> sides = {Side::system, Side::spec};
      if (!show_side.empty()) sides = {load([&] { return parse_side(show_side); })};
      for (Side s : sides) {
        ModelId id = load([&] { return parse_model_name(show_model, s); });
        out << "# " << id.name() << " (" << (s == Side::system ? "system" : "spec") << ")\n"
            << model_source(id) << "\n";
      }
      return 0;
    }
    if (regress->parsed()) return run_regress(as_json, out);
  } catch (const UsageError& e) {
    err << "picheck: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace picheck
