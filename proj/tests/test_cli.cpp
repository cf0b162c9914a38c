#include <catch_amalgamated.hpp>

#include <picheck/cli.hpp>
#include <picheck/corpus.hpp>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

using namespace picheck;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json cli_json(std::vector<std::string> args) {
  args.push_back("--json");
  Run r = cli(std::move(args));
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

std::string temp_file(const std::string& name, const std::string& text) {
  std::string path = "/tmp/picheck_test_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("sat reports the attack verdicts") {
  json sys = cli_json({"sat", "--model", "bac-get", "--side", "system", "--attack", "phi-get",
                       "--logic", "fm"});
  CHECK(sys["verdict"] == "sat");
  json spec = cli_json({"sat", "--model", "bac-get", "--side", "spec", "--attack", "phi-get",
                        "--logic", "fm"});
  CHECK(spec["verdict"] == "unsat");
  CHECK(spec["version"] == tool_version);
  CHECK(spec["command"][1] == "sat");
  CHECK(spec["budget"]["bang_cap"] == modal_depth(attack_formula("phi-get")) + 1);
}

TEST_CASE("a budget too small is an error verdict, not a guess") {
  json r = cli_json({"sat", "--model", "bac-get", "--side", "spec", "--attack", "phi-get",
                     "--bang-cap", "2"});
  CHECK(r["verdict"] == "error");
  CHECK(r["message"].get<std::string>().find("budget exceeded") != std::string::npos);
}

TEST_CASE("sat reads process and formula files") {
  std::string p = temp_file("p.pi", "# two outputs\nout(a,a) | out(b,b)\n");
  std::string f = temp_file("f.fm", "<out a (x)><out b (y)>true");
  std::string g = temp_file("g.hpfm", "<out a (x) @ 1[]><out b (y) @ 1.0[]>true");
  CHECK(cli_json({"sat", "--process", p, "--formula", f})["verdict"] == "sat");
  CHECK(cli_json({"sat", "--process", p, "--formula", g, "--logic", "hpfm"})["verdict"] ==
        "unsat");
  // A located formula does not parse in the plain dialect.
  CHECK(cli({"sat", "--process", p, "--formula", g, "--logic", "fm"}).code == 2);
  // A located attack checked with the plain logic is an error verdict.
  CHECK(cli_json({"sat", "--model", "bac-min", "--attack", "phi-nondist", "--logic", "fm"})
            ["verdict"] == "error");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frob"}).code == 2);
  CHECK(cli({"sat", "--model", "nope", "--attack", "phi-get"}).code == 2);
  CHECK(cli({"sat", "--model", "bac-get", "--attack", "nope"}).code == 2);
  CHECK(cli({"sat", "--model", "bac-get"}).code == 2);
  CHECK(cli({"sat", "--process", "/nonexistent", "--attack", "phi-get"}).code == 2);
  CHECK(cli({"equiv", "--example", "seq-vs-par", "--relation", "bisim"}).code == 2);
  CHECK(cli({"equiv", "--example", "seq-vs-par", "--depth", "0"}).code == 2);
  CHECK(cli({"sat", "--model", "bac-get", "--attack", "phi-get", "--logic", "ltl"}).code == 2);
  Run help = cli({"--help"});
  CHECK(help.code == 0);
}

TEST_CASE("equiv reports verdicts, strategies and dot files") {
  std::string dot = "/tmp/picheck_test_strategy.dot";
  std::remove(dot.c_str());
  json r = cli_json({"equiv", "--example", "seq-vs-par", "--relation", "hp-sim",
                     "--strategy-dot", dot});
  CHECK(r["verdict"] == "distinguished");
  CHECK(r["strategy"]["side"] == "left");
  CHECK(r["strategy"]["replies"].size() == 2);
  CHECK(r["budget"]["relation"] == "hp-sim");
  std::ifstream in(dot);
  std::string first;
  std::getline(in, first);
  CHECK(first == "digraph strategy {");

  json rel = cli_json({"equiv", "--example", "seq-vs-par", "--relation", "i-bisim"});
  CHECK(rel["verdict"] == "related-up-to-bound");
  CHECK(rel["strategy"].is_null());

  std::string l = temp_file("l.pi", "out(a,a).out(a,a)");
  std::string rr = temp_file("r.pi", "out(a,a) | out(a,a)");
  CHECK(cli_json({"equiv", "--left", l, "--right", rr, "--relation", "hp-bisim"})["verdict"] ==
        "distinguished");
}

TEST_CASE("lts writes a dot graph") {
  std::string dot = "/tmp/picheck_test_lts.dot";
  Run r = cli({"lts", "--example", "seq-vs-par", "--side", "right", "--depth", "2", "--dot", dot});
  CHECK(r.code == 0);
  CHECK(r.out == "4 states, 4 edges\n");
  std::ifstream in(dot);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("out a(@0:l1) @ 0[]") != std::string::npos);
}

TEST_CASE("listing and showing the corpus") {
  Run models = cli({"list-models"});
  CHECK(models.code == 0);
  CHECK(models.out.find("feldhofer-min-err\n") != std::string::npos);
  Run at = cli({"list-attacks"});
  CHECK(at.out.find("phi-nondist") != std::string::npos);
  Run show = cli({"show", "--model", "bac-min", "--side", "spec"});
  CHECK(show.code == 0);
  CHECK(show.out.starts_with("# bac-min (spec)\n"));
  CHECK(cli({"show", "--model", "bac-min-err"}).code == 2);
}

TEST_CASE("reports round trip through json") {
  std::mt19937 rng(5);
  const char* verdicts[] = {"sat", "unsat", "related-up-to-bound", "distinguished", "error"};
  for (int i = 0; i < 50; ++i) {
    CheckReport r;
    r.command = {"picheck", "sat", std::to_string(rng())};
    r.verdict = verdicts[rng() % 5];
    r.elapsed_seconds = (rng() % 100000) / 1000.0;
    r.budget = {{"bang_cap", rng() % 7}, {"exhaustive", rng() % 2 == 0}};
    if (rng() % 2) r.strategy = {{"side", "left"}, {"move", "out a(@:l1) @ []"}};
    r.message = "m" + std::to_string(rng() % 10);
    json j = r;
    CHECK(json::parse(j.dump()).get<CheckReport>() == r);
  }
  json bad = CheckReport{};
  bad["verdict"] = "maybe";
  CHECK_THROWS_AS(bad.get<CheckReport>(), Error);
}

TEST_CASE("reports from the cli round trip") {
  json j = cli_json({"equiv", "--example", "nested-vs-flat", "--relation", "i-bisim"});
  CheckReport r = j.get<CheckReport>();
  CHECK(json(r) == j);
}
