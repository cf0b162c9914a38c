#include <catch_amalgamated.hpp>

#include <picheck/corpus.hpp>
#include <picheck/logic.hpp>
#include <picheck/syntax.hpp>

#include <functional>
#include <random>

using namespace picheck;

namespace {

Formula fm(std::string_view text) { return parse_formula(text, Dialect::fm); }
Formula hp(std::string_view text) { return parse_formula(text, Dialect::hpfm); }
ExtendedProcess P(std::string_view text) { return parse_process(text); }

using Env = std::map<Name, Message>;

Message bind(Message m, const Env& env) {
  for (const auto& [n, v] : env) m = replace_name(m, n, v);
  return m;
}

// Direct reading of the satisfaction rules with no memo and no rewriting of
// the formula. Only for replication-free processes.
bool naive_sat(const ExtendedProcess& a, const Formula& phi, const Env& env) {
  switch (phi.kind()) {
    case Formula::Kind::top: return true;
    case Formula::Kind::equal:
      return satisfies_equality(a.frame_view(), bind(phi.lhs(), env), bind(phi.rhs(), env));
    case Formula::Kind::neg: return !naive_sat(a, phi.body(), env);
    case Formula::Kind::conj: return naive_sat(a, phi.left(), env) && naive_sat(a, phi.right(), env);
    case Formula::Kind::diamond: break;
  }
  const ActionPattern& p = phi.pattern();
  std::vector<Transition> ts;
  if (p.kind == ActionPattern::Kind::input) {
    ts = input_steps(a, bind(p.channel, env), bind(p.payload, env));
  } else {
    for (Transition& t : output_and_tau_steps(a)) {
      bool tau = t.event.action.kind == ActionLabel::Kind::tau;
      if (p.kind == ActionPattern::Kind::tau && tau) ts.push_back(std::move(t));
      if (p.kind == ActionPattern::Kind::output && !tau &&
          satisfies_equality(a.frame_view(), t.event.action.channel, bind(p.channel, env))) {
        ts.push_back(std::move(t));
      }
    }
  }
  for (const Transition& t : ts) {
    Env inner = env;
    if (p.kind == ActionPattern::Kind::output) {
      inner[p.binder] = Message::alias(t.event.action.alias);
    }
    if (naive_sat(t.target, phi.body(), inner)) return true;
  }
  return false;
}

const std::vector<std::string>& finite_processes() {
  static const std::vector<std::string> all = {
      "new m,n.(out(a,pair(m,n)) | in(m,x).[x=n] out(ok,ok))",
      "out(a,a).out(a,a)",
      "out(a,a) | out(a,a)",
      "new x,y,z.out(a,x).(out(b,y) | out(c,z))",
      "new x,y,z.(out(a,x).out(b,y) | out(c,z))",
      "new k.(out(a,enc(b,k)).in(a,y).[y = b] out(c,k) + out(b,b))",
      "in(a,x).out(b,pair(x,x)) | out(a,c)",
      "new n.(out(a,n) | in(a,y).out(b,y))",
  };
  return all;
}

// Random formulas over the names a, b, c and the binders they introduce.
class FormulaGen {
 public:
  explicit FormulaGen(unsigned seed) : rng_(seed) {}

  Formula make(int depth) { return make(depth, {}); }

 private:
  Formula make(int depth, std::vector<std::string> bound) {
    int choice = static_cast<int>(rng_() % (depth > 0 ? 7 : 3));
    switch (choice) {
      case 0: return Formula::top();
      case 1: return Formula::equal(term(bound), term(bound));
      case 2: return Formula::neg(Formula::equal(term(bound), term(bound)));
      case 3: return Formula::neg(make(depth - 1, bound));
      case 4: return Formula::conj(make(depth - 1, bound), make(depth - 1, bound));
      default: break;
    }
    ActionPattern p;
    switch (rng_() % 3) {
      case 0: p.kind = ActionPattern::Kind::tau; break;
      case 1:
        p.kind = ActionPattern::Kind::input;
        p.channel = term(bound);
        p.payload = term(bound);
        break;
      default: {
        p.kind = ActionPattern::Kind::output;
        p.channel = term(bound);
        std::string x = "x" + std::to_string(bound.size());
        p.binder = Name(x);
        bound.push_back(x);
        break;
      }
    }
    return Formula::diamond(p, std::nullopt, make(depth - 1, bound));
  }

  Message term(const std::vector<std::string>& bound) {
    static const char* consts[] = {"a", "b", "c"};
    std::size_t n = 3 + bound.size();
    std::size_t i = rng_() % n;
    Message base = i < 3 ? Message::name(Name(consts[i])) : Message::name(Name(bound[i - 3]));
    switch (rng_() % 5) {
      case 0: return fst(base);
      case 1: return snd(base);
      default: return base;
    }
  }

  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("formula printing round trips through the parser") {
  for (std::string_view text : {
           "true", "false", "a = b", "a != b", "<tau>true", "[tau]false",
           "<out c (x)>(x = a & <x.a>true)", "~(a = b & <tau>true)",
           "<out c (x)>[d.fst(x)]<out c (y)>(pair(fst(y),snd(y)) = y)"}) {
    Formula phi = fm(text);
    Formula again = fm(phi.str());
    CHECK(again.str() == phi.str());
  }
  Formula h = hp("<tau @ (1.0[],1.1[])><out a (x) @ 0.1[]>true");
  CHECK(hp(h.str()).str() == h.str());
  CHECK(h.location()->str() == "(1.0[],1.1[])");
}

TEST_CASE("derived connectives") {
  CHECK(fm("~true").str() == "false");
  CHECK(fm("~~(a = b)").kind() == Formula::Kind::equal);
  Formula box = fm("[tau]a = b");
  REQUIRE(box.kind() == Formula::Kind::neg);
  REQUIRE(box.body().kind() == Formula::Kind::diamond);
  CHECK(box.body().body().kind() == Formula::Kind::neg);
  Formula d = fm("a = b | <tau>true");
  CHECK(d.kind() == Formula::Kind::neg);
  Formula imp = fm("a = b -> b = c -> c = a");
  CHECK(imp.kind() == Formula::Kind::neg);
  CHECK(imp.str() == fm("~(a = b & ~(b = c -> c = a))").str());
}

TEST_CASE("dialect and syntax errors") {
  CHECK_THROWS_AS(fm("<tau @ 0[]>true"), ParseError);
  CHECK_THROWS_AS(hp("<tau>true"), ParseError);
  CHECK_THROWS_AS(fm("<out c (x)>@0:l1 = a"), ParseError);
  CHECK_THROWS_AS(fm("<tau>"), ParseError);
  CHECK_THROWS_AS(fm("a = b extra"), ParseError);
  CHECK_THROWS_AS(hp("<tau @ 0.2[]>true"), ParseError);
  CHECK_THROWS_AS(check_fm(P("0"), hp("<tau @ 0[]>true")), Error);
  CHECK_THROWS_AS(check_hpfm(P("0"), {}, fm("<tau>true")), Error);
}

TEST_CASE("syntactic queries") {
  Formula phi = fm("<out c (x)>(x = m & [d.x]<tau>true) & n != a");
  CHECK(modal_depth(phi) == 3);
  CHECK(free_names(phi) == std::set<Name>{Name("a"), Name("c"), Name("d"), Name("m"), Name("n")});
  CHECK_FALSE(in_simulation_fragment(phi));
  CHECK_FALSE(diamond_only(phi));
  CHECK(in_simulation_fragment(fm("<out c (x)>(x != a & <tau>true)")));
  CHECK(diamond_only(fm("<out c (x)>(x = a & <tau>true)")));
  CHECK_FALSE(has_locations(phi));
  Formula h = hp("<out c (x) @ 0[]><x.a @ 1[]>true");
  CHECK(has_locations(h));
  CHECK(erase_locations(h).str() == fm("<out c (x)><x.a>true").str());
}

TEST_CASE("instantiate_free renames only non-public free names") {
  Formula phi = fm("<out c (x)><x.m>(m = x | n = getchallenge)");
  Formula inst = instantiate_free(phi);
  std::set<Name> fresh = free_names(inst);
  CHECK(fresh.count(Name("c")));
  CHECK(fresh.count(Name("getchallenge")));
  CHECK_FALSE(fresh.count(Name("m")));
  CHECK_FALSE(fresh.count(Name("n")));
  CHECK(fresh.size() == 4);
  for (const Name& n : fresh) {
    if (!public_constants().count(n)) CHECK((n.stem() == "m" || n.stem() == "n"));
  }
  // The output binder stays bound.
  CHECK_FALSE(fresh.count(Name("x")));
}

TEST_CASE("the first worked example end to end") {
  ExtendedProcess a = P("new m,n.(out(a,pair(m,n)) | in(m,x).[x=n] out(ok,ok))");
  CHECK(check_fm(a, fm("<out a (y)><fst(y).snd(y)><out ok (z)>z = ok")));
  CHECK_FALSE(check_fm(a, fm("<out a (y)><fst(y).fst(y)><out ok (z)>true")));
  CHECK_FALSE(check_fm(a, fm("<out a (y)>(fst(y) = a)")));
  CHECK(check_fm(a, fm("[out a (y)](pair(fst(y),snd(y)) = y)")));
}

TEST_CASE("output binders can be renamed freely") {
  ExtendedProcess a = P("new k.out(c,enc(a,k)).out(c,k)");
  Formula x = fm("<out c (x)><out c (y)>(dec(x,y) = a)");
  Formula z = fm("<out c (z)><out c (w)>(dec(z,w) = a)");
  CHECK(check_fm(a, x));
  CHECK(check_fm(a, z));
  // A binder reusing a name that is restricted in the process.
  CHECK(check_fm(a, fm("<out c (k)><out c (y)>(dec(k,y) = a)")));
}

TEST_CASE("checker agrees with a direct reading of the rules") {
  FormulaGen gen(11);
  for (int i = 0; i < 300; ++i) {
    Formula phi = gen.make(3);
    for (const std::string& src : finite_processes()) {
      ExtendedProcess a = P(src);
      INFO(src << " |= " << phi.str());
      CHECK(check_fm(a, phi) == naive_sat(a, phi, {}));
    }
  }
}

TEST_CASE("negation is classical") {
  FormulaGen gen(5);
  for (int i = 0; i < 100; ++i) {
    Formula phi = gen.make(3), psi = gen.make(2);
    for (const std::string& src : finite_processes()) {
      ExtendedProcess a = P(src);
      bool p = check_fm(a, phi), q = check_fm(a, psi);
      CHECK(check_fm(a, Formula::neg(phi)) == !p);
      CHECK(check_fm(a, Formula::disj(phi, psi)) == (p || q));
      CHECK(check_fm(a, Formula::implies(phi, psi)) == (!p || q));
    }
  }
}

TEST_CASE("located formulas: nested versus flat outputs") {
  const ExamplePair& e = find_example("nested-vs-flat");
  Formula phi = hp("<out a (x) @ 0[]><out c (z) @ 0.1[]>true");
  CHECK(check_hpfm(P(e.left), {}, phi));
  CHECK_FALSE(check_hpfm(P(e.right), {}, phi));
  // Without locations both sides satisfy it.
  CHECK(check_fm(P(e.left), erase_locations(phi)));
  CHECK(check_fm(P(e.right), erase_locations(phi)));
}

TEST_CASE("located formulas: two outputs from one copy") {
  const ExamplePair& e = find_example("two-outputs-vs-one");
  Formula phi = hp("<out a (x) @ 0[]><out a (y) @ 0[]>true");
  CHECK(check_hpfm(P(e.left), {}, phi));
  CHECK_FALSE(check_hpfm(P(e.right), {}, phi));
}

TEST_CASE("located formulas: preserving independence") {
  const ExamplePair& e = find_example("independence");
  Formula phi = instantiate_free(
      hp("<tau @ (1.0[],1.1[])><out a (x) @ 0.1[]><tau @ (0.0[],0.1[])><x.M @ 0.1[]>true"));
  CHECK(check_hpfm(P(e.left), {}, phi));
  CHECK_FALSE(check_hpfm(P(e.right), {}, phi));
  CHECK(check_fm(P(e.right), erase_locations(phi)));
}

TEST_CASE("located formulas: only the independence pattern matters") {
  ExtendedProcess a = P("out(a,a) | out(b,b)");
  CHECK(check_hpfm(a, {}, hp("<out a (x) @ 1.1[]><out b (y) @ 0[]>true")));
  CHECK_FALSE(check_hpfm(a, {}, hp("<out a (x) @ 1[]><out b (y) @ 1.0[]>true")));
}

TEST_CASE("located satisfaction refines the unlocated one") {
  std::mt19937 rng(3);
  const char* locs[] = {"[]", "0[]", "1[]", "0.0[]", "0.1[]", "1.0[]"};
  const char* acts[] = {"out a (x)", "out b (y)", "out c (z)", "a.a", "tau"};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (int k = 0; k < 3; ++k) {
      std::string act = acts[rng() % 5];
      std::string loc = act == "tau" ? std::string("(") + locs[rng() % 6] + "," + locs[rng() % 6] + ")"
                                     : locs[rng() % 6];
      text += "<" + act + " @ " + loc + ">";
    }
    Formula phi = hp(text + "true");
    for (const std::string& src : finite_processes()) {
      ExtendedProcess a = P(src);
      if (check_hpfm(a, {}, phi)) CHECK(check_fm(a, erase_locations(phi)));
    }
  }
}

TEST_CASE("replication cap: the default is exact, a small cap is reported") {
  ExtendedProcess spec = build_model(parse_model_name("bac-get", Side::spec));
  Formula phi = attack_formula("phi-get");
  CHECK_FALSE(check_fm(spec, phi));
  CheckBudget tight;
  tight.bang_unfold_cap = 2;
  CHECK_THROWS_AS(check_fm(spec, phi, tight), BudgetExceeded);
  CheckResult r = evaluate(spec, {}, phi, tight);
  CHECK(r.truth == Truth::unknown);
  CHECK(r.stats.beyond_cap > 0);
  CHECK(r.stats.bang_cap == 2);
  // Diamonds witnessed inside the cap need no more.
  ExtendedProcess sys = build_model(parse_model_name("bac-get", Side::system));
  CheckBudget four;
  four.bang_unfold_cap = 4;
  CHECK(check_fm(sys, phi, four));
}
