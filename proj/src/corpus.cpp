#include <picheck/corpus.hpp>

#include <algorithm>

namespace picheck {

namespace {

constexpr std::string_view bac_roles = R"(def P(c,d,ke,km) =
  new nt.out(c,nt).in(d,y).
  [snd(y) = mac(fst(y),km)]
  [nt = fst(snd(dec(fst(y),ke)))]
  new kt.let m = enc(pair(nt,pair(fst(dec(fst(y),ke)),kt)),ke) in
  out(c,pair(m,mac(m,km)))
def V(c,d,ke,km) =
  in(d,nt).new nr.new kr.
  let m = enc(pair(nr,pair(nt,kr)),ke) in
  out(c,pair(m,mac(m,km)))
)";

constexpr std::string_view feldhofer_roles = R"(def P(c,d,k) =
  new nt.out(c,nt).in(d,y).
  [nt = snd(dec(y,k))]
  out(c,enc(pair(nt,fst(dec(y,k))),k))
def V(c,d,k) =
  in(d,nt).new nr.out(c,enc(pair(nr,nt),k))
)";

constexpr std::string_view feldhofer_error_roles = R"(def P(c,d,k) =
  new nt.out(c,nt).in(d,y).
  if nt = snd(dec(y,k)) then out(c,enc(pair(nt,fst(dec(y,k))),k))
  else out(c,error)
def V(c,d,k) =
  in(d,nt).new nr.out(c,enc(pair(nr,nt),k))
)";

// Role arguments for a session with keys `keys` on channels `c`, `d`.
std::string call(const char* role, const std::string& c, const std::string& d,
                 const std::string& keys) {
  return std::string(role) + "(" + c + "," + d + "," + keys + ")";
}

std::string session_body(Style style, const std::string& keys) {
  switch (style) {
    case Style::min: return call("V", "c", "d", keys) + " | " + call("P", "c", "d", keys);
    case Style::get:
      return "out(c,getchallenge)." + call("V", "c", "d", keys) +
             " | in(d,x).[x = getchallenge] " + call("P", "c", "d", keys);
    case Style::ch:
      return "new c.out(r,c)." + call("V", "c", "c", keys) + " | new c.out(p,c)." +
             call("P", "c", "c", keys);
    case Style::two: break;
  }
  throw Error("bounded style has no session body");
}

std::string bounded(Side side, const std::string& k1, const std::string& k2,
                    const std::string& binders) {
  std::string v1 = call("V", "c", "d", k1), v2 = call("V", "c", "d", k2);
  std::string p1 = call("P", "c", "d", k1), p2 = call("P", "c", "d", k2);
  if (side == Side::system) {
    std::string vs = "(" + v1 + " + " + v2 + ")", ps = "(" + p1 + " + " + p2 + ")";
    return "new " + binders + ".(\n  " + vs + " |\n  " + ps + " |\n  " + vs + " |\n  " + ps +
           ")\n";
  }
  return "new " + binders + ".(\n  " + v1 + " | " + p1 + " |\n  " + v2 + " | " + p2 + ")\n";
}

}  // namespace

std::string ModelId::name() const {
  static const char* styles[] = {"min", "get", "ch", "two"};
  std::string n = protocol == Protocol::bac ? "bac" : "feldhofer";
  n += "-";
  n += styles[static_cast<int>(style)];
  if (variant == Variant::error) n += "-err";
  return n;
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (Protocol p : {Protocol::bac, Protocol::feldhofer}) {
    for (Style s : {Style::min, Style::get, Style::ch, Style::two}) {
      for (Variant v : {Variant::silent, Variant::error}) {
        if (p == Protocol::bac && v == Variant::error) continue;
        out.push_back(ModelId{p, s, v, Side::system}.name());
      }
    }
  }
  return out;
}

ModelId parse_model_name(std::string_view name, Side side) {
  for (Protocol p : {Protocol::bac, Protocol::feldhofer}) {
    for (Style s : {Style::min, Style::get, Style::ch, Style::two}) {
      for (Variant v : {Variant::silent, Variant::error}) {
        ModelId id{p, s, v, side};
        if (id.name() != name) continue;
        if (p == Protocol::bac && v == Variant::error) break;
        return id;
      }
    }
  }
  throw Error("unknown model '" + std::string(name) + "'");
}

Side parse_side(std::string_view text) {
  if (text == "system") return Side::system;
  if (text == "spec") return Side::spec;
  throw Error("side must be 'system' or 'spec'");
}

std::string model_source(const ModelId& id) {
  if (id.protocol == Protocol::bac && id.variant == Variant::error) {
    throw Error("the error variant is only defined for feldhofer");
  }
  std::string roles(id.protocol == Protocol::bac
                        ? bac_roles
                        : (id.variant == Variant::error ? feldhofer_error_roles : feldhofer_roles));
  bool bac = id.protocol == Protocol::bac;
  if (id.style == Style::two) {
    std::string k1 = bac ? "ke1,km1" : "k1", k2 = bac ? "ke2,km2" : "k2";
    std::string binders = bac ? "ke1,km1,ke2,km2" : "k1,k2";
    return roles + bounded(id.side, k1, k2, binders);
  }
  std::string keys = bac ? "ke,km" : "k";
  std::string body = session_body(id.style, keys);
  std::string inner = id.side == Side::system ? "!(" + body + ")" : "(" + body + ")";
  return roles + "!new " + keys + "." + inner + "\n";
}

ExtendedProcess build_model(const ModelId& id) { return parse_process(model_source(id)); }

// ---------------------------------------------------------------------------

namespace {

constexpr const char* prefix_hp =
    "<out c (nt1) @ 0.0.1[]><d.nt1 @ 0.0.0[]><d.nt1 @ 0.1.0.0[]>"
    "<out c (u1) @ 0.0.0[]><out c (u2) @ 0.1.0.0[]>";

std::vector<Attack> make_attacks() {
  std::vector<Attack> out;
  out.push_back({"phi-get", Dialect::fm,
                 "<d.getchallenge><out c (g1)><out c (g2)>(\n"
                 "  g1 = getchallenge & g2 = getchallenge &\n"
                 "  <out c (nt1)><d.nt1><d.nt1><out c (u1)><out c (u2)>(\n"
                 "    nt1 != getchallenge & u1 != getchallenge & u2 != getchallenge &\n"
                 "    <d.u1><out c (w)>(w != getchallenge) &\n"
                 "    <d.u2><out c (w)>(w != getchallenge)))",
                 "bac-get", true, false, 4});
  out.push_back({"phi-ch", Dialect::fm,
                 "<out p (p1)><out r (r1)><out r (r2)><out p1 (nt1)><r1.nt1><r2.nt1>\n"
                 "<out r1 (u1)><out r2 (u2)>(\n"
                 "  <p1.u1><out p1 (w)>true &\n"
                 "  <p1.u2><out p1 (w)>true)",
                 "bac-ch", true, false, 4});
  out.push_back({"phi-2", Dialect::fm,
                 "<out c (nt1)><out c (nt2)><d.nt1><d.nt1><out c (u1)><out c (u2)>(\n"
                 "  <d.u1><out c (w)>true &\n"
                 "  <d.u2><out c (w)>true)",
                 "bac-two", true, false, 0});
  out.push_back({"psi-min", Dialect::fm,
                 "<out c (nt1)><d.nt1><d.nt1><out c (u1)><out c (u2)>(\n"
                 "  pair(fst(u1),snd(u1)) = u1 & pair(fst(u2),snd(u2)) = u2 &\n"
                 "  <d.u1><out c (w)>(pair(fst(w),snd(w)) = w &\n"
                 "    [d.z]<out c (v)>(pair(fst(v),snd(v)) = v)) &\n"
                 "  <d.u2><out c (w)>(pair(fst(w),snd(w)) = w &\n"
                 "    [d.z]<out c (v)>(pair(fst(v),snd(v)) = v)))",
                 "bac-min", true, false, 5});
  out.push_back({"chi-feldhofer", Dialect::hpfm,
                 std::string(prefix_hp) +
                     "(\n"
                     "  <d.u1 @ 0.0.1[]><out c (w) @ 0.0.1[]>"
                     "[d.z @ 1.0.0.0[]]<out c (v) @ 1.0.0.0[]>true &\n"
                     "  <d.u2 @ 0.0.1[]><out c (w) @ 0.0.1[]>"
                     "[d.z @ 1.0.0.0[]]<out c (v) @ 1.0.0.0[]>true)",
                 "feldhofer-min", true, false, 5});
  out.push_back({"chi-prime-feldhofer", Dialect::hpfm,
                 std::string(prefix_hp) +
                     "(\n"
                     "  [d.u1 @ 1.0.0.0[]]<out c (w) @ 1.0.0.0[]>true &\n"
                     "  [d.u2 @ 1.0.0.0[]]<out c (w) @ 1.0.0.0[]>true)",
                 "feldhofer-min", true, false, 5});
  out.push_back({"psi-err", Dialect::fm,
                 "<out c (nt1)><d.nt1><d.nt1><out c (u1)><out c (u2)>(\n"
                 "  u1 != error & u2 != error &\n"
                 "  <d.z><out c (e)>(e = error & [d.z][out c (v)](v != error)) &\n"
                 "  <d.u1><out c (w)>(w != error & [d.z][out c (v)](v != error)) &\n"
                 "  <d.u2><out c (w)>(w != error & [d.z][out c (v)](v != error)))",
                 "feldhofer-min-err", true, false, 5});
  out.push_back({"chi-err", Dialect::hpfm,
                 std::string(prefix_hp) +
                     "(\n"
                     "  u1 != error & u2 != error &\n"
                     "  <d.u1 @ 0.0.1[]><out c (w) @ 0.0.1[]>(w != error &\n"
                     "    [d.z @ 1.0.0.0[]][out c (v) @ 1.0.0.0[]](v != error)) &\n"
                     "  <d.u2 @ 0.0.1[]><out c (w) @ 0.0.1[]>(w != error &\n"
                     "    [d.z @ 1.0.0.0[]][out c (v) @ 1.0.0.0[]](v != error)))",
                 "feldhofer-min-err", true, false, 5});
  out.push_back({"phi-nondist", Dialect::hpfm,
                 std::string(prefix_hp) +
                     "(\n"
                     "  <d.u1 @ 0.0.1[]><out c (w) @ 0.0.1[]>true &\n"
                     "  <d.u2 @ 0.0.1[]><out c (w) @ 0.0.1[]>true)",
                 "bac-min", true, true, 5});
  return out;
}

}  // namespace

const std::vector<Attack>& attacks() {
  static const std::vector<Attack> all = make_attacks();
  return all;
}

const Attack& find_attack(std::string_view name) {
  for (const Attack& a : attacks()) {
    if (a.name == name) return a;
  }
  throw Error("unknown attack '" + std::string(name) + "'");
}

Formula attack_formula(std::string_view name) {
  const Attack& a = find_attack(name);
  return instantiate_free(parse_formula(a.source, a.dialect));
}

const std::vector<ExamplePair>& example_pairs() {
  static const std::vector<ExamplePair> all = {
      {"seq-vs-par", "out(a,a).out(a,a)", "out(a,a) | out(a,a)", ""},
      {"nested-vs-flat", "new x,y,z.out(a,x).(out(b,y) | out(c,z))",
       "new x,y,z.(out(a,x).out(b,y) | out(c,z))", "<out a (x) @ 0[]><out c (z) @ 0.1[]>true"},
      {"two-outputs-vs-one", "!(new x.out(a,x).new x.out(a,x))", "!(new x.out(a,x))", ""},
      {"independence",
       "new c,d.((out(d,d) | new n.out(a,n).in(d,z).in(n,x)) | (out(c,c) | in(c,y)))",
       "new e,f,n.((out(f,f) | out(a,n).in(f,z)) | (out(e,e) | in(e,y).in(n,x)))",
       "<tau @ (1.0[],1.1[])><out a (x) @ 0.1[]><tau @ (0.0[],0.1[])><x.M @ 0.1[]>true"},
      {"dependence", "new a,b.((out(a,a) | (in(a,x) + in(b,x))) | out(c,c).out(b,b))",
       "new a.((out(a,a) | in(a,x)) | out(c,c))", ""},
  };
  return all;
}

const ExamplePair& find_example(std::string_view name) {
  for (const ExamplePair& e : example_pairs()) {
    if (e.name == name) return e;
  }
  throw Error("unknown example '" + std::string(name) + "'");
}

}  // namespace picheck
