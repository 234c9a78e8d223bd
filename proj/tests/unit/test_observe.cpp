#include "doctest.h"
#include "pcase/error.hpp"
#include "pcase/observe.hpp"

using namespace pcase;

namespace {

Element el(std::initializer_list<Prime> ps) { return Element{PrimeSet(ps)}; }
Element zero() { return el({p_sum_tag(0)}); }
Element one() { return el({p_sum_tag(1)}); }

// Applies a binary bool function viewed at level 3 after evaluating at `deep`.
Element apply2(const TermP& f, const Element& x, const Element& y, int deep) {
  Element g = denote_view(f, {}, deep, 3);
  return apply_element(apply_element(g, x), y);
}

// The table of a test term over P_n(t), from a deep evaluation.
std::vector<Element> table(const TermP& m, Type t, int n, int deep) {
  Element g = denote_view(m, {}, deep, n + 2);
  std::vector<Element> out;
  for (auto& d : elements(*ps_level(t, n))) out.push_back(apply_element(g, d));
  return out;
}

}  // namespace

TEST_SUITE("observe") {
  TEST_CASE("op_eval") {
    CHECK(op_eval(mk_zero(), 10).kind == ObsKind::Zero);
    CHECK(op_eval(mk_one(), 10).kind == ObsKind::One);
    ObsValue p = op_eval(read_term("pcase bot[bool] @0 @0"), 10);
    CHECK(p.kind == ObsKind::Zero);
    CHECK(p.steps == 1);
    ObsValue y = op_eval(mk_app(mk_Y(bool_type()), read_term("\\x:bool. x")), 300);
    CHECK(y.kind == ObsKind::Bottom);
    CHECK(y.reason == BottomReason::Budget);
    ObsValue s = op_eval(read_term("case bot[bool] (\\y:void. @0) (\\y:void. @1)"), 10);
    CHECK(s.reason == BottomReason::Stuck);
    CHECK_THROWS_AS(op_eval(read_term("\\x:bool. x"), 10), Error);
    CHECK_THROWS_AS(op_eval(mk_var("x", bool_type()), 10), Error);
  }

  TEST_CASE("adequacy examples") {
    AdequacyReport a = adequacy_check(mk_apps(mk_and(), {mk_zero(), mk_zero()}), 1000, 6);
    CHECK(a.verdict == Verdict::Pass);
    CHECK(a.op.kind == ObsKind::Zero);
    AdequacyReport c = adequacy_check(read_term("case bot[bool] (\\y:void. @0) (\\y:void. @1)"), 1000, 6);
    CHECK(c.verdict == Verdict::Pass);
    CHECK(c.op.steps == 0);
    CHECK(adequacy_check(mk_one(), 10, 3).verdict == Verdict::Pass);
    AdequacyReport y = adequacy_check(mk_app(mk_Y(bool_type()), read_term("\\x:bool. x")), 200, 4);
    CHECK(y.verdict == Verdict::Inconclusive);
  }

  TEST_CASE("combinator semantics") {
    auto c = std_combinators();
    CHECK(c.size() == 8);
    for (auto& [name, t] : c) CHECK(typecheck(t) == t->type);
    TermP a = c["and"], o = c["or"];
    CHECK(apply2(a, zero(), zero(), 6) == zero());
    CHECK(apply2(a, one(), {}, 6) == one());
    CHECK(apply2(a, {}, one(), 6) == one());
    CHECK(apply2(a, zero(), {}, 6).empty());
    CHECK(apply2(o, zero(), {}, 7) == zero());
    CHECK(apply2(o, {}, zero(), 7) == zero());
    CHECK(apply2(o, one(), one(), 7) == one());
    CHECK(apply2(o, one(), {}, 7).empty());
    // pcf is the parallel conditional at bool
    Type v = void_type(), b = bool_type();
    for (int n = 1; n <= 3; ++n) CHECK(denote_view(c["pcf"], {}, n + 4, n) == const_denote(Const::Pcase, {v, v, b}, n));
  }

  TEST_CASE("eq_term examples") {
    Type b = bool_type(), v = void_type();
    TermP e = eq_term({}, b, 2);
    for (auto& r : table(e, b, 2, 6)) CHECK(r == zero());
    // {0} at bool: bottom, {0}, {1} map to bottom, 0, 1
    std::vector<Element> t = table(eq_term({p_sum_tag(0)}, b, 2), b, 2, 6);
    std::vector<Element> ds = elements(*ps_level(b, 2));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds[i].empty()) CHECK(t[i].empty());
      else CHECK(t[i] == (ds[i] == zero() ? zero() : one()));
    }
    // {(∅,0)} at void -> bool, over the two elements of the domain
    Type vb = mk_fun(v, b);
    std::vector<Element> vs = elements(*ps_level(vb, 2));
    REQUIRE(vs.size() == 3);
    std::vector<Element> tv = table(eq_term({p_fun({}, p_sum_tag(0))}, vb, 2), vb, 2, 7);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].empty()) CHECK(tv[i].empty());
      else CHECK(tv[i] == (vs[i].contains(p_fun({}, p_sum_tag(0))) ? zero() : one()));
    }
  }

  TEST_CASE("eq contract by brute force") {
    // Expected values from the prime relations alone.
    auto expect = [](const AntiChain& x, const Element& d) {
      bool in = true, clash = false;
      for (auto& a : x) in = in && d.contains(a);
      for (auto& a : d.primes)
        for (auto& b : x) clash = clash || !con(a, b);
      return in ? zero() : clash ? one() : Element{};
    };
    Type b = bool_type();
    for (Type t : {b, mk_sum(b, b), mk_fun(b, b)}) {
      for (auto& x : antichains(*ps_level(t, 2))) {
        std::vector<Element> got = table(eq_term(x, t, 2), t, 2, 8);
        std::vector<Element> ds = elements(*ps_level(t, 2));
        for (std::size_t i = 0; i < ds.size(); ++i) CHECK(got[i] == expect(x, ds[i]));
      }
    }
  }

  TEST_CASE("definable terms") {
    Type b = bool_type(), v = void_type();
    CHECK(is_omega(definable_term({}, b, 2)));
    TermP z = definable_term(zero(), b, 2);
    CHECK(denote(z, {}, 4) == zero());
    CHECK(op_eval(z, 1000).kind == ObsKind::Zero);
    // ↓{({0},1)}: 1 exactly on arguments above {0}
    Type bb = mk_fun(b, b);
    SystemP host = ps_level(bb, 2);
    Element d = down_closure({p_fun({p_sum_tag(0)}, p_sum_tag(1))}, *host);
    TermP t = definable_term(d, bb, 2);
    Element g = denote_view(t, {}, 6, 2);
    for (auto& e : elements(*ps_level(b, 1))) CHECK(apply_element(g, e) == (e.contains(p_sum_tag(0)) ? one() : Element{}));
    CHECK_THROWS_AS(definable_term(el({p_sum_tag(0), p_sum_tag(1)}), b, 2), Error);
    CHECK_THROWS_AS(definable_term(el({p_fun({}, p_sum_tag(1))}), bb, 2), Error);
    (void)v;
  }

  TEST_CASE("definability round trip") {
    Type b = bool_type();
    for (Type t : {b, mk_sum(b, b), mk_prod(b, b), mk_fun(b, b)})
      for (int n = 0; n <= 2; ++n)
        for (auto& d : elements(*ps_level(t, n))) {
          TermP m = definable_term(d, t, n);
          CHECK(m->fv->empty());
          CHECK(denote_view(m, {}, n + 4, n) == d);
        }
  }

  TEST_CASE("pcase_from_and") {
    Type b = bool_type(), v = void_type();
    CHECK(is_omega(pcase_from_and(t_void())));
    TermP pb = pcase_from_and(t_bool());
    CHECK(pb->type == mk_fun(b, mk_fun(b, mk_fun(b, b))));
    TypeExprP nat = parse_type("mu t. void + t");
    TermP pn = pcase_from_and(nat);
    Type nt = to_graph(nat);
    CHECK(pn->type == mk_fun(b, mk_fun(nt, mk_fun(nt, nt))));
    std::vector<TermP> args;
    CHECK(spine(pn, args)->kind == TmKind::Lam);
    CHECK(args.size() == 1);
    CHECK_THROWS_AS(pcase_from_and(parse_type("t + void")), Error);
    // a bound variable is used as given
    TermP p = mk_var("q", mk_fun(b, mk_fun(b, mk_fun(b, b))));
    CHECK(pcase_from_and(t_var("t"), {{"t", p}}) == p);
    TermP open = pcase_from_and(parse_type("t * void"), {{"t", p}});
    CHECK(has_free(open, "q"));
    (void)v;
  }

  TEST_CASE("app_n") {
    Type b = bool_type(), v = void_type();
    for (int n = 0; n <= 3; ++n) CHECK(app_level_check(mk_const(Const::Pcase, {v, v, b}), b, n));
    TermP never = mk_omega(mk_fun(b, mk_fun(b, mk_fun(b, b))));
    CHECK(app_level_check(never, b, 0));
    for (int n = 1; n <= 3; ++n) CHECK_FALSE(app_level_check(never, b, n));
    for (const char* s : {"bool", "mu t. void + t", "bool * bool", "bool -> bool"}) {
      TypeExprP e = parse_type(s);
      TermP f = pcase_from_and(e);
      for (int n = 0; n <= 3; ++n) CHECK(app_level_check(f, to_graph(e), n));
    }
  }

  TEST_CASE("case from pcase") {
    Type b = bool_type(), v = void_type();
    for (int n = 0; n <= 3; ++n) CHECK(case_from_pcase_check(v, v, b, n));
    CHECK(case_from_pcase_check(b, b, b, 2));
    CHECK(case_from_pcase_check(0));
  }

  TEST_CASE("preorder probe") {
    Type b = bool_type();
    ProbeReport r = preorder_probe(mk_omega(b), mk_zero(), probe_contexts(b, 2, 32), 2000, 3);
    CHECK_FALSE(r.distinguished);
    CHECK(r.den_leq.back().second);
    ProbeReport w = preorder_probe(mk_zero(), mk_omega(b), probe_contexts(b, 2, 32), 2000, 3);
    CHECK(w.distinguished);
    TermP id = read_term("\\x:bool. x"), k0 = read_term("\\x:bool. @0");
    ProbeReport f = preorder_probe(id, k0, probe_contexts(id->type, 2, 64), 20000, 3);
    CHECK(f.distinguished);
  }

  TEST_CASE("distinguisher") {
    TermP id = read_term("\\x:bool. x"), k1 = read_term("\\x:bool. @1");
    DistinguishReport r = distinguish(id, k1, 2, 20000);
    REQUIRE(r.found_prime);
    CHECK(r.success);
    CHECK(r.on_m.kind == ObsKind::Zero);
    DistinguishReport same = distinguish(id, id, 2, 20000);
    CHECK_FALSE(same.found_prime);
    // open terms are closed over their free variables first
    TermP x = mk_var("x", bool_type());
    DistinguishReport open = distinguish(x, mk_omega(bool_type()), 2, 20000);
    CHECK(open.success);
  }
}
