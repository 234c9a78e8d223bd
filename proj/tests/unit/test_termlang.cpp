#include "doctest.h"
#include "pcase/error.hpp"
#include "pcase/termlang.hpp"
#include "support/generators.hpp"

using namespace pcase;

TEST_SUITE("termlang") {
  TEST_CASE("parse and elaborate") {
    TermP id = read_term("\\x:bool. x");
    CHECK(id->kind == TmKind::Lam);
    CHECK(id->type == mk_fun(bool_type(), bool_type()));
    TermP c = read_term("case (in0[void,void] bot[void]) (\\y:void. @0) (\\y:void. @1)");
    CHECK(c->type == bool_type());
    CHECK(alpha_equal(read_term("@0"), mk_zero()));
    CHECK(alpha_equal(read_term("in0[void,void] bot[void]"), mk_zero()));
    CHECK_THROWS_AS(read_term("@0 @0"), Error);
    CHECK_THROWS_AS(read_term("x"), Error);
    CHECK_THROWS_AS(read_term("\\x:bool. (x"), Error);
  }

  TEST_CASE("constant type arguments are inferred") {
    CHECK(read_term("(@0, @1)")->type == mk_prod(bool_type(), bool_type()));
    CHECK(read_term("fst (@0, @1)")->type == bool_type());
    CHECK(read_term("pcase @0 @1 @0")->type == bool_type());
    CHECK(read_term("\\x:bool. case x (\\y:void. @1) (\\y:void. @0)")->type == mk_fun(bool_type(), bool_type()));
    CHECK(read_term("pcase bot[bool] @0 bot[bool]")->type == bool_type());
    CHECK(read_term("pcase bot[bool] @0 bot")->type == bool_type());
    CHECK_THROWS_AS(read_term("in0 @1"), Error);
    try {
      read_term("fst bot");
      FAIL("expected AmbiguousConstant");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AmbiguousConstant);
    }
  }

  TEST_CASE("constant types") {
    Type b = bool_type(), v = void_type();
    CHECK(ctype(Const::Pcase, {v, v, b}) == mk_fun(b, mk_fun(b, mk_fun(b, b))));
    CHECK(ctype(Const::Case, {v, v, b}) == mk_fun(b, mk_fun(mk_fun(v, b), mk_fun(mk_fun(v, b), b))));
    CHECK(mk_Y(b)->type == mk_fun(mk_fun(b, b), b));
    CHECK(typecheck(mk_Y(b)) == mk_fun(mk_fun(b, b), b));
    CHECK(mk_out0(v, v)->type == mk_fun(b, v));
    CHECK(mk_out1(b, v)->type == mk_fun(mk_sum(b, v), v));
    try {
      mk_app(mk_zero(), mk_zero());
      FAIL("expected TypeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TypeMismatch);
    }
  }

  TEST_CASE("printing round trips") {
    testing::TermGen gen(3, true);
    for (int i = 0; i < 300; ++i) {
      Type t = gen.random_type();
      TermP m = gen.gen(t, 14);
      Context ctx;
      for (auto& v : *m->fv) {
        // free variables are named after their type id
        int id = std::stoi(v.substr(1, v.find('_') - 1));
        ctx[v] = Type::from_id(id);
      }
      TermP back = read_term(to_string(m, true), ctx);
      CHECK(alpha_equal(back, m));
    }
  }

  TEST_CASE("substitution") {
    Type b = bool_type();
    TermP x = mk_var("x", b), y = mk_var("y", b);
    CHECK(alpha_equal(substitute(x, "x", mk_zero()), mk_zero()));
    TermP lam = mk_lam("y", b, x);
    TermP r = substitute(lam, "x", y);
    REQUIRE(r->kind == TmKind::Lam);
    CHECK(r->name != "y");
    CHECK(r->a->kind == TmKind::Var);
    CHECK(r->a->name == "y");
    TermP f = mk_var("x", mk_fun(b, b));
    TermP xx = mk_app(f, mk_zero());
    CHECK(alpha_equal(substitute(xx, "x", read_term("\\z:bool. z")), mk_app(read_term("\\z:bool. z"), mk_zero())));
    CHECK_THROWS_AS(substitute(x, "x", f), Error);
    // alpha-equal inputs give alpha-equal outputs
    TermP a1 = read_term("\\u:bool. pcase u x y", {{"x", b}, {"y", b}});
    TermP a2 = read_term("\\w:bool. pcase w x y", {{"x", b}, {"y", b}});
    CHECK(alpha_equal(a1, a2));
    CHECK(alpha_equal(substitute(a1, "x", mk_var("u", b)), substitute(a2, "x", mk_var("u", b))));
    CHECK(alpha_hash(a1) == alpha_hash(a2));
  }

  TEST_CASE("prefix order") {
    Type b = bool_type();
    CHECK(omega_leq(mk_omega(b), mk_zero()));
    CHECK_FALSE(omega_leq(mk_zero(), mk_omega(b)));
    TermP m = mk_pair(mk_zero(), mk_omega(b));
    TermP n = mk_pair(mk_omega(b), mk_one());
    CHECK(alpha_equal(omega_join(m, n), mk_pair(mk_zero(), mk_one())));
    CHECK_THROWS_AS(omega_join(mk_zero(), mk_one()), Error);
    CHECK(omega_leq(read_term("\\x:bool. bot[bool]"), read_term("\\y:bool. y")));
    TermP j = omega_join(read_term("\\x:bool. (x, bot[bool])"), read_term("\\y:bool. (bot[bool], y)"));
    CHECK(alpha_equal(j, read_term("\\z:bool. (z, z)")));

    testing::TermGen gen(5, true);
    for (int i = 0; i < 200; ++i) {
      TermP t = gen.gen(bool_type(), 12);
      CHECK(omega_leq(t, t));
      CHECK(omega_leq(mk_omega(t->type), t));
    }
  }

  TEST_CASE("paths") {
    TermP m = read_term("(\\x:bool. x) @0");
    CHECK(subterm_at(m, {0, 0})->kind == TmKind::Var);
    TermP r = replace_at(m, {1}, mk_one());
    CHECK(alpha_equal(r, read_term("(\\x:bool. x) @1")));
  }
}
