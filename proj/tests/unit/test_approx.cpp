#include "doctest.h"
#include "pcase/approx.hpp"
#include "pcase/error.hpp"
#include "pcase/rewrite.hpp"
#include "support/generators.hpp"

using namespace pcase;

namespace {

TermP T(const char* s, const Context& ctx = {}) { return read_term(s, ctx); }

}  // namespace

TEST_SUITE("approx") {
  TEST_CASE("collapse") {
    CHECK(alpha_equal(omega_collapse(mk_zero()), mk_zero()));
    CHECK(alpha_equal(omega_collapse(T("(\\x:bool. x) @0")), mk_omega(bool_type())));
    CHECK(alpha_equal(omega_collapse(T("((\\x:bool. x) @0, @1)")), T("(bot[bool], @1)")));
    testing::TermGen gen(31, true);
    for (int i = 0; i < 300; ++i) {
      TermP m = gen.gen(gen.random_type(), 16);
      TermP c = omega_collapse(m);
      CHECK(is_normal(c));
      CHECK(omega_leq(c, m));
    }
  }

  TEST_CASE("constant normal forms") {
    Type b = bool_type();
    Context ctx{{"M", mk_fun(void_type(), b)}, {"N", mk_fun(void_type(), b)}, {"x", b}};
    CHECK(is_cnf(T("\\x:bool. x")));
    CHECK_FALSE(is_cnf(T("case bot[bool] M N", ctx)));
    CHECK(is_cnf(T("case x M N", ctx)));
    CHECK_FALSE(is_cnf(T("pcase x @0 bot[bool]", ctx)));
    CHECK_FALSE(is_cnf(T("\\y:bool. bot[bool]")));
    CHECK(is_cnf(mk_omega(b)));
    CHECK(is_cnf(T("in0[bool,bool] bot[bool]")));
    try {
      is_cnf(T("(\\x:bool. x) @0"));
      FAIL("expected NotNormalForm");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotNormalForm);
    }
    CHECK(is_mnf(T("pcase x @0 bot[bool]", ctx), 4));
    CHECK_FALSE(is_mnf(T("\\y:bool. bot[bool]"), 4));
    CHECK_FALSE(is_mnf(T("case bot[bool] M N", ctx), 4));
  }

  TEST_CASE("direct approximations") {
    Type b = bool_type();
    CHECK(direct_approx(mk_omega(b), T("(\\x:bool. x) @0"), 10).status == DapStatus::Proved);
    CHECK(direct_approx(T("in0[void,void] bot[void]"), mk_zero(), 10).status == DapStatus::Proved);
    Context ctx{{"x", b}};
    TermP m = T("pcase x @0 ((\\q:bool. q) @0)", ctx);
    auto r = direct_approx(T("pcase x (in0[void,void] bot[void]) bot[bool]", ctx), m, 20);
    CHECK(r.status == DapStatus::Refuted);
    REQUIRE(r.witness != nullptr);
    CHECK_THROWS_AS(direct_approx(mk_one(), mk_zero(), 10), Error);
    // a pcase prefix no reduct can disturb
    auto v = direct_approx(T("pcase x @0 bot[bool]", ctx), T("pcase x @0 @1", ctx), 20);
    CHECK(v.status == DapStatus::BudgetVerified);
  }

  TEST_CASE("approximation sets") {
    auto z = approximations(mk_zero());
    CHECK(z.contains(mk_omega(bool_type())));
    CHECK(z.contains(mk_zero()));
    for (std::size_t steps : {4u, 16u, 64u}) {
      auto y = approximations(mk_app(mk_Y(bool_type()), T("\\x:bool. x")), {steps, 14, 4096});
      REQUIRE(y.members.size() == 1);
      CHECK(is_omega(y.members[0].term));
    }
    Type bb = mk_fun(bool_type(), bool_type());
    auto ys = approximations(mk_Y(bool_type()), {40, 14, 4096});
    TermP body = mk_omega(bool_type());
    for (int k = 0; k <= 2; ++k) {
      CHECK(ys.contains(mk_lam("y", bb, body)));
      body = mk_app(mk_var("y", bb), body);
    }
    for (auto& m : ys.members) CHECK(is_normal(m.term));
  }

  TEST_CASE("proved members survive deeper exploration") {
    testing::TermGen gen(32, true);
    for (int i = 0; i < 60; ++i) {
      TermP m = gen.gen(gen.random_type(), 14);
      auto set = approximations(m, {12, 10, 512});
      auto deeper = reducts(m, 200);
      for (auto& a : set.members) {
        if (a.status != DapStatus::Proved) continue;
        for (auto& n : reducts(a.reduct, 50)) CHECK(omega_leq(a.term, n));
      }
      (void)deeper;
    }
  }

  TEST_CASE("ideal structure") {
    testing::TermGen gen(33, true);
    for (int i = 0; i < 60; ++i) {
      TermP m = gen.gen(gen.random_type(), 12);
      auto set = approximations(m, {12, 12, 4096});
      for (auto& a : set.members)
        if (a.term->size <= 12)
          for (auto& p : prefixes(a.term, 4096)) CHECK(set.contains(p));
      // joins of members checked against a common reduct
      for (auto& a : set.members)
        for (auto& b : set.members) {
          if (a.reduct != b.reduct) continue;
          TermP j = omega_join(a.term, b.term);
          CHECK(is_normal(j));
          CHECK(set.contains(j));
        }
    }
  }

  TEST_CASE("approximate semantics") {
    CHECK(approx_semantics(mk_zero(), {}, 2) == Element{{p_sum_tag(0)}});
    CHECK(approx_semantics(T("(\\x:bool. x) @1"), {}, 2, {2, 14, 4096}) == Element{{p_sum_tag(1)}});
    CHECK(approx_semantics(mk_omega(bool_type()), {}, 3).empty());
    // the literal level lags behind the approximations; deepening closes the gap
    auto lag = approximation_check(T("case @0 (\\y:void. @1) (\\y:void. @0)"), {}, 2);
    CHECK(lag.deep_sound);
    CHECK(lag.approx == Element{{p_sum_tag(1)}});
    auto rep = approximation_check(T("case @0 (\\y:void. @1) (\\y:void. @0)"), {}, 4);
    CHECK(rep.equal);
    CHECK(rep.exact == Element{{p_sum_tag(1)}});
    auto om = approximation_check(mk_omega(bool_type()), {}, 3);
    CHECK(om.equal);
  }

  TEST_CASE("minimal approximations without a least one") {
    TermP m = T("\\x:bool. pcase x (case x bot[void->bool] (\\y:void. @1)) @1");
    TermP a1 = T("\\x:bool. pcase bot[bool] (case x bot[void->bool] (\\y:void. @1)) @1");
    TermP a2 = T("\\x:bool. pcase x bot[bool] @1");
    auto set = approximations(m, {16, 24, 8192});
    CHECK(set.contains(a1));
    CHECK(set.contains(a2));
    for (int n = 3; n <= 5; ++n) {
      Element dm = denote_view(m, {}, n + 3, n);
      CHECK(denote_view(a1, {}, n + 3, n) == dm);
      CHECK(denote_view(a2, {}, n + 3, n) == dm);
    }
  }

  TEST_CASE("mnf implies cnf without pcase") {
    testing::TermGen gen(34, true);
    int mnfs = 0;
    for (int i = 0; i < 200; ++i) {
      TermP m = omega_collapse(gen.gen(gen.random_type(), 10));
      for (auto& p : prefixes(m, 32)) {
        bool seq = true;
        auto walk = [&](auto&& self, const TermP& t) -> void {
          if (t->kind == TmKind::Const && t->c == Const::Pcase) seq = false;
          if (t->a) self(self, t->a);
          if (t->b) self(self, t->b);
        };
        walk(walk, p);
        if (!seq) continue;
        if (is_mnf(p, 3)) {
          ++mnfs;
          CHECK(is_cnf(p));
        }
      }
    }
    CHECK(mnfs > 50);
  }

  TEST_CASE("sequential inclusions") {
    testing::TermGen gen(35, true);
    int checked = 0;
    for (int i = 0; i < 80; ++i) {
      TermP m = gen.gen(gen.random_type(), 12);
      auto rep = approximation_check(m, {}, 3, {10, 10, 1024});
      if (!rep.sequential) continue;
      ++checked;
      CHECK(rep.b_in_c);
      CHECK(rep.c_in_a);
      CHECK(rep.deep_sound);
    }
    CHECK(checked > 5);
  }
}
