#include "doctest.h"
#include "pcase/error.hpp"
#include "pcase/rewrite.hpp"
#include "support/generators.hpp"

using namespace pcase;

namespace {

Context bool_ctx(std::initializer_list<const char*> names) {
  Context ctx;
  for (auto n : names) ctx[n] = bool_type();
  return ctx;
}

bool is_phi_limit(const Error& e) { return e.kind() == ErrorKind::ResourceLimit; }

}  // namespace

TEST_SUITE("rewrite") {
  TEST_CASE("redex discovery") {
    Type b = bool_type();
    Context ctx{{"x", b}, {"w", b}, {"y", mk_fun(b, b)}, {"z", mk_fun(b, b)}};
    auto rs = find_redexes(read_term("case (in0 x) (\\a:void. @0) (\\a:void. @1)", {{"x", void_type()}}));
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].rule == Rule::Case0);
    CHECK(rs[0].occurrence.empty());
    rs = find_redexes(read_term("pcase x y z w", ctx));
    REQUIRE_FALSE(rs.empty());
    CHECK(rs[0].rule == Rule::PcaseArrow);
    CHECK(rs[0].occurrence.empty());
    CHECK(find_redexes(mk_omega(b)).empty());
    CHECK(is_normal(mk_zero()));
    CHECK(to_string(rs[0]) == "pcaseArrow @ root");
  }

  TEST_CASE("single steps") {
    Context ctx = bool_ctx({"x", "y", "z"});
    auto step = [&](const char* src, const Context& c) {
      TermP m = read_term(src, c);
      auto rs = find_redexes(m);
      REQUIRE_FALSE(rs.empty());
      return reduce_at(m, rs[0]);
    };
    CHECK(alpha_equal(step("fst (x, y)", ctx), read_term("x", ctx)));
    CHECK(alpha_equal(step("snd (x, y)", ctx), read_term("y", ctx)));
    Context sctx{{"x", mk_sum(void_type(), void_type())}, {"y", bool_type()}, {"z", bool_type()}};
    CHECK(alpha_equal(step("pcase x (in0[bool,bool] y) (in0[bool,bool] z)", sctx),
                      read_term("in0[bool,bool] (pcase x y z)", sctx)));
    Context vctx{{"x", void_type()}, {"y", bool_type()}, {"z", bool_type()}};
    CHECK(alpha_equal(step("pcase (in0[void,void] x) y z", vctx), read_term("y", vctx)));
    CHECK(alpha_equal(step("pcase (in1[void,void] x) y z", vctx), read_term("z", vctx)));
    CHECK(alpha_equal(step("(\\x:bool. x) @0", {}), mk_zero()));
    CHECK_THROWS_AS(reduce_at(mk_zero(), Redex{{}, Rule::Beta}), Error);
  }

  TEST_CASE("normalization") {
    TermP m = mk_app(mk_out0(bool_type(), void_type()), read_term("in0[bool,void] @1"));
    auto r = normalize(m, Strategy::Fair, 100, true);
    CHECK(r.status == NormStatus::Normal);
    CHECK(alpha_equal(r.term, mk_one()));
    CHECK(r.trace.steps.size() == r.steps);
    CHECK(r.steps == 3);
    for (std::size_t budget : {1u, 10u, 500u}) {
      auto y = normalize(mk_app(mk_Y(bool_type()), read_term("\\x:bool. x")), Strategy::Fair, budget);
      CHECK(y.status == NormStatus::BudgetExhausted);
      CHECK(y.steps == budget);
    }
    auto z = normalize(mk_zero(), Strategy::Fair, 10);
    CHECK(z.status == NormStatus::Normal);
    CHECK(z.steps == 0);
  }

  TEST_CASE("fair strategy reaches pcase arguments") {
    // the leftmost-outermost redex loops forever inside the first argument
    TermP loop = mk_app(mk_Y(bool_type()), read_term("\\x:bool. x"));
    TermP m = mk_apps(mk_const(Const::Pcase, {void_type(), void_type(), bool_type()}),
                      {loop, read_term("(\\q:bool. q) @0"), read_term("(\\q:bool. q) @0")});
    // only the fair strategy exposes the pcase00 step and so the in0 head
    auto head_of = [](const TermP& t) {
      std::vector<TermP> args;
      return spine(t, args);
    };
    auto fair = normalize(m, Strategy::Fair, 200);
    CHECK(fair.status == NormStatus::BudgetExhausted);
    TermP fh = head_of(fair.term);
    CHECK((fh->kind == TmKind::Const && fh->c == Const::In0));
    auto lm = normalize(m, Strategy::Leftmost, 200);
    CHECK(lm.status == NormStatus::BudgetExhausted);
    TermP lh = head_of(lm.term);
    CHECK((lh->kind == TmKind::Const && lh->c == Const::Pcase));
  }

  TEST_CASE("phi measure") {
    Context ctx = bool_ctx({"x", "y1", "y2", "z1", "z2"});
    CHECK(phi_measure(read_term("x", ctx)) == 2);
    CHECK(phi_measure(read_term("in0[bool,bool] x", ctx)) == 4);
    Context sctx = ctx;
    sctx["x"] = bool_type();
    TermP m = read_term("pcase x (y1, y2) (z1, z2)", sctx);
    auto rs = find_redexes(m);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].rule == Rule::PcaseXX);
    CHECK(phi_measure(m) == 144);
    CHECK(phi_measure(reduce_at(m, rs[0])) == 34);
    CHECK_THROWS_AS(phi_measure(read_term("\\x:bool. x")), Error);
    CHECK(alpha_equal(normalize_applicative(read_term("fst (in0[bool,bool] x, y1)", ctx)),
                      read_term("in0[bool,bool] x", ctx)));
  }

  TEST_CASE("phi decreases on every applicative step") {
    testing::TermGen gen(11, false);
    int checked = 0, skipped = 0;
    for (int i = 0; i < 400; ++i) {
      TermP m = gen.gen(gen.random_type(), 16);
      REQUIRE(is_applicative(m));
      try {
        BigNat before = phi_measure(m);
        for (auto& r : find_redexes(m)) {
          TermP n = reduce_at(m, r);
          CHECK(phi_measure(n) < before);
          ++checked;
        }
      } catch (const Error& e) {
        REQUIRE(is_phi_limit(e));
        ++skipped;
      }
    }
    CHECK(checked > 200);
    CHECK(skipped < 40);
  }

  TEST_CASE("phi superapplication bound") {
    testing::TermGen gen(12, false);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
      Type a = gen.random_type(), t = gen.random_type();
      TermP f = gen.gen(mk_fun(a, t), 8);
      TermP x = gen.gen(a, 6);
      try {
        BigNat pf = phi_measure(f), px = phi_measure(x), pfx = phi_measure(mk_app(f, x));
        // compare logarithms first so the power stays small
        double lhs = static_cast<double>(msb(pf)) * px.convert_to<double>();
        if (lhs > 4096) {
          CHECK(static_cast<double>(msb(pfx)) <= (static_cast<double>(msb(pf)) + 1) * px.convert_to<double>());
          continue;
        }
        BigNat power = boost::multiprecision::pow(pf, px.convert_to<unsigned>());
        CHECK(power >= pfx);
        ++checked;
      } catch (const Error& e) {
        REQUIRE(is_phi_limit(e));
      }
    }
    CHECK(checked > 100);
  }

  TEST_CASE("subject reduction") {
    testing::TermGen gen(13, true);
    for (int i = 0; i < 400; ++i) {
      TermP m = gen.gen(gen.random_type(), 18);
      for (auto& r : find_redexes(m)) {
        TermP n = reduce_at(m, r);
        CHECK(typecheck(n) == m->type);
      }
    }
  }

  TEST_CASE("normal forms are unique across strategies") {
    testing::TermGen gen(14, true);
    int compared = 0;
    for (int i = 0; i < 300; ++i) {
      TermP m = gen.gen(gen.random_type(), 18);
      auto a = normalize(m, Strategy::Fair, 2000);
      auto b = normalize(m, Strategy::Leftmost, 2000);
      if (a.status == NormStatus::Normal && b.status == NormStatus::Normal) {
        CHECK(alpha_equal(a.term, b.term));
        ++compared;
      }
    }
    CHECK(compared > 200);
  }

  TEST_CASE("critical pairs converge") {
    auto pairs = critical_pair_suite();
    CHECK(pairs.size() == 8);
    for (auto& p : pairs) {
      INFO(p.name);
      CHECK(p.converged);
      CHECK(normalize(p.left, Strategy::Fair, 100).term != nullptr);
      CHECK(alpha_equal(normalize(p.left, Strategy::Fair, 100).term, normalize(p.right, Strategy::Fair, 100).term));
    }
  }

  TEST_CASE("confluence probing") {
    Type b = bool_type();
    Context ctx{{"x", b}, {"y", mk_sum(b, b)}, {"z", mk_sum(b, b)}, {"w", b}};
    CHECK_THROWS_AS(read_term("pcase x (in0 y) (in0 z) w", ctx), Error);
    TermP m = read_term("(\\x:bool. (x, x)) ((\\q:bool. q) @0)");
    auto rep = confluence_probe(m, 16, 4, 50);
    CHECK_FALSE(rep.violation);
    CHECK(rep.unresolved.empty());
    CHECK(rep.reducts >= 3);
    CHECK(alpha_equal(normalize(m, Strategy::Fair, 50).term, mk_pair(mk_zero(), mk_zero())));

    testing::TermGen gen(15, true);
    for (int i = 0; i < 60; ++i) {
      auto r = confluence_probe(gen.gen(gen.random_type(), 14), 12, 3, 200);
      CHECK_FALSE(r.violation);
    }
  }
}
