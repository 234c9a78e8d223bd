#include <random>

#include "doctest.h"
#include "pcase/error.hpp"
#include "pcase/typesys.hpp"

using namespace pcase;

namespace {

// All simple types with at most `size` constructors.
std::vector<TypeExprP> simple_types(int size) {
  std::vector<std::vector<TypeExprP>> by(size + 1);
  by[0] = {t_void()};
  for (int n = 1; n <= size; ++n)
    for (int a = 0; a < n; ++a)
      for (auto& l : by[a])
        for (auto& r : by[n - 1 - a]) {
          by[n].push_back(t_sum(l, r));
          by[n].push_back(t_prod(l, r));
          by[n].push_back(t_fun(l, r));
        }
  std::vector<TypeExprP> all;
  for (auto& v : by) all.insert(all.end(), v.begin(), v.end());
  return all;
}

TypeExprP random_type(std::mt19937& rng, int depth, std::vector<std::string>& bound) {
  std::uniform_int_distribution<int> pick(0, 5);
  int k = depth <= 0 ? (bound.empty() ? 0 : pick(rng) % 2) : pick(rng);
  switch (k) {
    case 0: return t_void();
    case 1:
      if (!bound.empty()) return t_var(bound[rng() % bound.size()]);
      return t_void();
    case 2: return t_sum(random_type(rng, depth - 1, bound), random_type(rng, depth - 1, bound));
    case 3: return t_prod(random_type(rng, depth - 1, bound), random_type(rng, depth - 1, bound));
    case 4: return t_fun(random_type(rng, depth - 1, bound), random_type(rng, depth - 1, bound));
    default: {
      std::string b = "t" + std::to_string(bound.size());
      bound.push_back(b);
      TypeExprP body = random_type(rng, depth - 1, bound);
      bound.pop_back();
      return t_mu(b, body);
    }
  }
}

}  // namespace

TEST_SUITE("typesys") {
  TEST_CASE("parse examples") {
    CHECK(alpha_equal(parse_type("mu t. void + t"), t_mu("t", t_sum(t_void(), t_var("t")))));
    CHECK(parse_type("void")->kind == TKind::Void);
    CHECK(alpha_equal(parse_type("mu t. t + t"), t_mu("s", t_sum(t_var("s"), t_var("s")))));
    CHECK(alpha_equal(parse_type("bool"), t_sum(t_void(), t_void())));
    CHECK(alpha_equal(parse_type("void -> void -> void"), t_fun(t_void(), t_fun(t_void(), t_void()))));
    CHECK(alpha_equal(parse_type("void * void + void"), t_sum(t_prod(t_void(), t_void()), t_void())));
    CHECK_THROWS_AS(parse_type("void +"), Error);
    CHECK_THROWS_AS(parse_type("(void"), Error);
  }

  TEST_CASE("printing round trips") {
    for (const char* s : {"mu t. void + t", "bool -> bool", "(bool -> bool) -> bool", "bool * bool",
                          "void + (void + void)", "mu t. t -> bool", "(mu t. t + t) * bool"}) {
      TypeExprP t = parse_type(s);
      CHECK(alpha_equal(parse_type(to_string(t)), t));
    }
  }

  TEST_CASE("unfold_step") {
    auto r = unfold_step(parse_type("mu t. void + t"));
    REQUIRE(r.size() == 1);
    CHECK(alpha_equal(r[0], parse_type("void + (mu t. void + t)")));
    CHECK(unfold_step(parse_type("void + void")).empty());
    auto two = unfold_step(parse_type("(mu t. t) + (mu s. s)"));
    REQUIRE(two.size() == 2);
    CHECK(alpha_equal(two[0], parse_type("(mu t. t) + (mu s. s)")));
    CHECK(alpha_equal(two[1], parse_type("(mu t. t) + (mu s. s)")));
    CHECK_THROWS_AS(unfold_step(parse_type("t + void")), Error);
    // inner mu below an outer one is not outermost
    CHECK(unfold_step(parse_type("mu t. mu s. t + s")).size() == 1);
  }

  TEST_CASE("graphs") {
    CHECK(to_graph(parse_type("mu t. t")) == void_type());
    CHECK(to_graph(parse_type("mu s. mu t. s")) == void_type());
    CHECK(graph_size(to_graph(parse_type("void + void"))) == 2);
    CHECK(to_graph(parse_type("mu t. bool -> t")) == to_graph(parse_type("mu t. bool -> bool -> t")));
    CHECK(type_equiv(parse_type("mu t. t"), parse_type("void")));
    CHECK(type_equiv(parse_type("mu t. void + t"), parse_type("void + (mu t. void + t)")));
    CHECK_FALSE(type_equiv(parse_type("void + void"), parse_type("void * void")));
    CHECK(mk_sum(void_type(), to_graph(parse_type("mu t. void + t"))) == to_graph(parse_type("mu t. void + t")));
    CHECK_THROWS_AS(to_graph(parse_type("t")), Error);
    CHECK(is_finite(bool_type()));
    CHECK_FALSE(is_finite(to_graph(parse_type("mu t. void + t"))));
  }

  TEST_CASE("to_expr gives an equivalent closed type") {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
      std::vector<std::string> bound;
      TypeExprP t = random_type(rng, 5, bound);
      Type g = to_graph(t);
      TypeExprP e = to_expr(g);
      CHECK(is_closed(e));
      CHECK(to_graph(e) == g);
      CHECK(to_graph(parse_type(to_string(e))) == g);
      for (auto& u : unfold_step(t)) CHECK(to_graph(u) == g);
    }
  }

  TEST_CASE("prefix order and joins") {
    Type nat = to_graph(parse_type("mu t. void + t"));
    Type bits = to_graph(parse_type("mu t. t + t"));
    CHECK(prefix_leq(t_void(), nat));
    CHECK(prefix_leq(parse_type("void + void"), bits));
    CHECK_FALSE(prefix_leq(parse_type("void -> void"), bool_type()));
    CHECK(alpha_equal(simple_join(t_void(), parse_type("bool")), parse_type("bool")));
    CHECK(alpha_equal(simple_join(parse_type("void + void"), parse_type("void + (void + void)")),
                      parse_type("void + (void + void)")));
    CHECK_THROWS_AS(simple_join(parse_type("void + void"), parse_type("void * void")), Error);

    auto all = simple_types(3);
    for (auto& a : all)
      for (auto& b : all) {
        if (simple_leq(a, b) && simple_leq(b, a)) CHECK(alpha_equal(a, b));
        if (!simple_leq(a, b)) continue;
        for (auto& c : all)
          if (simple_leq(b, c)) CHECK(simple_leq(a, c));
      }
  }

  TEST_CASE("tree approximations") {
    auto v = tree_approx(void_type(), 4);
    CHECK(v.size() == 1);
    auto b1 = tree_approx(bool_type(), 1);
    CHECK(b1.size() == 2);
    Type nat = to_graph(parse_type("mu t. void + t"));
    auto n2 = tree_approx(nat, 2);
    REQUIRE(n2.size() == 3);
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
      std::vector<std::string> bound;
      Type g = to_graph(random_type(rng, 4, bound));
      auto a = tree_approx(g, 2), b = tree_approx(g, 3);
      for (auto& s : a) {
        CHECK(prefix_leq(s, g));
        bool found = false;
        for (auto& t : b) found = found || alpha_equal(s, t);
        CHECK(found);
        for (auto& t : a) {
          TypeExprP j = simple_join(s, t);
          bool in = false;
          for (auto& u : b) in = in || alpha_equal(j, u);
          CHECK(in);
        }
      }
    }
  }
}
