#include <chrono>
#include <random>
#include <sstream>

#include "pcase/cli.hpp"
#include "pcase/observe.hpp"
#include "pcase/rewrite.hpp"

namespace pcase::cli {

namespace {

TermP pcase_bool(const TermP& c, const TermP& a, const TermP& b) {
  Type v = void_type();
  return mk_apps(mk_const(Const::Pcase, {v, v, bool_type()}), {c, a, b});
}

// One composition over the given operands; `op` picks the former.
TermP compose(int op, const std::vector<TermP>& xs) {
  switch (op) {
    case 0: return mk_app(mk_not(), xs[0]);
    case 1: return mk_apps(mk_and(), {xs[0], xs[1]});
    case 2: return mk_apps(mk_or(), {xs[0], xs[1]});
    case 3: return mk_apps(mk_if0(bool_type()), {xs[0], xs[1], xs[2]});
    default: return pcase_bool(xs[0], xs[1], xs[2]);
  }
}

int arity(int op) { return op == 0 ? 1 : op <= 2 ? 2 : 3; }

std::string elapsed(std::chrono::steady_clock::time_point t0) {
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return std::to_string(ms) + " ms";
}

}  // namespace

std::vector<TermP> adequacy_corpus(std::size_t count) {
  Type b = bool_type();
  std::vector<TermP> leaves = {mk_zero(), mk_one(), mk_omega(b)};
  TermP loop = mk_app(mk_Y(b), mk_lam("x", b, mk_var("x", b)));
  TermP flip = mk_app(mk_Y(b), mk_lam("x", b, mk_app(mk_not(), mk_var("x", b))));
  std::vector<TermP> divergers = {loop, flip, mk_apps(mk_and(), {loop, mk_one()}), mk_apps(mk_or(), {mk_zero(), loop}),
                                  mk_apps(mk_and(), {loop, mk_zero()}), pcase_bool(loop, mk_zero(), mk_zero()),
                                  pcase_bool(loop, mk_zero(), mk_one()), mk_app(mk_not(), flip)};
  std::vector<TermP> out;
  // every depth-one composition
  for (int op = 0; op < 5; ++op) {
    int k = arity(op), total = 1;
    for (int i = 0; i < k; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      std::vector<TermP> xs;
      for (int i = 0, c = code; i < k; ++i, c /= 3) xs.push_back(leaves[c % 3]);
      out.push_back(compose(op, xs));
    }
  }
  std::size_t keep = count > divergers.size() ? count - divergers.size() : 0;
  // nested ones from a fixed seed
  std::mt19937 rng(7);
  std::vector<TermP> pool = out;
  while (out.size() < keep) {
    int op = static_cast<int>(rng() % 5);
    std::vector<TermP> xs;
    for (int i = 0; i < arity(op); ++i) xs.push_back(pool[rng() % pool.size()]);
    out.push_back(compose(op, xs));
  }
  out.resize(std::min(out.size(), keep));
  for (auto& d : divergers)
    if (out.size() < count) out.push_back(d);
  return out;
}

std::vector<SelftestLine> selftest(bool quick) {
  std::vector<SelftestLine> lines;
  auto t0 = std::chrono::steady_clock::now();

  {
    auto pairs = critical_pair_suite();
    std::size_t ok = 0;
    for (auto& p : pairs) ok += p.converged;
    lines.push_back({"critical pairs", ok == pairs.size(),
                     std::to_string(ok) + "/" + std::to_string(pairs.size()) + " converge, " + elapsed(t0)});
  }

  t0 = std::chrono::steady_clock::now();
  {
    bool ok = true;
    std::size_t systems = 0;
    for (const char* s : {"bool", "mu t. void + t", "bool * bool", "bool -> bool", "mu t. t + t"}) {
      Type t = to_graph(parse_type(s));
      for (int n = 0; n <= (quick ? 2 : 3); ++n) {
        SystemP a = ps_level(t, n), b = ps_level(t, n + 1);
        if (a->size() <= 64) ok = ok && satisfies_axioms(*a);
        ok = ok && substructure(*a, *b);
        ++systems;
      }
    }
    lines.push_back({"prime axioms", ok, std::to_string(systems) + " systems, " + elapsed(t0)});
  }

  t0 = std::chrono::steady_clock::now();
  {
    std::size_t pass = 0, fail = 0, inconclusive = 0;
    for (auto& m : adequacy_corpus(quick ? 40 : 100)) {
      switch (adequacy_check(m, 4000, 7).verdict) {
        case Verdict::Pass: ++pass; break;
        case Verdict::Fail: ++fail; break;
        case Verdict::Inconclusive: ++inconclusive; break;
      }
    }
    std::ostringstream d;
    d << pass << " pass, " << fail << " fail, " << inconclusive << " inconclusive, " << elapsed(t0);
    lines.push_back({"adequacy corpus", fail == 0, d.str()});
  }
  if (quick) return lines;

  t0 = std::chrono::steady_clock::now();
  {
    Type b = bool_type();
    std::size_t ok = 0, total = 0;
    for (Type t : {b, mk_sum(b, b), mk_prod(b, b), mk_fun(b, b)})
      for (int n = 0; n <= 2; ++n)
        for (auto& d : elements(*ps_level(t, n))) {
          ++total;
          ok += definability_check(d, t, n);
        }
    lines.push_back({"definability", ok == total,
                     std::to_string(ok) + "/" + std::to_string(total) + " elements, " + elapsed(t0)});
  }

  t0 = std::chrono::steady_clock::now();
  {
    bool ok = true;
    for (const char* s : {"bool", "mu t. void + t", "bool * bool", "bool -> bool"}) {
      TypeExprP e = parse_type(s);
      TermP f = pcase_from_and(e);
      for (int n = 0; n <= 3; ++n) ok = ok && app_level_check(f, to_graph(e), n);
    }
    lines.push_back({"pcase from and", ok, elapsed(t0)});
  }

  t0 = std::chrono::steady_clock::now();
  {
    bool ok = true;
    for (int n = 0; n <= 2; ++n) ok = ok && case_from_pcase_check(n);
    Type v = void_type(), b = bool_type();
    bool pcf = true;
    for (int n = 1; n <= 3; ++n) pcf = pcf && denote_view(mk_pcf(), {}, n + 4, n) == const_denote(Const::Pcase, {v, v, b}, n);
    lines.push_back({"case from pcase", ok, elapsed(t0)});
    lines.push_back({"pcf is pcase at bool", pcf, "levels 1..3"});
  }
  return lines;
}

}  // namespace pcase::cli
