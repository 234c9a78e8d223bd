#include "pcase/observe.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "pcase/error.hpp"
#include "pcase/rewrite.hpp"

namespace pcase {

// ---------------------------------------------------------------- programs

std::string to_string(const ObsValue& v) {
  switch (v.kind) {
    case ObsKind::Zero: return "0";
    case ObsKind::One: return "1";
    case ObsKind::Bottom: break;
  }
  return v.reason == BottomReason::Stuck ? "bot(stuck)" : "bot(budget)";
}

bool is_program(const TermP& m) { return m->fv->empty() && m->type == bool_type(); }

namespace {

// 0 or 1 when the term is an injection, -1 otherwise.
int head_tag(const TermP& m) {
  std::vector<TermP> args;
  TermP h = spine(m, args);
  if (h->kind != TmKind::Const || args.size() != 1) return -1;
  if (h->c == Const::In0) return 0;
  if (h->c == Const::In1) return 1;
  return -1;
}

}  // namespace

ObsValue op_eval(const TermP& m, std::size_t budget) {
  if (!is_program(m)) fail(ErrorKind::NotAProgram, "not a closed term of type bool: " + to_string(m));
  TermP cur = m;
  for (std::size_t step = 0;; ++step) {
    int tag = head_tag(cur);
    if (tag >= 0) return {tag == 0 ? ObsKind::Zero : ObsKind::One, BottomReason::None, step};
    auto r = choose_redex(cur, Strategy::Fair, step);
    if (!r) return {ObsKind::Bottom, BottomReason::Stuck, step};
    if (step == budget) return {ObsKind::Bottom, BottomReason::Budget, step};
    cur = reduce_at(cur, *r);
  }
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

AdequacyReport adequacy_check(const TermP& m, std::size_t steps, int levels) {
  AdequacyReport r;
  r.op = op_eval(m, steps);
  r.den = denote_deepening(m, levels);
  for (auto& [lvl, d] : r.den.values) {
    if (d.empty()) continue;
    r.denoted = d.primes.front().side();
    r.den_level = lvl;
    break;
  }
  switch (r.op.kind) {
    case ObsKind::Zero:
    case ObsKind::One: {
      int o = r.op.kind == ObsKind::Zero ? 0 : 1;
      if (!r.denoted) r.verdict = Verdict::Inconclusive;
      else r.verdict = *r.denoted == o ? Verdict::Pass : Verdict::Fail;
      break;
    }
    case ObsKind::Bottom:
      // A stuck normal form is bottom by confluence, so any value refutes it.
      if (r.op.reason == BottomReason::Stuck) r.verdict = r.denoted ? Verdict::Fail : Verdict::Pass;
      else r.verdict = Verdict::Inconclusive;
      break;
  }
  return r;
}

// ---------------------------------------------------------------- combinators

namespace {

Type fun3(Type a, Type s) { return mk_fun(a, mk_fun(s, mk_fun(s, s))); }

TermP var(const std::string& x, Type t) { return mk_var(x, t); }

TermP app(const TermP& f, std::initializer_list<TermP> args) {
  return mk_apps(f, std::vector<TermP>(args));
}

}  // namespace

TermP mk_and() {
  static const TermP t = [] {
    Type b = bool_type(), v = void_type();
    TermP x = var("x", b), y = var("y", b);
    return mk_lam("x", b, mk_lam("y", b, app(mk_const(Const::Pcase, {v, v, b}), {x, y, mk_one()})));
  }();
  return t;
}

TermP mk_if0(Type s) {
  Type b = bool_type(), v = void_type();
  TermP x = var("x", b), y = var("y", s), z = var("z", s);
  TermP body = app(mk_const(Const::Case, {v, v, s}), {x, mk_lam("w", v, y), mk_lam("w", v, z)});
  return mk_lam("x", b, mk_lam("y", s, mk_lam("z", s, body)));
}

TermP mk_not() {
  static const TermP t = [] {
    Type b = bool_type();
    return mk_lam("x", b, app(mk_if0(b), {var("x", b), mk_one(), mk_zero()}));
  }();
  return t;
}

TermP mk_or() {
  static const TermP t = [] {
    Type b = bool_type();
    TermP x = var("x", b), y = var("y", b);
    TermP body = mk_app(mk_not(), app(mk_and(), {mk_app(mk_not(), x), mk_app(mk_not(), y)}));
    return mk_lam("x", b, mk_lam("y", b, body));
  }();
  return t;
}

TermP mk_pcf() {
  static const TermP t = [] {
    Type b = bool_type();
    TermP x = var("x", b), y = var("y", b), z = var("z", b);
    TermP left = app(mk_or(), {app(mk_and(), {x, y}), app(mk_and(), {mk_app(mk_not(), x), z})});
    TermP body = app(mk_or(), {left, app(mk_and(), {y, z})});
    return mk_lam("x", b, mk_lam("y", b, mk_lam("z", b, body)));
  }();
  return t;
}

TermP mk_sb(Type s, Type t) {
  Type st = mk_sum(s, t);
  TermP body = app(mk_const(Const::Case, {s, t, bool_type()}),
                   {var("x", st), mk_lam("y", s, mk_zero()), mk_lam("y", t, mk_one())});
  return mk_lam("x", st, body);
}

std::map<std::string, TermP> std_combinators() {
  Type b = bool_type(), v = void_type();
  return {{"and", mk_and()},          {"or", mk_or()},          {"not", mk_not()},
          {"if0", mk_if0(b)},         {"pcf", mk_pcf()},        {"sb", mk_sb(v, v)},
          {"out0", mk_out0(v, v)},    {"out1", mk_out1(v, v)}};
}

// ---------------------------------------------------------------- definability

namespace {

class Definer {
 public:
  TermP models(const std::vector<ConditionedPrime>& x, Type t, int n) {
    if (x.empty()) return mk_omega(t);
    switch (t.head()) {
      case Head::Void: return mk_omega(t);
      case Head::Sum: return models_sum(x, t, n);
      case Head::Prod: return models_prod(x, t, n);
      case Head::Fun: return models_fun(x, t, n);
    }
    return mk_omega(t);
  }

  TermP eq(const AntiChain& x, Type t, int n) {
    Type b = bool_type();
    if (x.empty() || t.head() == Head::Void) return mk_lam(fresh(), t, mk_zero());
    switch (t.head()) {
      case Head::Sum: {
        int side = x.front().side();
        AntiChain y;
        for (auto& a : x)
          if (a.kind() == PKind::SumIn) y.push_back(a.inner());
        Type inner = side == 0 ? t.left() : t.right(), other = side == 0 ? t.right() : t.left();
        TermP m = eq(y, inner, n - 1);
        TermP reject = mk_lam(fresh(), other, mk_one());
        std::string xv = fresh();
        TermP body = app(mk_const(Const::Case, {t.left(), t.right(), b}),
                         {var(xv, t), side == 0 ? m : reject, side == 0 ? reject : m});
        return mk_lam(xv, t, body);
      }
      case Head::Prod: {
        AntiChain x0, x1;
        for (auto& a : x) (a.side() == 0 ? x0 : x1).push_back(a.inner());
        TermP n0 = eq(x0, t.left(), n - 1), n1 = eq(x1, t.right(), n - 1);
        std::string xv = fresh();
        TermP xt = var(xv, t);
        TermP f = mk_app(n0, mk_app(mk_const(Const::Fst, {t.left(), t.right()}), xt));
        TermP s = mk_app(n1, mk_app(mk_const(Const::Snd, {t.left(), t.right()}), xt));
        return mk_lam(xv, t, app(mk_and(), {f, s}));
      }
      case Head::Fun: {
        std::string xv = fresh();
        TermP xt = var(xv, t);
        std::vector<TermP> tests;
        // The argument Y decides containment. Inconsistency can show at any
        // larger argument, so the maximal ones above Y are tested as well.
        std::vector<Element> tops = maximal_elements(ps_level(t.left(), std::max(n - 1, 0)));
        for (auto& a : x) {
          TermP qi = eq({a.result()}, t.right(), n - 1);
          tests.push_back(mk_app(qi, mk_app(xt, closure_term(a.args(), t.left(), n - 1))));
          for (auto& e : tops)
            if (e.primes != a.args() && std::all_of(a.args().begin(), a.args().end(),
                                                    [&](const Prime& y) { return e.contains(y); }))
              tests.push_back(mk_app(qi, mk_app(xt, closure_term(maximal(e.primes), t.left(), n - 1))));
        }
        return mk_lam(xv, t, chain(mk_and(), tests));
      }
      case Head::Void: break;
    }
    return mk_lam(fresh(), t, mk_zero());
  }

 private:
  std::string fresh() { return "x" + std::to_string(counter_++); }

  TermP closure_term(const AntiChain& y, Type t, int n) {
    std::vector<ConditionedPrime> ys;
    for (auto& b : y) ys.push_back({mk_zero(), b});
    return models(ys, t, n);
  }

  static std::vector<Element> maximal_elements(const SystemP& host) {
    std::vector<Element> out;
    for (auto& e : elements(*host))
      if (is_maximal(e, *host)) out.push_back(e);
    return out;
  }

  // op c1 (op c2 (... cj)), right nested.
  static TermP chain(const TermP& op, const std::vector<TermP>& cs) {
    TermP acc = cs.back();
    for (std::size_t i = cs.size() - 1; i-- > 0;) acc = app(op, {cs[i], acc});
    return acc;
  }

  static void add_condition(std::vector<TermP>& set, const TermP& c) {
    for (auto& d : set)
      if (alpha_equal(d, c)) return;
    set.push_back(c);
  }

  TermP models_sum(const std::vector<ConditionedPrime>& x, Type t, int n) {
    std::vector<TermP> cs[2];
    std::vector<ConditionedPrime> xs[2];
    for (auto& cp : x) {
      int s = cp.prime.side();
      add_condition(cs[s], cp.condition);
      if (cp.prime.kind() == PKind::SumIn) xs[s].push_back({cp.condition, cp.prime.inner()});
    }
    TermP m0 = cs[0].empty() ? mk_one() : chain(mk_or(), cs[0]);
    TermP m1 = cs[1].empty() ? mk_one() : chain(mk_or(), cs[1]);
    TermP n0 = models(xs[0], t.left(), n - 1), n1 = models(xs[1], t.right(), n - 1);
    TermP if0 = mk_if0(t);
    TermP inner = app(if0, {m1, mk_in(1, t.left(), t.right(), n1), mk_omega(t)});
    return app(if0, {m0, mk_in(0, t.left(), t.right(), n0), inner});
  }

  TermP models_prod(const std::vector<ConditionedPrime>& x, Type t, int n) {
    std::vector<ConditionedPrime> xs[2];
    for (auto& cp : x) xs[cp.prime.side()].push_back({cp.condition, cp.prime.inner()});
    return mk_pair(models(xs[0], t.left(), n - 1), models(xs[1], t.right(), n - 1));
  }

  TermP models_fun(const std::vector<ConditionedPrime>& x, Type t, int n) {
    std::string xv = fresh();
    TermP xt = var(xv, t.left());
    std::vector<ConditionedPrime> z;
    for (auto& cp : x) {
      TermP ni = eq(cp.prime.args(), t.left(), n - 1);
      z.push_back({app(mk_and(), {cp.condition, mk_app(ni, xt)}), cp.prime.result()});
    }
    return mk_lam(xv, t.left(), models(z, t.right(), n - 1));
  }

  std::size_t counter_ = 0;
};

}  // namespace

TermP models_term(const std::vector<ConditionedPrime>& x, Type t, int n) { return Definer().models(x, t, n); }

TermP eq_term(const AntiChain& x, Type t, int n) { return Definer().eq(x, t, n); }

TermP definable_term(const Element& d, Type t, int n) {
  SystemP host = ps_level(t, n);
  if (!is_element(d.primes, *host))
    fail(ErrorKind::InvalidElement, to_string(d) + " is not an element of P_" + std::to_string(n));
  std::vector<ConditionedPrime> x;
  for (auto& a : maximal(d.primes)) x.push_back({mk_zero(), a});
  return models_term(x, t, n);
}

bool definability_check(const Element& d, Type t, int n, int slack) {
  TermP m = definable_term(d, t, n);
  for (int lvl = n; lvl <= n + slack; ++lvl) {
    Element v = denote_view(m, {}, lvl, n);
    if (v == d) return true;
    if (!v.subset_of(d)) return false;
  }
  return false;
}

namespace {

bool incon(const Element& d, const AntiChain& x) {
  for (auto& a : d.primes)
    for (auto& b : x)
      if (!con(a, b)) return true;
  return false;
}

}  // namespace

bool eq_contract_check(const AntiChain& x, Type t, int n, int slack) {
  TermP m = eq_term(x, t, n);
  std::vector<Element> tables;
  for (int lvl = n + 2; lvl <= n + 2 + slack; ++lvl) tables.push_back(denote_view(m, {}, lvl, n + 2));
  for (auto& d : elements(*ps_level(t, n))) {
    Element want;
    if (std::all_of(x.begin(), x.end(), [&](const Prime& a) { return d.contains(a); }))
      want.primes = {p_sum_tag(0)};
    else if (incon(d, x))
      want.primes = {p_sum_tag(1)};
    bool hit = want.empty();
    for (auto& g : tables) {
      Element got = apply_element(g, d);
      if (!got.subset_of(want)) return false;
      if (got == want) hit = true;
    }
    if (!hit) return false;
  }
  return true;
}

// ---------------------------------------------------------------- interdefinability

namespace {

struct PcaseBuilder {
  std::set<std::string> reserved;  // names in the image of theta

  std::string name(const std::string& base) const { return fresh_name(base, reserved); }

  Type bar(const TypeExprP& s, const PcaseTheta& theta) const {
    TypeExprP e = s;
    for (auto& v : free_type_vars(s)) {
      auto it = theta.find(v);
      if (it == theta.end()) fail(ErrorKind::UnboundTypeVar, "no pcase variable for type variable " + v);
      e = type_subst(e, v, to_expr(it->second->type.right().left()));
    }
    return to_graph(e);
  }

  TermP build(const TypeExprP& s, const PcaseTheta& theta) {
    Type b = bool_type();
    switch (s->kind) {
      case TKind::Var: {
        auto it = theta.find(s->name);
        if (it == theta.end()) fail(ErrorKind::UnboundTypeVar, "no pcase variable for type variable " + s->name);
        return it->second;
      }
      case TKind::Void: return mk_omega(fun3(b, void_type()));
      case TKind::Sum: {
        Type st = bar(s, theta);
        Type l = st.left(), r = st.right();
        std::string xn = name("x"), yn = name("y"), zn = name("z");
        TermP x = var(xn, b), y = var(yn, st), z = var(zn, st);
        TermP p0 = build(s->l, theta), p1 = build(s->r, theta);
        TermP test = app(mk_pcf(), {x, mk_app(mk_sb(l, r), y), mk_app(mk_sb(l, r), z)});
        TermP o0 = mk_out0(l, r), o1 = mk_out1(l, r);
        TermP left = mk_in(0, l, r, app(p0, {x, mk_app(o0, y), mk_app(o0, z)}));
        TermP right = mk_in(1, l, r, app(p1, {x, mk_app(o1, y), mk_app(o1, z)}));
        TermP body = app(mk_if0(st), {test, left, right});
        return mk_lam(xn, b, mk_lam(yn, st, mk_lam(zn, st, body)));
      }
      case TKind::Prod: {
        Type st = bar(s, theta);
        Type l = st.left(), r = st.right();
        std::string xn = name("x"), yn = name("y"), zn = name("z");
        TermP x = var(xn, b), y = var(yn, st), z = var(zn, st);
        TermP fst = mk_const(Const::Fst, {l, r}), snd = mk_const(Const::Snd, {l, r});
        TermP p0 = build(s->l, theta), p1 = build(s->r, theta);
        TermP body = mk_pair(app(p0, {x, mk_app(fst, y), mk_app(fst, z)}),
                             app(p1, {x, mk_app(snd, y), mk_app(snd, z)}));
        return mk_lam(xn, b, mk_lam(yn, st, mk_lam(zn, st, body)));
      }
      case TKind::Fun: {
        Type st = bar(s, theta);
        std::string xn = name("x"), yn = name("y"), zn = name("z"), wn = name("w");
        TermP x = var(xn, b), y = var(yn, st), z = var(zn, st), w = var(wn, st.left());
        TermP body = app(build(s->r, theta), {x, mk_app(y, w), mk_app(z, w)});
        return mk_lam(xn, b, mk_lam(yn, st, mk_lam(zn, st, mk_lam(wn, st.left(), body))));
      }
      case TKind::Mu: {
        Type pi = fun3(b, bar(s, theta));
        std::string pn;
        for (int k = 0;; ++k) {
          pn = "p" + std::to_string(k);
          if (!reserved.count(pn)) break;
        }
        PcaseTheta inner = theta;
        inner[s->name] = var(pn, pi);
        reserved.insert(pn);
        TermP body = build(s->l, inner);
        reserved.erase(pn);
        return mk_app(mk_Y(pi), mk_lam(pn, pi, body));
      }
    }
    fail(ErrorKind::UnboundTypeVar, "unexpected type expression");
  }
};

Element intersect(const Element& a, const Element& b) {
  Element out;
  std::set_intersection(a.primes.begin(), a.primes.end(), b.primes.begin(), b.primes.end(),
                        std::back_inserter(out.primes));
  return out;
}

Element spcase(const Element& c, const Element& a, const Element& b) {
  if (c.empty()) return intersect(a, b);
  return c.primes.front().side() == 0 ? a : b;
}

}  // namespace

TermP pcase_from_and(const TypeExprP& sigma, const PcaseTheta& theta) {
  PcaseBuilder pb;
  for (auto& [t, v] : theta) pb.reserved.insert(v->name);
  return pb.build(sigma, theta);
}

bool app_level_check(const TermP& f, Type s, int n, int slack) {
  if (f->type != fun3(bool_type(), s)) fail(ErrorKind::TypeMismatch, "expected bool -> s -> s -> s");
  std::vector<Element> cs = elements(*ps_level(bool_type(), n));
  std::vector<Element> as = elements(*ps_level(s, n));
  for (int lvl = n; lvl <= n + slack; ++lvl) {
    Element g = denote_view(f, {}, lvl, n + 3);
    bool ok = true;
    for (auto& c : cs) {
      Element gc = apply_element(g, c);
      for (auto& a : as) {
        Element ga = apply_element(gc, a);
        for (auto& b : as) {
          if (!projection(spcase(c, a, b), n).subset_of(apply_element(ga, b))) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

TermP case_from_pcase(Type s, Type t, Type r) {
  Type st = mk_sum(s, t), fs = mk_fun(s, r), ft = mk_fun(t, r);
  TermP x = var("x", st), y = var("y", fs), z = var("z", ft);
  TermP pc = mk_const(Const::Pcase, {s, t, r});
  TermP yes = app(pc, {x, mk_app(y, mk_app(mk_out0(s, t), x)), mk_omega(r)});
  TermP no = app(pc, {x, mk_omega(r), mk_app(z, mk_app(mk_out1(s, t), x))});
  return mk_lam("x", st, mk_lam("y", fs, mk_lam("z", ft, app(pc, {x, yes, no}))));
}

bool case_from_pcase_check(Type s, Type t, Type r, int level, int slack) {
  TermP m = case_from_pcase(s, t, r);
  Element want = const_denote(Const::Case, {s, t, r}, level);
  for (int lvl = level; lvl <= level + slack; ++lvl) {
    Element v = denote_view(m, {}, lvl, level);
    if (v == want) return true;
    if (!v.subset_of(want)) return false;
  }
  return false;
}

bool case_from_pcase_check(int level) {
  Type v = void_type(), b = bool_type();
  return case_from_pcase_check(v, v, b, level) && case_from_pcase_check(b, b, b, level);
}

// ---------------------------------------------------------------- preorder

namespace {

void free_vars(const TermP& m, std::set<std::string>& bound, std::map<std::string, Type>& out) {
  switch (m->kind) {
    case TmKind::Var:
      if (!bound.count(m->name)) out.emplace(m->name, m->ann);
      return;
    case TmKind::Const: return;
    case TmKind::App:
      free_vars(m->a, bound, out);
      free_vars(m->b, bound, out);
      return;
    case TmKind::Lam: {
      bool had = bound.count(m->name) != 0;
      bound.insert(m->name);
      free_vars(m->a, bound, out);
      if (!had) bound.erase(m->name);
      return;
    }
  }
}

std::map<std::string, Type> typed_free_vars(const TermP& m) {
  std::set<std::string> bound;
  std::map<std::string, Type> out;
  free_vars(m, bound, out);
  return out;
}

TermP close_over(const TermP& m, const std::map<std::string, Type>& fv) {
  TermP out = m;
  for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = mk_lam(it->first, it->second, out);
  return out;
}

// Both terms closed over the union of their free variables.
std::pair<TermP, TermP> close_both(const TermP& m, const TermP& n) {
  auto fv = typed_free_vars(m);
  for (auto& kv : typed_free_vars(n)) fv.insert(kv);
  return {close_over(m, fv), close_over(n, fv)};
}

TermP sep_context(const Prime& a, Type t, int n) {
  return models_term({{mk_zero(), p_fun({a}, p_sum_tag(0))}}, mk_fun(t, bool_type()), n + 1);
}

}  // namespace

TermP close_term(const TermP& m) { return close_over(m, typed_free_vars(m)); }

std::vector<TermP> probe_contexts(Type t, int n, std::size_t cap) {
  std::vector<TermP> out;
  const PrimeSet& ps = ps_level(t, n)->primes();
  for (auto& a : ps) {
    if (out.size() >= cap) return out;
    out.push_back(sep_context(a, t, n));
  }
  for (auto& a : ps) {
    if (out.size() >= cap) return out;
    out.push_back(eq_term({a}, t, n));
  }
  return out;
}

ProbeReport preorder_probe(const TermP& m, const TermP& n, const std::vector<TermP>& contexts, std::size_t budget,
                           int max_level) {
  if (m->type != n->type) fail(ErrorKind::TypeMismatch, "probed terms have different types");
  auto [cm, cn] = close_both(m, n);
  ProbeReport r;
  for (int lvl = 0; lvl <= max_level; ++lvl)
    r.den_leq.emplace_back(lvl, denote(cm, {}, lvl).subset_of(denote(cn, {}, lvl)));
  for (auto& c : contexts) {
    if (c->type != mk_fun(cm->type, bool_type())) continue;
    ++r.tried;
    ObsValue om = op_eval(mk_app(c, cm), budget);
    if (om.kind == ObsKind::Bottom) continue;
    ObsValue on = op_eval(mk_app(c, cn), budget);
    if (on.kind != om.kind) {
      r.distinguished = true;
      r.context = c;
      r.on_m = om;
      r.on_n = on;
      return r;
    }
  }
  return r;
}

DistinguishReport distinguish(const TermP& m, const TermP& n, int level, std::size_t budget, int slack) {
  if (m->type != n->type) fail(ErrorKind::TypeMismatch, "distinguished terms have different types");
  auto [cm, cn] = close_both(m, n);
  Element dm = denote_view(cm, {}, level + slack, level);
  Element dn = denote_view(cn, {}, level + slack, level);
  std::vector<Prime> cands;
  for (auto& a : dm.primes)
    if (!dn.contains(a)) cands.push_back(a);
  std::stable_sort(cands.begin(), cands.end(), [](const Prime& a, const Prime& b) { return a.level() < b.level(); });
  DistinguishReport r;
  for (auto& a : cands) {
    r.found_prime = true;
    r.a = a;
    r.context = sep_context(a, cm->type, level);
    r.on_m = op_eval(mk_app(r.context, cm), budget);
    r.on_n = op_eval(mk_app(r.context, cn), budget);
    r.success = r.on_m.kind == ObsKind::Zero && r.on_n.kind != ObsKind::Zero;
    if (r.success) break;
  }
  return r;
}

}  // namespace pcase
