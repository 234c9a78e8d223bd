#include "pcase/denote.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <tuple>

#include "pcase/error.hpp"

namespace pcase {

namespace {

// Semantic values. Functions are closures with a level cap; finite elements
// are kept as generator primes with a cap.
enum class VKind { Bot, Inj, Pair, Fun, Elem };

struct Val;
using ValP = std::shared_ptr<const Val>;
using Fn = std::function<ValP(const ValP&)>;

struct Val {
  VKind k = VKind::Bot;
  int side = 0;
  ValP a, b;
  Fn fn;
  int cap = 0;
  PrimeSet gens;
};

const ValP& bot() {
  static const ValP b = std::make_shared<Val>();
  return b;
}

ValP mk_inj(int side, ValP v) {
  auto r = std::make_shared<Val>();
  r->k = VKind::Inj;
  r->side = side;
  r->a = std::move(v);
  return r;
}

ValP mk_pairv(ValP l, ValP r) {
  auto p = std::make_shared<Val>();
  p->k = VKind::Pair;
  p->a = std::move(l);
  p->b = std::move(r);
  return p;
}

ValP mk_fn(Fn f, int cap) {
  if (cap <= 1) return bot();
  auto r = std::make_shared<Val>();
  r->k = VKind::Fun;
  r->fn = std::move(f);
  r->cap = cap;
  return r;
}

ValP mk_elem(PrimeSet gens, int cap) {
  if (cap <= 0 || gens.empty()) return bot();
  auto r = std::make_shared<Val>();
  r->k = VKind::Elem;
  r->gens = std::move(gens);
  r->cap = cap;
  return r;
}

ValP restrict(const ValP& v, int m) {
  if (m <= 0) return bot();
  switch (v->k) {
    case VKind::Bot: return v;
    case VKind::Inj: return mk_inj(v->side, restrict(v->a, m - 1));
    case VKind::Pair: return mk_pairv(restrict(v->a, m - 1), restrict(v->b, m - 1));
    case VKind::Fun:
      if (v->cap <= m) return v;
      return mk_fn(v->fn, m);
    case VKind::Elem:
      if (v->cap <= m) return v;
      return mk_elem(v->gens, m);
  }
  return bot();
}

bool mem(const Prime& p, const ValP& v);

ValP vapply(const ValP& f, const ValP& e) {
  switch (f->k) {
    case VKind::Fun:
      if (f->cap <= 1) return bot();
      return restrict(f->fn(restrict(e, f->cap - 1)), f->cap - 1);
    case VKind::Elem: {
      if (f->cap <= 1) return bot();
      PrimeSet out;
      for (auto& g : f->gens) {
        if (g.kind() != PKind::Fun) continue;
        bool inside = true;
        for (auto& y : g.args())
          if (y.level() > f->cap - 1 || !mem(y, e)) {
            inside = false;
            break;
          }
        if (inside) out.push_back(g.result());
      }
      canonicalize(out);
      return mk_elem(std::move(out), f->cap - 1);
    }
    default: return bot();
  }
}

bool mem(const Prime& p, const ValP& v) {
  switch (v->k) {
    case VKind::Bot: return false;
    case VKind::Inj:
      if (p.kind() == PKind::SumTag) return p.side() == v->side;
      return p.kind() == PKind::SumIn && p.side() == v->side && mem(p.inner(), v->a);
    case VKind::Pair:
      return p.kind() == PKind::ProdIn && mem(p.inner(), p.side() ? v->b : v->a);
    case VKind::Fun:
      if (p.kind() != PKind::Fun || p.level() > v->cap) return false;
      return mem(p.result(), vapply(v, mk_elem(p.args(), v->cap - 1)));
    case VKind::Elem:
      if (p.level() > v->cap) return false;
      for (auto& g : v->gens)
        if (leq(p, g)) return true;
      return false;
  }
  return false;
}

bool is_funlike(const ValP& v) {
  return v->k == VKind::Fun || (v->k == VKind::Elem && v->gens[0].kind() == PKind::Fun);
}

ValP as_sum(const ValP& v) {
  if (v->k != VKind::Elem) return v;
  int side = v->gens[0].side();
  PrimeSet inner;
  for (auto& g : v->gens)
    if (g.kind() == PKind::SumIn) inner.push_back(g.inner());
  canonicalize(inner);
  return mk_inj(side, mk_elem(std::move(inner), v->cap - 1));
}

std::pair<ValP, ValP> as_pair(const ValP& v) {
  if (v->k == VKind::Pair) return {v->a, v->b};
  if (v->k != VKind::Elem) return {bot(), bot()};
  PrimeSet l, r;
  for (auto& g : v->gens)
    if (g.kind() == PKind::ProdIn) (g.side() ? r : l).push_back(g.inner());
  canonicalize(l);
  canonicalize(r);
  return {mk_elem(std::move(l), v->cap - 1), mk_elem(std::move(r), v->cap - 1)};
}

int cap_of(const ValP& v) { return v->cap; }

ValP meet(const ValP& x, const ValP& y) {
  if (x->k == VKind::Bot || y->k == VKind::Bot) return bot();
  if (is_funlike(x) || is_funlike(y)) {
    ValP a = x, b = y;
    return mk_fn([a, b](const ValP& e) { return meet(vapply(a, e), vapply(b, e)); }, std::min(cap_of(x), cap_of(y)));
  }
  bool sum = x->k == VKind::Inj || y->k == VKind::Inj ||
             (x->k == VKind::Elem && x->gens[0].kind() != PKind::ProdIn);
  if (sum) {
    ValP a = as_sum(x), b = as_sum(y);
    if (a->side != b->side) return bot();
    return mk_inj(a->side, meet(a->a, b->a));
  }
  auto [l1, r1] = as_pair(x);
  auto [l2, r2] = as_pair(y);
  return mk_pairv(meet(l1, l2), meet(r1, r2));
}

ValP s_case(const ValP& d, const ValP& f, const ValP& g) {
  if (d->k == VKind::Bot) return bot();
  ValP s = as_sum(d);
  return vapply(s->side ? g : f, s->a);
}

ValP s_pcase(const ValP& a, const ValP& b, const ValP& c) {
  if (a->k == VKind::Bot) return meet(b, c);
  return as_sum(a)->side ? c : b;
}

ValP const_value(Const c, int n) {
  switch (c) {
    case Const::Omega: return bot();
    case Const::In0:
    case Const::In1: {
      int side = c == Const::In1;
      return mk_fn([side](const ValP& d) { return mk_inj(side, d); }, n);
    }
    case Const::Pair:
      return mk_fn([n](const ValP& d) { return mk_fn([d](const ValP& e) { return mk_pairv(d, e); }, n); }, n);
    case Const::Fst: return mk_fn([](const ValP& v) { return as_pair(v).first; }, n);
    case Const::Snd: return mk_fn([](const ValP& v) { return as_pair(v).second; }, n);
    case Const::Case:
      return mk_fn(
          [n](const ValP& d) {
            return mk_fn([n, d](const ValP& f) { return mk_fn([d, f](const ValP& g) { return s_case(d, f, g); }, n); }, n);
          },
          n);
    case Const::Pcase:
      return mk_fn(
          [n](const ValP& a) {
            return mk_fn([n, a](const ValP& b) { return mk_fn([a, b](const ValP& c) { return s_pcase(a, b, c); }, n); },
                         n);
          },
          n);
  }
  return bot();
}

// Persistent environment chain.
struct EnvNode {
  std::string name;
  ValP val;
  std::shared_ptr<const EnvNode> next;
};
using Env = std::shared_ptr<const EnvNode>;

ValP lookup(const Env& env, const std::string& x) {
  for (const EnvNode* e = env.get(); e; e = e->next.get())
    if (e->name == x) return e->val;
  return bot();
}

Env extend(const Env& env, const std::string& x, ValP v) {
  return std::make_shared<const EnvNode>(EnvNode{x, std::move(v), env});
}

ValP eval(const TermP& m, const Env& env, int n) {
  switch (m->kind) {
    case TmKind::Var: return lookup(env, m->name);
    case TmKind::Const: return const_value(m->c, n);
    case TmKind::Lam: {
      TermP body = m->a;
      std::string x = m->name;
      return mk_fn([body, x, env, n](const ValP& d) { return eval(body, extend(env, x, d), n); }, n);
    }
    case TmKind::App: return vapply(eval(m->a, env, n), eval(m->b, env, n));
  }
  return bot();
}

Element to_element(const ValP& v, Type t, int n) {
  Element out;
  if (n <= 0 || v->k == VKind::Bot) return out;
  switch (t.head()) {
    case Head::Void: return out;
    case Head::Sum: {
      ValP s = as_sum(v);
      if (s->k != VKind::Inj) return out;
      out.primes.push_back(p_sum_tag(s->side));
      for (auto& p : to_element(s->a, s->side ? t.right() : t.left(), n - 1).primes)
        out.primes.push_back(p_sum_in(s->side, p));
      break;
    }
    case Head::Prod: {
      auto [l, r] = as_pair(v);
      for (auto& p : to_element(l, t.left(), n - 1).primes) out.primes.push_back(p_prod_in(0, p));
      for (auto& p : to_element(r, t.right(), n - 1).primes) out.primes.push_back(p_prod_in(1, p));
      break;
    }
    case Head::Fun: {
      if (ps_level(t.right(), n - 1)->size() == 0) return out;
      for (auto& x : antichains(*ps_level(t.left(), n - 1))) {
        Element r = to_element(vapply(v, mk_elem(x, n - 1)), t.right(), n - 1);
        for (auto& a : r.primes) out.primes.push_back(p_fun(x, a));
      }
      break;
    }
  }
  canonicalize(out.primes);
  return out;
}

Env to_env(const Environment& e, int n) {
  Env env;
  for (auto& [x, d] : e.bindings) env = extend(env, x, mk_elem(maximal(projection(d, n).primes), n));
  return env;
}

}  // namespace

Environment Environment::bind(const std::string& x, const Element& d) const {
  Environment e = *this;
  e.bindings[x] = d;
  return e;
}

Environment Environment::at_level(int n) const {
  Environment e;
  e.level = n;
  for (auto& [x, d] : bindings) e.bindings[x] = projection(d, n);
  return e;
}

Element const_denote(Const c, const std::vector<Type>& targs, int n) {
  using Key = std::tuple<int, std::vector<int>, int>;
  static std::mutex mu;
  static std::map<Key, Element> memo;
  std::vector<int> ids;
  for (auto& t : targs) ids.push_back(t.id());
  Key key{static_cast<int>(c), ids, n};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  Element d = to_element(const_value(c, n), ctype(c, targs), n);
  std::lock_guard<std::mutex> lock(mu);
  return memo.emplace(key, d).first->second;
}

Element denote(const TermP& m, const Environment& env, int n) { return denote_view(m, env, n, n); }

Element denote_view(const TermP& m, const Environment& env, int eval_level, int view_level) {
  return to_element(eval(m, to_env(env, eval_level), eval_level), m->type, view_level);
}

bool system_stable(Type t, int k) {
  if (t.head() == Head::Void) return true;
  if (k <= 0) return false;
  return system_stable(t.left(), k - 1) && system_stable(t.right(), k - 1);
}

bool is_maximal(const Element& d, const PrimeSystem& host) {
  for (auto& p : host.primes()) {
    if (d.contains(p)) continue;
    bool blocked = false;
    for (auto& q : d.primes)
      if (!con(p, q)) {
        blocked = true;
        break;
      }
    if (!blocked) return false;
  }
  return true;
}

DenotationReport denote_deepening(const TermP& m, int max_level, const Environment& env) {
  DenotationReport rep;
  for (int n = 0; n <= max_level; ++n) {
    rep.values.emplace_back(n, denote(m, env, n));
    if (n == 0) continue;
    const Element& prev = rep.values[n - 1].second;
    const Element& cur = rep.values[n].second;
    if (prev == cur && system_stable(m->type, n - 1) && is_maximal(cur, *ps_level(m->type, n))) {
      rep.stabilized = true;
      int first = n - 1;
      while (first > 0 && rep.values[first - 1].second == cur) --first;
      rep.level = first;
      for (int k = n + 1; k <= max_level; ++k) rep.values.emplace_back(k, cur);
      break;
    }
  }
  return rep;
}

bool substitution_check(const TermP& m, const std::string& x, const TermP& n, const Environment& env, int level) {
  Element lhs = denote(substitute(m, x, n), env, level);
  Element rhs = denote(m, env.bind(x, denote(n, env, level)), level);
  return lhs == rhs;
}

}  // namespace pcase
