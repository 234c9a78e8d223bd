#include "pcase/approx.hpp"

#include <deque>
#include <random>
#include <unordered_set>

#include "pcase/error.hpp"
#include "pcase/rewrite.hpp"

namespace pcase {

namespace {

using TermSet = std::unordered_set<TermP, AlphaHash, AlphaEq>;

void require_normal(const TermP& a) {
  if (!is_normal(a)) fail(ErrorKind::NotNormalForm, to_string(a) + " is not a normal form");
}

bool has_pcase(const TermP& m) {
  switch (m->kind) {
    case TmKind::Const: return m->c == Const::Pcase;
    case TmKind::Lam: return has_pcase(m->a);
    case TmKind::App: return has_pcase(m->a) || has_pcase(m->b);
    default: return false;
  }
}

void var_types(const TermP& m, std::map<std::string, Type>& out, std::vector<std::string>& bound) {
  switch (m->kind) {
    case TmKind::Var:
      if (std::find(bound.begin(), bound.end(), m->name) == bound.end()) out[m->name] = m->ann;
      break;
    case TmKind::Lam:
      bound.push_back(m->name);
      var_types(m->a, out, bound);
      bound.pop_back();
      break;
    case TmKind::App:
      var_types(m->a, out, bound);
      var_types(m->b, out, bound);
      break;
    default: break;
  }
}

// The bottom environment plus a deterministic sample over the free variables.
std::vector<Environment> sample_envs(const TermP& a, int level) {
  std::map<std::string, Type> fv;
  std::vector<std::string> bound;
  var_types(a, fv, bound);
  std::vector<Environment> envs{Environment{}};
  if (fv.empty()) return envs;
  std::vector<std::pair<std::string, std::vector<Element>>> cands;
  for (auto& [x, t] : fv) {
    std::vector<Element> els;
    try {
      els = elements(*ps_level(t, level));
    } catch (const Error&) {
      els = {Element{}};
    }
    if (els.size() > 6) {
      std::vector<Element> pick;
      for (std::size_t i = 0; i < 6; ++i) pick.push_back(els[i * (els.size() - 1) / 5]);
      els = pick;
    }
    cands.emplace_back(x, els);
  }
  std::size_t total = 1;
  for (auto& c : cands) total = std::min<std::size_t>(total * c.second.size(), 1u << 20);
  std::mt19937 rng(0);
  std::size_t count = std::min<std::size_t>(total, 64);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t code = total <= 64 ? i : rng() % total;
    Environment e;
    for (auto& [x, els] : cands) {
      e = e.bind(x, els[code % els.size()]);
      code /= els.size();
    }
    envs.push_back(e);
  }
  return envs;
}

void subterm_paths(const TermP& t, Path& p, std::vector<Path>& out) {
  out.push_back(p);
  if (t->kind == TmKind::Lam) {
    p.push_back(0);
    subterm_paths(t->a, p, out);
    p.pop_back();
  } else if (t->kind == TmKind::App) {
    p.push_back(0);
    subterm_paths(t->a, p, out);
    p.back() = 1;
    subterm_paths(t->b, p, out);
    p.pop_back();
  }
}

}  // namespace

TermP omega_collapse(const TermP& n) {
  if (!rules_at(n).empty()) return mk_omega(n->type);
  switch (n->kind) {
    case TmKind::Lam: {
      TermP b = omega_collapse(n->a);
      return b == n->a ? n : mk_lam(n->name, n->ann, b);
    }
    case TmKind::App: {
      TermP f = omega_collapse(n->a), x = omega_collapse(n->b);
      return f == n->a && x == n->b ? n : mk_app(f, x);
    }
    default: return n;
  }
}

TermP cnf_prefix(const TermP& a) {
  std::vector<std::pair<std::string, Type>> binders;
  TermP body = a;
  while (body->kind == TmKind::Lam) {
    binders.emplace_back(body->name, body->ann);
    body = body->a;
  }
  std::vector<TermP> args;
  TermP head = spine(body, args);
  TermP out;
  bool cut = head->kind == TmKind::Lam || (head->kind == TmKind::Const && (head->c == Const::Omega || head->c == Const::Pcase));
  if (!cut) {
    for (auto& x : args) x = cnf_prefix(x);
    bool strict = head->kind == TmKind::Const && (head->c == Const::Fst || head->c == Const::Snd || head->c == Const::Case);
    if (strict && !args.empty() && is_omega(args[0])) cut = true;
    else out = mk_apps(head, args);
  }
  if (cut) return mk_omega(a->type);
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) out = mk_lam(it->first, it->second, out);
  return out;
}

bool is_cnf(const TermP& a) {
  require_normal(a);
  return alpha_equal(cnf_prefix(a), a);
}

bool is_mnf(const TermP& a, int level) {
  require_normal(a);
  if (is_omega(a)) return true;
  auto envs = sample_envs(a, level);
  std::vector<Element> vals;
  for (auto& e : envs) vals.push_back(denote(a, e, level));
  std::vector<Path> paths;
  Path p;
  subterm_paths(a, p, paths);
  for (auto& q : paths) {
    TermP sub = subterm_at(a, q);
    if (is_omega(sub)) continue;
    TermP b = replace_at(a, q, mk_omega(sub->type));
    bool same = true;
    for (std::size_t i = 0; i < envs.size() && same; ++i) same = denote(b, envs[i], level) == vals[i];
    if (same) return false;
  }
  return true;
}

const char* dap_status_name(DapStatus s) {
  switch (s) {
    case DapStatus::Proved: return "cnf-proved";
    case DapStatus::BudgetVerified: return "budget-verified";
    case DapStatus::Refuted: return "refuted";
  }
  return "?";
}

std::vector<TermP> reducts(const TermP& m, std::size_t cap) {
  std::vector<TermP> out;
  TermSet seen;
  std::deque<TermP> queue{m};
  seen.insert(m);
  while (!queue.empty() && out.size() < cap) {
    TermP t = queue.front();
    queue.pop_front();
    out.push_back(t);
    for (auto& r : find_redexes(t)) {
      TermP n = reduce_at(t, r);
      if (seen.insert(n).second) queue.push_back(n);
    }
  }
  return out;
}

DapResult direct_approx(const TermP& a, const TermP& m, std::size_t budget) {
  if (!omega_leq(a, m)) fail(ErrorKind::NotAPrefix, to_string(a) + " is not a prefix of " + to_string(m));
  if (is_cnf(a)) return {DapStatus::Proved, nullptr};
  for (auto& n : reducts(m, budget))
    if (!omega_leq(a, n)) return {DapStatus::Refuted, n};
  return {DapStatus::BudgetVerified, nullptr};
}

std::vector<TermP> prefixes(const TermP& t, std::size_t cap) {
  std::vector<TermP> out;
  if (is_omega(t)) return {t};
  switch (t->kind) {
    case TmKind::Var:
    case TmKind::Const: out.push_back(t); break;
    case TmKind::Lam:
      for (auto& b : prefixes(t->a, cap)) {
        if (out.size() >= cap) break;
        out.push_back(mk_lam(t->name, t->ann, b));
      }
      break;
    case TmKind::App: {
      auto fs = prefixes(t->a, cap), xs = prefixes(t->b, cap);
      for (auto& f : fs) {
        for (auto& x : xs) {
          if (out.size() >= cap) break;
          out.push_back(mk_app(f, x));
        }
        if (out.size() >= cap) break;
      }
      break;
    }
  }
  if (out.size() < cap) out.push_back(mk_omega(t->type));
  return out;
}

bool ApproxSet::contains(const TermP& a) const {
  for (auto& m : members)
    if (alpha_equal(m.term, a)) return true;
  return false;
}

ApproxSet approximations(const TermP& m, const ApproxBudget& budget) {
  ApproxSet set;
  TermSet seen;
  auto add = [&](const TermP& a, const TermP& n, DapStatus s) {
    if (set.members.size() >= budget.count_cap) return;
    if (seen.insert(a).second) set.members.push_back({a, n, s});
  };
  auto rs = reducts(m, budget.steps);
  for (auto& n : rs) {
    TermP c = omega_collapse(n);
    add(cnf_prefix(c), n, DapStatus::Proved);
    if (!is_cnf(c)) {
      auto d = direct_approx(c, n, budget.steps);
      if (d.status != DapStatus::Refuted) add(c, n, d.status);
    }
  }
  // close downward
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    ApproxMember mem = set.members[i];
    if (mem.term->size > budget.size_cap) continue;
    for (auto& p : prefixes(mem.term, budget.count_cap)) {
      DapStatus s = is_cnf(p) ? DapStatus::Proved : mem.status;
      add(p, mem.reduct, s);
    }
  }
  return set;
}

std::vector<TermP> cnf_approximations(const TermP& m, const ApproxBudget& budget) {
  TermSet seen;
  std::vector<TermP> out;
  for (auto& n : reducts(m, budget.steps)) {
    TermP c = cnf_prefix(omega_collapse(n));
    std::vector<TermP> ps = c->size <= budget.size_cap ? prefixes(c, budget.count_cap) : std::vector<TermP>{c};
    for (auto& p : ps)
      if (is_cnf(p) && seen.insert(p).second) out.push_back(p);
  }
  return out;
}

std::vector<TermP> mnf_approximations(const TermP& m, int level, const ApproxBudget& budget) {
  TermSet seen;
  std::vector<TermP> out;
  for (auto& n : reducts(m, budget.steps)) {
    TermP c = omega_collapse(n);
    std::vector<TermP> ps = c->size <= budget.size_cap ? prefixes(c, budget.count_cap) : std::vector<TermP>{c};
    for (auto& p : ps)
      if (seen.insert(p).second && is_mnf(p, level)) out.push_back(p);
  }
  return out;
}

Element approx_semantics(const TermP& m, const Environment& env, int n, const ApproxBudget& budget) {
  PrimeSet u;
  for (auto& a : approximations(m, budget).members) {
    Element d = denote(a.term, env, n);
    u.insert(u.end(), d.primes.begin(), d.primes.end());
  }
  canonicalize(u);
  return Element{u};
}

ApproxReport approximation_check(const TermP& m, const Environment& env, int n, const ApproxBudget& budget,
                                 int slack) {
  ApproxReport rep;
  auto set = approximations(m, budget);
  rep.members = set.members.size();
  PrimeSet u;
  for (auto& a : set.members) {
    Element d = denote(a.term, env, n);
    u.insert(u.end(), d.primes.begin(), d.primes.end());
  }
  canonicalize(u);
  rep.approx = Element{u};
  rep.exact = denote(m, env, n);
  rep.deep = denote_view(m, env, n + slack, n);
  rep.sound = rep.approx.subset_of(rep.exact);
  rep.deep_sound = rep.approx.subset_of(rep.deep);
  rep.equal = rep.approx == rep.exact;
  rep.sequential = !has_pcase(m);
  if (rep.sequential) {
    auto cs = cnf_approximations(m, budget);
    TermSet cset(cs.begin(), cs.end());
    for (auto& b : mnf_approximations(m, n, budget))
      if (!cset.count(b)) rep.b_in_c = false;
    for (auto& c : cs)
      if (!set.contains(c)) rep.c_in_a = false;
  }
  return rep;
}

}  // namespace pcase
