#include "pcase/rewrite.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "pcase/error.hpp"

namespace pcase {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Beta: return "beta";
    case Rule::Case0: return "case0";
    case Rule::Case1: return "case1";
    case Rule::Pair1: return "pair1";
    case Rule::Pair2: return "pair2";
    case Rule::Pcase0: return "pcase0";
    case Rule::Pcase1: return "pcase1";
    case Rule::Pcase00: return "pcase00";
    case Rule::Pcase11: return "pcase11";
    case Rule::PcaseXX: return "pcaseXX";
    case Rule::PcaseArrow: return "pcaseArrow";
  }
  return "?";
}

std::string to_string(const Redex& r) { return std::string(rule_name(r.rule)) + " @ " + path_string(r.occurrence); }

namespace {

// Matches `m` as constant c applied to exactly n arguments.
bool const_app(const TermP& m, Const c, std::size_t n, std::vector<TermP>* args = nullptr) {
  std::vector<TermP> tmp;
  std::vector<TermP>& as = args ? *args : tmp;
  TermP h = spine(m, as);
  return h->kind == TmKind::Const && h->c == c && as.size() == n;
}

}  // namespace

std::vector<Rule> rules_at(const TermP& node) {
  std::vector<Rule> out;
  if (node->kind != TmKind::App) return out;
  if (node->a->kind == TmKind::Lam) {
    out.push_back(Rule::Beta);
    return out;
  }
  std::vector<TermP> args;
  TermP h = spine(node, args);
  if (h->kind != TmKind::Const) return out;
  switch (h->c) {
    case Const::Case:
      if (args.size() == 3) {
        if (const_app(args[0], Const::In0, 1)) out.push_back(Rule::Case0);
        if (const_app(args[0], Const::In1, 1)) out.push_back(Rule::Case1);
      }
      break;
    case Const::Fst:
      if (args.size() == 1 && const_app(args[0], Const::Pair, 2)) out.push_back(Rule::Pair1);
      break;
    case Const::Snd:
      if (args.size() == 1 && const_app(args[0], Const::Pair, 2)) out.push_back(Rule::Pair2);
      break;
    case Const::Pcase:
      if (args.size() == 3) {
        if (const_app(args[0], Const::In0, 1)) out.push_back(Rule::Pcase0);
        if (const_app(args[0], Const::In1, 1)) out.push_back(Rule::Pcase1);
        if (const_app(args[1], Const::In0, 1) && const_app(args[2], Const::In0, 1)) out.push_back(Rule::Pcase00);
        if (const_app(args[1], Const::In1, 1) && const_app(args[2], Const::In1, 1)) out.push_back(Rule::Pcase11);
        if (const_app(args[1], Const::Pair, 2) && const_app(args[2], Const::Pair, 2)) out.push_back(Rule::PcaseXX);
      } else if (args.size() == 4) {
        out.push_back(Rule::PcaseArrow);
      }
      break;
    default: break;
  }
  return out;
}

namespace {

void collect_redexes(const TermP& m, Path& p, std::vector<Redex>& out) {
  for (Rule r : rules_at(m)) out.push_back({p, r});
  if (m->kind == TmKind::App) {
    p.push_back(0);
    collect_redexes(m->a, p, out);
    p.back() = 1;
    collect_redexes(m->b, p, out);
    p.pop_back();
  } else if (m->kind == TmKind::Lam) {
    p.push_back(0);
    collect_redexes(m->a, p, out);
    p.pop_back();
  }
}

bool normal_rec(const TermP& m) {
  if (!rules_at(m).empty()) return false;
  if (m->kind == TmKind::App) return normal_rec(m->a) && normal_rec(m->b);
  if (m->kind == TmKind::Lam) return normal_rec(m->a);
  return true;
}

}  // namespace

std::vector<Redex> find_redexes(const TermP& m) {
  std::vector<Redex> out;
  Path p;
  collect_redexes(m, p, out);
  return out;
}

bool is_normal(const TermP& m) { return normal_rec(m); }

TermP contract(const TermP& node, Rule r) {
  auto rules = rules_at(node);
  if (std::find(rules.begin(), rules.end(), r) == rules.end())
    fail(ErrorKind::NotARedex, std::string(rule_name(r)) + " does not match " + to_string(node));
  std::vector<TermP> args;
  TermP h = spine(node, args);
  auto inner = [](const TermP& m) { return m->b; };  // argument of in0/in1 M
  switch (r) {
    case Rule::Beta: return substitute(node->a->a, node->a->name, node->b);
    case Rule::Case0: return mk_app(args[1], inner(args[0]));
    case Rule::Case1: return mk_app(args[2], inner(args[0]));
    case Rule::Pair1: return args[0]->a->b;
    case Rule::Pair2: return args[0]->b;
    case Rule::Pcase0: return args[1];
    case Rule::Pcase1: return args[2];
    case Rule::Pcase00:
    case Rule::Pcase11: {
      Type s = h->targs[0], t = h->targs[1], rho = h->targs[2];
      int side = r == Rule::Pcase00 ? 0 : 1;
      Type part = side == 0 ? rho.left() : rho.right();
      TermP inner_case = mk_apps(mk_const(Const::Pcase, {s, t, part}), {args[0], inner(args[1]), inner(args[2])});
      return mk_in(side, rho.left(), rho.right(), inner_case);
    }
    case Rule::PcaseXX: {
      Type s = h->targs[0], t = h->targs[1], rho = h->targs[2];
      TermP y1 = args[1]->a->b, y2 = args[1]->b, z1 = args[2]->a->b, z2 = args[2]->b;
      TermP c1 = mk_apps(mk_const(Const::Pcase, {s, t, rho.left()}), {args[0], y1, z1});
      TermP c2 = mk_apps(mk_const(Const::Pcase, {s, t, rho.right()}), {args[0], y2, z2});
      return mk_pair(c1, c2);
    }
    case Rule::PcaseArrow: {
      Type s = h->targs[0], t = h->targs[1], rho = h->targs[2];
      TermP w = args[3];
      return mk_apps(mk_const(Const::Pcase, {s, t, rho.right()}), {args[0], mk_app(args[1], w), mk_app(args[2], w)});
    }
  }
  return node;
}

TermP reduce_at(const TermP& m, const Redex& r) {
  TermP node = subterm_at(m, r.occurrence);
  return replace_at(m, r.occurrence, contract(node, r.rule));
}

namespace {

bool pcase3(const TermP& m) { return const_app(m, Const::Pcase, 3); }

std::optional<Redex> fair_search(const TermP& m, Path& p, std::size_t round) {
  auto rules = rules_at(m);
  if (!rules.empty()) return Redex{p, rules.front()};
  if (m->kind == TmKind::Lam) {
    p.push_back(0);
    auto r = fair_search(m->a, p, round);
    p.pop_back();
    return r;
  }
  if (m->kind != TmKind::App) return std::nullopt;
  if (pcase3(m)) {
    // The three arguments of a stuck pcase take turns going first.
    static const Path offsets[3] = {{0, 0, 1}, {0, 1}, {1}};
    const TermP subs[3] = {m->a->a->b, m->a->b, m->b};
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t i = (round + k) % 3;
      std::size_t base = p.size();
      p.insert(p.end(), offsets[i].begin(), offsets[i].end());
      auto r = fair_search(subs[i], p, round);
      p.resize(base);
      if (r) return r;
    }
    return std::nullopt;
  }
  p.push_back(0);
  auto r = fair_search(m->a, p, round);
  if (!r) {
    p.back() = 1;
    r = fair_search(m->b, p, round);
  }
  p.pop_back();
  return r;
}

std::optional<Redex> leftmost_search(const TermP& m, Path& p) {
  auto rules = rules_at(m);
  if (!rules.empty()) return Redex{p, rules.front()};
  if (m->kind == TmKind::Lam) {
    p.push_back(0);
    auto r = leftmost_search(m->a, p);
    p.pop_back();
    return r;
  }
  if (m->kind != TmKind::App) return std::nullopt;
  p.push_back(0);
  auto r = leftmost_search(m->a, p);
  if (!r) {
    p.back() = 1;
    r = leftmost_search(m->b, p);
  }
  p.pop_back();
  return r;
}

}  // namespace

std::optional<Redex> choose_redex(const TermP& m, Strategy s, std::size_t round) {
  Path p;
  return s == Strategy::Fair ? fair_search(m, p, round) : leftmost_search(m, p);
}

NormalizeResult normalize(const TermP& m, Strategy s, std::size_t budget, bool keep_trace) {
  NormalizeResult res;
  res.term = m;
  res.trace.start = m;
  res.status = NormStatus::BudgetExhausted;
  for (std::size_t step = 0;; ++step) {
    auto r = choose_redex(res.term, s, step);
    if (!r) {
      res.status = NormStatus::Normal;
      break;
    }
    if (step >= budget) break;
    res.term = reduce_at(res.term, *r);
    ++res.steps;
    if (keep_trace) res.trace.steps.push_back({*r, res.term});
  }
  return res;
}

// ---------------------------------------------------------------- phi

namespace {

std::atomic<std::size_t> g_phi_bits{1u << 18};

std::size_t bit_length(const BigNat& v) { return v == 0 ? 0 : boost::multiprecision::msb(v) + 1; }

BigNat checked_pow(const BigNat& base, const BigNat& exp) {
  if (base <= 1 || exp == 0) return exp == 0 ? BigNat(1) : base;
  std::size_t cap = g_phi_bits.load();
  // The result has more than (bits(base) - 1) * exp bits.
  if (exp > BigNat(cap) || (bit_length(base) - 1) * exp.convert_to<std::size_t>() > cap)
    fail(ErrorKind::ResourceLimit, "phi value exceeds " + std::to_string(cap) + " bits");
  return boost::multiprecision::pow(base, exp.convert_to<unsigned>());
}

BigNat checked(BigNat v) {
  if (bit_length(v) > g_phi_bits.load())
    fail(ErrorKind::ResourceLimit, "phi value exceeds " + std::to_string(g_phi_bits.load()) + " bits");
  return v;
}

BigNat phi_rec(const TermP& m) {
  switch (m->kind) {
    case TmKind::Var:
    case TmKind::Const: return 2;
    case TmKind::Lam: fail(ErrorKind::NotApplicative, "abstraction in " + to_string(m));
    case TmKind::App: break;
  }
  std::vector<TermP> args;
  TermP h = spine(m, args);
  if (h->kind == TmKind::Const) {
    std::size_t k = args.size();
    switch (h->c) {
      case Const::In0:
      case Const::In1:
        if (k == 1) return checked(2 * phi_rec(args[0]));
        break;
      case Const::Pcase:
        if (k <= 3) {
          BigNat v = 2;
          for (auto& a : args) v = checked(v * phi_rec(a));
          return v;
        }
        break;
      case Const::Pair:
        if (k <= 2) {
          BigNat v = 2;
          for (auto& a : args) v += phi_rec(a);
          return checked(v);
        }
        break;
      default: break;
    }
  }
  return checked_pow(phi_rec(m->a), phi_rec(m->b));
}

}  // namespace

void set_phi_bit_cap(std::size_t bits) { g_phi_bits.store(bits); }
std::size_t phi_bit_cap() { return g_phi_bits.load(); }

bool is_applicative(const TermP& m) {
  switch (m->kind) {
    case TmKind::Lam: return false;
    case TmKind::App: return is_applicative(m->a) && is_applicative(m->b);
    default: return true;
  }
}

BigNat phi_measure(const TermP& m) { return phi_rec(m); }

TermP normalize_applicative(const TermP& m) {
  if (!is_applicative(m)) fail(ErrorKind::NotApplicative, to_string(m));
  TermP cur = m;
  while (auto r = choose_redex(cur, Strategy::Leftmost, 0)) cur = reduce_at(cur, *r);
  return cur;
}

// ---------------------------------------------------------------- critical pairs

std::vector<CriticalPair> critical_pair_suite() {
  Type b = bool_type();
  Type bb = mk_fun(b, b);
  auto var = [](const char* n, Type t) { return mk_var(n, t); };
  auto pc = [&](Type rho, TermP x, TermP y, TermP z) {
    return mk_apps(mk_const(Const::Pcase, {b, b, rho}), {x, y, z});
  };
  TermP x = var("x", b);
  TermP in0x = mk_in(0, b, b, x), in1x = mk_in(1, b, b, x);
  Type sum = mk_sum(b, b), prod = mk_prod(b, b);
  TermP y = var("y", b), z = var("z", b);
  TermP y1 = var("y1", b), y2 = var("y2", b), z1 = var("z1", b), z2 = var("z2", b);
  TermP fy = var("y", bb), fz = var("z", bb), w = var("w", b);

  struct Spec {
    std::string name;
    TermP overlap;
    Redex left, right;
    TermP expected;
  };
  std::vector<Spec> specs;
  for (int side = 0; side < 2; ++side) {
    TermP scrut = side == 0 ? in0x : in1x;
    Rule sel = side == 0 ? Rule::Pcase0 : Rule::Pcase1;
    for (int tag = 0; tag < 2; ++tag) {
      Rule push = tag == 0 ? Rule::Pcase00 : Rule::Pcase11;
      TermP ty = mk_in(tag, b, b, y), tz = mk_in(tag, b, b, z);
      specs.push_back({"pcase" + std::to_string(side) + "/" + rule_name(push), pc(sum, scrut, ty, tz),
                       {{}, sel}, {{}, push}, side == 0 ? ty : tz});
    }
  }
  for (int side = 0; side < 2; ++side) {
    TermP scrut = side == 0 ? in0x : in1x;
    Rule sel = side == 0 ? Rule::Pcase0 : Rule::Pcase1;
    TermP py = mk_pair(y1, y2), pz = mk_pair(z1, z2);
    specs.push_back({"pcase" + std::to_string(side) + "/pcaseXX", pc(prod, scrut, py, pz), {{}, sel},
                     {{}, Rule::PcaseXX}, side == 0 ? py : pz});
  }
  for (int side = 0; side < 2; ++side) {
    TermP scrut = side == 0 ? in0x : in1x;
    Rule sel = side == 0 ? Rule::Pcase0 : Rule::Pcase1;
    specs.push_back({"pcase" + std::to_string(side) + "/pcaseArrow", mk_app(pc(bb, scrut, fy, fz), w), {{0}, sel},
                     {{}, Rule::PcaseArrow}, mk_app(side == 0 ? fy : fz, w)});
  }

  std::vector<CriticalPair> out;
  for (auto& s : specs) {
    CriticalPair cp;
    cp.name = s.name;
    cp.overlap = s.overlap;
    cp.left = reduce_at(s.overlap, s.left);
    cp.right = reduce_at(s.overlap, s.right);
    TermP l = normalize_applicative(cp.left);
    TermP r = normalize_applicative(cp.right);
    cp.joined = l;
    cp.converged = alpha_equal(l, r) && alpha_equal(l, s.expected);
    out.push_back(cp);
  }
  return out;
}

// ---------------------------------------------------------------- confluence probe

namespace {

using TermSet = std::unordered_set<TermP, AlphaHash, AlphaEq>;

TermSet reachable(const TermP& m, std::size_t budget) {
  TermSet seen{m};
  std::deque<TermP> queue{m};
  while (!queue.empty() && seen.size() < budget) {
    TermP cur = queue.front();
    queue.pop_front();
    for (auto& r : find_redexes(cur)) {
      TermP n = reduce_at(cur, r);
      if (seen.insert(n).second) queue.push_back(n);
      if (seen.size() >= budget) break;
    }
  }
  return seen;
}

}  // namespace

ConfluenceReport confluence_probe(const TermP& m, std::size_t fan, std::size_t depth, std::size_t rejoin_budget) {
  ConfluenceReport rep;
  std::vector<TermP> reducts{m};
  TermSet seen{m};
  std::vector<TermP> frontier{m};
  for (std::size_t d = 0; d < depth && reducts.size() < fan; ++d) {
    std::vector<TermP> next;
    for (auto& t : frontier) {
      for (auto& r : find_redexes(t)) {
        TermP n = reduce_at(t, r);
        if (seen.insert(n).second) {
          reducts.push_back(n);
          next.push_back(n);
          if (reducts.size() >= fan) break;
        }
      }
      if (reducts.size() >= fan) break;
    }
    frontier = std::move(next);
  }
  rep.reducts = reducts.size();

  std::vector<TermSet> reach;
  std::vector<std::optional<TermP>> nf;
  for (auto& t : reducts) {
    reach.push_back(reachable(t, rejoin_budget));
    auto res = normalize(t, Strategy::Fair, rejoin_budget);
    nf.push_back(res.status == NormStatus::Normal ? std::optional<TermP>(res.term) : std::nullopt);
  }
  for (std::size_t i = 0; i < reducts.size(); ++i) {
    for (std::size_t j = i + 1; j < reducts.size(); ++j) {
      ++rep.pairs;
      if (nf[i] && nf[j]) {
        if (alpha_equal(*nf[i], *nf[j])) {
          ++rep.rejoined;
        } else {
          rep.violation = true;
          rep.unresolved.emplace_back(reducts[i], reducts[j]);
        }
        continue;
      }
      bool met = reach[i].count(reducts[j]) || reach[j].count(reducts[i]);
      for (auto it = reach[i].begin(); !met && it != reach[i].end(); ++it) met = reach[j].count(*it) > 0;
      if (met) {
        ++rep.rejoined;
      } else {
        rep.unresolved.emplace_back(reducts[i], reducts[j]);
      }
    }
  }
  std::sort(rep.unresolved.begin(), rep.unresolved.end(), [](const auto& a, const auto& b) {
    return std::make_pair(to_string(a.first), to_string(a.second)) <
           std::make_pair(to_string(b.first), to_string(b.second));
  });
  return rep;
}

}  // namespace pcase
