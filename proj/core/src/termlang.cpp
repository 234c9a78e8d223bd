#include "pcase/termlang.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "lexer.hpp"
#include "pcase/error.hpp"

namespace pcase {

const char* const_name(Const c) {
  switch (c) {
    case Const::In0: return "in0";
    case Const::In1: return "in1";
    case Const::Case: return "case";
    case Const::Pcase: return "pcase";
    case Const::Pair: return "pair";
    case Const::Fst: return "fst";
    case Const::Snd: return "snd";
    case Const::Omega: return "bot";
  }
  return "?";
}

int const_targ_arity(Const c) {
  switch (c) {
    case Const::Case:
    case Const::Pcase: return 3;
    case Const::Omega: return 1;
    default: return 2;
  }
}

int const_arity(Const c) {
  switch (c) {
    case Const::In0:
    case Const::In1:
    case Const::Fst:
    case Const::Snd: return 1;
    case Const::Pair: return 2;
    case Const::Case:
    case Const::Pcase: return 3;
    case Const::Omega: return 0;
  }
  return 0;
}

Type ctype(Const c, const std::vector<Type>& ta) {
  if (static_cast<int>(ta.size()) != const_targ_arity(c))
    fail(ErrorKind::TypeMismatch, std::string(const_name(c)) + " takes " +
                                      std::to_string(const_targ_arity(c)) + " type arguments");
  switch (c) {
    case Const::In0: return mk_fun(ta[0], mk_sum(ta[0], ta[1]));
    case Const::In1: return mk_fun(ta[1], mk_sum(ta[0], ta[1]));
    case Const::Case:
      return mk_fun(mk_sum(ta[0], ta[1]),
                    mk_fun(mk_fun(ta[0], ta[2]), mk_fun(mk_fun(ta[1], ta[2]), ta[2])));
    case Const::Pcase: return mk_fun(mk_sum(ta[0], ta[1]), mk_fun(ta[2], mk_fun(ta[2], ta[2])));
    case Const::Pair: return mk_fun(ta[0], mk_fun(ta[1], mk_prod(ta[0], ta[1])));
    case Const::Fst: return mk_fun(mk_prod(ta[0], ta[1]), ta[0]);
    case Const::Snd: return mk_fun(mk_prod(ta[0], ta[1]), ta[1]);
    case Const::Omega: return ta[0];
  }
  return void_type();
}

// ---------------------------------------------------------------- construction

namespace {

const NameList& empty_names() {
  static const NameList e = std::make_shared<const std::vector<std::string>>();
  return e;
}

NameList merge_names(const NameList& x, const NameList& y) {
  if (y->empty() || x == y) return x;
  if (x->empty()) return y;
  auto out = std::make_shared<std::vector<std::string>>();
  std::set_union(x->begin(), x->end(), y->begin(), y->end(), std::back_inserter(*out));
  if (out->size() == x->size()) return x;
  if (out->size() == y->size()) return y;
  return out;
}

const char* head_name(Type t) {
  switch (t.head()) {
    case Head::Void: return "void";
    case Head::Sum: return "sum";
    case Head::Prod: return "product";
    case Head::Fun: return "function";
  }
  return "?";
}

}  // namespace

TermP mk_var(const std::string& name, Type t) {
  auto m = std::make_shared<Term>();
  m->kind = TmKind::Var;
  m->name = name;
  m->ann = t;
  m->type = t;
  m->fv = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{name});
  return m;
}

TermP mk_lam(const std::string& name, Type t, TermP body) {
  auto m = std::make_shared<Term>();
  m->kind = TmKind::Lam;
  m->name = name;
  m->ann = t;
  m->type = mk_fun(t, body->type);
  m->size = body->size + 1;
  const auto& bf = *body->fv;
  if (std::binary_search(bf.begin(), bf.end(), name)) {
    auto out = std::make_shared<std::vector<std::string>>();
    for (auto& v : bf)
      if (v != name) out->push_back(v);
    m->fv = out;
  } else {
    m->fv = body->fv;
  }
  m->a = std::move(body);
  return m;
}

TermP mk_app(TermP f, TermP a) {
  Type ft = f->type;
  if (ft.head() != Head::Fun)
    fail(ErrorKind::TypeMismatch, "applying a term of " + std::string(head_name(ft)) + " type " +
                                      to_string(ft) + ": " + to_string(f));
  if (ft.left() != a->type)
    fail(ErrorKind::TypeMismatch, "argument of type " + to_string(a->type) + " where " +
                                      to_string(ft.left()) + " expected: " + to_string(a));
  auto m = std::make_shared<Term>();
  m->kind = TmKind::App;
  m->type = ft.right();
  m->size = f->size + a->size + 1;
  m->fv = merge_names(f->fv, a->fv);
  m->a = std::move(f);
  m->b = std::move(a);
  return m;
}

TermP mk_apps(TermP f, const std::vector<TermP>& args) {
  for (auto& a : args) f = mk_app(f, a);
  return f;
}

TermP mk_const(Const c, std::vector<Type> targs) {
  auto m = std::make_shared<Term>();
  m->kind = TmKind::Const;
  m->c = c;
  m->type = ctype(c, targs);
  m->targs = std::move(targs);
  m->fv = empty_names();
  return m;
}

TermP mk_omega(Type t) { return mk_const(Const::Omega, {t}); }

TermP mk_zero() {
  static const TermP z = mk_app(mk_const(Const::In0, {void_type(), void_type()}), mk_omega(void_type()));
  return z;
}

TermP mk_one() {
  static const TermP o = mk_app(mk_const(Const::In1, {void_type(), void_type()}), mk_omega(void_type()));
  return o;
}

TermP mk_in(int side, Type s, Type t, TermP m) {
  return mk_app(mk_const(side == 0 ? Const::In0 : Const::In1, {s, t}), std::move(m));
}

TermP mk_pair(TermP m, TermP n) {
  Type s = m->type, t = n->type;
  return mk_app(mk_app(mk_const(Const::Pair, {s, t}), std::move(m)), std::move(n));
}

bool is_omega(const TermP& m) { return m->kind == TmKind::Const && m->c == Const::Omega; }

bool has_free(const TermP& m, const std::string& x) {
  return std::binary_search(m->fv->begin(), m->fv->end(), x);
}

TermP spine(const TermP& m, std::vector<TermP>& args) {
  args.clear();
  TermP h = m;
  while (h->kind == TmKind::App) {
    args.push_back(h->b);
    h = h->a;
  }
  std::reverse(args.begin(), args.end());
  return h;
}

// ---------------------------------------------------------------- printing

namespace {

bool is_bool_literal(const TermP& m, Const which) {
  if (m->kind != TmKind::App) return false;
  const TermP& f = m->a;
  return f->kind == TmKind::Const && f->c == which && f->targs[0] == void_type() &&
         f->targs[1] == void_type() && is_omega(m->b) && m->b->targs[0] == void_type();
}

std::string targ_list(const TermP& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c->targs.size(); ++i) {
    if (i) s += ", ";
    s += to_string(c->targs[i]);
  }
  return s + "]";
}

// ctx: 0 term, 1 function position, 2 argument position
std::string print(const TermP& m, bool types, int ctx) {
  switch (m->kind) {
    case TmKind::Var: return m->name;
    case TmKind::Const:
      if (types || m->c == Const::Omega) return std::string(const_name(m->c)) + targ_list(m);
      return const_name(m->c);
    case TmKind::Lam: {
      std::string s = "\\" + m->name + ":" + to_string(m->ann) + ". " + print(m->a, types, 0);
      return ctx > 0 ? "(" + s + ")" : s;
    }
    case TmKind::App: {
      if (is_bool_literal(m, Const::In0)) return "@0";
      if (is_bool_literal(m, Const::In1)) return "@1";
      const TermP& f = m->a;
      if (f->kind == TmKind::App && f->a->kind == TmKind::Const && f->a->c == Const::Pair && !types)
        return "(" + print(f->b, types, 0) + ", " + print(m->b, types, 0) + ")";
      std::string s = print(f, types, 1) + " " + print(m->b, types, 2);
      return ctx > 1 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const TermP& m, bool with_types) { return print(m, with_types, 0); }

// ---------------------------------------------------------------- alpha

namespace {

using Binders = std::vector<std::pair<std::string, std::string>>;

bool alpha_rec(const TermP& m, const TermP& n, Binders& env) {
  if (m == n && env.empty()) return true;
  if (m->kind != n->kind) return false;
  switch (m->kind) {
    case TmKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool lm = it->first == m->name, ln = it->second == n->name;
        if (lm || ln) return lm && ln;
      }
      return m->name == n->name && m->ann == n->ann;
    }
    case TmKind::Const: return m->c == n->c && m->targs == n->targs;
    case TmKind::Lam: {
      if (m->ann != n->ann) return false;
      env.emplace_back(m->name, n->name);
      bool r = alpha_rec(m->a, n->a, env);
      env.pop_back();
      return r;
    }
    case TmKind::App: return m->size == n->size && alpha_rec(m->a, n->a, env) && alpha_rec(m->b, n->b, env);
  }
  return false;
}

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t hash_rec(const TermP& m, std::vector<std::string>& env) {
  switch (m->kind) {
    case TmKind::Var:
      for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == m->name) return mix(1, env.size() - i);
      return mix(2, std::hash<std::string>()(m->name));
    case TmKind::Const: {
      std::size_t h = mix(3, static_cast<std::size_t>(m->c));
      for (auto t : m->targs) h = mix(h, static_cast<std::size_t>(t.id()));
      return h;
    }
    case TmKind::Lam: {
      env.push_back(m->name);
      std::size_t h = mix(mix(4, static_cast<std::size_t>(m->ann.id())), hash_rec(m->a, env));
      env.pop_back();
      return h;
    }
    case TmKind::App: return mix(mix(5, hash_rec(m->a, env)), hash_rec(m->b, env));
  }
  return 0;
}

}  // namespace

bool alpha_equal(const TermP& m, const TermP& n) {
  Binders env;
  return alpha_rec(m, n, env);
}

std::size_t alpha_hash(const TermP& m) {
  std::vector<std::string> env;
  return hash_rec(m, env);
}

// ---------------------------------------------------------------- substitution

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  for (int i = 1;; ++i) {
    std::string n = stem + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

namespace {

void collect_names(const TermP& m, std::set<std::string>& out) {
  switch (m->kind) {
    case TmKind::Var: out.insert(m->name); return;
    case TmKind::Const: return;
    case TmKind::Lam:
      out.insert(m->name);
      collect_names(m->a, out);
      return;
    case TmKind::App:
      collect_names(m->a, out);
      collect_names(m->b, out);
      return;
  }
}

TermP subst_rec(const TermP& m, const std::string& x, const TermP& n) {
  if (!has_free(m, x)) return m;
  switch (m->kind) {
    case TmKind::Var:
      if (m->ann != n->type)
        fail(ErrorKind::TypeMismatch, "substituting " + to_string(n) + " : " + to_string(n->type) +
                                          " for " + x + " : " + to_string(m->ann));
      return n;
    case TmKind::Const: return m;
    case TmKind::App: {
      TermP f = subst_rec(m->a, x, n);
      TermP a = subst_rec(m->b, x, n);
      return mk_app(f, a);
    }
    case TmKind::Lam: {
      if (has_free(n, m->name)) {
        std::set<std::string> avoid(n->fv->begin(), n->fv->end());
        collect_names(m->a, avoid);
        avoid.insert(x);
        std::string y = fresh_name(m->name, avoid);
        TermP body = subst_rec(m->a, m->name, mk_var(y, m->ann));
        return mk_lam(y, m->ann, subst_rec(body, x, n));
      }
      return mk_lam(m->name, m->ann, subst_rec(m->a, x, n));
    }
  }
  return m;
}

}  // namespace

std::set<std::string> bound_and_free_names(const TermP& m) {
  std::set<std::string> out;
  collect_names(m, out);
  return out;
}

TermP substitute(const TermP& m, const std::string& x, const TermP& n) { return subst_rec(m, x, n); }

// ---------------------------------------------------------------- prefix order

namespace {

bool leq_rec(const TermP& m, const TermP& n, Binders& env) {
  if (is_omega(m)) return m->type == n->type;
  if (m->kind != n->kind) return false;
  switch (m->kind) {
    case TmKind::Var:
    case TmKind::Const: return alpha_rec(m, n, env);
    case TmKind::Lam: {
      if (m->ann != n->ann) return false;
      env.emplace_back(m->name, n->name);
      bool r = leq_rec(m->a, n->a, env);
      env.pop_back();
      return r;
    }
    case TmKind::App: return leq_rec(m->a, n->a, env) && leq_rec(m->b, n->b, env);
  }
  return false;
}

}  // namespace

bool omega_leq(const TermP& m, const TermP& n) {
  Binders env;
  return leq_rec(m, n, env);
}

TermP omega_join(const TermP& m, const TermP& n) {
  if (m->type != n->type) fail(ErrorKind::TypeMismatch, "joining terms of different types");
  if (is_omega(m)) return n;
  if (is_omega(n)) return m;
  auto clash = [&]() -> TermP {
    fail(ErrorKind::NoUpperBound, to_string(m) + " and " + to_string(n) + " clash");
  };
  if (m->kind != n->kind) return clash();
  switch (m->kind) {
    case TmKind::Var:
    case TmKind::Const:
      if (!alpha_equal(m, n)) return clash();
      return m;
    case TmKind::Lam: {
      if (m->ann != n->ann) return clash();
      TermP nb = n->a;
      std::string x = m->name;
      if (n->name != x) {
        if (has_free(n->a, x)) {
          std::set<std::string> avoid = bound_and_free_names(m->a);
          for (auto& v : bound_and_free_names(n->a)) avoid.insert(v);
          x = fresh_name(x, avoid);
          TermP mb = substitute(m->a, m->name, mk_var(x, m->ann));
          nb = substitute(n->a, n->name, mk_var(x, n->ann));
          return mk_lam(x, m->ann, omega_join(mb, nb));
        }
        nb = substitute(n->a, n->name, mk_var(x, n->ann));
      }
      return mk_lam(x, m->ann, omega_join(m->a, nb));
    }
    case TmKind::App: return mk_app(omega_join(m->a, n->a), omega_join(m->b, n->b));
  }
  return clash();
}

// ---------------------------------------------------------------- paths

TermP subterm_at(const TermP& m, const Path& p) {
  TermP cur = m;
  for (int i : p) {
    if (cur->kind == TmKind::App) {
      cur = i == 0 ? cur->a : cur->b;
    } else if (cur->kind == TmKind::Lam && i == 0) {
      cur = cur->a;
    } else {
      fail(ErrorKind::NotARedex, "invalid occurrence " + path_string(p));
    }
  }
  return cur;
}

namespace {

TermP replace_rec(const TermP& m, const Path& p, std::size_t i, const TermP& n) {
  if (i == p.size()) return n;
  if (m->kind == TmKind::App) {
    if (p[i] == 0) return mk_app(replace_rec(m->a, p, i + 1, n), m->b);
    return mk_app(m->a, replace_rec(m->b, p, i + 1, n));
  }
  if (m->kind == TmKind::Lam && p[i] == 0) return mk_lam(m->name, m->ann, replace_rec(m->a, p, i + 1, n));
  fail(ErrorKind::NotARedex, "invalid occurrence " + path_string(p));
}

}  // namespace

TermP replace_at(const TermP& m, const Path& p, const TermP& n) { return replace_rec(m, p, 0, n); }

std::string path_string(const Path& p) {
  if (p.empty()) return "root";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(p[i]);
  }
  return s;
}

Type typecheck(const TermP& m) {
  switch (m->kind) {
    case TmKind::Var: return m->ann;
    case TmKind::Const: return ctype(m->c, m->targs);
    case TmKind::Lam: return mk_fun(m->ann, typecheck(m->a));
    case TmKind::App: {
      Type f = typecheck(m->a), a = typecheck(m->b);
      if (f.head() != Head::Fun || f.left() != a) fail(ErrorKind::TypeMismatch, "ill-typed application");
      return f.right();
    }
  }
  return void_type();
}

// ---------------------------------------------------------------- builders

TermP mk_Y(Type sigma) {
  TypeExprP se = to_expr(sigma);
  Type xt = mk_mu([&](const TypeExprP& t) { return t_fun(t, se); });
  Type yt = mk_fun(sigma, sigma);
  TermP y = mk_var("y", yt);
  TermP x = mk_var("x", xt);
  TermP inner = mk_lam("x", xt, mk_app(y, mk_app(x, x)));
  return mk_lam("y", yt, mk_app(inner, inner));
}

TermP mk_out0(Type s, Type t) {
  Type st = mk_sum(s, t);
  TermP x = mk_var("x", st);
  TermP body = mk_apps(mk_const(Const::Case, {s, t, s}),
                       {x, mk_lam("y", s, mk_var("y", s)), mk_omega(mk_fun(t, s))});
  return mk_lam("x", st, body);
}

TermP mk_out1(Type s, Type t) {
  Type st = mk_sum(s, t);
  TermP x = mk_var("x", st);
  TermP body = mk_apps(mk_const(Const::Case, {s, t, t}),
                       {x, mk_omega(mk_fun(s, t)), mk_lam("y", t, mk_var("y", t))});
  return mk_lam("x", st, body);
}

// ---------------------------------------------------------------- parsing

namespace {

std::shared_ptr<Syntax> syn(SynKind k, std::size_t pos) {
  auto s = std::make_shared<Syntax>();
  s->kind = k;
  s->pos = pos;
  return s;
}

std::optional<Const> const_of(const std::string& w) {
  static const std::map<std::string, Const> table = {
      {"in0", Const::In0}, {"in1", Const::In1}, {"case", Const::Case}, {"pcase", Const::Pcase},
      {"pair", Const::Pair}, {"fst", Const::Fst}, {"snd", Const::Snd}, {"bot", Const::Omega}};
  auto it = table.find(w);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

SyntaxP app_syn(SyntaxP f, SyntaxP a) {
  auto s = syn(SynKind::App, f->pos);
  s->a = std::move(f);
  s->b = std::move(a);
  return s;
}

SyntaxP const_syn(Const c, std::vector<TypeExprP> targs, std::size_t pos) {
  auto s = syn(SynKind::Const, pos);
  s->c = c;
  s->targs = std::move(targs);
  return s;
}

class TermParser {
 public:
  explicit TermParser(std::string_view src) : ts_(src) {}

  SyntaxP parse_all() {
    SyntaxP t = term();
    if (!ts_.at_end()) ts_.error("trailing input after term");
    return t;
  }

 private:
  detail::TokenStream ts_;

  SyntaxP term() {
    if (ts_.is_sym("\\")) return lambda();
    return app();
  }

  SyntaxP lambda() {
    std::size_t pos = ts_.next().pos;
    std::string x = ts_.expect_ident();
    ts_.expect_sym(":");
    TypeExprP t = detail::parse_type_from(ts_);
    ts_.expect_sym(".");
    auto s = syn(SynKind::Lam, pos);
    s->name = x;
    s->ann = t;
    s->a = term();
    return s;
  }

  bool atom_start() const {
    if (ts_.peek().kind == detail::Tok::Ident) return true;
    return ts_.is_sym("(") || ts_.is_sym("@0") || ts_.is_sym("@1") || ts_.is_sym("\\");
  }

  SyntaxP app() {
    SyntaxP f = atom();
    while (atom_start()) {
      if (ts_.is_sym("\\")) {
        f = app_syn(f, lambda());
        break;
      }
      f = app_syn(f, atom());
    }
    return f;
  }

  SyntaxP atom() {
    const detail::Token& t = ts_.peek();
    std::size_t pos = t.pos;
    if (ts_.is_sym("@0") || ts_.is_sym("@1")) {
      Const c = t.text == "@0" ? Const::In0 : Const::In1;
      ts_.next();
      return app_syn(const_syn(c, {t_void(), t_void()}, pos), const_syn(Const::Omega, {t_void()}, pos));
    }
    if (ts_.is_sym("(")) {
      ts_.next();
      SyntaxP m = term();
      if (ts_.is_sym(",")) {
        ts_.next();
        SyntaxP n = term();
        ts_.expect_sym(")");
        return app_syn(app_syn(const_syn(Const::Pair, {}, pos), m), n);
      }
      ts_.expect_sym(")");
      return m;
    }
    if (t.kind == detail::Tok::Ident) {
      std::string w = ts_.next().text;
      if (auto c = const_of(w)) {
        std::vector<TypeExprP> targs;
        if (ts_.is_sym("[")) {
          ts_.next();
          targs.push_back(detail::parse_type_from(ts_));
          while (ts_.is_sym(",")) {
            ts_.next();
            targs.push_back(detail::parse_type_from(ts_));
          }
          ts_.expect_sym("]");
          if (static_cast<int>(targs.size()) != const_targ_arity(*c))
            fail(ErrorKind::SyntaxError, std::string(const_name(*c)) + " takes " +
                                             std::to_string(const_targ_arity(*c)) +
                                             " type arguments, at position " + std::to_string(pos));
        }
        return const_syn(*c, std::move(targs), pos);
      }
      auto s = syn(SynKind::Var, pos);
      s->name = w;
      return s;
    }
    ts_.error("expected a term");
  }
};

// ---------------------------------------------------------------- elaboration

// Type templates over the constant's type parameters.
struct Tpl;
using TplP = std::shared_ptr<const Tpl>;
struct Tpl {
  int var = -1;  // parameter index, or -1 for a constructor node
  Head h = Head::Void;
  TplP l, r;
};

TplP tv(int i) {
  auto t = std::make_shared<Tpl>();
  t->var = i;
  return t;
}
TplP tc(Head h, TplP l, TplP r) {
  auto t = std::make_shared<Tpl>();
  t->h = h;
  t->l = std::move(l);
  t->r = std::move(r);
  return t;
}
TplP tfun(TplP l, TplP r) { return tc(Head::Fun, std::move(l), std::move(r)); }

// Template of the constant; bot applied to k arguments gets k+1 fresh parameters.
TplP const_template(Const c, int nargs, int& nvars) {
  TplP s = tv(0), t = tv(1), r = tv(2);
  switch (c) {
    case Const::In0: nvars = 2; return tfun(s, tc(Head::Sum, s, t));
    case Const::In1: nvars = 2; return tfun(t, tc(Head::Sum, s, t));
    case Const::Case:
      nvars = 3;
      return tfun(tc(Head::Sum, s, t), tfun(tfun(s, r), tfun(tfun(t, r), r)));
    case Const::Pcase: nvars = 3; return tfun(tc(Head::Sum, s, t), tfun(r, tfun(r, r)));
    case Const::Pair: nvars = 2; return tfun(s, tfun(t, tc(Head::Prod, s, t)));
    case Const::Fst: nvars = 2; return tfun(tc(Head::Prod, s, t), s);
    case Const::Snd: nvars = 2; return tfun(tc(Head::Prod, s, t), t);
    case Const::Omega: {
      nvars = nargs + 1;
      TplP res = tv(nargs);
      for (int i = nargs; i-- > 0;) res = tfun(tv(i), res);
      return res;
    }
  }
  nvars = 0;
  return nullptr;
}

using Binding = std::vector<std::optional<Type>>;

bool tpl_bound(const TplP& t, const Binding& b) {
  if (t->var >= 0) return b[t->var].has_value();
  if (t->h == Head::Void) return true;
  return tpl_bound(t->l, b) && tpl_bound(t->r, b);
}

Type tpl_inst(const TplP& t, const Binding& b) {
  if (t->var >= 0) return *b[t->var];
  switch (t->h) {
    case Head::Sum: return mk_sum(tpl_inst(t->l, b), tpl_inst(t->r, b));
    case Head::Prod: return mk_prod(tpl_inst(t->l, b), tpl_inst(t->r, b));
    case Head::Fun: return mk_fun(tpl_inst(t->l, b), tpl_inst(t->r, b));
    default: return void_type();
  }
}

bool tpl_match(const TplP& t, Type g, Binding& b) {
  if (t->var >= 0) {
    if (b[t->var]) return *b[t->var] == g;
    b[t->var] = g;
    return true;
  }
  if (g.head() != t->h) return false;
  if (t->h == Head::Void) return true;
  return tpl_match(t->l, g.left(), b) && tpl_match(t->r, g.right(), b);
}

std::string at(std::size_t pos) { return " at position " + std::to_string(pos); }

class Elaborator {
 public:
  TermP elab(const SyntaxP& s, const Context& ctx, std::optional<Type> expected) {
    switch (s->kind) {
      case SynKind::Var: {
        auto it = ctx.find(s->name);
        if (it == ctx.end()) fail(ErrorKind::UnboundVariable, s->name + at(s->pos));
        return check(mk_var(s->name, it->second), expected, s->pos);
      }
      case SynKind::Lam: {
        Type t = closed_graph(s->ann, s->pos);
        std::optional<Type> body_expected;
        if (expected) {
          if (expected->head() != Head::Fun || expected->left() != t)
            fail(ErrorKind::TypeMismatch, "expected " + to_string(*expected) + at(s->pos) +
                                              ", found an abstraction over " + to_string(t));
          body_expected = expected->right();
        }
        Context inner = ctx;
        inner[s->name] = t;
        return check(mk_lam(s->name, t, elab(s->a, inner, body_expected)), expected, s->pos);
      }
      case SynKind::App:
      case SynKind::Const: return elab_spine(s, ctx, expected);
    }
    return nullptr;
  }

 private:
  static Type closed_graph(const TypeExprP& t, std::size_t pos) {
    if (!is_closed(t)) fail(ErrorKind::OpenType, "open type " + to_string(t) + at(pos));
    return to_graph(t);
  }

  static TermP check(TermP m, std::optional<Type> expected, std::size_t pos) {
    if (expected && m->type != *expected)
      fail(ErrorKind::TypeMismatch, "expected " + std::string(head_name(*expected)) + " type " +
                                        to_string(*expected) + at(pos) + ", found " + to_string(m->type));
    return m;
  }

  TermP elab_spine(const SyntaxP& s, const Context& ctx, std::optional<Type> expected) {
    std::vector<SyntaxP> args;
    SyntaxP h = s;
    while (h->kind == SynKind::App) {
      args.push_back(h->b);
      h = h->a;
    }
    std::reverse(args.begin(), args.end());

    if (h->kind == SynKind::Const && h->targs.empty()) return infer_const(h, args, ctx, expected, s->pos);

    TermP f;
    if (h->kind == SynKind::Const) {
      std::vector<Type> ta;
      for (auto& t : h->targs) ta.push_back(closed_graph(t, h->pos));
      f = mk_const(h->c, ta);
    } else {
      f = elab(h, ctx, std::nullopt);
    }
    for (auto& a : args) {
      if (f->type.head() != Head::Fun)
        fail(ErrorKind::TypeMismatch, "expected function type" + at(a->pos) + ", found " + to_string(f->type));
      f = mk_app(f, elab(a, ctx, f->type.left()));
    }
    return check(f, expected, s->pos);
  }

  TermP infer_const(const SyntaxP& h, const std::vector<SyntaxP>& args, const Context& ctx,
                    std::optional<Type> expected, std::size_t pos) {
    int nvars = 0;
    int nargs = static_cast<int>(args.size());
    TplP tpl = const_template(h->c, nargs, nvars);
    std::vector<TplP> params;
    TplP rest = tpl;
    while (static_cast<int>(params.size()) < nargs && rest->var < 0 && rest->h == Head::Fun) {
      params.push_back(rest->l);
      rest = rest->r;
    }
    int used = static_cast<int>(params.size());
    Binding b(nvars);
    std::vector<TermP> done(nargs);

    auto mismatch = [&](const std::string& what, std::size_t p) {
      fail(ErrorKind::TypeMismatch, what + at(p) + " for " + const_name(h->c));
    };

    // Arguments beyond the template's arrows constrain its result through their types.
    if (used < nargs) {
      std::vector<Type> extra;
      bool ok = expected.has_value();
      for (int i = used; i < nargs && ok; ++i) {
        try {
          done[i] = elab(args[i], ctx, std::nullopt);
          extra.push_back(done[i]->type);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::AmbiguousConstant) throw;
          ok = false;
        }
      }
      if (ok) {
        Type r = *expected;
        for (int i = static_cast<int>(extra.size()); i-- > 0;) r = mk_fun(extra[i], r);
        if (!tpl_match(rest, r, b)) mismatch("result type " + to_string(r) + " does not fit", pos);
      }
    } else if (expected) {
      if (!tpl_match(rest, *expected, b)) mismatch("expected " + to_string(*expected) + " does not fit", pos);
    }

    std::vector<bool> pending(used, true);
    int left = used;
    while (left > 0) {
      bool progress = false;
      for (int i = 0; i < used; ++i) {
        if (!pending[i]) continue;
        if (tpl_bound(params[i], b)) {
          done[i] = elab(args[i], ctx, tpl_inst(params[i], b));
        } else {
          try {
            done[i] = elab(args[i], ctx, std::nullopt);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::AmbiguousConstant) throw;
            continue;
          }
          if (!tpl_match(params[i], done[i]->type, b))
            mismatch("argument of type " + to_string(done[i]->type) + " does not fit", args[i]->pos);
        }
        pending[i] = false;
        --left;
        progress = true;
      }
      if (!progress) break;
    }
    for (int i = 0; i < nvars; ++i)
      if (!b[i] || left > 0)
        fail(ErrorKind::AmbiguousConstant,
             std::string("cannot infer type arguments of ") + const_name(h->c) + at(h->pos));

    std::vector<Type> ta;
    if (h->c == Const::Omega) {
      ta.push_back(tpl_inst(tpl, b));
    } else {
      for (int i = 0; i < nvars; ++i) ta.push_back(*b[i]);
    }
    TermP f = mk_const(h->c, ta);
    for (int i = 0; i < nargs; ++i) {
      if (!done[i]) {
        if (f->type.head() != Head::Fun) mismatch("too many arguments", args[i]->pos);
        done[i] = elab(args[i], ctx, f->type.left());
      }
      if (f->type.head() != Head::Fun) mismatch("too many arguments", args[i]->pos);
      if (f->type.left() != done[i]->type)
        mismatch("argument of type " + to_string(done[i]->type) + " where " + to_string(f->type.left()) +
                     " expected",
                 args[i]->pos);
      f = mk_app(f, done[i]);
    }
    return check(f, expected, pos);
  }
};

}  // namespace

SyntaxP parse_term(std::string_view text) { return TermParser(text).parse_all(); }

TermP elaborate(const SyntaxP& s, const Context& ctx) {
  Elaborator e;
  return e.elab(s, ctx, std::nullopt);
}

Type typecheck(const SyntaxP& s, const Context& ctx) { return elaborate(s, ctx)->type; }

TermP read_term(std::string_view text, const Context& ctx) { return elaborate(parse_term(text), ctx); }

}  // namespace pcase
