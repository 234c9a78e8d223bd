#include "pcase/typesys.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <mutex>
#include <unordered_map>

#include "lexer.hpp"
#include "pcase/error.hpp"

namespace pcase {

// ---------------------------------------------------------------- expressions

namespace {

TypeExprP make(TKind k, std::string name, TypeExprP l, TypeExprP r) {
  return std::make_shared<const TypeExpr>(TypeExpr{k, std::move(name), std::move(l), std::move(r)});
}

}  // namespace

TypeExprP t_void() {
  static const TypeExprP v = make(TKind::Void, "", nullptr, nullptr);
  return v;
}
TypeExprP t_bool() { return t_sum(t_void(), t_void()); }
TypeExprP t_var(std::string name) { return make(TKind::Var, std::move(name), nullptr, nullptr); }
TypeExprP t_sum(TypeExprP l, TypeExprP r) { return make(TKind::Sum, "", std::move(l), std::move(r)); }
TypeExprP t_prod(TypeExprP l, TypeExprP r) { return make(TKind::Prod, "", std::move(l), std::move(r)); }
TypeExprP t_fun(TypeExprP l, TypeExprP r) { return make(TKind::Fun, "", std::move(l), std::move(r)); }
TypeExprP t_mu(std::string binder, TypeExprP body) {
  return make(TKind::Mu, std::move(binder), std::move(body), nullptr);
}

namespace detail {

namespace {

TypeExprP parse_sum(TokenStream& ts);

TypeExprP parse_atom(TokenStream& ts) {
  if (ts.is_ident("void")) {
    ts.next();
    return t_void();
  }
  if (ts.is_ident("bool")) {
    ts.next();
    return t_bool();
  }
  if (ts.is_ident("mu")) {
    ts.next();
    std::string b = ts.expect_ident();
    ts.expect_sym(".");
    return t_mu(b, parse_type_from(ts));
  }
  if (ts.is_sym("(")) {
    ts.next();
    TypeExprP t = parse_type_from(ts);
    ts.expect_sym(")");
    return t;
  }
  if (ts.peek().kind == Tok::Ident) return t_var(ts.next().text);
  ts.error("expected a type");
}

TypeExprP parse_prod(TokenStream& ts) {
  TypeExprP t = parse_atom(ts);
  while (ts.is_sym("*")) {
    ts.next();
    t = t_prod(t, parse_atom(ts));
  }
  return t;
}

TypeExprP parse_sum(TokenStream& ts) {
  TypeExprP t = parse_prod(ts);
  while (ts.is_sym("+")) {
    ts.next();
    t = t_sum(t, parse_prod(ts));
  }
  return t;
}

}  // namespace

TypeExprP parse_type_from(TokenStream& ts) {
  TypeExprP t = parse_sum(ts);
  if (ts.is_sym("->")) {
    ts.next();
    return t_fun(t, parse_type_from(ts));
  }
  return t;
}

}  // namespace detail

TypeExprP parse_type(std::string_view text) {
  detail::TokenStream ts(text);
  TypeExprP t = detail::parse_type_from(ts);
  if (!ts.at_end()) ts.error("trailing input after type");
  return t;
}

namespace {

bool is_bool_expr(const TypeExprP& t) {
  return t->kind == TKind::Sum && t->l->kind == TKind::Void && t->r->kind == TKind::Void;
}

// ctx: 0 any, 1 sum operand, 2 product operand, 3 atom
std::string print(const TypeExprP& t, int ctx) {
  auto wrap = [](bool p, std::string s) { return p ? "(" + s + ")" : s; };
  switch (t->kind) {
    case TKind::Void: return "void";
    case TKind::Var: return t->name;
    case TKind::Sum:
      if (is_bool_expr(t)) return "bool";
      return wrap(ctx > 1, print(t->l, 1) + " + " + print(t->r, 2));
    case TKind::Prod: return wrap(ctx > 2, print(t->l, 2) + " * " + print(t->r, 3));
    case TKind::Fun: return wrap(ctx > 0, print(t->l, 1) + " -> " + print(t->r, 0));
    case TKind::Mu: return wrap(ctx > 0, "mu " + t->name + ". " + print(t->l, 0));
  }
  return "?";
}

void collect_fv(const TypeExprP& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case TKind::Void: return;
    case TKind::Var:
      if (std::find(bound.begin(), bound.end(), t->name) == bound.end()) out.insert(t->name);
      return;
    case TKind::Mu:
      bound.push_back(t->name);
      collect_fv(t->l, bound, out);
      bound.pop_back();
      return;
    default:
      collect_fv(t->l, bound, out);
      collect_fv(t->r, bound, out);
  }
}

bool alpha_eq(const TypeExprP& a, const TypeExprP& b, std::vector<std::pair<std::string, std::string>>& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TKind::Void: return true;
    case TKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool la = it->first == a->name, lb = it->second == b->name;
        if (la || lb) return la && lb;
      }
      return a->name == b->name;
    }
    case TKind::Mu: {
      env.emplace_back(a->name, b->name);
      bool r = alpha_eq(a->l, b->l, env);
      env.pop_back();
      return r;
    }
    default: return alpha_eq(a->l, b->l, env) && alpha_eq(a->r, b->r, env);
  }
}

std::string fresh_type_name(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 0;; ++i) {
    std::string n = base + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

}  // namespace

std::string to_string(const TypeExprP& t) { return print(t, 0); }

std::set<std::string> free_type_vars(const TypeExprP& t) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_fv(t, bound, out);
  return out;
}

bool is_closed(const TypeExprP& t) { return free_type_vars(t).empty(); }

bool alpha_equal(const TypeExprP& a, const TypeExprP& b) {
  std::vector<std::pair<std::string, std::string>> env;
  return alpha_eq(a, b, env);
}

TypeExprP type_subst(const TypeExprP& t, const std::string& name, const TypeExprP& repl) {
  switch (t->kind) {
    case TKind::Void: return t;
    case TKind::Var: return t->name == name ? repl : t;
    case TKind::Mu: {
      if (t->name == name) return t;
      std::set<std::string> fr = free_type_vars(repl);
      if (fr.count(t->name)) {
        std::set<std::string> avoid = fr;
        for (auto& v : free_type_vars(t->l)) avoid.insert(v);
        avoid.insert(name);
        std::string b = fresh_type_name(t->name, avoid);
        TypeExprP body = type_subst(t->l, t->name, t_var(b));
        return t_mu(b, type_subst(body, name, repl));
      }
      return t_mu(t->name, type_subst(t->l, name, repl));
    }
    default: return make(t->kind, "", type_subst(t->l, name, repl), type_subst(t->r, name, repl));
  }
}

namespace {

std::vector<TypeExprP> unfold_rec(const TypeExprP& t) {
  switch (t->kind) {
    case TKind::Void:
    case TKind::Var: return {};
    case TKind::Mu: return {type_subst(t->l, t->name, t)};
    default: {
      std::vector<TypeExprP> out;
      for (auto& v : unfold_rec(t->l)) out.push_back(make(t->kind, "", v, t->r));
      for (auto& v : unfold_rec(t->r)) out.push_back(make(t->kind, "", t->l, v));
      return out;
    }
  }
}

}  // namespace

std::vector<TypeExprP> unfold_step(const TypeExprP& t) {
  if (!is_closed(t)) fail(ErrorKind::OpenType, "unfold_step on open type " + to_string(t));
  return unfold_rec(t);
}

bool is_simple(const TypeExprP& t) {
  switch (t->kind) {
    case TKind::Void: return true;
    case TKind::Var:
    case TKind::Mu: return false;
    default: return is_simple(t->l) && is_simple(t->r);
  }
}

bool simple_leq(const TypeExprP& s, const TypeExprP& t) {
  if (s->kind == TKind::Void) return true;
  if (s->kind != t->kind) return false;
  return simple_leq(s->l, t->l) && simple_leq(s->r, t->r);
}

TypeExprP simple_join(const TypeExprP& s, const TypeExprP& t) {
  if (s->kind == TKind::Void) return t;
  if (t->kind == TKind::Void) return s;
  if (s->kind != t->kind)
    fail(ErrorKind::NoUpperBound, to_string(s) + " and " + to_string(t) + " have clashing heads");
  return make(s->kind, "", simple_join(s->l, t->l), simple_join(s->r, t->r));
}

// ---------------------------------------------------------------- graphs

namespace {

struct GNode {
  Head h;
  int l, r;
};

// Append-only node store. Blocks never move, so readers need no lock once
// they hold an id.
class Store {
 public:
  static constexpr int kBlock = 1024;
  static constexpr int kMaxBlocks = 8192;

  Store() {
    for (auto& b : blocks_) b.store(nullptr, std::memory_order_relaxed);
    append({Head::Void, 0, 0});
    intern_["V"] = 0;
  }

  GNode get(int id) const {
    return blocks_[id / kBlock].load(std::memory_order_acquire)[id % kBlock];
  }

  std::mutex& mutex() { return mu_; }
  std::unordered_map<std::string, int>& intern() { return intern_; }

  int append(GNode n) {
    int id = size_;
    int b = id / kBlock;
    if (b >= kMaxBlocks) fail(ErrorKind::ResourceLimit, "type store exhausted");
    GNode* blk = blocks_[b].load(std::memory_order_relaxed);
    if (!blk) {
      blk = new GNode[kBlock];
      blocks_[b].store(blk, std::memory_order_release);
    }
    blk[id % kBlock] = n;
    ++size_;
    return id;
  }

  void set(int id, GNode n) { blocks_[id / kBlock].load(std::memory_order_relaxed)[id % kBlock] = n; }

 private:
  std::array<std::atomic<GNode*>, kMaxBlocks> blocks_;
  int size_ = 0;
  std::mutex mu_;
  std::unordered_map<std::string, int> intern_;
};

Store& store() {
  static Store* s = new Store();
  return *s;
}

char head_char(Head h) {
  switch (h) {
    case Head::Void: return 'V';
    case Head::Sum: return 'S';
    case Head::Prod: return 'P';
    case Head::Fun: return 'F';
  }
  return '?';
}

// A graph under construction. Refs >= 0 are store ids; ref -(i+1) is local node i.
struct LNode {
  Head h;
  int l, r;
  bool indirect = false;  // placeholder for a mu binder, target in l
};

struct Local {
  std::vector<LNode> nodes;
  int add(LNode n) {
    nodes.push_back(n);
    return -static_cast<int>(nodes.size());
  }
};

int local_index(int ref) { return -ref - 1; }

// Canonical BFS encoding of the graph reachable from `root` in a quotient graph.
std::string encode(int root, const std::vector<Head>& heads, const std::vector<int>& ls,
                   const std::vector<int>& rs) {
  std::unordered_map<int, int> order;
  std::vector<int> queue{root};
  order[root] = 0;
  std::string key;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int c = queue[qi];
    key += head_char(heads[c]);
    if (heads[c] == Head::Void) continue;
    for (int ch : {ls[c], rs[c]}) {
      auto it = order.find(ch);
      int idx;
      if (it == order.end()) {
        idx = static_cast<int>(queue.size());
        order[ch] = idx;
        queue.push_back(ch);
      } else {
        idx = it->second;
      }
      key += std::to_string(idx);
      key += ',';
    }
  }
  return key;
}

// Minimizes the local graph together with the store nodes it reaches and
// returns the store id of `root`.
int intern_local(Local& g, int root) {
  // Resolve indirections; a cycle of indirections means mu t.t, i.e. void.
  std::vector<int> resolved(g.nodes.size(), 1);  // 1 = unresolved marker
  auto resolve = [&](int ref) {
    std::vector<int> seen;
    while (ref < 0 && g.nodes[local_index(ref)].indirect) {
      int i = local_index(ref);
      if (std::find(seen.begin(), seen.end(), i) != seen.end()) return 0;
      seen.push_back(i);
      ref = g.nodes[i].l;
    }
    return ref;
  };
  for (auto& n : g.nodes) {
    if (n.indirect || n.h == Head::Void) continue;
    n.l = resolve(n.l);
    n.r = resolve(n.r);
  }
  root = resolve(root);
  if (root >= 0) return root;

  Store& st = store();
  std::lock_guard<std::mutex> lock(st.mutex());

  // Universe: reachable local nodes and store nodes.
  std::vector<int> refs;
  std::unordered_map<int, int> index;
  auto visit = [&](int ref) {
    if (index.count(ref)) return;
    index[ref] = static_cast<int>(refs.size());
    refs.push_back(ref);
  };
  visit(root);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    int ref = refs[i];
    Head h;
    int l, r;
    if (ref < 0) {
      const LNode& n = g.nodes[local_index(ref)];
      h = n.h, l = n.l, r = n.r;
    } else {
      GNode n = st.get(ref);
      h = n.h, l = n.l, r = n.r;
    }
    if (h != Head::Void) {
      visit(l);
      visit(r);
    }
  }
  std::size_t n = refs.size();
  std::vector<Head> heads(n);
  std::vector<int> ls(n, 0), rs(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int ref = refs[i];
    if (ref < 0) {
      const LNode& ln = g.nodes[local_index(ref)];
      heads[i] = ln.h;
      if (ln.h != Head::Void) ls[i] = index[ln.l], rs[i] = index[ln.r];
    } else {
      GNode gn = st.get(ref);
      heads[i] = gn.h;
      if (gn.h != Head::Void) ls[i] = index[gn.l], rs[i] = index[gn.r];
    }
  }

  // Moore partition refinement.
  std::vector<int> cls(n);
  for (std::size_t i = 0; i < n; ++i) cls[i] = static_cast<int>(heads[i]);
  int count = -1;
  while (true) {
    std::map<std::tuple<int, int, int>, int> sig;
    std::vector<int> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto key = heads[i] == Head::Void ? std::make_tuple(cls[i], -1, -1)
                                        : std::make_tuple(cls[i], cls[ls[i]], cls[rs[i]]);
      auto it = sig.find(key);
      if (it == sig.end()) it = sig.emplace(key, static_cast<int>(sig.size())).first;
      next[i] = it->second;
    }
    int c = static_cast<int>(sig.size());
    cls = std::move(next);
    if (c == count) break;
    count = c;
  }

  // Quotient graph.
  std::vector<Head> qh(count);
  std::vector<int> ql(count, 0), qr(count, 0), qid(count, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int c = cls[i];
    qh[c] = heads[i];
    if (heads[i] != Head::Void) ql[c] = cls[ls[i]], qr[c] = cls[rs[i]];
    if (refs[i] >= 0) qid[c] = refs[i];
  }
  std::vector<std::string> keys(count);
  std::vector<int> fresh;
  for (int c = 0; c < count; ++c) {
    if (qid[c] >= 0) continue;
    keys[c] = encode(c, qh, ql, qr);
    auto it = st.intern().find(keys[c]);
    if (it != st.intern().end()) {
      qid[c] = it->second;
    } else {
      fresh.push_back(c);
    }
  }
  for (int c : fresh) qid[c] = st.append({qh[c], 0, 0});
  for (int c : fresh) {
    st.set(qid[c], {qh[c], qh[c] == Head::Void ? 0 : qid[ql[c]], qh[c] == Head::Void ? 0 : qid[qr[c]]});
    st.intern()[keys[c]] = qid[c];
  }
  return qid[cls[index[root]]];
}

int build(Local& g, const TypeExprP& t, std::vector<std::pair<std::string, int>>& env) {
  switch (t->kind) {
    case TKind::Void: return 0;
    case TKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == t->name) return it->second;
      fail(ErrorKind::OpenType, "free type variable " + t->name);
    }
    case TKind::Mu: {
      int p = g.add({Head::Void, 0, 0, true});
      env.emplace_back(t->name, p);
      int body = build(g, t->l, env);
      env.pop_back();
      g.nodes[local_index(p)].l = body;
      return p;
    }
    default: {
      Head h = t->kind == TKind::Sum ? Head::Sum : t->kind == TKind::Prod ? Head::Prod : Head::Fun;
      int l = build(g, t->l, env);
      int r = build(g, t->r, env);
      return g.add({h, l, r});
    }
  }
}

Type mk_head(Head h, Type l, Type r) {
  Local g;
  int root = g.add({h, l.id(), r.id()});
  return Type::from_id(intern_local(g, root));
}

}  // namespace

Head Type::head() const { return store().get(id_).h; }
Type Type::left() const { return Type(store().get(id_).l); }
Type Type::right() const { return Type(store().get(id_).r); }

Type void_type() { return Type::from_id(0); }
Type bool_type() {
  static const Type b = mk_sum(void_type(), void_type());
  return b;
}
Type mk_sum(Type l, Type r) { return mk_head(Head::Sum, l, r); }
Type mk_prod(Type l, Type r) { return mk_head(Head::Prod, l, r); }
Type mk_fun(Type l, Type r) { return mk_head(Head::Fun, l, r); }

Type mk_mu(const std::function<TypeExprP(const TypeExprP&)>& body) {
  const std::string name = "mu#";
  return to_graph(t_mu(name, body(t_var(name))));
}

Type to_graph(const TypeExprP& t) {
  Local g;
  std::vector<std::pair<std::string, int>> env;
  int root = build(g, t, env);
  return Type::from_id(intern_local(g, root));
}

bool type_equiv(const TypeExprP& a, const TypeExprP& b) { return to_graph(a) == to_graph(b); }

namespace {

struct ToExpr {
  std::vector<int> path;
  std::unordered_map<int, std::string> names;
  int counter = 0;

  TypeExprP go(Type t) {
    if (t.head() == Head::Void) return t_void();
    int id = t.id();
    if (std::find(path.begin(), path.end(), id) != path.end()) {
      auto it = names.find(id);
      if (it == names.end()) it = names.emplace(id, "t" + std::to_string(counter++)).first;
      return t_var(it->second);
    }
    path.push_back(id);
    TypeExprP l = go(t.left());
    TypeExprP r = go(t.right());
    path.pop_back();
    TKind k = t.head() == Head::Sum ? TKind::Sum : t.head() == Head::Prod ? TKind::Prod : TKind::Fun;
    TypeExprP e = make(k, "", l, r);
    auto it = names.find(id);
    if (it != names.end()) {
      e = t_mu(it->second, e);
      names.erase(it);
    }
    return e;
  }
};

}  // namespace

TypeExprP to_expr(Type t) {
  ToExpr te;
  return te.go(t);
}

std::string to_string(Type t) { return to_string(to_expr(t)); }

std::size_t graph_size(Type t) {
  std::vector<int> seen{t.id()};
  for (std::size_t i = 0; i < seen.size(); ++i) {
    Type u = Type::from_id(seen[i]);
    if (u.head() == Head::Void) continue;
    for (Type c : {u.left(), u.right()})
      if (std::find(seen.begin(), seen.end(), c.id()) == seen.end()) seen.push_back(c.id());
  }
  return seen.size();
}

bool is_finite(Type t) {
  // Colors: 0 unseen, 1 on stack, 2 done.
  std::unordered_map<int, int> color;
  std::function<bool(Type)> dfs = [&](Type u) {
    int& c = color[u.id()];
    if (c == 1) return false;
    if (c == 2) return true;
    c = 1;
    bool ok = u.head() == Head::Void || (dfs(u.left()) && dfs(u.right()));
    color[u.id()] = 2;
    return ok;
  };
  return dfs(t);
}

bool prefix_leq(const TypeExprP& s, Type t) {
  switch (s->kind) {
    case TKind::Void: return true;
    case TKind::Sum: return t.head() == Head::Sum && prefix_leq(s->l, t.left()) && prefix_leq(s->r, t.right());
    case TKind::Prod:
      return t.head() == Head::Prod && prefix_leq(s->l, t.left()) && prefix_leq(s->r, t.right());
    case TKind::Fun: return t.head() == Head::Fun && prefix_leq(s->l, t.left()) && prefix_leq(s->r, t.right());
    default: return false;
  }
}

namespace {

std::vector<TypeExprP> approx_rec(Type t, int depth, std::map<std::pair<int, int>, std::vector<TypeExprP>>& memo) {
  auto key = std::make_pair(t.id(), depth);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::map<std::string, TypeExprP> out;
  out["void"] = t_void();
  if (depth > 0 && t.head() != Head::Void) {
    TKind k = t.head() == Head::Sum ? TKind::Sum : t.head() == Head::Prod ? TKind::Prod : TKind::Fun;
    auto ls = approx_rec(t.left(), depth - 1, memo);
    auto rs = approx_rec(t.right(), depth - 1, memo);
    for (auto& a : ls)
      for (auto& b : rs) {
        TypeExprP e = make(k, "", a, b);
        out.emplace(to_string(e), e);
      }
  }
  std::vector<TypeExprP> v;
  for (auto& [_, e] : out) v.push_back(e);
  memo[key] = v;
  return v;
}

}  // namespace

std::vector<TypeExprP> tree_approx(Type t, int depth) {
  std::map<std::pair<int, int>, std::vector<TypeExprP>> memo;
  return approx_rec(t, depth, memo);
}

}  // namespace pcase
