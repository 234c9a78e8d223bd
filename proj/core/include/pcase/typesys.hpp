#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pcase {

// Syntactic type expressions, possibly open, with named mu binders.
enum class TKind { Void, Var, Sum, Prod, Fun, Mu };

struct TypeExpr;
using TypeExprP = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  TKind kind;
  std::string name;  // variable name or mu binder
  TypeExprP l, r;    // children; mu body is l
};

TypeExprP t_void();
TypeExprP t_bool();
TypeExprP t_var(std::string name);
TypeExprP t_sum(TypeExprP l, TypeExprP r);
TypeExprP t_prod(TypeExprP l, TypeExprP r);
TypeExprP t_fun(TypeExprP l, TypeExprP r);
TypeExprP t_mu(std::string binder, TypeExprP body);

TypeExprP parse_type(std::string_view text);
std::string to_string(const TypeExprP& t);

std::set<std::string> free_type_vars(const TypeExprP& t);
bool is_closed(const TypeExprP& t);
bool alpha_equal(const TypeExprP& a, const TypeExprP& b);
// Capture-avoiding t[repl/name].
TypeExprP type_subst(const TypeExprP& t, const std::string& name, const TypeExprP& repl);
// One result per outermost mu occurrence, in left-to-right order.
std::vector<TypeExprP> unfold_step(const TypeExprP& t);

// Simple types: the mu-free, variable-free fragment.
bool is_simple(const TypeExprP& t);
bool simple_leq(const TypeExprP& s, const TypeExprP& t);
TypeExprP simple_join(const TypeExprP& s, const TypeExprP& t);

// Canonical minimized rational trees. Bisimilar graphs share one id, so
// type equivalence is id equality.
enum class Head : std::uint8_t { Void, Sum, Prod, Fun };

class Type {
 public:
  Type() = default;
  Head head() const;
  Type left() const;
  Type right() const;
  int id() const { return id_; }
  bool operator==(const Type& o) const { return id_ == o.id_; }
  bool operator!=(const Type& o) const { return id_ != o.id_; }
  bool operator<(const Type& o) const { return id_ < o.id_; }
  static Type from_id(int id) { return Type(id); }

 private:
  explicit Type(int id) : id_(id) {}
  int id_ = 0;  // 0 is the void node
};

struct TypeHash {
  std::size_t operator()(const Type& t) const { return std::hash<int>()(t.id()); }
};

Type void_type();
Type bool_type();
Type mk_sum(Type l, Type r);
Type mk_prod(Type l, Type r);
Type mk_fun(Type l, Type r);
// The type mu t. body(t), built through a placeholder for t.
Type mk_mu(const std::function<TypeExprP(const TypeExprP&)>& body);

Type to_graph(const TypeExprP& t);
bool type_equiv(const TypeExprP& a, const TypeExprP& b);
// A closed expression whose graph is t; binders sit at back-edge targets.
TypeExprP to_expr(Type t);
std::string to_string(Type t);

std::size_t graph_size(Type t);
bool is_finite(Type t);  // no cycle reachable from t

bool prefix_leq(const TypeExprP& s, Type t);
// All simple prefixes of t cut at the given depth, sorted by printed form.
std::vector<TypeExprP> tree_approx(Type t, int depth);

}  // namespace pcase
