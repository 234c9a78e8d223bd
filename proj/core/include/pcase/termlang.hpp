#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pcase/typesys.hpp"

namespace pcase {

enum class Const : std::uint8_t { In0, In1, Case, Pcase, Pair, Fst, Snd, Omega };

const char* const_name(Const c);
int const_targ_arity(Const c);
// Number of arguments the constant consumes in its reduction rules.
int const_arity(Const c);
Type ctype(Const c, const std::vector<Type>& targs);

// ---------------------------------------------------------------- typed terms

enum class TmKind : std::uint8_t { Var, Lam, App, Const };

struct Term;
using TermP = std::shared_ptr<const Term>;
using NameList = std::shared_ptr<const std::vector<std::string>>;

// Typed terms are checked on construction, so every TermP is well typed.
struct Term {
  TmKind kind;
  std::string name;  // variable name or lambda binder
  Type ann;          // variable type or binder annotation
  TermP a, b;        // lambda body is a; application is a b
  Const c = Const::Omega;
  std::vector<Type> targs;
  Type type;
  std::size_t size = 1;
  NameList fv;  // sorted free variable names
};

TermP mk_var(const std::string& name, Type t);
TermP mk_lam(const std::string& name, Type t, TermP body);
TermP mk_app(TermP f, TermP a);
TermP mk_apps(TermP f, const std::vector<TermP>& args);
TermP mk_const(Const c, std::vector<Type> targs);
TermP mk_omega(Type t);
TermP mk_zero();  // @0 = in0[void,void] bot[void]
TermP mk_one();   // @1 = in1[void,void] bot[void]
TermP mk_in(int side, Type s, Type t, TermP m);
TermP mk_pair(TermP m, TermP n);

bool is_omega(const TermP& m);
bool has_free(const TermP& m, const std::string& x);
// Head and arguments of an application spine.
TermP spine(const TermP& m, std::vector<TermP>& args);

std::string to_string(const TermP& m, bool with_types = false);

bool alpha_equal(const TermP& m, const TermP& n);
std::size_t alpha_hash(const TermP& m);
struct AlphaHash {
  std::size_t operator()(const TermP& m) const { return alpha_hash(m); }
};
struct AlphaEq {
  bool operator()(const TermP& m, const TermP& n) const { return alpha_equal(m, n); }
};

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);
std::set<std::string> bound_and_free_names(const TermP& m);
TermP substitute(const TermP& m, const std::string& x, const TermP& n);

bool omega_leq(const TermP& m, const TermP& n);
TermP omega_join(const TermP& m, const TermP& n);

// Occurrence paths: application children 0 (function) and 1 (argument),
// lambda child 0 (body).
using Path = std::vector<int>;
TermP subterm_at(const TermP& m, const Path& p);
TermP replace_at(const TermP& m, const Path& p, const TermP& n);
std::string path_string(const Path& p);

// Re-derives the type from scratch, checking every node.
Type typecheck(const TermP& m);

TermP mk_Y(Type sigma);
TermP mk_out0(Type s, Type t);
TermP mk_out1(Type s, Type t);

// ---------------------------------------------------------------- surface syntax

enum class SynKind : std::uint8_t { Var, Lam, App, Const };

struct Syntax;
using SyntaxP = std::shared_ptr<const Syntax>;

struct Syntax {
  SynKind kind;
  std::string name;
  TypeExprP ann;
  SyntaxP a, b;
  Const c = Const::Omega;
  std::vector<TypeExprP> targs;  // empty when omitted
  std::size_t pos = 0;
};

SyntaxP parse_term(std::string_view text);

using Context = std::map<std::string, Type>;
TermP elaborate(const SyntaxP& s, const Context& ctx = {});
Type typecheck(const SyntaxP& s, const Context& ctx = {});
// parse_term followed by elaborate.
TermP read_term(std::string_view text, const Context& ctx = {});

}  // namespace pcase
