#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcase/denote.hpp"
#include "pcase/primesys.hpp"
#include "pcase/termlang.hpp"

namespace pcase {

// ---------------------------------------------------------------- programs

enum class ObsKind { Zero, One, Bottom };
enum class BottomReason { None, Budget, Stuck };

struct ObsValue {
  ObsKind kind = ObsKind::Bottom;
  BottomReason reason = BottomReason::None;
  std::size_t steps = 0;
  bool operator==(const ObsValue& o) const { return kind == o.kind; }
};

std::string to_string(const ObsValue& v);  // "0", "1", "bot(budget)", "bot(stuck)"

// Closed with a type equivalent to bool.
bool is_program(const TermP& m);
// Fair reduction until some reduct has an in0 or in1 head. Raises NotAProgram.
ObsValue op_eval(const TermP& m, std::size_t budget);

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_name(Verdict v);  // "PASS", "FAIL", "INCONCLUSIVE"

struct AdequacyReport {
  Verdict verdict = Verdict::Inconclusive;
  ObsValue op;
  DenotationReport den;
  std::optional<int> denoted;    // 0 or 1 once some level is nonempty
  std::optional<int> den_level;  // first level with a nonempty value
};

AdequacyReport adequacy_check(const TermP& m, std::size_t steps, int levels);

// ---------------------------------------------------------------- combinators

TermP mk_and();
TermP mk_or();
TermP mk_not();
TermP mk_if0(Type s);  // bool -> s -> s -> s
TermP mk_pcf();
TermP mk_sb(Type s, Type t);  // s + t -> bool

// and, or, not, if0, pcf, sb, out0, out1 at bool and its void components.
std::map<std::string, TermP> std_combinators();

// ---------------------------------------------------------------- definability

// The prime stands for the environments where the condition yields 0.
struct ConditionedPrime {
  TermP condition;
  Prime prime;
};

// A term whose value in every environment is the closure of the primes with
// a true condition. The set must be consistent, with primes in P_n(t).
TermP models_term(const std::vector<ConditionedPrime>& x, Type t, int n);
// A closed test of type t -> bool over P_n(t): 0 above x, 1 when
// inconsistent with x, bottom otherwise.
TermP eq_term(const AntiChain& x, Type t, int n);
// A closed term denoting d. Raises InvalidElement unless d is an element of
// P_n(t).
TermP definable_term(const Element& d, Type t, int n);

// The level-n view of the term evaluated `slack` levels higher equals d.
bool definability_check(const Element& d, Type t, int n, int slack = 3);
// Brute force over P_n(t): the eq table matches the three-way contract.
bool eq_contract_check(const AntiChain& x, Type t, int n, int slack = 3);

// ---------------------------------------------------------------- interdefinability

// Binds type variables to term variables of type bool -> u -> u -> u.
using PcaseTheta = std::map<std::string, TermP>;
// Raises UnboundTypeVar for a free type variable outside theta.
TermP pcase_from_and(const TypeExprP& sigma, const PcaseTheta& theta = {});

// f c a b contains the level-n projection of pcase c a b for all c in P_n(bool)
// and a, b in P_n(s). f is evaluated at levels n .. n + slack, and any level
// that passes settles the check since every level is a lower bound.
bool app_level_check(const TermP& f, Type s, int n, int slack = 6);

// The case constant recovered from pcase and projections.
TermP case_from_pcase(Type s, Type t, Type r);
bool case_from_pcase_check(Type s, Type t, Type r, int level, int slack = 3);
// The instances (void, void, bool) and (bool, bool, bool).
bool case_from_pcase_check(int level);

// ---------------------------------------------------------------- preorder

// Wraps m in lambdas over its free variables, sorted by name.
TermP close_term(const TermP& m);

struct ProbeReport {
  bool distinguished = false;
  TermP context;  // applied to both terms
  ObsValue on_m, on_n;
  std::vector<std::pair<int, bool>> den_leq;  // level, denote(M) within denote(N)
  std::size_t tried = 0;
};

// Definability contexts ({a}, 0) for the primes a of P_n(t), then eq tests
// for singletons, at most `cap` in all.
std::vector<TermP> probe_contexts(Type t, int n, std::size_t cap);

// Reports a context C with op_eval(C M) defined and op_eval(C N) different.
// Never concludes that M is below N.
ProbeReport preorder_probe(const TermP& m, const TermP& n, const std::vector<TermP>& contexts, std::size_t budget,
                           int max_level);

struct DistinguishReport {
  bool found_prime = false;  // some a in deepened denote(M) outside deepened denote(N)
  Prime a;
  TermP context;
  ObsValue on_m, on_n;
  bool success = false;  // on_m is 0 and on_n is not
};

DistinguishReport distinguish(const TermP& m, const TermP& n, int level, std::size_t budget, int slack = 3);

}  // namespace pcase
