#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pcase/termlang.hpp"

namespace pcase {

enum class Rule : std::uint8_t {
  Beta,
  Case0,
  Case1,
  Pair1,
  Pair2,
  Pcase0,
  Pcase1,
  Pcase00,
  Pcase11,
  PcaseXX,
  PcaseArrow,
};

const char* rule_name(Rule r);

struct Redex {
  Path occurrence;
  Rule rule;
  bool operator==(const Redex& o) const { return occurrence == o.occurrence && rule == o.rule; }
};

std::string to_string(const Redex& r);  // "rule @ path"

// Rules whose left-hand side matches this node, in rule order.
std::vector<Rule> rules_at(const TermP& node);
// All redexes in leftmost-outermost (preorder) order.
std::vector<Redex> find_redexes(const TermP& m);
bool is_normal(const TermP& m);
// Contracts the redex at the root of `node`.
TermP contract(const TermP& node, Rule r);
TermP reduce_at(const TermP& m, const Redex& r);

enum class Strategy { Fair, Leftmost };

// The redex the strategy reduces next; `round` drives the fair rotation.
std::optional<Redex> choose_redex(const TermP& m, Strategy s, std::size_t round);

struct TraceStep {
  Redex redex;
  TermP term;
};

struct ReductionTrace {
  TermP start;
  std::vector<TraceStep> steps;
};

enum class NormStatus { Normal, BudgetExhausted };

struct NormalizeResult {
  TermP term;
  NormStatus status;
  std::size_t steps = 0;
  ReductionTrace trace;  // filled when requested
};

NormalizeResult normalize(const TermP& m, Strategy s, std::size_t budget, bool keep_trace = false);

using BigNat = boost::multiprecision::mpz_int;

bool is_applicative(const TermP& m);
// Values whose bit length would exceed the cap raise ResourceLimit.
void set_phi_bit_cap(std::size_t bits);
std::size_t phi_bit_cap();
BigNat phi_measure(const TermP& m);
TermP normalize_applicative(const TermP& m);

struct CriticalPair {
  std::string name;
  TermP overlap, left, right, joined;
  bool converged = false;
};

std::vector<CriticalPair> critical_pair_suite();

struct ConfluenceReport {
  std::size_t reducts = 0;
  std::size_t pairs = 0;
  std::size_t rejoined = 0;
  std::vector<std::pair<TermP, TermP>> unresolved;  // not rejoined within budget
  bool violation = false;                           // two distinct normal forms
};

ConfluenceReport confluence_probe(const TermP& m, std::size_t fan, std::size_t depth, std::size_t rejoin_budget);

}  // namespace pcase
