#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pcase/denote.hpp"
#include "pcase/termlang.hpp"

namespace pcase {

// Every outermost redex replaced by bottom; a normal form below n.
TermP omega_collapse(const TermP& n);
// The greatest constant normal form below a normal form.
TermP cnf_prefix(const TermP& a);

// Both raise NotNormalForm on terms that still contain a redex.
bool is_cnf(const TermP& a);
// Level-relative: no prefix obtained by cutting one subterm has the same
// level-n value in the bottom environment and a sample of environments.
bool is_mnf(const TermP& a, int level);

enum class DapStatus { Proved, BudgetVerified, Refuted };
const char* dap_status_name(DapStatus s);

struct DapResult {
  DapStatus status;
  TermP witness;  // the reduct A is not below, when refuted
};

// Raises NotAPrefix unless a is below m.
DapResult direct_approx(const TermP& a, const TermP& m, std::size_t budget);

// Up to `cap` distinct terms reachable from m, in breadth-first order.
std::vector<TermP> reducts(const TermP& m, std::size_t cap);
// Prefixes of t down to bottom, at most `cap` of them.
std::vector<TermP> prefixes(const TermP& t, std::size_t cap);

struct ApproxBudget {
  std::size_t steps = 64;      // reducts explored
  std::size_t size_cap = 14;   // members larger than this are not cut further
  std::size_t count_cap = 4096;
};

struct ApproxMember {
  TermP term;
  TermP reduct;  // the reduct it was checked against
  DapStatus status;
};

struct ApproxSet {
  std::vector<ApproxMember> members;
  bool contains(const TermP& a) const;
};

ApproxSet approximations(const TermP& m, const ApproxBudget& budget = {});
// The sampled constant, and level-relative minimum, normal forms below reducts.
std::vector<TermP> cnf_approximations(const TermP& m, const ApproxBudget& budget = {});
std::vector<TermP> mnf_approximations(const TermP& m, int level, const ApproxBudget& budget = {});

Element approx_semantics(const TermP& m, const Environment& env, int n, const ApproxBudget& budget = {});

struct ApproxReport {
  Element approx;     // union over the sample
  Element exact;      // denote at level n
  Element deep;       // evaluated `slack` levels higher, viewed at n
  bool sound = false;       // approx within exact
  bool deep_sound = false;  // approx within deep
  bool equal = false;       // approx equals exact
  bool sequential = false;  // no pcase anywhere
  bool b_in_c = true, c_in_a = true;
  std::size_t members = 0;
};

ApproxReport approximation_check(const TermP& m, const Environment& env, int n, const ApproxBudget& budget = {},
                                 int slack = 3);

}  // namespace pcase
