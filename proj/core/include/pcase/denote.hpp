#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcase/primesys.hpp"
#include "pcase/termlang.hpp"

namespace pcase {

// Unbound variables read as bottom. Bindings are projected to the level
// they are used at.
struct Environment {
  std::map<std::string, Element> bindings;
  int level = 0;
  Environment bind(const std::string& x, const Element& d) const;
  Environment at_level(int n) const;
};

// The constant's domain function, as an element of its level-n system.
Element const_denote(Const c, const std::vector<Type>& targs, int n);

// The level-n semantics. Every type is interpreted at level n, application
// projects its argument and result one level down.
Element denote(const TermP& m, const Environment& env, int n);
// Evaluates at `eval_level` and projects the result to `view_level`.
Element denote_view(const TermP& m, const Environment& env, int eval_level, int view_level);

// P_k(t) = P_j(t) for every j >= k.
bool system_stable(Type t, int k);
// No prime of the system can be added to d consistently.
bool is_maximal(const Element& d, const PrimeSystem& host);

struct DenotationReport {
  std::vector<std::pair<int, Element>> values;
  bool stabilized = false;
  std::optional<int> level;
};

// Values at levels 0..max_level. Stabilized when two consecutive levels
// agree, the type's systems no longer grow, and the value is maximal, so no
// later level can change it.
DenotationReport denote_deepening(const TermP& m, int max_level, const Environment& env = {});

bool substitution_check(const TermP& m, const std::string& x, const TermP& n, const Environment& env, int level);

}  // namespace pcase
