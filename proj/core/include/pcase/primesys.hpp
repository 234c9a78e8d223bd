#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "pcase/typesys.hpp"

namespace pcase {

enum class PKind : std::uint8_t { SumTag, SumIn, ProdIn, Fun };

// Hash-consed prime handle. Equality is identity; `<` is the structural order.
class Prime {
 public:
  Prime() = default;
  PKind kind() const;
  int side() const;                         // SumTag, SumIn, ProdIn
  Prime inner() const;                      // SumIn, ProdIn
  const std::vector<Prime>& args() const;   // Fun, sorted antichain
  Prime result() const;                     // Fun
  int level() const;                        // least i with the prime in P_i
  std::uint32_t id() const { return id_; }
  bool operator==(const Prime& o) const { return id_ == o.id_; }
  bool operator!=(const Prime& o) const { return id_ != o.id_; }
  bool operator<(const Prime& o) const;
  static Prime from_id(std::uint32_t id) { return Prime(id); }

 private:
  explicit Prime(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

struct PrimeHash {
  std::size_t operator()(const Prime& p) const { return std::hash<std::uint32_t>()(p.id()); }
};

Prime p_sum_tag(int side);
Prime p_sum_in(int side, Prime a);
Prime p_prod_in(int side, Prime a);
Prime p_fun(std::vector<Prime> args, Prime result);  // args are sorted here

int compare(const Prime& a, const Prime& b);
// Consistency and entailment by the constructor clauses.
bool con(const Prime& a, const Prime& b);
bool leq(const Prime& a, const Prime& b);
// X con Y and Y <= X on prime sets.
bool set_con(const std::vector<Prime>& x, const std::vector<Prime>& y);
bool set_leq(const std::vector<Prime>& y, const std::vector<Prime>& x);

std::string to_string(const Prime& p);

using PrimeSet = std::vector<Prime>;  // sorted structurally, no duplicates
using AntiChain = PrimeSet;

// Downward closed, pairwise consistent prime set.
struct Element {
  PrimeSet primes;
  bool operator==(const Element& o) const { return primes == o.primes; }
  bool operator!=(const Element& o) const { return primes != o.primes; }
  bool operator<(const Element& o) const;
  bool empty() const { return primes.empty(); }
  bool contains(const Prime& p) const;
  bool subset_of(const Element& o) const;
};

std::string to_string(const Element& d);
void canonicalize(PrimeSet& s);
// Maximal members of a prime set.
AntiChain maximal(const PrimeSet& s);

class PrimeSystem {
 public:
  PrimeSystem() = default;
  explicit PrimeSystem(PrimeSet primes);

  const PrimeSet& primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  bool contains(const Prime& p) const { return index_.count(p) != 0; }
  bool con(const Prime& a, const Prime& b) const { return pcase::con(a, b); }
  bool leq(const Prime& a, const Prime& b) const { return pcase::leq(a, b); }
  bool operator==(const PrimeSystem& o) const { return primes_ == o.primes_; }

  // Unordered consistent pairs (a < b) and covering pairs of the order.
  std::vector<std::pair<Prime, Prime>> con_pairs() const;
  std::vector<std::pair<Prime, Prime>> hasse() const;

 private:
  PrimeSet primes_;
  std::unordered_set<Prime, PrimeHash> index_;
};

using SystemP = std::shared_ptr<const PrimeSystem>;

// Cap on primes per system and on antichains per enumeration.
void set_prime_cap(std::size_t cap);
std::size_t prime_cap();

PrimeSystem ps_sum(const PrimeSystem& a, const PrimeSystem& b);
PrimeSystem ps_prod(const PrimeSystem& a, const PrimeSystem& b);
PrimeSystem ps_fun(const PrimeSystem& a, const PrimeSystem& b);
SystemP ps_level(Type t, int n);

bool substructure(const PrimeSystem& a, const PrimeSystem& b);
// The defining axiom plus order laws, checked exhaustively.
bool satisfies_axioms(const PrimeSystem& a);

Element down_closure(const PrimeSet& x, const PrimeSystem& host);
bool is_element(const PrimeSet& d, const PrimeSystem& host);
// By size, then lexicographically in the structural order.
std::vector<AntiChain> antichains(const PrimeSystem& a);
// All elements, as the closures of the antichains.
std::vector<Element> elements(const PrimeSystem& a);

using FunctionTable = std::map<Element, Element>;
Element pr_of_function(const FunctionTable& table, const PrimeSystem& a, const PrimeSystem& b);
Element apply_element(const Element& r, const Element& d);
FunctionTable table_of(const Element& r, const PrimeSystem& a);
Element projection(const Element& d, int n);

}  // namespace pcase
