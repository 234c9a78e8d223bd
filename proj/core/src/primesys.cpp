#include "pcase/primesys.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <unordered_map>

#include "pcase/error.hpp"

namespace pcase {

namespace {

struct PNode {
  PKind kind = PKind::SumTag;
  int side = 0;
  std::uint32_t inner = 0;  // SumIn, ProdIn inner; Fun result
  std::vector<Prime> args;
  int level = 1;
};

struct Key {
  PKind kind;
  int side;
  std::uint32_t inner;
  std::vector<std::uint32_t> args;
  bool operator==(const Key& o) const {
    return kind == o.kind && side == o.side && inner == o.inner && args == o.args;
  }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = static_cast<std::size_t>(k.kind) * 31 + static_cast<std::size_t>(k.side);
    h = h * 1000003u ^ k.inner;
    for (auto a : k.args) h = h * 1000003u ^ a;
    return h;
  }
};

class Store {
 public:
  static constexpr std::uint32_t kBlock = 4096;
  static constexpr std::uint32_t kMaxBlocks = 8192;

  Store() {
    for (auto& b : blocks_) b.store(nullptr, std::memory_order_relaxed);
  }

  const PNode& get(std::uint32_t id) const {
    return blocks_[id / kBlock].load(std::memory_order_acquire)[id % kBlock];
  }

  std::uint32_t intern(PNode n) {
    Key k{n.kind, n.side, n.inner, {}};
    k.args.reserve(n.args.size());
    for (auto& a : n.args) k.args.push_back(a.id());
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(k);
    if (it != map_.end()) return it->second;
    std::uint32_t id = size_;
    std::uint32_t b = id / kBlock;
    if (b >= kMaxBlocks) fail(ErrorKind::ResourceLimit, "prime store exhausted");
    PNode* blk = blocks_[b].load(std::memory_order_relaxed);
    if (!blk) {
      blk = new PNode[kBlock];
      blocks_[b].store(blk, std::memory_order_release);
    }
    blk[id % kBlock] = std::move(n);
    ++size_;
    map_.emplace(std::move(k), id);
    return id;
  }

 private:
  std::array<std::atomic<PNode*>, kMaxBlocks> blocks_;
  std::uint32_t size_ = 0;
  std::mutex mu_;
  std::unordered_map<Key, std::uint32_t, KeyHash> map_;
};

Store& store() {
  static Store s;
  return s;
}

const PNode& node(const Prime& p) { return store().get(p.id()); }

std::atomic<std::size_t> g_prime_cap{200000};

struct PairHash {
  std::size_t operator()(std::uint64_t k) const { return std::hash<std::uint64_t>()(k * 0x9e3779b97f4a7c15ull); }
};

std::uint64_t pair_key(const Prime& a, const Prime& b) {
  return (static_cast<std::uint64_t>(a.id()) << 32) | b.id();
}

}  // namespace

PKind Prime::kind() const { return node(*this).kind; }
int Prime::side() const { return node(*this).side; }
Prime Prime::inner() const { return Prime(node(*this).inner); }
const std::vector<Prime>& Prime::args() const { return node(*this).args; }
Prime Prime::result() const { return Prime(node(*this).inner); }
int Prime::level() const { return node(*this).level; }
bool Prime::operator<(const Prime& o) const { return compare(*this, o) < 0; }

Prime p_sum_tag(int side) {
  PNode n;
  n.kind = PKind::SumTag;
  n.side = side;
  return Prime::from_id(store().intern(std::move(n)));
}

Prime p_sum_in(int side, Prime a) {
  PNode n;
  n.kind = PKind::SumIn;
  n.side = side;
  n.inner = a.id();
  n.level = a.level() + 1;
  return Prime::from_id(store().intern(std::move(n)));
}

Prime p_prod_in(int side, Prime a) {
  PNode n;
  n.kind = PKind::ProdIn;
  n.side = side;
  n.inner = a.id();
  n.level = a.level() + 1;
  return Prime::from_id(store().intern(std::move(n)));
}

Prime p_fun(std::vector<Prime> args, Prime result) {
  canonicalize(args);
  PNode n;
  n.kind = PKind::Fun;
  n.inner = result.id();
  int lv = result.level();
  for (auto& a : args) lv = std::max(lv, a.level());
  n.level = lv + 1;
  n.args = std::move(args);
  return Prime::from_id(store().intern(std::move(n)));
}

int compare(const Prime& a, const Prime& b) {
  if (a == b) return 0;
  const PNode& x = node(a);
  const PNode& y = node(b);
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  if (x.side != y.side) return x.side < y.side ? -1 : 1;
  if (x.kind == PKind::SumTag) return 0;
  if (x.kind == PKind::Fun) {
    std::size_t n = std::min(x.args.size(), y.args.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(x.args[i], y.args[i])) return c;
    if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
  }
  return compare(Prime::from_id(x.inner), Prime::from_id(y.inner));
}

bool set_con(const std::vector<Prime>& x, const std::vector<Prime>& y) {
  for (auto& a : x)
    for (auto& b : y)
      if (!con(a, b)) return false;
  return true;
}

bool set_leq(const std::vector<Prime>& y, const std::vector<Prime>& x) {
  for (auto& a : y) {
    bool found = false;
    for (auto& b : x)
      if (leq(a, b)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

namespace {

bool con_raw(const Prime& a, const Prime& b) {
  const PNode& x = node(a);
  const PNode& y = node(b);
  auto sum_part = [](PKind k) { return k == PKind::SumTag || k == PKind::SumIn; };
  if (sum_part(x.kind) && sum_part(y.kind)) {
    if (x.side != y.side) return false;
    if (x.kind == PKind::SumIn && y.kind == PKind::SumIn) return con(Prime::from_id(x.inner), Prime::from_id(y.inner));
    return true;
  }
  if (x.kind == PKind::ProdIn && y.kind == PKind::ProdIn) {
    if (x.side != y.side) return true;
    return con(Prime::from_id(x.inner), Prime::from_id(y.inner));
  }
  if (x.kind == PKind::Fun && y.kind == PKind::Fun)
    return !set_con(x.args, y.args) || con(Prime::from_id(x.inner), Prime::from_id(y.inner));
  return false;
}

bool leq_raw(const Prime& a, const Prime& b) {
  const PNode& x = node(a);
  const PNode& y = node(b);
  switch (x.kind) {
    case PKind::SumTag:
      return (y.kind == PKind::SumTag || y.kind == PKind::SumIn) && x.side == y.side;
    case PKind::SumIn:
    case PKind::ProdIn:
      return y.kind == x.kind && x.side == y.side && leq(Prime::from_id(x.inner), Prime::from_id(y.inner));
    case PKind::Fun:
      return y.kind == PKind::Fun && leq(Prime::from_id(x.inner), Prime::from_id(y.inner)) && set_leq(y.args, x.args);
  }
  return false;
}

template <class F>
bool memo(std::unordered_map<std::uint64_t, bool, PairHash>& m, const Prime& a, const Prime& b, F f) {
  if (m.size() > (1u << 22)) m.clear();
  auto k = pair_key(a, b);
  auto it = m.find(k);
  if (it != m.end()) return it->second;
  bool r = f(a, b);
  m[k] = r;
  return r;
}

}  // namespace

bool con(const Prime& a, const Prime& b) {
  if (a == b) return true;
  if (a.kind() == PKind::SumTag || b.kind() == PKind::SumTag) return con_raw(a, b);
  thread_local std::unordered_map<std::uint64_t, bool, PairHash> m;
  return a.id() < b.id() ? memo(m, a, b, con_raw) : memo(m, b, a, con_raw);
}

bool leq(const Prime& a, const Prime& b) {
  if (a == b) return true;
  if (a.kind() == PKind::SumTag) return leq_raw(a, b);
  thread_local std::unordered_map<std::uint64_t, bool, PairHash> m;
  return memo(m, a, b, leq_raw);
}

std::string to_string(const Prime& p) {
  const PNode& n = node(p);
  switch (n.kind) {
    case PKind::SumTag: return std::to_string(n.side);
    case PKind::SumIn: return "(" + std::to_string(n.side) + "," + to_string(Prime::from_id(n.inner)) + ")";
    case PKind::ProdIn: return "[" + std::to_string(n.side) + "," + to_string(Prime::from_id(n.inner)) + "]";
    case PKind::Fun: {
      std::string s = "({";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += ",";
        s += to_string(n.args[i]);
      }
      return s + "}->" + to_string(Prime::from_id(n.inner)) + ")";
    }
  }
  return "?";
}

void canonicalize(PrimeSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

AntiChain maximal(const PrimeSet& s) {
  AntiChain out;
  for (auto& a : s) {
    bool dominated = false;
    for (auto& b : s)
      if (a != b && leq(a, b)) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(a);
  }
  canonicalize(out);
  return out;
}

bool Element::operator<(const Element& o) const {
  return std::lexicographical_compare(primes.begin(), primes.end(), o.primes.begin(), o.primes.end());
}

bool Element::contains(const Prime& p) const { return std::binary_search(primes.begin(), primes.end(), p); }

bool Element::subset_of(const Element& o) const {
  return std::includes(o.primes.begin(), o.primes.end(), primes.begin(), primes.end());
}

std::string to_string(const Element& d) {
  std::string s = "{";
  for (std::size_t i = 0; i < d.primes.size(); ++i) {
    if (i) s += ", ";
    s += to_string(d.primes[i]);
  }
  return s + "}";
}

PrimeSystem::PrimeSystem(PrimeSet primes) : primes_(std::move(primes)) {
  canonicalize(primes_);
  index_.insert(primes_.begin(), primes_.end());
}

std::vector<std::pair<Prime, Prime>> PrimeSystem::con_pairs() const {
  std::vector<std::pair<Prime, Prime>> out;
  for (std::size_t i = 0; i < primes_.size(); ++i)
    for (std::size_t j = i + 1; j < primes_.size(); ++j)
      if (pcase::con(primes_[i], primes_[j])) out.emplace_back(primes_[i], primes_[j]);
  return out;
}

std::vector<std::pair<Prime, Prime>> PrimeSystem::hasse() const {
  std::vector<std::pair<Prime, Prime>> out;
  for (auto& a : primes_)
    for (auto& b : primes_) {
      if (a == b || !pcase::leq(a, b)) continue;
      bool covered = true;
      for (auto& c : primes_)
        if (c != a && c != b && pcase::leq(a, c) && pcase::leq(c, b)) {
          covered = false;
          break;
        }
      if (covered) out.emplace_back(a, b);
    }
  return out;
}

void set_prime_cap(std::size_t cap) { g_prime_cap.store(cap); }
std::size_t prime_cap() { return g_prime_cap.load(); }

namespace {

void check_cap(std::size_t n, const char* what) {
  if (n > prime_cap())
    fail(ErrorKind::ResourceLimit, std::string(what) + " exceeds the cap of " + std::to_string(prime_cap()));
}

}  // namespace

PrimeSystem ps_sum(const PrimeSystem& a, const PrimeSystem& b) {
  check_cap(a.size() + b.size() + 2, "sum system");
  PrimeSet out{p_sum_tag(0), p_sum_tag(1)};
  for (auto& p : a.primes()) out.push_back(p_sum_in(0, p));
  for (auto& p : b.primes()) out.push_back(p_sum_in(1, p));
  return PrimeSystem(std::move(out));
}

PrimeSystem ps_prod(const PrimeSystem& a, const PrimeSystem& b) {
  check_cap(a.size() + b.size(), "product system");
  PrimeSet out;
  for (auto& p : a.primes()) out.push_back(p_prod_in(0, p));
  for (auto& p : b.primes()) out.push_back(p_prod_in(1, p));
  return PrimeSystem(std::move(out));
}

PrimeSystem ps_fun(const PrimeSystem& a, const PrimeSystem& b) {
  if (b.size() == 0) return PrimeSystem();
  auto xs = antichains(a);
  check_cap(xs.size() * b.size(), "function system");
  PrimeSet out;
  out.reserve(xs.size() * b.size());
  for (auto& x : xs)
    for (auto& r : b.primes()) out.push_back(p_fun(x, r));
  return PrimeSystem(std::move(out));
}

namespace {

struct LevelMemo {
  std::mutex mu;
  std::map<std::pair<int, int>, SystemP> table;
};

LevelMemo& level_memo() {
  static LevelMemo m;
  return m;
}

}  // namespace

SystemP ps_level(Type t, int n) {
  static const SystemP empty = std::make_shared<PrimeSystem>();
  if (n <= 0 || t.head() == Head::Void) return empty;
  auto& m = level_memo();
  std::pair<int, int> key{t.id(), n};
  {
    std::lock_guard<std::mutex> lock(m.mu);
    auto it = m.table.find(key);
    if (it != m.table.end()) return it->second;
  }
  SystemP l = ps_level(t.left(), n - 1);
  SystemP r = ps_level(t.right(), n - 1);
  PrimeSystem s;
  switch (t.head()) {
    case Head::Sum: s = ps_sum(*l, *r); break;
    case Head::Prod: s = ps_prod(*l, *r); break;
    case Head::Fun: s = ps_fun(*l, *r); break;
    case Head::Void: break;
  }
  auto sp = std::make_shared<const PrimeSystem>(std::move(s));
  std::lock_guard<std::mutex> lock(m.mu);
  return m.table.emplace(key, sp).first->second;
}

bool substructure(const PrimeSystem& a, const PrimeSystem& b) {
  // Relations are structural, so they restrict exactly once primes embed.
  for (auto& p : a.primes())
    if (!b.contains(p)) return false;
  return true;
}

bool satisfies_axioms(const PrimeSystem& s) {
  const auto& ps = s.primes();
  for (auto& a : ps) {
    if (!con(a, a) || !leq(a, a)) return false;
    for (auto& b : ps) {
      if (con(a, b) != con(b, a)) return false;
      if (a != b && leq(a, b) && leq(b, a)) return false;
      for (auto& c : ps) {
        if (leq(a, b) && leq(b, c) && !leq(a, c)) return false;
        if (con(a, b) && leq(c, b) && !con(a, c)) return false;
      }
    }
  }
  return true;
}

Element down_closure(const PrimeSet& x, const PrimeSystem& host) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (!con(x[i], x[j]))
        fail(ErrorKind::Inconsistent, to_string(x[i]) + " and " + to_string(x[j]) + " are inconsistent");
  Element d;
  for (auto& p : host.primes())
    for (auto& b : x)
      if (leq(p, b)) {
        d.primes.push_back(p);
        break;
      }
  return d;
}

bool is_element(const PrimeSet& d, const PrimeSystem& host) {
  for (auto& a : d) {
    if (!host.contains(a)) return false;
    for (auto& b : d)
      if (!con(a, b)) return false;
  }
  Element e{d};
  canonicalize(e.primes);
  for (auto& b : d)
    for (auto& a : host.primes())
      if (leq(a, b) && !e.contains(a)) return false;
  return true;
}

std::vector<AntiChain> antichains(const PrimeSystem& a) {
  const auto& ps = a.primes();
  std::vector<AntiChain> out;
  AntiChain cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    out.push_back(cur);
    check_cap(out.size(), "antichain count");
    for (std::size_t i = from; i < ps.size(); ++i) {
      bool ok = true;
      for (auto& c : cur)
        if (!con(c, ps[i]) || leq(c, ps[i]) || leq(ps[i], c)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.push_back(ps[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  // DFS yields each antichain in sorted order; now order by size, then lexicographically
  std::stable_sort(out.begin(), out.end(), [](const AntiChain& x, const AntiChain& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  return out;
}

std::vector<Element> elements(const PrimeSystem& a) {
  std::vector<Element> out;
  for (auto& x : antichains(a)) out.push_back(down_closure(x, a));
  return out;
}

Element pr_of_function(const FunctionTable& table, const PrimeSystem& a, const PrimeSystem& b) {
  for (auto& [d, fd] : table) {
    if (!is_element(d.primes, a)) fail(ErrorKind::InvalidElement, "table argument " + to_string(d) + " is not an element");
    if (!is_element(fd.primes, b)) fail(ErrorKind::InvalidElement, "table value " + to_string(fd) + " is not an element");
  }
  for (auto& [d, fd] : table)
    for (auto& [e, fe] : table)
      if (d.subset_of(e) && !fd.subset_of(fe))
        fail(ErrorKind::NotMonotone, to_string(d) + " <= " + to_string(e) + " but images are not ordered");
  Element r;
  for (auto& x : antichains(a)) {
    Element dx = down_closure(x, a);
    auto it = table.find(dx);
    if (it == table.end()) fail(ErrorKind::InvalidElement, "table misses the element " + to_string(dx));
    for (auto& p : it->second.primes) r.primes.push_back(p_fun(x, p));
  }
  canonicalize(r.primes);
  return r;
}

Element apply_element(const Element& r, const Element& d) {
  Element out;
  for (auto& p : r.primes) {
    if (p.kind() != PKind::Fun) continue;
    bool inside = true;
    for (auto& x : p.args())
      if (!d.contains(x)) {
        inside = false;
        break;
      }
    if (inside) out.primes.push_back(p.result());
  }
  canonicalize(out.primes);
  return out;
}

FunctionTable table_of(const Element& r, const PrimeSystem& a) {
  FunctionTable t;
  for (auto& d : elements(a)) t[d] = apply_element(r, d);
  return t;
}

Element projection(const Element& d, int n) {
  Element out;
  for (auto& p : d.primes)
    if (p.level() <= n) out.primes.push_back(p);
  return out;
}

}  // namespace pcase
