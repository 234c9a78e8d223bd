#include "pcase/cli.hpp"

#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "pcase/approx.hpp"
#include "pcase/denote.hpp"
#include "pcase/error.hpp"
#include "pcase/observe.hpp"
#include "pcase/rewrite.hpp"

namespace pcase::cli {

using nlohmann::json;

namespace {

struct Io {
  std::ostream& out;
  std::ostream& err;
  const RunConfig& cfg;
  bool json() const { return cfg.output == OutputMode::Json; }
};

TermP load_term(const std::string& src, const Context& ctx = {}) { return read_term(read_source(src), ctx); }
Type load_type(const std::string& src) { return to_graph(parse_type(read_source(src))); }

// Splits on commas outside brackets, so pair terms survive.
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_check(const Io& io, const std::string& file) {
  std::string src = read_source(file);
  try {
    TermP m = read_term(src);
    if (io.json()) io.out << json{{"kind", "term"}, {"term", to_string(m, true)}, {"type", to_string(m->type)}} << "\n";
    else io.out << to_string(m->type) << "\n";
    return kOk;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SyntaxError) throw;
    Type t;
    try {
      t = to_graph(parse_type(src));
    } catch (const Error&) {
      throw e;
    }
    if (io.json()) io.out << json{{"kind", "type"}, {"type", to_string(t)}} << "\n";
    else io.out << to_string(t) << "\n";
    return kOk;
  }
}

int cmd_reduce(const Io& io, const std::string& file, const std::string& strategy, std::size_t budget, bool trace) {
  TermP m = load_term(file);
  Strategy s = strategy == "leftmost" ? Strategy::Leftmost : Strategy::Fair;
  NormalizeResult r = normalize(m, s, budget, trace);
  std::string status = r.status == NormStatus::Normal ? "normal" : "budget";
  if (io.json()) {
    json steps = json::array();
    for (auto& st : r.trace.steps) steps.push_back(to_string(st.redex));
    io.out << json{{"status", status}, {"steps", r.steps}, {"term", to_string(r.term, true)}, {"trace", steps}}
           << "\n";
    return kOk;
  }
  for (auto& st : r.trace.steps) io.out << to_string(st.redex) << "\n";
  io.out << status << " after " << r.steps << " steps: " << to_string(r.term) << "\n";
  return kOk;
}

int cmd_primes(const Io& io, const std::string& type, int level, bool dump) {
  Type t = load_type(type);
  SystemP sys = ps_level(t, level);
  const PrimeSet& ps = sys->primes();
  if (io.json() || dump) {
    std::map<std::uint32_t, std::size_t> index;
    json primes = json::array();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      index[ps[i].id()] = i;
      primes.push_back(to_json(ps[i]));
    }
    json con = json::array(), hasse = json::array();
    for (auto& [a, b] : sys->con_pairs()) con.push_back({index[a.id()], index[b.id()]});
    for (auto& [a, b] : sys->hasse()) hasse.push_back({index[a.id()], index[b.id()]});
    io.out << json{{"type", to_string(t)}, {"level", level}, {"primes", primes}, {"con", con}, {"hasse", hasse}}
           << "\n";
    return kOk;
  }
  io.out << "P_" << level << "(" << to_string(t) << "): " << ps.size() << " primes\n";
  for (auto& p : ps) io.out << "  " << to_string(p) << "  level " << p.level() << "\n";
  io.out << sys->con_pairs().size() << " consistent pairs, " << sys->hasse().size() << " covering pairs\n";
  return kOk;
}

int cmd_denote(const Io& io, const std::string& file, int level, int deepen, int eval_level, const std::string& envs) {
  int deepest = std::max({level, deepen, eval_level});
  Context ctx;
  Environment env;
  for (auto& kv : split_top(envs)) {
    auto eqpos = kv.find('=');
    if (eqpos == std::string::npos) fail(ErrorKind::SyntaxError, "environment entry needs k=v: " + kv);
    std::string k = kv.substr(0, eqpos);
    TermP v = read_term(kv.substr(eqpos + 1));
    if (!v->fv->empty()) fail(ErrorKind::UnboundVariable, "environment value must be closed: " + kv);
    ctx[k] = v->type;
    env = env.bind(k, denote(v, {}, deepest));
  }
  TermP m = load_term(file, ctx);
  if (deepen > 0) {
    DenotationReport r = denote_deepening(m, deepen, env);
    if (io.json()) {
      json vals = json::array();
      for (auto& [k, d] : r.values) vals.push_back({{"level", k}, {"element", to_json(d)}});
      json lvl = r.level ? json(*r.level) : json(nullptr);
      io.out << json{{"values", vals}, {"stabilized", r.stabilized}, {"level", lvl}} << "\n";
      return kOk;
    }
    for (auto& [k, d] : r.values) io.out << "level " << k << ": " << to_string(d) << "\n";
    if (r.stabilized) io.out << "stabilized at level " << *r.level << "\n";
    else io.out << "not stabilized by level " << deepen << "\n";
    return kOk;
  }
  Element d = denote_view(m, env, std::max(level, eval_level), level);
  if (io.json()) io.out << json{{"level", level}, {"element", to_json(d)}} << "\n";
  else io.out << to_string(d) << "\n";
  return kOk;
}

int cmd_approx(const Io& io, const std::string& file, std::size_t steps, std::size_t size_cap, int check_level) {
  TermP m = load_term(file);
  ApproxBudget b;
  b.steps = steps;
  b.size_cap = size_cap;
  ApproxSet set = approximations(m, b);
  json members = json::array();
  for (auto& mem : set.members) {
    if (io.json())
      members.push_back({{"term", to_string(mem.term)}, {"status", dap_status_name(mem.status)},
                         {"reduct", to_string(mem.reduct)}});
    else
      io.out << "[" << dap_status_name(mem.status) << "] " << to_string(mem.term) << "\n";
  }
  int code = kOk;
  json check;
  if (check_level >= 0) {
    ApproxReport r = approximation_check(m, {}, check_level, b);
    check = {{"level", check_level}, {"approx", to_json(r.approx)}, {"exact", to_json(r.exact)},
             {"deep", to_json(r.deep)}, {"sound", r.sound}, {"deep_sound", r.deep_sound}, {"equal", r.equal}};
    if (!io.json())
      io.out << "level " << check_level << ": approx " << to_string(r.approx) << ", denote " << to_string(r.exact)
             << ", deepened " << to_string(r.deep) << "; within " << (r.sound ? "yes" : "no") << ", within deepened "
             << (r.deep_sound ? "yes" : "no") << ", equal " << (r.equal ? "yes" : "no") << "\n";
    if (!r.deep_sound) code = kCheckFailed;
  }
  if (io.json()) io.out << json{{"members", members}, {"check", check}} << "\n";
  return code;
}

int cmd_adequacy(const Io& io, const std::string& file, std::size_t steps, int levels) {
  TermP m = load_term(file);
  AdequacyReport r = adequacy_check(m, steps, levels);
  std::string den = r.denoted ? std::to_string(*r.denoted) : "bot";
  if (io.json()) {
    json lvl = r.den_level ? json(*r.den_level) : json(nullptr);
    io.out << json{{"verdict", verdict_name(r.verdict)}, {"op", to_string(r.op)}, {"steps", r.op.steps},
                   {"denote", den}, {"level", lvl}}
           << "\n";
  } else {
    io.out << verdict_name(r.verdict) << ": op " << to_string(r.op) << " after " << r.op.steps << " steps, denote "
           << den;
    if (r.den_level) io.out << " from level " << *r.den_level;
    io.out << "\n";
  }
  return r.verdict == Verdict::Fail ? kCheckFailed : kOk;
}

int cmd_define(const Io& io, const std::string& type, int level, const std::string& element, bool verify) {
  Type t = load_type(type);
  Element d = element_from_json(json::parse(read_source(element)));
  TermP m = definable_term(d, t, level);
  bool ok = !verify || definability_check(d, t, level);
  if (io.json()) {
    json j = term_to_json(m);
    if (verify) j["verified"] = ok;
    io.out << j << "\n";
  } else {
    io.out << to_string(m, true) << "\n";
    if (verify) io.out << (ok ? "verified" : "not verified") << "\n";
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_synth(const Io& io, const std::string& type, int check_level) {
  TypeExprP e = parse_type(read_source(type));
  TermP f = pcase_from_and(e);
  Type t = to_graph(e);
  bool ok = true;
  json checks = json::array();
  if (!io.json()) io.out << to_string(f, true) << "\n";
  for (int n = 0; n <= check_level; ++n) {
    bool c = app_level_check(f, t, n);
    ok = ok && c;
    if (io.json()) checks.push_back({{"level", n}, {"ok", c}});
    else io.out << "app_" << n << ": " << (c ? "ok" : "fails") << "\n";
  }
  if (io.json()) {
    json j = term_to_json(f);
    j["checks"] = checks;
    io.out << j << "\n";
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_distinguish(const Io& io, const std::string& mf, const std::string& nf, std::size_t budget, int level) {
  TermP m = load_term(mf), n = load_term(nf);
  DistinguishReport r = distinguish(m, n, level, budget);
  if (io.json()) {
    json j = {{"found_prime", r.found_prime}, {"success", r.success}};
    if (r.found_prime) {
      j["prime"] = to_json(r.a);
      j["context"] = to_string(r.context, true);
      j["on_m"] = to_string(r.on_m);
      j["on_n"] = to_string(r.on_n);
    }
    io.out << j << "\n";
  } else if (!r.found_prime) {
    io.out << "no prime of the first term is missing from the second at level " << level << "\n";
  } else {
    io.out << "prime " << to_string(r.a) << "\ncontext " << to_string(r.context) << "\n"
           << "on m: " << to_string(r.on_m) << ", on n: " << to_string(r.on_n) << "\n"
           << (r.success ? "distinguished" : "not distinguished") << "\n";
  }
  return r.success ? kOk : kCheckFailed;
}

int cmd_selftest(const Io& io, bool quick) {
  std::vector<SelftestLine> lines = selftest(quick);
  bool ok = true;
  json out = json::array();
  for (auto& l : lines) {
    ok = ok && l.pass;
    if (io.json()) out.push_back({{"name", l.name}, {"pass", l.pass}, {"detail", l.detail}});
    else io.out << (l.pass ? "PASS " : "FAIL ") << l.name << ": " << l.detail << "\n";
  }
  if (io.json()) io.out << out << "\n";
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recursively typed lambda calculus with a parallel conditional", "pcase"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  RunConfig cfg;
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine readable output");
  app.add_option("--prime-cap", cfg.prime_cap, "Primes per system and antichains per enumeration")
      ->check(CLI::PositiveNumber);
  app.add_option("--phi-bits", cfg.phi_bits, "Bit cap for the termination measure")->check(CLI::PositiveNumber);
  app.add_option("--level-cap", cfg.level_cap, "Largest level any flag may ask for")->check(CLI::PositiveNumber);

  std::string file, file2, strategy = "fair", type, element, envs;
  std::size_t budget = 2000, approx_steps = 64, dist_budget = 20000, size_cap = 14;
  int level = 2, deepen = 0, eval_level = 0, check_level = -1, levels = 6;
  bool trace = false, verify = false, quick = false;
  std::string dump_fmt;

  auto* check = app.add_subcommand("check", "Typecheck a term, or canonicalize a type");
  check->add_option("file", file, "Term or type file")->required();

  auto* reduce = app.add_subcommand("reduce", "Reduce a term");
  reduce->add_option("--term", file)->required();
  reduce->add_option("--strategy", strategy)->check(CLI::IsMember({"fair", "leftmost"}));
  reduce->add_option("--budget", budget)->check(CLI::PositiveNumber);
  reduce->add_flag("--trace", trace);

  auto* primes = app.add_subcommand("primes", "Print the prime system of a type at a level");
  primes->add_option("--type", type)->required();
  primes->add_option("--level", level)->required()->check(CLI::NonNegativeNumber);
  primes->add_option("--dump", dump_fmt)->check(CLI::IsMember({"json"}));

  auto* den = app.add_subcommand("denote", "Denotation of a term at a level");
  den->add_option("--term", file)->required();
  den->add_option("--level", level)->required()->check(CLI::NonNegativeNumber);
  den->add_option("--deepen", deepen, "Report levels 0..MAX and stabilization")->check(CLI::PositiveNumber);
  den->add_option("--eval-level", eval_level, "Evaluate at this level and view at --level")
      ->check(CLI::NonNegativeNumber);
  den->add_option("--env", envs, "Bindings k=TERM, comma separated");

  auto* apx = app.add_subcommand("approx", "Direct approximations below the reducts of a term");
  apx->add_option("--term", file)->required();
  apx->add_option("--steps", approx_steps)->check(CLI::PositiveNumber);
  apx->add_option("--size-cap", size_cap)->check(CLI::PositiveNumber);
  apx->add_option("--check-level", check_level)->check(CLI::NonNegativeNumber);

  auto* adq = app.add_subcommand("adequacy", "Compare operational and denotational values of a program");
  adq->add_option("--term", file)->required();
  adq->add_option("--steps", budget)->check(CLI::PositiveNumber);
  adq->add_option("--levels", levels)->check(CLI::PositiveNumber);

  auto* def = app.add_subcommand("define", "A closed term denoting a finite element");
  def->add_option("--type", type)->required();
  def->add_option("--level", level)->required()->check(CLI::NonNegativeNumber);
  def->add_option("--element", element, "JSON list of prime trees, or a file")->required();
  def->add_flag("--verify", verify);

  auto* syn = app.add_subcommand("pcase-synth", "The pcase function of a type, built from and");
  syn->add_option("--type", type)->required();
  syn->add_option("--check-level", check_level)->check(CLI::NonNegativeNumber);

  auto* dis = app.add_subcommand("distinguish", "A context separating two terms");
  dis->add_option("--m", file)->required();
  dis->add_option("--n", file2)->required();
  dis->add_option("--budget", dist_budget)->check(CLI::PositiveNumber);
  dis->add_option("--level", level)->check(CLI::NonNegativeNumber);

  auto* st = app.add_subcommand("selftest", "Run the module suites");
  st->add_flag("--quick", quick);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  cfg.output = as_json ? OutputMode::Json : OutputMode::Human;
  if (std::max({level, deepen, eval_level, check_level, levels}) > cfg.level_cap) {
    err << "error: a level exceeds --level-cap " << cfg.level_cap << "\n";
    return kUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  set_prime_cap(cfg.prime_cap);
  set_phi_bit_cap(cfg.phi_bits);
  Io io{out, err, cfg};

  try {
    const std::string& sub = cfg.subcommand;
    if (sub == "check") return cmd_check(io, file);
    if (sub == "reduce") return cmd_reduce(io, file, strategy, budget, trace);
    if (sub == "primes") return cmd_primes(io, type, level, !dump_fmt.empty());
    if (sub == "denote") return cmd_denote(io, file, level, deepen, eval_level, envs);
    if (sub == "approx") return cmd_approx(io, file, approx_steps, size_cap, check_level);
    if (sub == "adequacy") return cmd_adequacy(io, file, budget, levels);
    if (sub == "define") return cmd_define(io, type, level, element, verify);
    if (sub == "pcase-synth") return cmd_synth(io, type, check_level);
    if (sub == "distinguish") return cmd_distinguish(io, file, file2, dist_budget, level);
    if (sub == "selftest") return cmd_selftest(io, quick);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ResourceLimit ? kResource : kCheckFailed;
  } catch (const json::exception& e) {
    err << "error: bad JSON: " << e.what() << "\n";
    return kUsage;
  }
  err << "error: unknown subcommand\n";
  return kUsage;
}

}  // namespace pcase::cli
