#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcase/cli.hpp"
#include "pcase/error.hpp"

namespace pcase::cli {

using nlohmann::json;

json to_json(const Prime& p) {
  switch (p.kind()) {
    case PKind::SumTag: return {{"tag", p.side() == 0 ? "sum0" : "sum1"}};
    case PKind::SumIn: return {{"tag", p.side() == 0 ? "in0" : "in1"}, {"arg", to_json(p.inner())}};
    case PKind::ProdIn: return {{"tag", p.side() == 0 ? "p0" : "p1"}, {"arg", to_json(p.inner())}};
    case PKind::Fun: {
      json args = json::array();
      for (auto& a : p.args()) args.push_back(to_json(a));
      return {{"tag", "fun"}, {"args", args}, {"result", to_json(p.result())}};
    }
  }
  return {};
}

json to_json(const Element& d) {
  json out = json::array();
  for (auto& p : d.primes) out.push_back(to_json(p));
  return out;
}

Prime prime_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tag") || !j["tag"].is_string())
    fail(ErrorKind::SyntaxError, "prime tree needs a string tag: " + j.dump());
  std::string tag = j["tag"];
  if (tag == "sum0" || tag == "sum1") return p_sum_tag(tag == "sum1");
  if (tag == "in0" || tag == "in1" || tag == "p0" || tag == "p1") {
    if (!j.contains("arg")) fail(ErrorKind::SyntaxError, "prime tree " + tag + " needs an arg");
    Prime a = prime_from_json(j["arg"]);
    int side = tag.back() == '1';
    return tag[0] == 'i' ? p_sum_in(side, a) : p_prod_in(side, a);
  }
  if (tag == "fun") {
    if (!j.contains("args") || !j["args"].is_array() || !j.contains("result"))
      fail(ErrorKind::SyntaxError, "fun prime needs args and result");
    std::vector<Prime> args;
    for (auto& a : j["args"]) args.push_back(prime_from_json(a));
    return p_fun(std::move(args), prime_from_json(j["result"]));
  }
  fail(ErrorKind::SyntaxError, "unknown prime tag " + tag);
}

Element element_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorKind::SyntaxError, "element must be a list of prime trees");
  Element d;
  for (auto& p : j) d.primes.push_back(prime_from_json(p));
  canonicalize(d.primes);
  return d;
}

json term_to_json(const TermP& m) { return {{"term", to_string(m, true)}, {"type", to_string(m->type)}}; }

TermP term_from_json(const json& j) {
  if (!j.is_object() || !j.contains("term")) fail(ErrorKind::SyntaxError, "term object needs a term field");
  return read_term(j["term"].get<std::string>());
}

json type_to_json(Type t) { return {{"type", to_string(t)}}; }

Type type_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) fail(ErrorKind::SyntaxError, "type object needs a type field");
  return to_graph(parse_type(j["type"].get<std::string>()));
}

std::string read_source(const std::string& path_or_text) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path_or_text, ec)) return path_or_text;
  std::ifstream in(path_or_text);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pcase::cli
