#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcase/primesys.hpp"
#include "pcase/termlang.hpp"

namespace pcase::cli {

enum class OutputMode { Human, Json };

struct RunConfig {
  std::string subcommand;
  OutputMode output = OutputMode::Human;
  std::size_t prime_cap = 200000;
  std::size_t phi_bits = std::size_t{1} << 18;
  int level_cap = 12;  // largest level any flag may ask for
};

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kResource = 3 };

// Parses argv, dispatches, and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Tagged prime trees: sum0, sum1, in0, in1 (with "arg"), p0, p1 (with "arg"),
// fun (with "args" and "result").
nlohmann::json to_json(const Prime& p);
nlohmann::json to_json(const Element& d);  // sorted list of prime trees
Prime prime_from_json(const nlohmann::json& j);
Element element_from_json(const nlohmann::json& j);

// Terms and types travel as their printed forms.
nlohmann::json term_to_json(const TermP& m);
TermP term_from_json(const nlohmann::json& j);
nlohmann::json type_to_json(Type t);
Type type_from_json(const nlohmann::json& j);

// File contents, or the text itself when no such file exists.
std::string read_source(const std::string& path_or_text);

struct SelftestLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Programs built from and, or, not, if0 and pcase over @0, @1 and bottom,
// plus divergent ones.
std::vector<TermP> adequacy_corpus(std::size_t count);
std::vector<SelftestLine> selftest(bool quick);

}  // namespace pcase::cli
