#include <map>
#include <stdexcept>

#include "dynsys/parser.hpp"
#include "dynsys/sysdef.hpp"

namespace dynsys {

namespace {

// Each built-in is defined in the same DSL users write, so emission and
// re-parsing round-trip by construction.
const std::map<std::string, std::string>& builtin_sources() {
  static const std::map<std::string, std::string> sources = {
      {"collatz",
       "name = collatz\n"
       "admit = \"n >= 1\"\n"
       "if n % 2 = 1 -> 3 * n + 1\n"
       "if n % 2 = 0 -> n / 2\n"},
      {"collatz-reduced",
       // odd_part supplies the 2-adic quotient: n' = (3n+1) / 2^v2(3n+1).
       "name = collatz-reduced\n"
       "admit = \"n mod 6 = 1 or n mod 6 = 5\"\n"
       "fixed = 1\n"
       "if n >= 1 -> odd_part(3 * n + 1)\n"
       "family mu >= 1 : (2 ^ mu * m - 1) / 3 where integral and admitted\n"},
      {"collatz-reduced-nu2",
       // The exponent-above-one variant: the rule only fires when 4 | 3n+1,
       // so every applied step descends.
       "name = collatz-reduced-nu2\n"
       "admit = \"n mod 6 = 1 or n mod 6 = 5\"\n"
       "fixed = 1\n"
       "if (3 * n + 1) % 4 = 0 -> odd_part(3 * n + 1)\n"
       "family mu >= 2 : (2 ^ mu * m - 1) / 3 where integral and admitted\n"},
      {"simple",
       "name = simple\n"
       "admit = \"n >= 1\"\n"
       "fixed = 1\n"
       "if n = 1 -> n\n"
       "if n % 2 = 1 -> (n - 1) / 2\n"
       "if n % 2 = 0 -> n / 2\n"
       "list: 2 * m, 2 * m + 1\n"},
      {"mp",
       // Deterministic member of the multiplied-primes family: divide by the
       // smallest prime factor above 3. Use lpf_gt for the largest-factor
       // policy instead.
       "name = mp\n"
       "admit = \"n mod 6 = 1 or n mod 6 = 5\"\n"
       "fixed = 1\n"
       "if n = 1 -> n\n"
       "if n > 1 -> n / spf_gt(n, 3)\n"
       "primes p > 3 : m * p\n"},
      {"pow2",
       "name = pow2\n"
       "admit = \"n >= 0\"\n"
       "fixed = 0\n"
       "if n = 0 -> n\n"
       "if n > 0 -> n - msb2(n)\n"
       "family mu >= 0 : m + 2 ^ mu where integral and admitted\n"},
      {"incr",
       "name = incr\n"
       "admit = \"n mod 2 = 1\"\n"
       "fixed = 1\n"
       "if n >= 1 -> odd_part(n + 1)\n"
       "family mu >= 1 : 2 ^ mu * m - 1 where integral and admitted\n"},
  };
  return sources;
}

}  // namespace

const SystemDef& builtin(const std::string& name) {
  static const std::map<std::string, SystemDef>* parsed = [] {
    auto* out = new std::map<std::string, SystemDef>();
    for (const auto& [name, source] : builtin_sources()) {
      ParseResult pr = parse_system_def(source);
      if (!pr.ok()) {
        throw std::logic_error("built-in '" + name + "' failed to parse: " + pr.error->str());
      }
      out->emplace(name, std::move(*pr.system));
    }
    return out;
  }();
  auto it = parsed->find(name);
  if (it == parsed->end()) {
    throw std::invalid_argument("unknown system '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& [name, source] : builtin_sources()) names.push_back(name);
  return names;
}

const std::string& builtin_source(const std::string& name) {
  auto it = builtin_sources().find(name);
  if (it == builtin_sources().end()) {
    throw std::invalid_argument("unknown system '" + name + "'");
  }
  return it->second;
}

}  // namespace dynsys
