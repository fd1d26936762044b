#include <stdexcept>

#include "doctest.h"
#include "dynsys/parser.hpp"
#include "dynsys/sysdef.hpp"

using namespace dynsys;

TEST_CASE("built-in admission predicates") {
  const SystemDef& collatz = builtin("collatz");
  CHECK(admits(collatz, Nat::of(1)));
  CHECK(!admits(collatz, Nat::of(0)));

  const SystemDef& reduced = builtin("collatz-reduced");
  CHECK(admits(reduced, Nat::of(25)));   // 25 = 6*4 + 1
  CHECK(!admits(reduced, Nat::of(27)));  // divisible by 3
  CHECK(!admits(reduced, Nat::of(0)));

  const SystemDef& pow2 = builtin("pow2");
  CHECK(admits(pow2, Nat::of(0)));  // the fixed point itself

  CHECK_THROWS_AS((void)builtin("no-such-system"), std::invalid_argument);
}

TEST_CASE("the 6k+-1 correspondence holds exhaustively to 1e5") {
  const SystemDef& reduced = builtin("collatz-reduced");
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    bool residue = n % 6 == 1 || n % 6 == 5;
    bool indivisible = n % 2 != 0 && n % 3 != 0;
    CHECK(residue == indivisible);
    CHECK(admits(reduced, Nat::of(n)) == residue);
  }
}

TEST_CASE("eval_forward applies the first matching rule") {
  CHECK(eval_forward(builtin("collatz"), Nat::of(7)).value == Nat::of(22));
  CHECK(eval_forward(builtin("collatz"), Nat::of(22)).value == Nat::of(11));

  StepResult fixed = eval_forward(builtin("simple"), Nat::of(1));
  CHECK(fixed.kind == StepResult::Kind::SelfFixed);

  // (3*7+1)/2 = 11 with a single halving
  CHECK(eval_forward(builtin("collatz-reduced"), Nat::of(7)).value == Nat::of(11));

  CHECK_THROWS_AS((void)eval_forward(builtin("collatz-reduced"), Nat::of(27)), std::domain_error);
}

TEST_CASE("guarded variant leaves values without an applicable rule") {
  const SystemDef& nu2 = builtin("collatz-reduced-nu2");
  // 3*7+1 = 22 = 2 * 11: only one halving available, the nu>1 guard fails.
  StepResult stuck = eval_forward(nu2, Nat::of(7));
  CHECK(stuck.kind == StepResult::Kind::NoRule);
  // 3*5+1 = 16: four halvings.
  StepResult ok = eval_forward(nu2, Nat::of(5));
  CHECK(ok.kind == StepResult::Kind::Next);
  CHECK(ok.value == Nat::of(1));
}

TEST_CASE("declared fixed points verify as self-fixed") {
  for (const std::string& name : builtin_names()) {
    const SystemDef& sys = builtin(name);
    if (!sys.fixed_point) continue;
    StepResult step = eval_forward(sys, *sys.fixed_point);
    CHECK_MESSAGE(step.kind == StepResult::Kind::SelfFixed, name);
  }
}

TEST_CASE("mp built-in divides by the smallest prime factor above 3") {
  const SystemDef& mp = builtin("mp");
  CHECK(eval_forward(mp, Nat::of(35)).value == Nat::of(7));    // 35 = 5*7 -> /5
  CHECK(eval_forward(mp, Nat::of(121)).value == Nat::of(11));  // 121 = 11^2
  CHECK(eval_forward(mp, Nat::of(5)).value == Nat::of(1));
}

TEST_CASE("overflow surfaces as a limit event, never wraps") {
  const SystemDef& collatz = builtin("collatz");
  // 3n+1 over the 128-bit representation.
  Nat huge{(~static_cast<u128>(0)) - 2};
  StepResult step = eval_forward(collatz, huge);
  CHECK(step.kind == StepResult::Kind::Limit);
}

TEST_CASE("domain exits are flagged, never silently accepted") {
  // A map that sends 5 -> 12 outside its own odd domain.
  ParseResult pr = parse_system_def(
      "name = leaky\n"
      "admit = \"n mod 2 = 1\"\n"
      "if n = 1 -> n\n"
      "if n = 5 -> 12\n"
      "if n > 1 -> n - 2\n");
  REQUIRE(pr.ok());
  StepResult step = eval_forward(*pr.system, Nat::of(5));
  CHECK(step.kind == StepResult::Kind::Next);
  CHECK(step.value == Nat::of(12));
  CHECK(step.leaves_domain);
  StepResult fine = eval_forward(*pr.system, Nat::of(7));
  CHECK(!fine.leaves_domain);
}
