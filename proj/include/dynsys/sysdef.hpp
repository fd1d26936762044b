#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynsys/expr.hpp"
#include "dynsys/nat.hpp"

namespace dynsys {

/// Membership test for the admitted set. A guard that fails to evaluate at
/// some point simply rejects that point; admission is total.
struct AdmissionPredicate {
  Ast clauses;
  Program prog;

  bool accepts(Nat n) const {
    EvalResult r = prog.eval(n.v);
    return r.status == EvalStatus::Ok && r.value != 0;
  }
};

/// One forward rule "if <guard> -> <expr>". Rules are ordered; the first
/// rule whose guard holds and whose expression evaluates to an exact natural
/// applies. Non-exact division makes a rule inapplicable, not an error.
struct ForwardRule {
  Ast guard;
  Ast expr;
  Program guard_prog;
  Program expr_prog;
};

struct ReverseFamily {
  enum class Kind : std::uint8_t { FiniteList, Exponent, Prime };
  Kind kind = Kind::FiniteList;
  std::vector<Ast> list_exprs;          // FiniteList
  std::vector<Program> list_progs;
  std::string param;                    // Exponent / Prime parameter name
  Nat param_lower;                      // Exponent: param >= lower; Prime: p > lower
  Ast expr;                             // Exponent / Prime body in m and param
  Program prog;
};

struct SystemDef {
  std::string name;
  AdmissionPredicate admit;
  std::vector<ForwardRule> forward;
  std::vector<ReverseFamily> reverse;
  std::optional<Nat> fixed_point;

  bool has_reverse() const { return !reverse.empty(); }
};

bool system_equal(const SystemDef& a, const SystemDef& b);

struct StepResult {
  enum class Kind : std::uint8_t {
    Next,         // value holds the successor
    SelfFixed,    // n' = n
    NoRule,       // no guard matched with an exact result
    Limit,        // representation/work budget exceeded: a limit event
  };
  Kind kind = Kind::NoRule;
  Nat value;
  // Successor fell outside the admitted set. Surfaced, never silently kept.
  bool leaves_domain = false;
};

bool admits(const SystemDef& sys, Nat n);

/// Applies the first matching forward rule. Precondition: admits(sys, n);
/// throws std::domain_error otherwise.
StepResult eval_forward(const SystemDef& sys, Nat n);

/// Post-parse validation: declared fixed point must be admitted and satisfy
/// eval_forward(fp) = SelfFixed. Returns an error message or empty.
std::string validate_system(const SystemDef& sys);

/// Built-in systems: collatz, collatz-reduced, collatz-reduced-nu2, simple,
/// mp, pow2, incr. Throws std::invalid_argument for unknown names.
const SystemDef& builtin(const std::string& name);
std::vector<std::string> builtin_names();
/// The .dsys source text a built-in is defined by.
const std::string& builtin_source(const std::string& name);

}  // namespace dynsys
