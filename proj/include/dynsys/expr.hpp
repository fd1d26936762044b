#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynsys/nat.hpp"

namespace dynsys {

// Expression trees cover both arithmetic terms and boolean guards; the
// parser type-checks which kind a given context accepts. Variable slot 0 is
// the point variable (n forward, m reverse), slot 1 the family parameter.

enum class AstKind : std::uint8_t {
  Lit,
  Var,
  Add,
  Sub,
  Mul,
  DivExact,
  Mod,
  Pow,
  OddPart,
  V2,
  Msb2,
  SpfGt,
  LpfGt,
  CmpEq,
  CmpNe,
  CmpLt,
  CmpLe,
  CmpGt,
  CmpGe,
  And,
  Or,
};

bool ast_kind_is_bool(AstKind k);

struct Ast {
  AstKind kind = AstKind::Lit;
  Nat lit;
  std::uint8_t var_slot = 0;
  std::string var_name;  // as written, for printing
  std::vector<Ast> args;
  int line = 0;
  int col = 0;

  bool is_bool() const { return ast_kind_is_bool(kind); }
};

bool ast_equal(const Ast& a, const Ast& b);
// Renders with minimal parentheses; re-parsing yields an equal tree.
std::string ast_to_string(const Ast& ast);

enum class EvalStatus : std::uint8_t {
  Ok,
  // Expression not defined at this point (non-exact division, subtraction
  // below zero, intrinsic domain error, no qualifying prime factor). A rule
  // whose guard or expression is inapplicable simply does not fire.
  Inapplicable,
  // Representation or work budget exceeded; must surface as a limit event.
  Limit,
};

struct EvalResult {
  EvalStatus status = EvalStatus::Ok;
  u128 value = 0;  // arithmetic result, or 0/1 for boolean programs
};

/// Flat postfix program compiled from an Ast, evaluated on a small stack.
/// Keeps trajectory stepping cheap without interpreting the tree shape.
class Program {
 public:
  Program() = default;
  static Program compile(const Ast& ast);

  EvalResult eval(u128 var0, u128 var1 = 0) const;
  bool empty() const { return code_.empty(); }

 private:
  struct Instr {
    std::uint8_t op;    // AstKind value, or a jump opcode below
    std::uint8_t slot;  // Var payload
    std::uint32_t jump; // short-circuit target for And/Or
    u128 imm;           // Lit payload
  };
  // And/Or compile to: lhs, CondJump(over rhs), rhs. When the jump fires it
  // leaves the lhs truth value on the stack as the result.
  enum : std::uint8_t { kJumpIfFalse = 200, kJumpIfTrue = 201 };
  std::vector<Instr> code_;
  std::uint32_t stack_need_ = 1;

  void emit(const Ast& ast);
  EvalResult run(u128* stack, u128 var0, u128 var1) const;
};

}  // namespace dynsys
