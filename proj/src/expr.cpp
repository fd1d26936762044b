#include "dynsys/expr.hpp"

#include <algorithm>
#include <array>

namespace dynsys {

bool ast_kind_is_bool(AstKind k) {
  switch (k) {
    case AstKind::CmpEq:
    case AstKind::CmpNe:
    case AstKind::CmpLt:
    case AstKind::CmpLe:
    case AstKind::CmpGt:
    case AstKind::CmpGe:
    case AstKind::And:
    case AstKind::Or:
      return true;
    default:
      return false;
  }
}

bool ast_equal(const Ast& a, const Ast& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case AstKind::Lit:
      return a.lit == b.lit;
    case AstKind::Var:
      return a.var_slot == b.var_slot && a.var_name == b.var_name;
    default:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!ast_equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

namespace {

// Larger binds tighter. Comparisons are non-associative.
int precedence(AstKind k) {
  switch (k) {
    case AstKind::Or: return 1;
    case AstKind::And: return 2;
    case AstKind::CmpEq:
    case AstKind::CmpNe:
    case AstKind::CmpLt:
    case AstKind::CmpLe:
    case AstKind::CmpGt:
    case AstKind::CmpGe: return 3;
    case AstKind::Add:
    case AstKind::Sub: return 4;
    case AstKind::Mul:
    case AstKind::DivExact:
    case AstKind::Mod: return 5;
    case AstKind::Pow: return 6;
    default: return 7;
  }
}

const char* op_text(AstKind k) {
  switch (k) {
    case AstKind::Add: return " + ";
    case AstKind::Sub: return " - ";
    case AstKind::Mul: return " * ";
    case AstKind::DivExact: return " / ";
    case AstKind::Mod: return " % ";
    case AstKind::Pow: return " ^ ";
    case AstKind::CmpEq: return " = ";
    case AstKind::CmpNe: return " != ";
    case AstKind::CmpLt: return " < ";
    case AstKind::CmpLe: return " <= ";
    case AstKind::CmpGt: return " > ";
    case AstKind::CmpGe: return " >= ";
    case AstKind::And: return " and ";
    case AstKind::Or: return " or ";
    default: return "?";
  }
}

void render(const Ast& ast, int parent_prec, std::string& out) {
  switch (ast.kind) {
    case AstKind::Lit:
      out += ast.lit.str();
      return;
    case AstKind::Var:
      out += ast.var_name;
      return;
    case AstKind::OddPart:
    case AstKind::V2:
    case AstKind::Msb2:
    case AstKind::SpfGt:
    case AstKind::LpfGt: {
      const char* name = ast.kind == AstKind::OddPart ? "odd_part"
                         : ast.kind == AstKind::V2    ? "v2"
                         : ast.kind == AstKind::Msb2  ? "msb2"
                         : ast.kind == AstKind::SpfGt ? "spf_gt"
                                                      : "lpf_gt";
      out += name;
      out += '(';
      for (std::size_t i = 0; i < ast.args.size(); ++i) {
        if (i > 0) out += ", ";
        render(ast.args[i], 0, out);
      }
      out += ')';
      return;
    }
    default:
      break;
  }
  int prec = precedence(ast.kind);
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  // + - * / % are left-associative, ^ right-associative; parenthesize the
  // side that would otherwise re-associate.
  int left_min = prec;
  int right_min = prec + 1;
  if (ast.kind == AstKind::Pow) {
    left_min = prec + 1;
    right_min = prec;
  }
  render(ast.args[0], left_min, out);
  out += op_text(ast.kind);
  render(ast.args[1], right_min, out);
  if (parens) out += ')';
}

}  // namespace

std::string ast_to_string(const Ast& ast) {
  std::string out;
  render(ast, 0, out);
  return out;
}

Program Program::compile(const Ast& ast) {
  Program p;
  p.emit(ast);
  std::uint32_t depth = 0;
  std::uint32_t peak = 1;
  for (const Instr& in : p.code_) {
    switch (in.op) {
      case static_cast<std::uint8_t>(AstKind::Lit):
      case static_cast<std::uint8_t>(AstKind::Var):
        ++depth;
        peak = std::max(peak, depth);
        break;
      case kJumpIfFalse:
      case kJumpIfTrue:
        break;  // net effect on the taken path is neutral
      case static_cast<std::uint8_t>(AstKind::OddPart):
      case static_cast<std::uint8_t>(AstKind::V2):
      case static_cast<std::uint8_t>(AstKind::Msb2):
        break;
      default:
        --depth;
        break;
    }
  }
  p.stack_need_ = peak + 2;
  return p;
}

void Program::emit(const Ast& ast) {
  switch (ast.kind) {
    case AstKind::Lit:
      code_.push_back({static_cast<std::uint8_t>(AstKind::Lit), 0, 0, ast.lit.v});
      return;
    case AstKind::Var:
      code_.push_back({static_cast<std::uint8_t>(AstKind::Var), ast.var_slot, 0, 0});
      return;
    case AstKind::And:
    case AstKind::Or: {
      emit(ast.args[0]);
      std::size_t probe = code_.size();
      std::uint8_t jop = ast.kind == AstKind::And ? kJumpIfFalse : kJumpIfTrue;
      code_.push_back({jop, 0, 0, 0});
      emit(ast.args[1]);
      code_[probe].jump = static_cast<std::uint32_t>(code_.size());
      return;
    }
    default:
      break;
  }
  for (const Ast& arg : ast.args) emit(arg);
  code_.push_back({static_cast<std::uint8_t>(ast.kind), 0, 0, 0});
}

EvalResult Program::eval(u128 var0, u128 var1) const {
  if (stack_need_ <= 32) {
    std::array<u128, 32> stack;
    return run(stack.data(), var0, var1);
  }
  std::vector<u128> stack(stack_need_);
  return run(stack.data(), var0, var1);
}

EvalResult Program::run(u128* stack, u128 var0, u128 var1) const {
  std::size_t sp = 0;
  std::size_t pc = 0;
  const std::size_t n = code_.size();
  while (pc < n) {
    const Instr& in = code_[pc];
    if (in.op == kJumpIfFalse || in.op == kJumpIfTrue) {
      bool top = stack[sp - 1] != 0;
      if (top == (in.op == kJumpIfTrue)) {
        pc = in.jump;  // keep the lhs value as the result
        continue;
      }
      --sp;
      ++pc;
      continue;
    }
    AstKind op = static_cast<AstKind>(in.op);
    switch (op) {
      case AstKind::Lit:
        stack[sp++] = in.imm;
        break;
      case AstKind::Var:
        stack[sp++] = in.slot == 0 ? var0 : var1;
        break;
      case AstKind::OddPart:
      case AstKind::V2:
      case AstKind::Msb2: {
        u128 x = stack[sp - 1];
        if (x == 0) return {EvalStatus::Inapplicable, 0};
        stack[sp - 1] = op == AstKind::OddPart ? odd_part_u128(x)
                        : op == AstKind::V2    ? v2_u128(x)
                                               : msb2_u128(x);
        break;
      }
      default: {
        u128 b = stack[--sp];
        u128 a = stack[sp - 1];
        u128 out = 0;
        switch (op) {
          case AstKind::Add:
            if (!checked_add(a, b, out)) return {EvalStatus::Limit, 0};
            break;
          case AstKind::Sub:
            if (!checked_sub(a, b, out)) return {EvalStatus::Inapplicable, 0};
            break;
          case AstKind::Mul:
            if (!checked_mul(a, b, out)) return {EvalStatus::Limit, 0};
            break;
          case AstKind::DivExact:
            if (b == 0 || a % b != 0) return {EvalStatus::Inapplicable, 0};
            out = a / b;
            break;
          case AstKind::Mod:
            if (b == 0) return {EvalStatus::Inapplicable, 0};
            out = a % b;
            break;
          case AstKind::Pow:
            if (!checked_pow(a, b, out)) return {EvalStatus::Limit, 0};
            break;
          case AstKind::SpfGt:
          case AstKind::LpfGt: {
            FactorStatus st = op == AstKind::SpfGt ? smallest_prime_factor_gt(a, b, out)
                                                   : largest_prime_factor_gt(a, b, out);
            if (st == FactorStatus::BudgetExceeded) return {EvalStatus::Limit, 0};
            if (st == FactorStatus::None) return {EvalStatus::Inapplicable, 0};
            break;
          }
          case AstKind::CmpEq: out = a == b ? 1 : 0; break;
          case AstKind::CmpNe: out = a != b ? 1 : 0; break;
          case AstKind::CmpLt: out = a < b ? 1 : 0; break;
          case AstKind::CmpLe: out = a <= b ? 1 : 0; break;
          case AstKind::CmpGt: out = a > b ? 1 : 0; break;
          case AstKind::CmpGe: out = a >= b ? 1 : 0; break;
          default:
            return {EvalStatus::Inapplicable, 0};
        }
        stack[sp - 1] = out;
      }
    }
    ++pc;
  }
  return {EvalStatus::Ok, stack[0]};
}

}  // namespace dynsys
