#include "dynsys/sysdef.hpp"

#include <stdexcept>

namespace dynsys {

bool system_equal(const SystemDef& a, const SystemDef& b) {
  if (a.name != b.name) return false;
  if (!ast_equal(a.admit.clauses, b.admit.clauses)) return false;
  if (a.fixed_point != b.fixed_point) return false;
  if (a.forward.size() != b.forward.size()) return false;
  for (std::size_t i = 0; i < a.forward.size(); ++i) {
    if (!ast_equal(a.forward[i].guard, b.forward[i].guard)) return false;
    if (!ast_equal(a.forward[i].expr, b.forward[i].expr)) return false;
  }
  if (a.reverse.size() != b.reverse.size()) return false;
  for (std::size_t i = 0; i < a.reverse.size(); ++i) {
    const ReverseFamily& fa = a.reverse[i];
    const ReverseFamily& fb = b.reverse[i];
    if (fa.kind != fb.kind || fa.param != fb.param || fa.param_lower != fb.param_lower) return false;
    if (fa.list_exprs.size() != fb.list_exprs.size()) return false;
    for (std::size_t j = 0; j < fa.list_exprs.size(); ++j) {
      if (!ast_equal(fa.list_exprs[j], fb.list_exprs[j])) return false;
    }
    if (fa.kind != ReverseFamily::Kind::FiniteList && !ast_equal(fa.expr, fb.expr)) return false;
  }
  return true;
}

bool admits(const SystemDef& sys, Nat n) { return sys.admit.accepts(n); }

StepResult eval_forward(const SystemDef& sys, Nat n) {
  if (!admits(sys, n)) {
    throw std::domain_error("eval_forward: value " + n.str() + " is not admitted by system " +
                            sys.name);
  }
  for (const ForwardRule& rule : sys.forward) {
    EvalResult g = rule.guard_prog.eval(n.v);
    if (g.status == EvalStatus::Limit) return {StepResult::Kind::Limit, n, false};
    if (g.status != EvalStatus::Ok || g.value == 0) continue;
    EvalResult r = rule.expr_prog.eval(n.v);
    if (r.status == EvalStatus::Limit) return {StepResult::Kind::Limit, n, false};
    if (r.status != EvalStatus::Ok) continue;  // inapplicable, try next rule
    Nat out{r.value};
    if (out == n) return {StepResult::Kind::SelfFixed, n, false};
    return {StepResult::Kind::Next, out, !admits(sys, out)};
  }
  return {StepResult::Kind::NoRule, n, false};
}

std::string validate_system(const SystemDef& sys) {
  if (!sys.fixed_point) return {};
  Nat fp = *sys.fixed_point;
  if (!admits(sys, fp)) {
    return "declared fixed point " + fp.str() + " is not admitted";
  }
  StepResult step = eval_forward(sys, fp);
  if (step.kind != StepResult::Kind::SelfFixed) {
    std::string got = step.kind == StepResult::Kind::Next ? step.value.str()
                      : step.kind == StepResult::Kind::NoRule ? std::string("no applicable rule")
                                                              : std::string("evaluation limit");
    return "declared fixed point " + fp.str() + " does not satisfy f(" + fp.str() + ") = " +
           fp.str() + " (got " + got + ")";
  }
  return {};
}

}  // namespace dynsys
