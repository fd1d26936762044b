#include "dynsys/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace dynsys {

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << "line " << line << ", col " << col << ": " << message;
  return os.str();
}

namespace {

struct Tok {
  enum class T : std::uint8_t { Ident, Num, Sym, Str, End };
  T t = T::End;
  std::string text;
  Nat num;
  int col = 1;
};

struct ParseError {
  int col;
  std::string message;
};

// Tokenizes one line. Throws ParseError on bytes outside the token set.
std::vector<Tok> lex_line(std::string_view line) {
  std::vector<Tok> out;
  std::size_t i = 0;
  auto col = [&](std::size_t pos) { return static_cast<int>(pos) + 1; };
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;  // comment to end of line
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) {
        ++i;
      }
      out.push_back({Tok::T::Ident, std::string(line.substr(start, i - start)), Nat{}, col(start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      auto num = Nat::parse(line.substr(start, i - start));
      if (!num) throw ParseError{col(start), "number does not fit in 128 bits"};
      out.push_back({Tok::T::Num, std::string(line.substr(start, i - start)), *num, col(start)});
      continue;
    }
    if (c == '"') {
      std::size_t end = line.find('"', i + 1);
      if (end == std::string_view::npos) throw ParseError{col(i), "unterminated string"};
      out.push_back({Tok::T::Str, std::string(line.substr(i + 1, end - i - 1)), Nat{}, col(i + 1)});
      i = end + 1;
      continue;
    }
    // multi-char symbols first
    auto two = line.substr(i, 2);
    if (two == "->" || two == "!=" || two == "<=" || two == ">=") {
      out.push_back({Tok::T::Sym, std::string(two), Nat{}, col(i)});
      i += 2;
      continue;
    }
    if (std::string_view("=<>+-*/%^(),:").find(c) != std::string_view::npos) {
      out.push_back({Tok::T::Sym, std::string(1, c), Nat{}, col(i)});
      ++i;
      continue;
    }
    throw ParseError{col(i), std::string("unexpected character '") + c + "'"};
  }
  out.push_back({Tok::T::End, "", Nat{}, col(line.size())});
  return out;
}

constexpr int kMaxExprDepth = 100;

// Variables visible in the current context, name -> program slot.
using VarScope = std::map<std::string, std::uint8_t>;

class ExprParser {
 public:
  ExprParser(const std::vector<Tok>& toks, std::size_t pos, const VarScope& vars)
      : toks_(toks), pos_(pos), vars_(vars) {}

  Ast parse_bool() {
    Ast a = parse_or(0);
    if (!a.is_bool()) throw ParseError{a.col, "expected a condition, found an arithmetic expression"};
    return a;
  }

  Ast parse_arith() {
    Ast a = parse_or(0);
    if (a.is_bool()) throw ParseError{a.col, "expected an arithmetic expression, found a condition"};
    return a;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::vector<Tok>& toks_;
  std::size_t pos_;
  const VarScope& vars_;

  const Tok& peek() const { return toks_[pos_]; }
  const Tok& take() { return toks_[pos_++]; }

  bool at_sym(std::string_view s) const {
    return peek().t == Tok::T::Sym && peek().text == s;
  }
  bool at_kw(std::string_view s) const {
    return peek().t == Tok::T::Ident && peek().text == s;
  }

  Ast mk(AstKind k, Ast lhs, Ast rhs, int col) {
    Ast a;
    a.kind = k;
    a.col = col;
    bool want_bool = k == AstKind::And || k == AstKind::Or;
    if (lhs.is_bool() != want_bool) {
      throw ParseError{col, want_bool ? "'and'/'or' needs conditions on both sides"
                                      : "operator needs arithmetic operands"};
    }
    if (rhs.is_bool() != want_bool) {
      throw ParseError{col, want_bool ? "'and'/'or' needs conditions on both sides"
                                      : "operator needs arithmetic operands"};
    }
    a.args.push_back(std::move(lhs));
    a.args.push_back(std::move(rhs));
    return a;
  }

  Ast parse_or(int depth) {
    Ast lhs = parse_and(depth + 1);
    while (at_kw("or")) {
      int col = take().col;
      Ast rhs = parse_and(depth + 1);
      lhs = mk(AstKind::Or, std::move(lhs), std::move(rhs), col);
    }
    return lhs;
  }

  Ast parse_and(int depth) {
    Ast lhs = parse_cmp(depth + 1);
    while (at_kw("and")) {
      int col = take().col;
      Ast rhs = parse_cmp(depth + 1);
      lhs = mk(AstKind::And, std::move(lhs), std::move(rhs), col);
    }
    return lhs;
  }

  Ast parse_cmp(int depth) {
    Ast lhs = parse_add(depth + 1);
    AstKind k;
    if (at_sym("=")) k = AstKind::CmpEq;
    else if (at_sym("!=")) k = AstKind::CmpNe;
    else if (at_sym("<")) k = AstKind::CmpLt;
    else if (at_sym("<=")) k = AstKind::CmpLe;
    else if (at_sym(">")) k = AstKind::CmpGt;
    else if (at_sym(">=")) k = AstKind::CmpGe;
    else return lhs;
    int col = take().col;
    Ast rhs = parse_add(depth + 1);
    return mk(k, std::move(lhs), std::move(rhs), col);
  }

  Ast parse_add(int depth) {
    Ast lhs = parse_mul(depth + 1);
    while (at_sym("+") || at_sym("-")) {
      AstKind k = peek().text == "+" ? AstKind::Add : AstKind::Sub;
      int col = take().col;
      Ast rhs = parse_mul(depth + 1);
      lhs = mk(k, std::move(lhs), std::move(rhs), col);
    }
    return lhs;
  }

  Ast parse_mul(int depth) {
    Ast lhs = parse_pow(depth + 1);
    while (at_sym("*") || at_sym("/") || at_sym("%") || at_kw("mod")) {
      AstKind k = peek().text == "*"   ? AstKind::Mul
                  : peek().text == "/" ? AstKind::DivExact
                                       : AstKind::Mod;
      int col = take().col;
      Ast rhs = parse_pow(depth + 1);
      lhs = mk(k, std::move(lhs), std::move(rhs), col);
    }
    return lhs;
  }

  Ast parse_pow(int depth) {
    Ast lhs = parse_atom(depth + 1);
    if (at_sym("^")) {
      int col = take().col;
      Ast rhs = parse_pow(depth + 1);  // right-associative
      return mk(AstKind::Pow, std::move(lhs), std::move(rhs), col);
    }
    return lhs;
  }

  Ast parse_atom(int depth) {
    if (depth > kMaxExprDepth) throw ParseError{peek().col, "expression nested too deeply"};
    const Tok& t = peek();
    if (t.t == Tok::T::Num) {
      take();
      Ast a;
      a.kind = AstKind::Lit;
      a.lit = t.num;
      a.col = t.col;
      return a;
    }
    if (t.t == Tok::T::Sym && t.text == "(") {
      take();
      Ast inner = parse_or(depth + 1);
      if (!at_sym(")")) throw ParseError{peek().col, "expected ')'"};
      take();
      return inner;
    }
    if (t.t == Tok::T::Ident) {
      // keywords never start an atom
      if (t.text == "and" || t.text == "or" || t.text == "mod" || t.text == "where") {
        throw ParseError{t.col, "expected a value, found keyword '" + t.text + "'"};
      }
      take();
      if (at_sym("(")) {
        take();
        std::size_t arity;
        AstKind k;
        if (t.text == "odd_part") { k = AstKind::OddPart; arity = 1; }
        else if (t.text == "v2") { k = AstKind::V2; arity = 1; }
        else if (t.text == "msb2") { k = AstKind::Msb2; arity = 1; }
        else if (t.text == "spf_gt") { k = AstKind::SpfGt; arity = 2; }
        else if (t.text == "lpf_gt") { k = AstKind::LpfGt; arity = 2; }
        else throw ParseError{t.col, "unknown intrinsic '" + t.text + "'"};
        Ast a;
        a.kind = k;
        a.col = t.col;
        for (std::size_t i = 0; i < arity; ++i) {
          if (i > 0) {
            if (!at_sym(",")) throw ParseError{peek().col, "expected ','"};
            take();
          }
          Ast arg = parse_or(depth + 1);
          if (arg.is_bool()) throw ParseError{arg.col, "intrinsic arguments must be arithmetic"};
          a.args.push_back(std::move(arg));
        }
        if (!at_sym(")")) throw ParseError{peek().col, "expected ')'"};
        take();
        return a;
      }
      auto it = vars_.find(t.text);
      if (it == vars_.end()) {
        throw ParseError{t.col, "free variable '" + t.text + "' is not allowed here"};
      }
      Ast a;
      a.kind = AstKind::Var;
      a.var_slot = it->second;
      a.var_name = t.text;
      a.col = t.col;
      return a;
    }
    throw ParseError{t.col, "expected a value"};
  }
};

struct LineParser {
  SystemDef sys;
  bool saw_name = false;
  bool saw_admit = false;
  int fixed_line = 0;

  void expect_end(const std::vector<Tok>& toks, std::size_t pos) {
    if (toks[pos].t != Tok::T::End) {
      throw ParseError{toks[pos].col, "unexpected trailing input"};
    }
  }

  void parse_line(const std::vector<Tok>& toks) {
    const Tok& head = toks[0];
    if (head.t == Tok::T::End) return;
    if (head.t != Tok::T::Ident) throw ParseError{head.col, "expected a directive"};

    if (head.text == "name") {
      if (saw_name) throw ParseError{head.col, "duplicate 'name'"};
      if (toks[1].t != Tok::T::Sym || toks[1].text != "=") throw ParseError{toks[1].col, "expected '='"};
      if (toks[2].t != Tok::T::Ident) throw ParseError{toks[2].col, "expected an identifier"};
      // Names may contain hyphenated segments (collatz-reduced-nu2); the
      // lexer splits on '-', so rejoin strictly contiguous runs.
      std::string name = toks[2].text;
      std::size_t pos = 3;
      int next_col = toks[2].col + static_cast<int>(toks[2].text.size());
      while (toks[pos].t == Tok::T::Sym && toks[pos].text == "-" && toks[pos].col == next_col &&
             (toks[pos + 1].t == Tok::T::Ident || toks[pos + 1].t == Tok::T::Num) &&
             toks[pos + 1].col == next_col + 1) {
        name += "-" + toks[pos + 1].text;
        next_col = toks[pos + 1].col + static_cast<int>(toks[pos + 1].text.size());
        pos += 2;
      }
      sys.name = name;
      expect_end(toks, pos);
      saw_name = true;
      return;
    }
    if (head.text == "admit") {
      if (saw_admit) throw ParseError{head.col, "duplicate 'admit'"};
      if (toks[1].t != Tok::T::Sym || toks[1].text != "=") throw ParseError{toks[1].col, "expected '='"};
      if (toks[2].t != Tok::T::Str) throw ParseError{toks[2].col, "expected a quoted condition"};
      std::vector<Tok> inner;
      try {
        inner = lex_line(toks[2].text);
      } catch (const ParseError& e) {
        throw ParseError{toks[2].col + e.col - 1, e.message};
      }
      VarScope vars{{"n", 0}};
      ExprParser ep(inner, 0, vars);
      Ast cond;
      try {
        cond = ep.parse_bool();
        if (inner[ep.pos()].t != Tok::T::End) {
          throw ParseError{inner[ep.pos()].col, "unexpected trailing input in condition"};
        }
      } catch (const ParseError& e) {
        throw ParseError{toks[2].col + e.col - 1, e.message};
      }
      expect_end(toks, 3);
      sys.admit.clauses = std::move(cond);
      saw_admit = true;
      return;
    }
    if (head.text == "fixed") {
      if (sys.fixed_point) throw ParseError{head.col, "duplicate 'fixed'"};
      if (toks[1].t != Tok::T::Sym || toks[1].text != "=") throw ParseError{toks[1].col, "expected '='"};
      if (toks[2].t != Tok::T::Num) throw ParseError{toks[2].col, "expected a natural number"};
      sys.fixed_point = toks[2].num;
      expect_end(toks, 3);
      return;
    }
    if (head.text == "if") {
      VarScope vars{{"n", 0}};
      ExprParser ep(toks, 1, vars);
      Ast guard = ep.parse_bool();
      std::size_t pos = ep.pos();
      if (toks[pos].t != Tok::T::Sym || toks[pos].text != "->") {
        throw ParseError{toks[pos].col, "expected '->' after rule guard"};
      }
      ExprParser body(toks, pos + 1, vars);
      Ast expr = body.parse_arith();
      expect_end(toks, body.pos());
      ForwardRule rule;
      rule.guard = std::move(guard);
      rule.expr = std::move(expr);
      sys.forward.push_back(std::move(rule));
      return;
    }
    if (head.text == "list") {
      if (toks[1].t != Tok::T::Sym || toks[1].text != ":") throw ParseError{toks[1].col, "expected ':'"};
      ReverseFamily fam;
      fam.kind = ReverseFamily::Kind::FiniteList;
      VarScope vars{{"m", 0}};
      std::size_t pos = 2;
      while (true) {
        ExprParser ep(toks, pos, vars);
        fam.list_exprs.push_back(ep.parse_arith());
        pos = ep.pos();
        if (toks[pos].t == Tok::T::Sym && toks[pos].text == ",") {
          ++pos;
          continue;
        }
        break;
      }
      expect_end(toks, pos);
      sys.reverse.push_back(std::move(fam));
      return;
    }
    if (head.text == "family") {
      // family <param> >= <nat> : <expr> where integral and admitted
      if (toks[1].t != Tok::T::Ident) throw ParseError{toks[1].col, "expected a parameter name"};
      ReverseFamily fam;
      fam.kind = ReverseFamily::Kind::Exponent;
      fam.param = toks[1].text;
      if (fam.param == "m" || fam.param == "n") {
        throw ParseError{toks[1].col, "parameter name '" + fam.param + "' is reserved"};
      }
      if (toks[2].t != Tok::T::Sym || toks[2].text != ">=") throw ParseError{toks[2].col, "expected '>='"};
      if (toks[3].t != Tok::T::Num) throw ParseError{toks[3].col, "expected a natural number"};
      fam.param_lower = toks[3].num;
      if (toks[4].t != Tok::T::Sym || toks[4].text != ":") throw ParseError{toks[4].col, "expected ':'"};
      VarScope vars{{"m", 0}, {fam.param, 1}};
      ExprParser ep(toks, 5, vars);
      fam.expr = ep.parse_arith();
      std::size_t pos = ep.pos();
      const char* tail[] = {"where", "integral", "and", "admitted"};
      for (const char* word : tail) {
        if (toks[pos].t != Tok::T::Ident || toks[pos].text != word) {
          throw ParseError{toks[pos].col, std::string("expected '") + word + "'"};
        }
        ++pos;
      }
      expect_end(toks, pos);
      sys.reverse.push_back(std::move(fam));
      return;
    }
    if (head.text == "primes") {
      // primes <param> > <nat> : <expr>
      if (toks[1].t != Tok::T::Ident) throw ParseError{toks[1].col, "expected a parameter name"};
      ReverseFamily fam;
      fam.kind = ReverseFamily::Kind::Prime;
      fam.param = toks[1].text;
      if (fam.param == "m" || fam.param == "n") {
        throw ParseError{toks[1].col, "parameter name '" + fam.param + "' is reserved"};
      }
      if (toks[2].t != Tok::T::Sym || toks[2].text != ">") throw ParseError{toks[2].col, "expected '>'"};
      if (toks[3].t != Tok::T::Num) throw ParseError{toks[3].col, "expected a natural number"};
      fam.param_lower = toks[3].num;
      if (toks[4].t != Tok::T::Sym || toks[4].text != ":") throw ParseError{toks[4].col, "expected ':'"};
      VarScope vars{{"m", 0}, {fam.param, 1}};
      ExprParser ep(toks, 5, vars);
      fam.expr = ep.parse_arith();
      expect_end(toks, ep.pos());
      sys.reverse.push_back(std::move(fam));
      return;
    }
    throw ParseError{head.col, "unknown directive '" + head.text + "'"};
  }
};

void compile_programs(SystemDef& sys) {
  sys.admit.prog = Program::compile(sys.admit.clauses);
  for (ForwardRule& rule : sys.forward) {
    rule.guard_prog = Program::compile(rule.guard);
    rule.expr_prog = Program::compile(rule.expr);
  }
  for (ReverseFamily& fam : sys.reverse) {
    if (fam.kind == ReverseFamily::Kind::FiniteList) {
      for (const Ast& e : fam.list_exprs) fam.list_progs.push_back(Program::compile(e));
    } else {
      fam.prog = Program::compile(fam.expr);
    }
  }
}

}  // namespace

ParseResult parse_system_def(std::string_view text) {
  LineParser lp;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view line = end == std::string_view::npos ? text.substr(start)
                                                          : text.substr(start, end - start);
    ++line_no;
    try {
      std::vector<Tok> toks = lex_line(line);
      lp.parse_line(toks);
    } catch (const ParseError& e) {
      return {std::nullopt, Diagnostic{line_no, e.col, e.message}};
    } catch (const std::exception& e) {
      return {std::nullopt, Diagnostic{line_no, 1, std::string("internal parse failure: ") + e.what()}};
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (!lp.saw_name) return {std::nullopt, Diagnostic{line_no, 1, "missing 'name = <ident>'"}};
  if (!lp.saw_admit) return {std::nullopt, Diagnostic{line_no, 1, "missing 'admit = \"...\"'"}};
  if (lp.sys.forward.empty()) {
    return {std::nullopt, Diagnostic{line_no, 1, "system needs at least one forward rule"}};
  }
  SystemDef sys = std::move(lp.sys);
  compile_programs(sys);
  std::string err = validate_system(sys);
  if (!err.empty()) {
    return {std::nullopt, Diagnostic{line_no, 1, err}};
  }
  return {std::move(sys), std::nullopt};
}

std::string emit_dsys(const SystemDef& sys) {
  std::ostringstream os;
  os << "name = " << sys.name << "\n";
  os << "admit = \"" << ast_to_string(sys.admit.clauses) << "\"\n";
  if (sys.fixed_point) os << "fixed = " << sys.fixed_point->str() << "\n";
  for (const ForwardRule& rule : sys.forward) {
    os << "if " << ast_to_string(rule.guard) << " -> " << ast_to_string(rule.expr) << "\n";
  }
  for (const ReverseFamily& fam : sys.reverse) {
    switch (fam.kind) {
      case ReverseFamily::Kind::FiniteList: {
        os << "list: ";
        for (std::size_t i = 0; i < fam.list_exprs.size(); ++i) {
          if (i > 0) os << ", ";
          os << ast_to_string(fam.list_exprs[i]);
        }
        os << "\n";
        break;
      }
      case ReverseFamily::Kind::Exponent:
        os << "family " << fam.param << " >= " << fam.param_lower.str() << " : "
           << ast_to_string(fam.expr) << " where integral and admitted\n";
        break;
      case ReverseFamily::Kind::Prime:
        os << "primes " << fam.param << " > " << fam.param_lower.str() << " : "
           << ast_to_string(fam.expr) << "\n";
        break;
    }
  }
  return os.str();
}

LoadResult load_system(const std::string& name_or_path) {
  bool is_path = name_or_path.find('/') != std::string::npos ||
                 (name_or_path.size() > 5 &&
                  name_or_path.compare(name_or_path.size() - 5, 5, ".dsys") == 0);
  if (!is_path) {
    try {
      return {builtin(name_or_path), {}};
    } catch (const std::invalid_argument& e) {
      return {std::nullopt, e.what()};
    }
  }
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) return {std::nullopt, "cannot open " + name_or_path};
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseResult pr = parse_system_def(buf.str());
  if (!pr.ok()) return {std::nullopt, name_or_path + ": " + pr.error->str()};
  return {std::move(*pr.system), {}};
}

}  // namespace dynsys
