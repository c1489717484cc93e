#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "voxcalc/identity_dsl.hpp"

namespace voxcalc::dsl {

IntExpr IntExpr::lit(long v) {
  IntExpr e;
  e.value = v;
  return e;
}

IntExpr IntExpr::slot(std::string n) {
  IntExpr e;
  e.op = Op::Name;
  e.name = std::move(n);
  return e;
}

namespace {

std::string where_text(int line, int column) {
  return std::to_string(line) + ":" + std::to_string(column);
}

std::string joined(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : " ") + x;
  return out;
}

}  // namespace

ParseError::ParseError(Kind kind, int line, int column, std::set<std::string> expected, const std::string& message)
    : std::runtime_error(kind_name(kind) + " at " + where_text(line, column) + ": " + message +
                         (expected.empty() ? "" : " (expected: " + joined(expected) + ")")),
      kind_(kind),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

std::string kind_name(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "syntax error";
    case ParseError::Kind::UnboundVariable: return "unbound variable";
    case ParseError::Kind::MissingDirection: return "missing expansion direction";
    case ParseError::Kind::NonIntegerExponent: return "non-integer exponent";
    case ParseError::Kind::SpaceMismatch: return "space mismatch";
    case ParseError::Kind::DuplicateBinding: return "duplicate binding";
  }
  return "error";
}

namespace {

using K = ParseError::Kind;

bool is_formal(const std::string& s) {
  static const std::regex re("[xyz][0-9]*");
  return std::regex_match(s, re);
}

struct Token {
  enum class Type { Ident, Int, Sym, End };
  Type type = Type::End;
  std::string text;
  int line = 0, column = 0;
};

std::vector<Token> tokenize(const std::string& text, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&](std::size_t k) { return static_cast<int>(k) + 1; };
  while (i < text.size()) {
    const unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '#') break;
    Token t;
    t.line = line;
    t.column = col(i);
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                 text[j] == '\''))
        ++j;
      t.type = Token::Type::Ident;
      t.text = text.substr(i, j - i);
      i = j;
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.type = Token::Type::Int;
      t.text = text.substr(i, j - i);
      i = j;
    } else {
      static const char* two[] = {"==", "<=", ">=", "!=", ".."};
      t.type = Token::Type::Sym;
      t.text = std::string(1, static_cast<char>(c));
      for (const char* s : two)
        if (text.compare(i, 2, s) == 0) t.text = s;
      if (t.text.size() == 1 && std::string("[](),+-*/^@=<>:.").find(static_cast<char>(c)) == std::string::npos)
        throw ParseError(K::Syntax, line, t.column, {}, std::string("unexpected character '") + text[i] + "'");
      i += t.text.size();
    }
    out.push_back(std::move(t));
  }
  return out;
}

enum class NameKind { ElementV, ElementW, Int, Formal };
enum class ValueKind { Scalar, V, W };

const char* kind_text(ValueKind k) {
  return k == ValueKind::Scalar ? "scalar" : k == ValueKind::V ? "V" : "W";
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::map<std::string, NameKind>& names, int end_line, int end_column)
      : tokens_(std::move(tokens)), names_(names) {
    Token end;
    end.line = end_line;
    end.column = end_column;
    tokens_.push_back(end);
  }

  const Token& peek(std::size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
  bool at_sym(const std::string& s, std::size_t k = 0) const {
    return peek(k).type == Token::Type::Sym && peek(k).text == s;
  }
  bool at_ident(const std::string& s, std::size_t k = 0) const {
    return peek(k).type == Token::Type::Ident && peek(k).text == s;
  }
  bool at_end() const { return peek().type == Token::Type::End; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(K kind, const Token& t, std::set<std::string> expected, const std::string& msg) const {
    throw ParseError(kind, t.line, t.column, std::move(expected), msg);
  }
  [[noreturn]] void unexpected(std::set<std::string> expected) const {
    const Token& t = peek();
    fail(K::Syntax, t, std::move(expected), t.type == Token::Type::End ? "unexpected end of input"
                                                                       : "unexpected '" + t.text + "'");
  }
  void expect(const std::string& sym) {
    if (!at_sym(sym)) unexpected({"'" + sym + "'"});
    next();
  }
  void expect_closing(const std::string& sym, const Token& opener) {
    if (!at_sym(sym)) {
      const Token& t = peek();
      fail(K::Syntax, t, {"'" + sym + "'"},
           "unclosed '" + opener.text + "' opened at " + where_text(opener.line, opener.column));
    }
    next();
  }
  std::string ident(const std::string& what) {
    if (peek().type != Token::Type::Ident) unexpected({what});
    return next().text;
  }

  // integer expressions ------------------------------------------------------

  IntExpr int_expr(bool exponent = false) {
    IntExpr left = int_term(exponent);
    while (at_sym("+") || at_sym("-")) {
      IntExpr e;
      e.op = next().text == "+" ? IntExpr::Op::Add : IntExpr::Op::Sub;
      e.args = {std::move(left), int_term(exponent)};
      left = std::move(e);
    }
    return left;
  }

  IntExpr int_term(bool exponent) {
    IntExpr left = int_unary(exponent);
    while (at_sym("*") || at_sym("/")) {
      if (at_sym("/")) {
        if (exponent) fail(K::NonIntegerExponent, peek(), {}, "exponents must be integers; '/' is not allowed");
        unexpected({"'+'", "'-'", "'*'"});
      }
      next();
      IntExpr e;
      e.op = IntExpr::Op::Mul;
      e.args = {std::move(left), int_unary(exponent)};
      left = std::move(e);
    }
    return left;
  }

  IntExpr int_unary(bool exponent) {
    if (at_sym("-")) {
      next();
      IntExpr e;
      e.op = IntExpr::Op::Neg;
      e.args = {int_unary(exponent)};
      return e;
    }
    return int_atom(exponent);
  }

  IntExpr int_atom(bool exponent) {
    const Token& t = peek();
    if (t.type == Token::Type::Int) {
      next();
      if (at_sym("/") && exponent)
        fail(K::NonIntegerExponent, peek(), {}, "exponents must be integers; '/' is not allowed");
      return IntExpr::lit(std::stol(t.text));
    }
    if (at_sym("(")) {
      const Token open = next();
      IntExpr e = int_expr(exponent);
      expect_closing(")", open);
      return e;
    }
    if (t.type != Token::Type::Ident) unexpected({"integer", "name", "'('"});
    if ((t.text == "wt" || t.text == "deg") && at_sym("(", 1)) {
      next();
      const Token open = next();
      const Token& nt = peek();
      std::string n = ident("element slot");
      auto it = names_.find(n);
      if (it == names_.end()) fail(K::UnboundVariable, nt, {}, "'" + n + "' is not bound");
      if (it->second != NameKind::ElementV && it->second != NameKind::ElementW)
        fail(K::SpaceMismatch, nt, {}, t.text + "() needs an element slot, '" + n + "' is not one");
      expect_closing(")", open);
      IntExpr e;
      e.op = t.text == "wt" ? IntExpr::Op::Wt : IntExpr::Op::Deg;
      e.name = n;
      return e;
    }
    if ((t.text == "max" || t.text == "min") && at_sym("(", 1)) {
      next();
      const Token open = next();
      IntExpr e;
      e.op = t.text == "max" ? IntExpr::Op::Max : IntExpr::Op::Min;
      e.args.push_back(int_expr(exponent));
      expect(",");
      e.args.push_back(int_expr(exponent));
      expect_closing(")", open);
      return e;
    }
    next();
    auto it = names_.find(t.text);
    if (it == names_.end()) {
      if (exponent && is_formal(t.text))
        fail(K::NonIntegerExponent, t, {}, "exponent uses the formal variable '" + t.text + "'");
      fail(K::UnboundVariable, t, {}, "'" + t.text + "' is not bound");
    }
    if (it->second != NameKind::Int) {
      if (exponent) fail(K::NonIntegerExponent, t, {}, "exponent uses '" + t.text + "', which is not an integer");
      fail(K::SpaceMismatch, t, {}, "'" + t.text + "' is not an integer");
    }
    return IntExpr::slot(t.text);
  }

  Condition condition() {
    Condition c;
    c.lhs = int_expr();
    static const std::set<std::string> ops{"<", "<=", ">", ">=", "==", "!="};
    if (peek().type != Token::Type::Sym || !ops.count(peek().text)) unexpected({"comparison"});
    c.op = next().text;
    c.rhs = int_expr();
    return c;
  }

  // element expressions ------------------------------------------------------

  std::string formal(const char* what) {
    const Token& t = peek();
    if (t.type != Token::Type::Ident) unexpected({what});
    if (!is_formal(t.text)) fail(K::Syntax, t, {what}, "'" + t.text + "' is not a formal variable");
    return next().text;
  }

  VarArg var_arg() {
    VarArg v;
    v.first = formal("formal variable");
    if (at_sym("+")) {
      next();
      v.second = formal("formal variable");
      if (!at_sym("@"))
        fail(K::MissingDirection, peek(), {"'@'"}, "the sum " + v.first + "+" + v.second + " needs '@var'");
      next();
      const Token& t = peek();
      v.direction = formal("formal variable");
      if (v.direction != v.first && v.direction != v.second)
        fail(K::Syntax, t, {v.first, v.second}, "direction must be one of the summands");
    }
    return v;
  }

  Space space_name() {
    const Token& t = peek();
    std::string s = ident("V or W");
    if (s != "V" && s != "W") fail(K::Syntax, t, {"V", "W"}, "unknown space '" + s + "'");
    return s == "V" ? Space::V : Space::W;
  }

  Space space() {
    const Token open = peek();
    expect("[");
    const Token& t = peek();
    std::string s = ident("V or W");
    if (s != "V" && s != "W") fail(K::Syntax, t, {"V", "W"}, "unknown space '" + s + "'");
    expect_closing("]", open);
    return s == "V" ? Space::V : Space::W;
  }

  std::pair<Expr, ValueKind> expr() {
    Expr e;
    std::optional<ValueKind> kind;
    bool negative = false;
    if (at_sym("-")) {
      next();
      negative = true;
    }
    for (;;) {
      const Token& start = peek();
      auto [t, k] = term();
      t.negative = negative;
      if (k != ValueKind::Scalar) {
        if (kind && *kind != ValueKind::Scalar && *kind != k)
          fail(K::SpaceMismatch, start, {}, std::string("adding a ") + kind_text(k) + " term to a " +
                                                kind_text(*kind) + " expression");
        if (!kind || *kind == ValueKind::Scalar) kind = k;
      } else if (!kind) {
        kind = k;
      }
      e.terms.push_back(std::move(t));
      if (at_sym("+") || at_sym("-")) {
        negative = next().text == "-";
        continue;
      }
      break;
    }
    return {std::move(e), kind.value_or(ValueKind::Scalar)};
  }

  std::pair<Term, ValueKind> term() {
    Term t;
    std::vector<std::string> bound;
    for (;;) {
      if ((at_ident("Res") || at_ident("Sum")) && at_sym("[", 1)) {
        const bool res = peek().text == "Res";
        next();
        const Token open = next();
        Prefix p;
        p.kind = res ? Prefix::Kind::Res : Prefix::Kind::Sum;
        const Token& nt = peek();
        if (res) {
          p.name = formal("formal variable");
          if (std::find(res_stack_.begin(), res_stack_.end(), p.name) != res_stack_.end())
            fail(K::DuplicateBinding, nt, {}, "'" + p.name + "' is already bound by Res");
          res_stack_.push_back(p.name);
        } else {
          p.name = ident("index name");
          if (names_.count(p.name) || is_formal(p.name))
            fail(K::DuplicateBinding, nt, {}, "'" + p.name + "' is already bound");
          expect("=");
          p.lo = int_expr();
          expect("..");
          p.hi = int_expr();
          names_[p.name] = NameKind::Int;
        }
        expect_closing("]", open);
        bound.push_back(p.name);
        t.prefixes.push_back(std::move(p));
        continue;
      }
      break;
    }
    std::vector<std::pair<Factor, ValueKind>> fs;
    std::vector<Token> starts;
    starts.push_back(peek());
    fs.push_back(factor());
    while (at_sym("*")) {
      next();
      starts.push_back(peek());
      fs.push_back(factor());
    }
    for (const auto& n : bound) {
      if (is_formal(n))
        res_stack_.pop_back();
      else
        names_.erase(n);
    }
    // kind check, right to left
    if (fs.back().first.kind == Factor::Kind::Vertex || fs.back().first.kind == Factor::Kind::Mode)
      fail(K::SpaceMismatch, starts.back(), {}, "an operator needs an operand to its right");
    ValueKind kind = fs.back().second;
    for (std::size_t i = fs.size() - 1; i-- > 0;) {
      const Factor& f = fs[i].first;
      if (f.kind == Factor::Kind::Vertex || f.kind == Factor::Kind::Mode) {
        const ValueKind want = f.space == Space::V ? ValueKind::V : ValueKind::W;
        if (kind != want && !(kind == ValueKind::Scalar && want == ValueKind::V))
          fail(K::SpaceMismatch, starts[i], {},
               std::string("operator on ") + kind_text(want) + " applied to a " + kind_text(kind) + " value");
        kind = want;
      } else if (fs[i].second != ValueKind::Scalar) {
        fail(K::SpaceMismatch, starts[i], {}, "an element factor must be the rightmost factor of its product");
      }
    }
    for (auto& [f, k] : fs) t.factors.push_back(std::move(f));
    return {std::move(t), kind};
  }

  std::pair<Factor, ValueKind> factor() {
    const Token& t = peek();
    Factor f;
    if (at_sym("(")) {
      if (peek(1).type == Token::Type::Ident && is_formal(peek(1).text) && at_sym("+", 2)) {
        const Token open = next();
        f.kind = Factor::Kind::Binomial;
        f.var = var_arg();
        expect_closing(")", open);
        expect("^");
        f.e = int_atom(true);
        return {std::move(f), ValueKind::Scalar};
      }
      const Token open = next();
      auto [e, k] = expr();
      expect_closing(")", open);
      f.kind = Factor::Kind::Group;
      f.sub.push_back(std::move(e));
      return {std::move(f), k};
    }
    if (t.type == Token::Type::Int) {
      next();
      Integer num(t.text), den(1);
      if (at_sym("/")) {
        next();
        if (peek().type != Token::Type::Int) unexpected({"integer"});
        den = Integer(next().text);
        if (den == 0) fail(K::Syntax, t, {}, "zero denominator");
      }
      f.kind = Factor::Kind::Number;
      f.number = ratio(num, den);
      return {std::move(f), ValueKind::Scalar};
    }
    if (t.type != Token::Type::Ident) unexpected({"factor"});
    if ((t.text == "Y" || t.text == "Mode") && at_sym("[", 1)) {
      next();
      f.kind = t.text == "Y" ? Factor::Kind::Vertex : Factor::Kind::Mode;
      f.space = space();
      const Token open = peek();
      expect("(");
      const Token& et = peek();
      auto [e, k] = expr();
      if (k == ValueKind::W) fail(K::SpaceMismatch, et, {}, "the operator argument must be an element of V");
      f.sub.push_back(std::move(e));
      expect(",");
      if (f.kind == Factor::Kind::Vertex)
        f.var = var_arg();
      else
        f.e = int_expr();
      expect_closing(")", open);
      return {std::move(f), ValueKind::Scalar};
    }
    if (t.text == "scaleL0" && at_sym("(", 1)) {
      next();
      const Token open = next();
      f.kind = Factor::Kind::ScaleL0;
      f.var = var_arg();
      expect(",");
      const Token& et = peek();
      auto [e, k] = expr();
      if (k == ValueKind::Scalar) fail(K::SpaceMismatch, et, {}, "scaleL0 needs an element");
      f.sub.push_back(std::move(e));
      expect_closing(")", open);
      return {std::move(f), k};
    }
    if (t.text == "binom" && at_sym("(", 1)) {
      next();
      const Token open = next();
      f.kind = Factor::Kind::Binom;
      f.a = int_expr();
      expect(",");
      f.e = int_expr();
      expect_closing(")", open);
      return {std::move(f), ValueKind::Scalar};
    }
    if ((t.text == "wt" || t.text == "deg" || t.text == "max" || t.text == "min") && at_sym("(", 1)) {
      f.kind = Factor::Kind::Integer;
      f.a = int_atom(false);
      return {std::move(f), ValueKind::Scalar};
    }
    if (is_formal(t.text)) {
      next();
      f.kind = Factor::Kind::Power;
      f.var.first = t.text;
      f.e = IntExpr::lit(1);
      if (at_sym("^")) {
        next();
        f.e = int_atom(true);
      }
      return {std::move(f), ValueKind::Scalar};
    }
    auto it = names_.find(t.text);
    if (it == names_.end()) fail(K::UnboundVariable, t, {}, "'" + t.text + "' is not bound");
    if (it->second == NameKind::Int) {
      f.kind = Factor::Kind::Integer;
      f.a = int_atom(false);
      return {std::move(f), ValueKind::Scalar};
    }
    next();
    f.kind = Factor::Kind::Slot;
    f.slot = t.text;
    return {std::move(f), it->second == NameKind::ElementV ? ValueKind::V : ValueKind::W};
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::map<std::string, NameKind>& names_;
  std::vector<std::string> res_stack_;
};

bool is_keyword_line(const std::vector<Token>& toks) {
  if (toks.empty() || toks[0].type != Token::Type::Ident) return false;
  static const std::set<std::string> kw{"identity", "forall", "let", "where", "window"};
  return kw.count(toks[0].text) != 0;
}

void declare(std::map<std::string, NameKind>& names, const Token& t, NameKind kind) {
  if (is_formal(t.text))
    throw ParseError(K::DuplicateBinding, t.line, t.column, {}, "'" + t.text + "' is reserved for formal variables");
  if (names.count(t.text))
    throw ParseError(K::DuplicateBinding, t.line, t.column, {}, "'" + t.text + "' is already bound");
  names[t.text] = kind;
}

// Without quantifier lines, u, v and a are elements of V, w is an element of
// W and every other free name is an integer.
void bind_implicitly(const std::vector<Token>& toks, const std::vector<std::vector<Token>>& guard_lines,
                     std::map<std::string, NameKind>& names) {
  static const std::set<std::string> reserved{"Res", "Sum", "Y",   "Mode", "scaleL0", "binom", "wt",
                                              "deg", "max", "min", "where", "V",   "W"};
  auto scan = [&](const std::vector<Token>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      const Token& t = line[i];
      if (t.type != Token::Type::Ident || reserved.count(t.text) || is_formal(t.text) || names.count(t.text))
        continue;
      if (i >= 2 && line[i - 1].text == "[" && line[i - 2].text == "Sum") continue;
      if (t.text == "u" || t.text == "v" || t.text == "a")
        names[t.text] = NameKind::ElementV;
      else if (t.text == "w")
        names[t.text] = NameKind::ElementW;
      else
        names[t.text] = NameKind::Int;
    }
  };
  scan(toks);
  for (const auto& l : guard_lines) scan(l);
}

}  // namespace

IdentityAst parse(const std::string& text, const std::string& default_name) {
  IdentityAst ast;
  ast.name = default_name;
  // the cutoffs of the module and of the algebra
  std::map<std::string, NameKind> names{{"D", NameKind::Int}, {"N", NameKind::Int}};
  std::vector<Token> identity_tokens;
  bool identity_started = false;
  std::vector<std::vector<Token>> guard_lines;

  std::istringstream in(text);
  std::string line;
  int lineno = 0, last_line = 1, last_col = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line, lineno);
    last_line = lineno;
    last_col = static_cast<int>(line.size()) + 1;
    if (toks.empty()) continue;
    if (!is_keyword_line(toks)) {
      if (!guard_lines.empty())
        throw ParseError(K::Syntax, toks[0].line, toks[0].column, {"where"}, "text after the guards");
      identity_started = true;
      identity_tokens.insert(identity_tokens.end(), toks.begin(), toks.end());
      continue;
    }
    if (identity_started) {
      if (toks[0].text != "where")
        throw ParseError(K::Syntax, toks[0].line, toks[0].column, {"where"}, "statement after the identity");
      guard_lines.push_back(std::move(toks));
      continue;
    }
    Parser p(toks, names, lineno, last_col);
    const std::string kw = p.next().text;
    if (kw == "identity") {
      ast.name = p.ident("identity name");
    } else if (kw == "forall") {
      if (p.at_sym("(")) {
        const Token open = p.next();
        Statement s;
        s.kind = Statement::Kind::Box;
        std::vector<Token> decl;
        decl.push_back(p.peek());
        s.names.push_back(p.ident("integer name"));
        p.expect(",");
        decl.push_back(p.peek());
        s.names.push_back(p.ident("integer name"));
        p.expect_closing(")", open);
        if (!p.at_ident("in")) p.unexpected({"in"});
        p.next();
        if (!p.at_ident("box")) p.unexpected({"box"});
        p.next();
        const Token bopen = p.peek();
        p.expect("(");
        for (int i = 0; i < 3; ++i) {
          if (i) p.expect(",");
          const Token& nt = p.peek();
          std::string n = p.ident("element slot");
          auto it = names.find(n);
          if (it == names.end()) throw ParseError(K::UnboundVariable, nt.line, nt.column, {}, "'" + n + "' is not bound");
          const NameKind want = i < 2 ? NameKind::ElementV : NameKind::ElementW;
          if (it->second != want)
            throw ParseError(K::SpaceMismatch, nt.line, nt.column, {},
                             std::string("box needs u, v in V and w in W; '") + n + "' is not");
          s.names.push_back(n);
        }
        p.expect_closing(")", bopen);
        for (const auto& t : decl) declare(names, t, NameKind::Int);
        ast.statements.push_back(std::move(s));
      } else {
        std::vector<Token> decl;
        decl.push_back(p.peek());
        p.ident("name");
        if (p.at_ident("in")) {
          p.next();
          Statement s;
          s.kind = Statement::Kind::Range;
          s.names.push_back(decl[0].text);
          s.lo = p.int_expr();
          p.expect("..");
          s.hi = p.int_expr();
          declare(names, decl[0], NameKind::Int);
          ast.statements.push_back(std::move(s));
        } else {
          while (p.at_sym(",")) {
            p.next();
            decl.push_back(p.peek());
            p.ident("name");
          }
          if (!p.at_sym(":")) p.unexpected({"':'", "','", "in"});
          p.next();
          Statement s;
          s.kind = Statement::Kind::Elements;
          s.space = p.space_name();
          for (const auto& t : decl) {
            declare(names, t, s.space == Space::V ? NameKind::ElementV : NameKind::ElementW);
            s.names.push_back(t.text);
          }
          ast.statements.push_back(std::move(s));
        }
      }
    } else if (kw == "let") {
      const Token nt = p.peek();
      Statement s;
      s.kind = Statement::Kind::Let;
      s.names.push_back(p.ident("name"));
      p.expect("=");
      s.lo = p.int_expr();
      declare(names, nt, NameKind::Int);
      ast.statements.push_back(std::move(s));
    } else if (kw == "where") {
      for (;;) {
        Statement s;
        s.kind = Statement::Kind::Where;
        s.condition = p.condition();
        ast.statements.push_back(std::move(s));
        if (!p.at_sym(",")) break;
        p.next();
      }
    } else if (kw == "window") {
      Statement s;
      s.kind = Statement::Kind::Window;
      s.names.push_back(p.formal("formal variable"));
      if (!p.at_sym("<=") && !p.at_sym(">=")) p.unexpected({"'<='", "'>='"});
      s.op = p.next().text;
      s.lo = p.int_expr();
      ast.statements.push_back(std::move(s));
    }
    if (!p.at_end()) p.unexpected({"end of line"});
  }

  if (identity_tokens.empty()) throw ParseError(K::Syntax, last_line, last_col, {"identity"}, "no identity");
  if (ast.statements.empty()) bind_implicitly(identity_tokens, guard_lines, names);
  Parser p(identity_tokens, names, last_line, last_col);
  ast.lhs = p.expr().first;
  p.expect("==");
  ast.rhs = p.expr().first;
  auto guards = [&](Parser& q) {
    for (;;) {
      ast.guards.push_back(q.condition());
      if (!q.at_sym(",")) break;
      q.next();
    }
  };
  if (p.at_ident("where")) {
    p.next();
    guards(p);
  }
  if (!p.at_end()) p.unexpected({"'+'", "'-'", "'*'", "where", "end of identity"});
  for (auto& toks : guard_lines) {
    Parser q(toks, names, toks.back().line, toks.back().column + 1);
    q.next();
    guards(q);
    if (!q.at_end()) q.unexpected({"','", "end of line"});
  }
  return ast;
}

IdentityAst parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path.substr(path.find_last_of('/') + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse(ss.str(), stem);
}

// rendering ------------------------------------------------------------------

namespace {

bool is_atom(const IntExpr& e) {
  switch (e.op) {
    case IntExpr::Op::Lit: return e.value >= 0;
    case IntExpr::Op::Name:
    case IntExpr::Op::Wt:
    case IntExpr::Op::Deg:
    case IntExpr::Op::Max:
    case IntExpr::Op::Min: return true;
    default: return false;
  }
}

std::string render_int(const IntExpr& e);

std::string paren_if(const IntExpr& e, bool wrap) {
  return wrap ? "(" + render_int(e) + ")" : render_int(e);
}

std::string render_int(const IntExpr& e) {
  using Op = IntExpr::Op;
  switch (e.op) {
    case Op::Lit: return e.value < 0 ? "-" + std::to_string(-e.value) : std::to_string(e.value);
    case Op::Name: return e.name;
    case Op::Wt: return "wt(" + e.name + ")";
    case Op::Deg: return "deg(" + e.name + ")";
    case Op::Max: return "max(" + render_int(e.args[0]) + ", " + render_int(e.args[1]) + ")";
    case Op::Min: return "min(" + render_int(e.args[0]) + ", " + render_int(e.args[1]) + ")";
    case Op::Neg: return "-" + paren_if(e.args[0], !is_atom(e.args[0]));
    case Op::Add:
    case Op::Sub: {
      const auto& r = e.args[1];
      const bool wrap = r.op == Op::Add || r.op == Op::Sub || r.op == Op::Neg || (r.op == Op::Lit && r.value < 0);
      return render_int(e.args[0]) + (e.op == Op::Add ? " + " : " - ") + paren_if(r, wrap);
    }
    case Op::Mul: {
      const auto& l = e.args[0];
      const auto& r = e.args[1];
      const bool wl = l.op == Op::Add || l.op == Op::Sub;
      const bool wr = !is_atom(r);
      return paren_if(l, wl) + "*" + paren_if(r, wr);
    }
  }
  return "";
}

std::string render_exponent(const IntExpr& e) { return paren_if(e, !is_atom(e)); }

std::string render_var(const VarArg& v) {
  if (!v.is_sum()) return v.first;
  return v.first + "+" + v.second + " @" + v.direction;
}

std::string render_expr(const Expr& e);

std::string render_factor(const Factor& f) {
  using Kd = Factor::Kind;
  const char* sp = f.space == Space::V ? "V" : "W";
  switch (f.kind) {
    case Kd::Number: return to_short_string(f.number);
    case Kd::Integer: return render_exponent(f.a);
    case Kd::Power: return f.e == IntExpr::lit(1) ? f.var.first : f.var.first + "^" + render_exponent(f.e);
    case Kd::Binomial: return "(" + render_var(f.var) + ")^" + render_exponent(f.e);
    case Kd::Vertex: return std::string("Y[") + sp + "](" + render_expr(f.sub[0]) + ", " + render_var(f.var) + ")";
    case Kd::Mode: return std::string("Mode[") + sp + "](" + render_expr(f.sub[0]) + ", " + render_int(f.e) + ")";
    case Kd::ScaleL0: return "scaleL0(" + render_var(f.var) + ", " + render_expr(f.sub[0]) + ")";
    case Kd::Binom: return "binom(" + render_int(f.a) + ", " + render_int(f.e) + ")";
    case Kd::Slot: return f.slot;
    case Kd::Group: return "(" + render_expr(f.sub[0]) + ")";
  }
  return "";
}

std::string render_expr(const Expr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const Term& t = e.terms[i];
    if (i == 0)
      out += t.negative ? "-" : "";
    else
      out += t.negative ? " - " : " + ";
    for (const auto& p : t.prefixes) {
      if (p.kind == Prefix::Kind::Res)
        out += "Res[" + p.name + "] ";
      else
        out += "Sum[" + p.name + " = " + render_int(p.lo) + " .. " + render_int(p.hi) + "] ";
    }
    for (std::size_t j = 0; j < t.factors.size(); ++j) out += (j ? " * " : "") + render_factor(t.factors[j]);
  }
  return out;
}

std::string render_condition(const Condition& c) {
  return render_int(c.lhs) + " " + c.op + " " + render_int(c.rhs);
}

}  // namespace

std::string render(const IntExpr& e) { return render_int(e); }
std::string render(const Expr& e) { return render_expr(e); }

std::string render(const IdentityAst& ast) {
  std::string out = "identity " + ast.name + "\n";
  for (const auto& s : ast.statements) {
    switch (s.kind) {
      case Statement::Kind::Elements: {
        out += "forall ";
        for (std::size_t i = 0; i < s.names.size(); ++i) out += (i ? ", " : "") + s.names[i];
        out += std::string(" : ") + (s.space == Space::V ? "V" : "W") + "\n";
        break;
      }
      case Statement::Kind::Box:
        out += "forall (" + s.names[0] + ", " + s.names[1] + ") in box(" + s.names[2] + ", " + s.names[3] + ", " +
               s.names[4] + ")\n";
        break;
      case Statement::Kind::Range:
        out += "forall " + s.names[0] + " in " + render_int(s.lo) + " .. " + render_int(s.hi) + "\n";
        break;
      case Statement::Kind::Let: out += "let " + s.names[0] + " = " + render_int(s.lo) + "\n"; break;
      case Statement::Kind::Where: out += "where " + render_condition(s.condition) + "\n"; break;
      case Statement::Kind::Window: out += "window " + s.names[0] + " " + s.op + " " + render_int(s.lo) + "\n"; break;
    }
  }
  out += render_expr(ast.lhs) + " == " + render_expr(ast.rhs) + "\n";
  for (const auto& g : ast.guards) out += "where " + render_condition(g) + "\n";
  return out;
}

}  // namespace voxcalc::dsl
