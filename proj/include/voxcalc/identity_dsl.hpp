#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voxcalc/identities.hpp"
#include "voxcalc/voa.hpp"

namespace voxcalc::dsl {

/// Integer expression over integer slots, wt(u), deg(w), max and min.
struct IntExpr {
  enum class Op { Lit, Name, Wt, Deg, Add, Sub, Mul, Neg, Max, Min };
  Op op = Op::Lit;
  long value = 0;
  std::string name;
  std::vector<IntExpr> args;

  static IntExpr lit(long v);
  static IntExpr slot(std::string n);
  friend bool operator==(const IntExpr&, const IntExpr&) = default;
};

/// A formal variable or a two-variable sum a+b expanded in nonnegative powers
/// of `direction` (which is a or b).
struct VarArg {
  std::string first;
  std::string second;
  std::string direction;

  bool is_sum() const { return !second.empty(); }
  friend bool operator==(const VarArg&, const VarArg&) = default;
};

enum class Space { V, W };

struct Expr;

struct Factor {
  enum class Kind {
    Number,    // rational literal
    Integer,   // integer expression used as a scalar
    Power,     // x^e
    Binomial,  // (a+b @b)^e
    Vertex,    // Y[S](sub, var) acting on what follows
    Mode,      // Mode[S](sub, e) acting on what follows
    ScaleL0,   // var^{L(0)} sub
    Binom,     // binom(a, e)
    Slot,      // element slot
    Group,     // ( sub )
  };
  Kind kind = Kind::Number;
  Rational number;
  IntExpr a;  // Integer value, Binom top
  IntExpr e;  // exponent, mode index, Binom bottom
  VarArg var;
  Space space = Space::W;
  std::string slot;
  std::vector<Expr> sub;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Res[x] or Sum[i = lo .. hi]; binds over the rest of its term.
struct Prefix {
  enum class Kind { Res, Sum };
  Kind kind = Kind::Res;
  std::string name;
  IntExpr lo, hi;
  friend bool operator==(const Prefix&, const Prefix&) = default;
};

struct Term {
  bool negative = false;
  std::vector<Prefix> prefixes;
  std::vector<Factor> factors;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Expr {
  std::vector<Term> terms;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Condition {
  IntExpr lhs;
  std::string op;  // < <= > >= == !=
  IntExpr rhs;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Statement {
  enum class Kind { Elements, Box, Range, Let, Where, Window };
  Kind kind = Kind::Let;
  std::vector<std::string> names;  // Elements: slots; Box: p, q then u, v, w; Range/Let/Window: one name
  Space space = Space::V;
  IntExpr lo, hi;  // Range bounds; Let value in lo; Window bound in lo
  std::string op;  // Window: <= or >=
  Condition condition;
  friend bool operator==(const Statement&, const Statement&) = default;
};

struct IdentityAst {
  std::string name;
  std::vector<Statement> statements;
  Expr lhs, rhs;
  std::vector<Condition> guards;
  friend bool operator==(const IdentityAst&, const IdentityAst&) = default;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnboundVariable, MissingDirection, NonIntegerExponent, SpaceMismatch, DuplicateBinding };
  ParseError(Kind kind, int line, int column, std::set<std::string> expected, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  int line_, column_;
  std::set<std::string> expected_;
};

std::string kind_name(ParseError::Kind kind);

/// One identity per text. Lines starting with forall, let, where, window or
/// identity are statements; the remaining lines form the identity, which may
/// end with "where" guards. Names of the form x, y, z followed by digits are
/// formal variables. D and N name the degree cutoff of the module and the
/// weight cutoff of the algebra. A text without quantifier lines binds u, v, a
/// to V, w to W and every other free name to an integer.
IdentityAst parse(const std::string& text, const std::string& default_name = "identity");
IdentityAst parse_file(const std::string& path);
std::string render(const IdentityAst& ast);
std::string render(const Expr& expr);
std::string render(const IntExpr& e);

/// Values of the slots for one sample.
struct Assignment {
  std::map<std::string, long> ints;
  std::map<std::string, std::pair<Space, BasisKey>> elements;
  std::map<std::string, std::optional<long>> window_upper;
  std::map<std::string, std::optional<long>> window_lower;

  std::string render(const VertexAlgebra& V, const CandidateModule& W) const;
};

long evaluate(const IntExpr& e, const Assignment& a);
bool holds(const Condition& c, const Assignment& a);

/// Value of one side, restricted to the window. Element results live in W
/// (or V for identities in V alone); scalar results are multiples of the
/// vacuum. Throws WindowError if a sum cannot be bounded and CutoffExceeded if
/// a needed term leaves the cutoffs.
ModulePoly evaluate(const Expr& side, const VertexAlgebra& V, const CandidateModule& W, const Assignment& a);
/// LHS - RHS at one assignment.
ModulePoly discrepancy(const IdentityAst& ast, const VertexAlgebra& V, const CandidateModule& W, const Assignment& a);

struct SamplingPlan {
  long max_weight = 3;  // u, v in V of weight <= max_weight
  long max_degree = 2;  // w in W of degree <= max_degree
  std::size_t sample = 0;  // 0 means every assignment; otherwise a seeded subsample of this size
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 means VOXCALC_THREADS or 1
};

/// Every assignment the statements produce, in order.
std::vector<Assignment> assignments(const IdentityAst& ast, const VertexAlgebra& V, const CandidateModule& W,
                                    const SamplingPlan& plan);

struct Witness {
  std::size_t index = 0;
  std::string assignment;
  std::string detail;  // discrepancy or error message
};

struct CheckReport {
  std::string identity;
  std::string module;
  std::string cutoffs;
  bool complete = true;  // every assignment was evaluated
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::size_t errors = 0;
  std::string verdicts;  // per sample: '.' pass, 'F' fail, 'E' cutoff or window error
  std::optional<Witness> first_failure;
  std::optional<Witness> first_error;

  bool passed() const { return failures == 0 && errors == 0; }
  std::string render() const;
};

CheckReport check(const IdentityAst& ast, const VertexAlgebra& V, const CandidateModule& W, const SamplingPlan& plan);

}  // namespace voxcalc::dsl
