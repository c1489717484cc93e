#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "voxcalc/identity_dsl.hpp"

namespace voxcalc::dsl {

// integers -------------------------------------------------------------------

long evaluate(const IntExpr& e, const Assignment& a) {
  using Op = IntExpr::Op;
  auto arg = [&](std::size_t i) { return evaluate(e.args[i], a); };
  auto element = [&]() -> const BasisKey& {
    auto it = a.elements.find(e.name);
    if (it == a.elements.end()) throw std::invalid_argument("element slot '" + e.name + "' has no value");
    return it->second.second;
  };
  switch (e.op) {
    case Op::Lit: return e.value;
    case Op::Name: {
      auto it = a.ints.find(e.name);
      if (it == a.ints.end()) throw std::invalid_argument("integer slot '" + e.name + "' has no value");
      return it->second;
    }
    case Op::Wt:
    case Op::Deg: return element().grade;
    case Op::Add: return arg(0) + arg(1);
    case Op::Sub: return arg(0) - arg(1);
    case Op::Mul: return arg(0) * arg(1);
    case Op::Neg: return -arg(0);
    case Op::Max: return std::max(arg(0), arg(1));
    case Op::Min: return std::min(arg(0), arg(1));
  }
  return 0;
}

bool holds(const Condition& c, const Assignment& a) {
  const long x = evaluate(c.lhs, a), y = evaluate(c.rhs, a);
  if (c.op == "<") return x < y;
  if (c.op == "<=") return x <= y;
  if (c.op == ">") return x > y;
  if (c.op == ">=") return x >= y;
  if (c.op == "==") return x == y;
  return x != y;
}

std::string Assignment::render(const VertexAlgebra& V, const CandidateModule& W) const {
  std::string out;
  auto sep = [&]() { return out.empty() ? "" : " "; };
  for (const auto& [n, e] : elements)
    out += sep() + n + "=" + (e.first == Space::V ? V.label(e.second) : W.label(e.second));
  for (const auto& [n, v] : ints)
    if (n != "D" && n != "N") out += sep() + n + "=" + std::to_string(v);
  for (const auto& [n, b] : window_upper)
    if (b) out += sep() + n + "<=" + std::to_string(*b);
  for (const auto& [n, b] : window_lower)
    if (b) out += sep() + n + ">=" + std::to_string(*b);
  return out;
}

// evaluation -----------------------------------------------------------------
//
// A term is evaluated right to left. Every formal variable carries an upper
// bound on the exponents wanted in the result (-1 under Res, a window
// otherwise), and so does the total exponent. Before a factor is applied, the
// smallest exponents the factors to its left can still contribute are
// subtracted from these bounds; monomials beyond the remaining budget can not
// reach the result and are dropped. Every coefficient that survives is
// therefore complete, and every mode sum is finite.

namespace {

using Bound = std::optional<long>;  // upper bound, nullopt = none

struct Budget {
  std::map<std::string, Bound> var;
  Bound total;

  Bound of(const std::string& x) const {
    auto it = var.find(x);
    return it == var.end() ? std::nullopt : it->second;
  }
};

// Smallest exponents a factor can contribute; a missing variable contributes
// 0, nullopt means unbounded below.
struct Lower {
  std::map<std::string, Bound> var;
  Bound total = 0;

  Bound of(const std::string& x) const {
    auto it = var.find(x);
    return it == var.end() ? Bound(0) : it->second;
  }
};

Bound add(Bound a, Bound b) { return a && b ? Bound(*a + *b) : std::nullopt; }

Lower operator+(const Lower& a, const Lower& b) {
  Lower out;
  out.total = add(a.total, b.total);
  for (const auto& [x, v] : a.var) out.var[x] = add(v, b.of(x));
  for (const auto& [x, v] : b.var)
    if (!a.var.count(x)) out.var[x] = v;
  return out;
}

Bound min_bound(Bound a, Bound b) { return a && b ? Bound(std::min(*a, *b)) : std::nullopt; }

Lower pointwise_min(const Lower& a, const Lower& b) {
  Lower out;
  out.total = min_bound(a.total, b.total);
  for (const auto& [x, v] : a.var) out.var[x] = min_bound(v, b.of(x));
  for (const auto& [x, v] : b.var)
    if (!a.var.count(x)) out.var[x] = min_bound(v, 0);
  return out;
}

Budget operator-(const Budget& b, const Lower& l) {
  Budget out;
  for (const auto& [x, v] : b.var) {
    Bound lo = l.of(x);
    out.var[x] = v && lo ? Bound(*v - *lo) : std::nullopt;
  }
  out.total = b.total && l.total ? Bound(*b.total - *l.total) : std::nullopt;
  return out;
}

long total_degree(const Monomial& m) {
  long t = 0;
  for (const auto& [x, e] : m.powers()) t += e;
  return t;
}

bool within(const Monomial& m, const Budget& b) {
  for (const auto& [x, e] : m.powers()) {
    Bound u = b.of(x);
    if (u && e > *u) return false;
  }
  if (b.total && total_degree(m) > *b.total) return false;
  for (const auto& [x, u] : b.var)
    if (u && m.exponent(x) == 0 && 0 > *u) return false;
  return true;
}

// smallest exponents present in a value
Lower lowest(const ModulePoly& p, const std::set<std::string>& vars) {
  Lower out;
  if (p.is_zero_poly()) return out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const long t = total_degree(m);
    out.total = first ? t : std::min(*out.total, t);
    for (const auto& x : vars) {
      const long e = m.exponent(x);
      out.var[x] = first ? e : std::min(*out.var[x], e);
    }
    first = false;
  }
  return out;
}

void collect_vars(const Expr& e, std::set<std::string>& out);

void collect_vars(const Factor& f, std::set<std::string>& out) {
  if (!f.var.first.empty()) out.insert(f.var.first);
  if (f.var.is_sum()) out.insert(f.var.second);
  for (const auto& s : f.sub) collect_vars(s, out);
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  for (const auto& t : e.terms) {
    for (const auto& p : t.prefixes)
      if (p.kind == Prefix::Kind::Res) out.insert(p.name);
    for (const auto& f : t.factors) collect_vars(f, out);
  }
}

std::map<long, GradedVector> by_grade(const GradedVector& v) {
  std::map<long, GradedVector> out;
  for (const auto& [k, c] : v.entries()) out[k.grade].add(k, c);
  return out;
}

GradedVector vacuum_multiple(const Rational& c) {
  return c == 0 ? GradedVector() : GradedVector::basis(0, 0, c);
}

class Evaluator {
 public:
  Evaluator(const VertexAlgebra& V, const CandidateModule& W, Assignment a) : V_(V), W_(W), a_(std::move(a)) {
    a_.ints.try_emplace("D", W.degree_cutoff());
    a_.ints.try_emplace("N", V.weight_cutoff());
  }

  ModulePoly side(const Expr& e) {
    Budget b;
    for (const auto& [x, u] : a_.window_upper) b.var[x] = u;
    ModulePoly out = expr(e, b);
    ModulePoly kept;
    for (const auto& [m, c] : out.terms()) {
      bool ok = true;
      for (const auto& [x, lo] : a_.window_lower)
        if (lo && m.exponent(x) < *lo) ok = false;
      if (ok) kept.add_term(m, c);
    }
    return kept;
  }

 private:
  long cutoff(Space s) const { return s == Space::V ? V_.weight_cutoff() : W_.degree_cutoff(); }
  long widest() const { return std::max(V_.weight_cutoff(), W_.degree_cutoff()); }

  GradedVector act(Space s, const GradedVector& u, long n, const GradedVector& x) const {
    return s == Space::V ? V_.component(u, n, x) : W_.action(u, n, x);
  }

  // static bounds -------------------------------------------------------------

  long dmax_expr(const Expr& e) {
    long d = 0;
    for (const auto& t : e.terms) {
      if (!t.prefixes.empty()) return widest();
      d = std::max(d, dmax_product(t.factors, 0));
    }
    return d;
  }

  // largest grade of the product of factors[from..]
  long dmax_product(const std::vector<Factor>& fs, std::size_t from) {
    using Kd = Factor::Kind;
    const Factor& last = fs.back();
    long d = 0;
    switch (last.kind) {
      case Kd::Slot: d = a_.elements.at(last.slot).second.grade; break;
      case Kd::Group:
      case Kd::ScaleL0: d = dmax_expr(last.sub[0]); break;
      default: d = 0;
    }
    for (std::size_t i = fs.size() - 1; i-- > from;) {
      const Factor& f = fs[i];
      if (f.kind == Kd::Vertex) d = cutoff(f.space);
      if (f.kind == Kd::Mode)
        d = std::min(cutoff(f.space), std::max<long>(0, dmax_expr(f.sub[0]) + d - evaluate(f.e, a_) - 1));
    }
    return d;
  }

  Lower lower_expr(const Expr& e) {
    std::optional<Lower> out;
    for (const auto& t : e.terms) {
      Lower l;
      if (std::any_of(t.prefixes.begin(), t.prefixes.end(),
                      [](const Prefix& p) { return p.kind == Prefix::Kind::Sum; })) {
        std::set<std::string> vars;
        for (const auto& f : t.factors) collect_vars(f, vars);
        for (const auto& x : vars) l.var[x] = std::nullopt;
        l.total = std::nullopt;
      } else {
        for (std::size_t i = 0; i < t.factors.size(); ++i)
          l = l + lower_factor(t.factors[i], i + 1 < t.factors.size() ? dmax_product(t.factors, i + 1) : 0);
        for (const auto& p : t.prefixes) {
          // the residue removes the variable; its -1 leaves the total
          l.var.erase(p.name);
          l.total = add(l.total, 1);
        }
      }
      out = out ? pointwise_min(*out, l) : l;
    }
    return out.value_or(Lower{});
  }

  Lower lower_factor(const Factor& f, long dmax_in) {
    using Kd = Factor::Kind;
    Lower l;
    switch (f.kind) {
      case Kd::Power: {
        const long e = evaluate(f.e, a_);
        l.var[f.var.first] = e;
        l.total = e;
        break;
      }
      case Kd::Binomial: {
        const long n = evaluate(f.e, a_);
        const std::string& other = f.var.direction == f.var.first ? f.var.second : f.var.first;
        l.var[f.var.direction] = 0;
        l.var[other] = n >= 0 ? Bound(0) : std::nullopt;
        l.total = n;
        break;
      }
      case Kd::Vertex: {
        const long own = -(dmax_expr(f.sub[0]) + dmax_in);
        if (f.var.is_sum()) {
          const std::string& other = f.var.direction == f.var.first ? f.var.second : f.var.first;
          l.var[f.var.direction] = 0;
          l.var[other] = std::nullopt;
        } else {
          l.var[f.var.first] = own;
        }
        l.total = own;
        l = l + lower_expr(f.sub[0]);
        break;
      }
      case Kd::Mode:
      case Kd::ScaleL0:
      case Kd::Group: l = lower_expr(f.sub[0]); break;
      default: break;
    }
    return l;
  }

  // evaluation ----------------------------------------------------------------

  ModulePoly expr(const Expr& e, const Budget& b) {
    ModulePoly out;
    for (const auto& t : e.terms) {
      ModulePoly v = term(t, 0, b);
      out = t.negative ? out - v : out + v;
    }
    return out;
  }

  ModulePoly term(const Term& t, std::size_t k, Budget b) {
    if (k == t.prefixes.size()) {
      std::set<std::string> vars;
      for (const auto& f : t.factors) collect_vars(f, vars);
      for (const auto& p : t.prefixes)
        if (p.kind == Prefix::Kind::Res) vars.insert(p.name);
      Bound sum = 0;
      for (const auto& x : vars) sum = add(sum, b.of(x));
      if (sum) b.total = b.total ? std::min(*b.total, *sum) : *sum;
      ModulePoly v = product(t.factors, b);
      for (auto it = t.prefixes.rbegin(); it != t.prefixes.rend(); ++it)
        if (it->kind == Prefix::Kind::Res) v = residue(v, it->name);
      return v;
    }
    const Prefix& p = t.prefixes[k];
    if (p.kind == Prefix::Kind::Res) {
      // the residue keeps x^{-1}; anything in the outer budget about x is moot
      b.var[p.name] = -1;
      return term(t, k + 1, b);
    }
    const long lo = evaluate(p.lo, a_), hi = evaluate(p.hi, a_);
    ModulePoly out;
    for (long i = lo; i <= hi; ++i) {
      a_.ints[p.name] = i;
      out = out + term(t, k + 1, b);
    }
    a_.ints.erase(p.name);
    return out;
  }

  ModulePoly product(const std::vector<Factor>& fs, const Budget& b) {
    // lower bounds of the factors to the left of each position
    std::vector<Lower> left(fs.size());
    for (std::size_t i = 1; i < fs.size(); ++i)
      left[i] = left[i - 1] + lower_factor(fs[i - 1], dmax_product(fs, i));
    std::set<std::string> vars;
    for (const auto& f : fs) collect_vars(f, vars);
    for (const auto& [x, u] : b.var) vars.insert(x);

    ModulePoly value = operand(fs.back(), b - left.back(), vars);
    for (std::size_t i = fs.size() - 1; i-- > 0;) {
      if (value.is_zero_poly()) return value;
      value = apply(fs[i], value, b - left[i], vars);
    }
    return value;
  }

  ModulePoly pruned(const ModulePoly& p, const Budget& b) {
    ModulePoly out;
    for (const auto& [m, c] : p.terms())
      if (within(m, b)) out.add_term(m, c);
    return out;
  }

  // the rightmost factor of a product
  ModulePoly operand(const Factor& f, const Budget& b, const std::set<std::string>& vars) {
    using Kd = Factor::Kind;
    switch (f.kind) {
      case Kd::Slot: {
        const BasisKey& k = a_.elements.at(f.slot).second;
        return ModulePoly::constant(GradedVector::basis(k.grade, k.index));
      }
      case Kd::Group: return pruned(expr(f.sub[0], b), b);
      case Kd::ScaleL0: {
        ModulePoly inner = expr(f.sub[0], b);
        ModulePoly out;
        for (const auto& [m, c] : inner.terms())
          for (const auto& [g, piece] : by_grade(c)) {
            RationalPoly s = f.var.is_sum() ? binomial_expand(f.var.direction == f.var.first ? f.var.second
                                                                                                : f.var.first,
                                                              f.var.direction, g, TruncationWindow{})
                                            : RationalPoly::term(Monomial::var(f.var.first, g), Rational(1));
            for (const auto& [ms, cs] : s.terms())
              if (within(m * ms, b)) out.add_term(m * ms, cs * piece);
          }
        return out;
      }
      default: {
        ModulePoly one = ModulePoly::constant(vacuum_multiple(Rational(1)));
        return scalar(f, one, b, vars);
      }
    }
  }

  ModulePoly apply(const Factor& f, const ModulePoly& value, const Budget& b, const std::set<std::string>& vars) {
    using Kd = Factor::Kind;
    switch (f.kind) {
      case Kd::Vertex: return vertex(f, value, b, vars);
      case Kd::Mode: {
        const Budget inner = b - lowest(value, vars);
        ModulePoly E = expr(f.sub[0], inner);
        const long n = evaluate(f.e, a_);
        ModulePoly out;
        for (const auto& [mv, cv] : value.terms())
          for (const auto& [me, ce] : E.terms()) {
            const Monomial m = mv * me;
            if (within(m, b)) out.add_term(m, act(f.space, ce, n, cv));
          }
        return out;
      }
      default: return scalar(f, value, b, vars);
    }
  }

  // scalar factor times value
  ModulePoly scalar(const Factor& f, const ModulePoly& value, const Budget& b, const std::set<std::string>& vars) {
    using Kd = Factor::Kind;
    RationalPoly s;
    switch (f.kind) {
      case Kd::Number: s = RationalPoly::constant(f.number); break;
      case Kd::Integer: s = RationalPoly::constant(Rational(evaluate(f.a, a_))); break;
      case Kd::Binom: s = RationalPoly::constant(binomial(evaluate(f.a, a_), evaluate(f.e, a_))); break;
      case Kd::Power: s = RationalPoly::term(Monomial::var(f.var.first, evaluate(f.e, a_)), Rational(1)); break;
      case Kd::Binomial: {
        const long n = evaluate(f.e, a_);
        const std::string& d = f.var.direction;
        const std::string& o = d == f.var.first ? f.var.second : f.var.first;
        TruncationWindow w;
        if (n < 0) {
          Bound room = (b - lowest(value, vars)).of(d);
          if (!room) throw WindowError("(" + o + "+" + d + ")^" + std::to_string(n) + " needs a bound on " + d);
          w.bound(d, std::nullopt, std::max<long>(*room, -1));
        }
        s = binomial_expand(o, d, n, w);
        break;
      }
      default: throw std::logic_error("not a scalar factor");
    }
    ModulePoly out;
    for (const auto& [ms, cs] : s.terms())
      for (const auto& [mv, cv] : value.terms()) {
        const Monomial m = ms * mv;
        if (within(m, b)) out.add_term(m, cs * cv);
      }
    return out;
  }

  ModulePoly vertex(const Factor& f, const ModulePoly& value, const Budget& b, const std::set<std::string>& vars) {
    // the argument sees the budget minus the value and the smallest own exponent
    Lower own;
    const long dmax_in = [&] {
      long d = 0;
      for (const auto& [m, c] : value.terms())
        for (const auto& [k, x] : c.entries()) d = std::max(d, k.grade);
      return d;
    }();
    const long own_lo = -(dmax_expr(f.sub[0]) + dmax_in);
    if (f.var.is_sum()) {
      const std::string& other = f.var.direction == f.var.first ? f.var.second : f.var.first;
      own.var[f.var.direction] = 0;
      own.var[other] = std::nullopt;
    } else {
      own.var[f.var.first] = own_lo;
    }
    own.total = own_lo;
    ModulePoly E = expr(f.sub[0], b - (lowest(value, vars) + own));

    ModulePoly out;
    const bool sum = f.var.is_sum();
    const std::string& d = sum ? f.var.direction : f.var.first;
    const std::string o = sum ? (d == f.var.first ? f.var.second : f.var.first) : std::string();
    std::vector<std::pair<Monomial, std::map<long, GradedVector>>> values, args;
    for (const auto& [m, c] : value.terms()) values.emplace_back(m, by_grade(c));
    for (const auto& [m, c] : E.terms()) args.emplace_back(m, by_grade(c));
    for (const auto& [mv, cvs] : values)
      for (const auto& [me, ces] : args) {
        const Monomial base = mv * me;
        const long base_total = total_degree(base);
        for (const auto& [wa, ua] : ces)
          for (const auto& [wd, xd] : cvs) {
            // u_n x = 0 for n >= wa + wd: the exponent e = -n-1 starts at -(wa + wd)
            for (long e = -(wa + wd);; ++e) {
              if (b.total && base_total + e > *b.total) break;
              if (!sum) {
                Bound u = b.of(d);
                if (u && base.exponent(d) + e > *u) break;
                // without any bound, the window is every coefficient inside the cutoff
                if (!u && !b.total && wa + wd + e > cutoff(f.space)) break;
                const Monomial m = base * Monomial::var(d, e);
                if (within(m, b)) out.add_term(m, act(f.space, ua, -e - 1, xd));
                continue;
              }
              Bound ud = b.of(d), uo = b.of(o);
              if (!ud) throw WindowError("Y(u, " + o + "+" + d + ") needs a bound on " + d);
              const long i_max = *ud - base.exponent(d);
              if (i_max < 0) break;
              if (uo && base.exponent(o) + e - i_max > *uo) break;
              if (!uo && !b.total)
                throw WindowError("Y(u, " + o + "+" + d + ") needs a bound on " + o + " or on the total exponent");
              std::optional<GradedVector> c;
              for (long i = 0; i <= i_max; ++i) {
                const Monomial m = base * Monomial::var(o, e - i) * Monomial::var(d, i);
                if (!within(m, b)) continue;
                if (!c) c = act(f.space, ua, -e - 1, xd);
                if (c->is_zero()) break;
                out.add_term(m, binomial(e, i) * *c);
              }
            }
          }
      }
    return out;
  }

  const VertexAlgebra& V_;
  const CandidateModule& W_;
  Assignment a_;
};

}  // namespace

ModulePoly evaluate(const Expr& side, const VertexAlgebra& V, const CandidateModule& W, const Assignment& a) {
  return Evaluator(V, W, a).side(side);
}

ModulePoly discrepancy(const IdentityAst& ast, const VertexAlgebra& V, const CandidateModule& W,
                       const Assignment& a) {
  return evaluate(ast.lhs, V, W, a) - evaluate(ast.rhs, V, W, a);
}

// sampling -------------------------------------------------------------------

namespace {

void enumerate(const IdentityAst& ast, std::size_t k, Assignment& a, const VertexAlgebra& V,
               const CandidateModule& W, const SamplingPlan& plan, std::vector<Assignment>& out) {
  if (k == ast.statements.size()) {
    for (const auto& g : ast.guards)
      if (!holds(g, a)) return;
    out.push_back(a);
    return;
  }
  const Statement& s = ast.statements[k];
  switch (s.kind) {
    case Statement::Kind::Elements: {
      const auto basis = s.space == Space::V ? V.basis_up_to(plan.max_weight) : W.basis_up_to(plan.max_degree);
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == s.names.size()) {
          enumerate(ast, k + 1, a, V, W, plan, out);
          return;
        }
        for (const auto& key : basis) {
          a.elements[s.names[i]] = {s.space, key};
          rec(i + 1);
        }
        a.elements.erase(s.names[i]);
      };
      rec(0);
      return;
    }
    case Statement::Kind::Box: {
      auto vec = [&](const std::string& n) {
        const BasisKey& key = a.elements.at(n).second;
        return GradedVector::basis(key.grade, key.index);
      };
      for (const auto& [p, q] : nonvanishing_box(W, vec(s.names[2]), vec(s.names[3]), vec(s.names[4]))) {
        a.ints[s.names[0]] = p;
        a.ints[s.names[1]] = q;
        enumerate(ast, k + 1, a, V, W, plan, out);
      }
      a.ints.erase(s.names[0]);
      a.ints.erase(s.names[1]);
      return;
    }
    case Statement::Kind::Range: {
      const long lo = evaluate(s.lo, a), hi = evaluate(s.hi, a);
      for (long i = lo; i <= hi; ++i) {
        a.ints[s.names[0]] = i;
        enumerate(ast, k + 1, a, V, W, plan, out);
      }
      a.ints.erase(s.names[0]);
      return;
    }
    case Statement::Kind::Let:
      a.ints[s.names[0]] = evaluate(s.lo, a);
      enumerate(ast, k + 1, a, V, W, plan, out);
      a.ints.erase(s.names[0]);
      return;
    case Statement::Kind::Where:
      if (holds(s.condition, a)) enumerate(ast, k + 1, a, V, W, plan, out);
      return;
    case Statement::Kind::Window: {
      auto& slot = s.op == "<=" ? a.window_upper : a.window_lower;
      const Bound before = slot.count(s.names[0]) ? slot[s.names[0]] : std::nullopt;
      const long v = evaluate(s.lo, a);
      slot[s.names[0]] = before ? (s.op == "<=" ? std::min(*before, v) : std::max(*before, v)) : v;
      enumerate(ast, k + 1, a, V, W, plan, out);
      if (before)
        slot[s.names[0]] = before;
      else
        slot.erase(s.names[0]);
      return;
    }
  }
}

unsigned resolve_threads(unsigned requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("VOXCALC_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

}  // namespace

std::vector<Assignment> assignments(const IdentityAst& ast, const VertexAlgebra& V, const CandidateModule& W,
                                    const SamplingPlan& plan) {
  std::vector<Assignment> out;
  Assignment a;
  a.ints["D"] = W.degree_cutoff();
  a.ints["N"] = V.weight_cutoff();
  enumerate(ast, 0, a, V, W, plan, out);
  return out;
}

CheckReport check(const IdentityAst& ast, const VertexAlgebra& V, const CandidateModule& W,
                  const SamplingPlan& plan) {
  CheckReport r;
  r.identity = ast.name;
  r.module = W.name();
  r.cutoffs = "u, v of weight <= " + std::to_string(plan.max_weight) + ", w of degree <= " +
              std::to_string(plan.max_degree) + ", algebra weight <= " + std::to_string(V.weight_cutoff()) +
              ", module degree <= " + std::to_string(W.degree_cutoff());
  std::vector<Assignment> all = assignments(ast, V, W, plan);
  if (plan.sample > 0 && plan.sample < all.size()) {
    std::vector<Assignment> picked;
    std::mt19937_64 rng(plan.seed);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), plan.sample, rng);
    all = std::move(picked);
    r.complete = false;
  }
  r.samples = all.size();
  std::vector<char> verdict(all.size(), '.');
  std::vector<std::string> detail(all.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < all.size();) {
      try {
        ModulePoly d = discrepancy(ast, V, W, all[i]);
        if (!d.is_zero_poly()) {
          verdict[i] = 'F';
          detail[i] = d.render([&](const GradedVector& c) { return W.render(c); });
        }
      } catch (const CutoffExceeded& e) {
        verdict[i] = 'E';
        detail[i] = std::string("cutoff: ") + e.what();
      } catch (const WindowError& e) {
        verdict[i] = 'E';
        detail[i] = std::string("window: ") + e.what();
      }
    }
  };
  const unsigned n = std::min<std::size_t>(resolve_threads(plan.threads), std::max<std::size_t>(all.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  r.verdicts.assign(verdict.begin(), verdict.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (verdict[i] == '.') continue;
    Witness w{i, all[i].render(V, W), detail[i]};
    if (verdict[i] == 'F') {
      ++r.failures;
      if (!r.first_failure) r.first_failure = w;
    } else {
      ++r.errors;
      if (!r.first_error) r.first_error = w;
    }
  }
  return r;
}

std::string CheckReport::render() const {
  std::ostringstream out;
  out << identity << ": " << (passed() ? "pass" : failures ? "FAIL" : "UNSTABLE") << " (" << samples << " samples, "
      << failures << " failed, " << errors << " errors, " << (complete ? "complete within cutoffs" : "subsample")
      << ")\n";
  out << "  module " << module << "; " << cutoffs << "\n";
  if (first_failure)
    out << "  first failure #" << first_failure->index << ": " << first_failure->assignment << "\n    LHS - RHS = "
        << first_failure->detail << "\n";
  if (first_error)
    out << "  first error #" << first_error->index << ": " << first_error->assignment << "\n    "
        << first_error->detail << "\n";
  return out.str();
}

}  // namespace voxcalc::dsl
