#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voxcalc/rational.hpp"

namespace voxcalc {

inline bool is_zero(const Rational& r) { return r == 0; }

/// Raised when a formal series would need terms outside its truncation window.
class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exponent vector with finite support, sorted by variable name; never stores
/// a zero exponent.
class Monomial {
 public:
  Monomial() = default;
  static Monomial var(const std::string& name, long exponent = 1);

  long exponent(const std::string& name) const;
  const std::vector<std::pair<std::string, long>>& powers() const { return powers_; }
  bool is_one() const { return powers_.empty(); }

  Monomial operator*(const Monomial& other) const;
  Monomial without(const std::string& name) const;
  Monomial with_exponent(const std::string& name, long exponent) const;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

  std::string render() const;

 private:
  std::vector<std::pair<std::string, long>> powers_;
};

/// Per-variable inclusive exponent bounds. A variable without an entry is
/// unbounded.
struct TruncationWindow {
  std::map<std::string, std::pair<std::optional<long>, std::optional<long>>> bounds;

  TruncationWindow& bound(const std::string& name, std::optional<long> lo, std::optional<long> hi);
  std::optional<long> lower(const std::string& name) const;
  std::optional<long> upper(const std::string& name) const;
  bool contains(const Monomial& m) const;
};

/// Finite-support multivariate Laurent polynomial with coefficients in C.
/// C must provide +, -, Rational * C and a free function is_zero(C).
template <class C>
class LaurentPoly {
 public:
  using Coefficient = C;
  using Terms = std::map<Monomial, C>;

  LaurentPoly() = default;
  static LaurentPoly constant(const C& c) {
    LaurentPoly p;
    p.add_term(Monomial(), c);
    return p;
  }
  static LaurentPoly term(const Monomial& m, const C& c) {
    LaurentPoly p;
    p.add_term(m, c);
    return p;
  }

  void add_term(const Monomial& m, const C& c) {
    if (is_zero(c)) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
      return;
    }
    it->second = it->second + c;
    if (is_zero(it->second)) terms_.erase(it);
  }

  const Terms& terms() const { return terms_; }
  bool is_zero_poly() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::optional<C> coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    if (it == terms_.end()) return std::nullopt;
    return it->second;
  }

  LaurentPoly operator+(const LaurentPoly& o) const {
    LaurentPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  LaurentPoly operator-(const LaurentPoly& o) const {
    LaurentPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, Rational(-1) * c);
    return r;
  }
  LaurentPoly scaled(const Rational& r) const {
    LaurentPoly out;
    if (r == 0) return out;
    for (const auto& [m, c] : terms_) out.add_term(m, r * c);
    return out;
  }
  LaurentPoly restricted(const TruncationWindow& w) const {
    LaurentPoly out;
    for (const auto& [m, c] : terms_)
      if (w.contains(m)) out.terms_.emplace(m, c);
    return out;
  }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return (a - b).is_zero_poly();
  }

  /// Terms in ascending monomial order, joined by " + ".
  std::string render(const std::function<std::string(const C&)>& coefficient_text) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + coefficient_text(c) + ")";
      if (!m.is_one()) out += "*" + m.render();
    }
    return out;
  }

 private:
  Terms terms_;
};

using RationalPoly = LaurentPoly<Rational>;

std::string render(const RationalPoly& p);

/// Product of a scalar Laurent polynomial with a C-valued one.
template <class C>
LaurentPoly<C> multiply(const RationalPoly& a, const LaurentPoly<C>& b) {
  LaurentPoly<C> out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, ca * cb);
  return out;
}

inline RationalPoly multiply(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, ca * cb);
  return out;
}

/// Coefficient of var^{-1}, as a polynomial in the remaining variables.
template <class C>
LaurentPoly<C> residue(const LaurentPoly<C>& p, const std::string& var) {
  LaurentPoly<C> out;
  for (const auto& [m, c] : p.terms())
    if (m.exponent(var) == -1) out.add_term(m.without(var), c);
  return out;
}

/// Coefficient of var^exponent, as a polynomial in the remaining variables.
template <class C>
LaurentPoly<C> coefficient_of(const LaurentPoly<C>& p, const std::string& var, long exponent) {
  LaurentPoly<C> out;
  for (const auto& [m, c] : p.terms())
    if (m.exponent(var) == exponent) out.add_term(m.without(var), c);
  return out;
}

template <class C>
LaurentPoly<C> derivative(const LaurentPoly<C>& p, const std::string& var) {
  LaurentPoly<C> out;
  for (const auto& [m, c] : p.terms()) {
    long e = m.exponent(var);
    if (e != 0) out.add_term(m.with_exponent(var, e - 1), Rational(e) * c);
  }
  return out;
}

/// Replaces var by a single nonzero monomial term c * m.
template <class C>
LaurentPoly<C> substitute_monomial(const LaurentPoly<C>& p, const std::string& var,
                                   const RationalPoly& replacement) {
  if (replacement.size() != 1)
    throw std::invalid_argument("substitution target must be a single nonzero monomial");
  const auto& [rm, rc] = *replacement.terms().begin();
  LaurentPoly<C> out;
  for (const auto& [m, c] : p.terms()) {
    long e = m.exponent(var);
    Rational factor(1);
    Monomial shifted;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) {
      factor *= rc;
      shifted = shifted * rm;
    }
    if (e < 0) {
      factor = 1 / factor;
      Monomial inverse;
      for (const auto& [name, exp] : shifted.powers()) inverse = inverse * Monomial::var(name, -exp);
      shifted = inverse;
    }
    out.add_term(m.without(var) * shifted, factor * c);
  }
  return out;
}

/// (first + second)^n expanded in nonnegative powers of `second`:
/// sum_{i>=0} C(n,i) first^{n-i} second^i. For n >= 0 the sum is finite and
/// the window is not consulted. For n < 0 the window must bound the exponent
/// of `second` from above or that of `first` from below; otherwise WindowError.
RationalPoly binomial_expand(const std::string& first, const std::string& second, long n,
                             const TruncationWindow& window);

/// sum_{i=0}^{k-q-1} C(p-l, i) x0^{p-l-i} x2^i. Requires k - q >= 1.
RationalPoly truncating_polynomial(long p, long l, long k, long q,
                                   const std::string& x0 = "x0", const std::string& x2 = "x2");

}  // namespace voxcalc
