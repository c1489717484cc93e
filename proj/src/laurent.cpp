#include "voxcalc/laurent.hpp"

namespace voxcalc {

Monomial Monomial::var(const std::string& name, long exponent) {
  Monomial m;
  if (exponent != 0) m.powers_.emplace_back(name, exponent);
  return m;
}

long Monomial::exponent(const std::string& name) const {
  for (const auto& [n, e] : powers_)
    if (n == name) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  auto a = powers_.begin(), b = other.powers_.begin();
  while (a != powers_.end() || b != other.powers_.end()) {
    if (b == other.powers_.end() || (a != powers_.end() && a->first < b->first)) {
      out.powers_.push_back(*a++);
    } else if (a == powers_.end() || b->first < a->first) {
      out.powers_.push_back(*b++);
    } else {
      long e = a->second + b->second;
      if (e != 0) out.powers_.emplace_back(a->first, e);
      ++a;
      ++b;
    }
  }
  return out;
}

Monomial Monomial::without(const std::string& name) const {
  Monomial out;
  for (const auto& p : powers_)
    if (p.first != name) out.powers_.push_back(p);
  return out;
}

Monomial Monomial::with_exponent(const std::string& name, long exponent) const {
  return without(name) * var(name, exponent);
}

std::string Monomial::render() const {
  if (powers_.empty()) return "1";
  std::string out;
  for (const auto& [name, e] : powers_) {
    if (!out.empty()) out += "*";
    out += name;
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

TruncationWindow& TruncationWindow::bound(const std::string& name, std::optional<long> lo,
                                          std::optional<long> hi) {
  if (lo && hi && *lo > *hi) throw std::invalid_argument("window lower bound exceeds upper bound for " + name);
  bounds[name] = {lo, hi};
  return *this;
}

std::optional<long> TruncationWindow::lower(const std::string& name) const {
  auto it = bounds.find(name);
  return it == bounds.end() ? std::nullopt : it->second.first;
}

std::optional<long> TruncationWindow::upper(const std::string& name) const {
  auto it = bounds.find(name);
  return it == bounds.end() ? std::nullopt : it->second.second;
}

bool TruncationWindow::contains(const Monomial& m) const {
  for (const auto& [name, range] : bounds) {
    long e = m.exponent(name);
    if (range.first && e < *range.first) return false;
    if (range.second && e > *range.second) return false;
  }
  return true;
}

std::string render(const RationalPoly& p) {
  return p.render([](const Rational& r) { return to_string(r); });
}

RationalPoly binomial_expand(const std::string& first, const std::string& second, long n,
                             const TruncationWindow& window) {
  RationalPoly out;
  long last;
  if (n >= 0) {
    last = n;
  } else {
    auto hi = window.upper(second);
    auto lo = window.lower(first);
    if (!hi && !lo)
      throw WindowError("negative power (" + first + "+" + second + ")^" + std::to_string(n) +
                        " needs an upper bound on " + second + " or a lower bound on " + first);
    last = hi ? *hi : n - *lo;
    if (lo) last = std::min(last, n - *lo);
  }
  for (long i = 0; i <= last; ++i)
    out.add_term(Monomial::var(first, n - i) * Monomial::var(second, i), binomial(n, i));
  return out;
}

RationalPoly truncating_polynomial(long p, long l, long k, long q, const std::string& x0,
                                   const std::string& x2) {
  if (k - q <= 0) throw std::invalid_argument("truncating polynomial requires k - q >= 1");
  RationalPoly out;
  for (long i = 0; i <= k - q - 1; ++i)
    out.add_term(Monomial::var(x0, p - l - i) * Monomial::var(x2, i), binomial(p - l, i));
  return out;
}

}  // namespace voxcalc
