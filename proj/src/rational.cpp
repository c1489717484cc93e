#include "voxcalc/rational.hpp"

#include <stdexcept>
#include <vector>

namespace voxcalc {

Rational ratio(long n, long d) { return ratio(Integer(n), Integer(d)); }

Rational ratio(const Integer& n, const Integer& d) {
  if (d == 0) throw std::invalid_argument("zero denominator");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

namespace {

constexpr long kTableReach = 64;

Rational binomial_slow(const Integer& n, long k) {
  Rational result(1);
  for (long i = 0; i < k; ++i) {
    result *= Rational(Integer(n - i));
    result /= Rational(i + 1);
  }
  result.canonicalize();
  return result;
}

// C(n, k) for |n| <= kTableReach and 0 <= k <= kTableReach
const std::vector<Rational>& binomial_table() {
  static const std::vector<Rational> table = [] {
    std::vector<Rational> t;
    t.reserve((2 * kTableReach + 1) * (kTableReach + 1));
    for (long n = -kTableReach; n <= kTableReach; ++n)
      for (long k = 0; k <= kTableReach; ++k) t.push_back(binomial_slow(Integer(n), k));
    return t;
  }();
  return table;
}

}  // namespace

Rational binomial(long n, long k) {
  if (k < 0) return Rational(0);
  if (n >= -kTableReach && n <= kTableReach && k <= kTableReach)
    return binomial_table()[(n + kTableReach) * (kTableReach + 1) + k];
  return binomial_slow(Integer(n), k);
}

Rational binomial(const Integer& n, long k) {
  if (k < 0) return Rational(0);
  if (n.fits_slong_p()) return binomial(n.get_si(), k);
  return binomial_slow(n, k);
}

std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_short_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return to_string(r);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto valid_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  auto strip_plus = [](std::string t) {
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    return t;
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!valid_int(s)) throw std::invalid_argument("not a rational: " + s);
    return Rational(Integer(strip_plus(s)));
  }
  std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-')
    throw std::invalid_argument("not a rational: " + s);
  Integer d(strip_plus(den));
  if (d == 0) throw std::invalid_argument("zero denominator: " + s);
  Rational r(Integer(strip_plus(num)), d);
  r.canonicalize();
  return r;
}

}  // namespace voxcalc
