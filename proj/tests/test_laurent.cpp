#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "voxcalc/laurent.hpp"

using namespace voxcalc;

namespace {

Monomial mono(long a, long b) { return Monomial::var("x0", a) * Monomial::var("x2", b); }

}  // namespace

TEST_CASE("positive power expands to a finite sum") {
  auto p = binomial_expand("x0", "x2", 3, {});
  CHECK(p.size() == 4);
  CHECK(*p.coefficient(mono(1, 2)) == 3);
  CHECK(*p.coefficient(mono(0, 3)) == 1);
}

TEST_CASE("negative power needs a window") {
  CHECK_THROWS_AS(binomial_expand("x0", "x2", -1, {}), WindowError);
  TruncationWindow w;
  w.bound("x2", std::nullopt, 3);
  auto p = binomial_expand("x0", "x2", -1, w);
  // (x0+x2)^-1 = x0^-1 - x0^-2 x2 + x0^-3 x2^2 - x0^-4 x2^3 + ...
  CHECK(p.size() == 4);
  CHECK(*p.coefficient(mono(-4, 3)) == -1);
  CHECK(*p.coefficient(mono(-3, 2)) == 1);
}

TEST_CASE("expansion directions differ") {
  TruncationWindow w;
  w.bound("x0", std::nullopt, 2).bound("x2", std::nullopt, 2);
  auto a = binomial_expand("x0", "x2", -1, w);
  auto b = binomial_expand("x2", "x0", -1, w);
  CHECK_FALSE(a == b);
}

TEST_CASE("residue and coefficient extraction") {
  RationalPoly p;
  p.add_term(mono(-1, 2), Rational(5));
  p.add_term(mono(0, 1), Rational(7));
  auto r = residue(p, "x0");
  CHECK(r.size() == 1);
  CHECK(*r.coefficient(Monomial::var("x2", 2)) == 5);
  auto c = coefficient_of(p, "x2", 1);
  CHECK(*c.coefficient(Monomial()) == 7);
}

TEST_CASE("derivative lowers exponents") {
  auto p = RationalPoly::term(Monomial::var("x", -2), Rational(3));
  auto d = derivative(p, "x");
  CHECK(*d.coefficient(Monomial::var("x", -3)) == -6);
}

TEST_CASE("truncating polynomial") {
  auto t = truncating_polynomial(2, 0, 3, 1);
  // sum_{i=0}^{1} C(2,i) x0^{2-i} x2^i
  CHECK(t.size() == 2);
  CHECK(*t.coefficient(mono(2, 0)) == 1);
  CHECK(*t.coefficient(mono(1, 1)) == 2);
  CHECK_THROWS_AS(truncating_polynomial(2, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("monomials never store zero exponents") {
  CHECK(Monomial::var("x", 0).is_one());
  CHECK((Monomial::var("x", 2) * Monomial::var("x", -2)).is_one());
}
