#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "voxcalc/linalg.hpp"

using namespace voxcalc;
using namespace voxcalc::linalg;

namespace {

Rational q(long n, long d = 1) { return ratio(n, d); }

SparseVector vec(std::initializer_list<std::pair<std::size_t, Rational>> entries) {
  SparseVector v;
  for (const auto& [c, x] : entries)
    if (x != 0) v[c] = x;
  return v;
}

}  // namespace

TEST_CASE("binomials with negative upper index") {
  CHECK(binomial(-1, 3) == -1);
  CHECK(binomial(-2, 2) == 3);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(4, -1) == 0);
}

TEST_CASE("rational parse and print") {
  CHECK(parse_rational("-1/2") == q(-1, 2));
  CHECK(parse_rational("3") == 3);
  CHECK(to_string(q(4, 2)) == "2/1");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
}

TEST_CASE("rref of a hand-reduced 3x4 matrix") {
  // [1 2 0 3; 2 4 1 7; 1 2 1 4] -> rows (1 2 0 3), (0 0 1 1); third row dependent.
  auto m = SparseMatrix::from_dense({{1, 2, 0, 3}, {2, 4, 1, 7}, {1, 2, 1, 4}});
  auto b = rref(m);
  REQUIRE(b.rank() == 2);
  CHECK(b.pivot_cols == std::vector<std::size_t>{0, 2});
  CHECK(b.vectors[0] == vec({{0, 1}, {1, 2}, {3, 3}}));
  CHECK(b.vectors[1] == vec({{2, 1}, {3, 1}}));
}

TEST_CASE("rref with fractions") {
  auto m = SparseMatrix::from_dense({{2, 1}, {3, 5}});
  auto b = rref(m);
  CHECK(b.rank() == 2);
  CHECK(b.vectors[0] == vec({{0, 1}}));
  CHECK(b.vectors[1] == vec({{1, 1}}));
  auto c = rref(SparseMatrix::from_dense({{q(1, 2), q(1, 3)}, {3, 2}}));
  CHECK(c.rank() == 1);
  CHECK(c.vectors[0] == vec({{0, 1}, {1, q(2, 3)}}));
}

TEST_CASE("incremental row space agrees with batch rref") {
  std::vector<SparseVector> rows = {vec({{0, 1}, {2, -1}}), vec({{1, 2}, {2, 4}}), vec({{0, 2}, {1, 2}, {2, 2}}),
                                    vec({{3, 5}})};
  RowSpace rs(4);
  CHECK(rs.insert(rows[0]));
  CHECK(rs.insert(rows[1]));
  CHECK_FALSE(rs.insert(rows[2]));
  CHECK(rs.insert(rows[3]));
  CHECK(rs.basis() == rref(4, rows));
  CHECK(rs.contains(vec({{0, 3}, {1, 1}, {2, -1}})));
}

TEST_CASE("quotient coordinates identify congruent vectors") {
  auto rel = rref(3, {vec({{0, 1}, {1, -1}})});
  auto a = quotient_coordinates(3, rel, vec({{0, 1}}));
  auto b = quotient_coordinates(3, rel, vec({{1, 1}}));
  CHECK(a == b);
  CHECK(quotient_coordinates(3, rel, vec({{2, 1}})) != a);
}

TEST_CASE("intersection with coordinate subspace") {
  // span{e0 + e2, e1 - e2}: the only combination avoiding e2 is e0 + e1.
  auto rel = rref(3, {vec({{0, 1}, {2, 1}}), vec({{1, 1}, {2, -1}})});
  auto cap = intersect_with_coordinate_subspace(rel, {0, 1});
  REQUIRE(cap.rank() == 1);
  CHECK(cap.vectors[0] == vec({{0, 1}, {1, 1}}));
}

TEST_CASE("kernel of a rank-one matrix") {
  auto k = kernel(SparseMatrix::from_dense({{1, 2, 3}}));
  CHECK(k.rank() == 2);
  auto m = SparseMatrix::from_dense({{1, 2, 3}});
  for (const auto& v : k.vectors) {
    Rational s = 0;
    for (const auto& [c, x] : v) s += m.at(0, c) * x;
    CHECK(s == 0);
  }
}

TEST_CASE("dimension mismatch is reported") {
  RowSpace rs(2);
  CHECK_THROWS_AS(rs.insert(vec({{5, 1}})), DimensionMismatch);
}
