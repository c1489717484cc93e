#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "voxcalc/backends.hpp"
#include "voxcalc/zhu.hpp"

using namespace voxcalc;
using namespace voxcalc::backends;

namespace {

std::shared_ptr<HeisenbergAlgebra> heis(long cutoff = 14) { return std::make_shared<HeisenbergAlgebra>(cutoff); }

}  // namespace

TEST_CASE("star product worked values") {
  auto V = heis();
  auto a = V->alpha();
  CHECK(star(*V, V->vacuum(), a) == a);
  CHECK(star(*V, a, a) == V->state({1, 1}));
  // alpha * alpha(-1)^2 1 = alpha_{-1} alpha(-1)^2 1 + alpha_0 alpha(-1)^2 1
  CHECK(star(*V, a, V->state({1, 1})) == V->state({1, 1, 1}));
  // alpha(-1)^2 1 * alpha = sum_j C(2,j) (alpha(-1)^2 1)_{j-1} alpha
  auto b = V->state({1, 1});
  GradedVector expect;
  for (long j = 0; j <= 2; ++j) expect.add_scaled(V->component(b, j - 1, a), binomial(2, j));
  CHECK(star(*V, b, a) == expect);
}

TEST_CASE("O(V) generator support and values") {
  auto V = heis();
  CHECK(ov_generators(*V, 0).empty());
  CHECK(ov_support(1, 1, -2) == std::make_pair(2L, 3L));
  auto gens = ov_generators(*V, 3);
  bool found = false;
  for (const auto& g : gens) {
    auto [lo, hi] = ov_support(g.u.grade, g.v.grade, g.n);
    for (long w : g.value.grades()) {
      CHECK(w >= lo);
      CHECK(w <= hi);
    }
    if (g.u == BasisKey{1, 0} && g.v == BasisKey{1, 0} && g.n == -2) {
      found = true;
      CHECK(g.value == V->state({2, 1}) + V->state({1, 1}));
    }
  }
  CHECK(found);
}

TEST_CASE("heisenberg Zhu quotient dimensions and stabilization") {
  auto V = heis();
  for (long N = 0; N <= 4; ++N) {
    auto z = zhu_quotient(V, N);
    CHECK(z->dim() == static_cast<std::size_t>(N + 1));
    REQUIRE(z->trace().size() >= 2);
    auto t = z->trace();
    CHECK(t[t.size() - 1].quotient_dim == t[t.size() - 2].quotient_dim);
  }
  auto z0 = zhu_quotient(V, 0);
  CHECK(z0->quotient_keys()[0] == BasisKey{0, 0});
  CHECK(*z0->structure_constants(0, 0) == std::vector<Rational>{1});
}

TEST_CASE("heisenberg A(V) is commutative, associative, unital and generated by alpha") {
  auto V = heis();
  auto z = zhu_quotient(V, 4);
  const std::size_t n = z->dim();
  auto one = V->vacuum();
  for (std::size_t i = 0; i < n; ++i) {
    auto r = z->representative(i);
    CHECK(z->equivalent(star(*V, one, r), r));
    CHECK(z->equivalent(star(*V, r, one), r));
    for (std::size_t j = 0; j < n; ++j) {
      auto s = z->representative(j);
      if (r.grade() + s.grade() > 4) continue;
      CHECK(z->equivalent(star(*V, r, s), star(*V, s, r)));
      for (std::size_t k = 0; k < n; ++k) {
        auto t = z->representative(k);
        if (r.grade() + s.grade() + t.grade() > 4) continue;
        CHECK(z->equivalent(star(*V, star(*V, r, s), t), star(*V, r, star(*V, s, t))));
      }
    }
  }
  // powers of [alpha] span
  std::vector<std::vector<Rational>> powers;
  GradedVector p = one;
  for (long k = 0; k <= 4; ++k) {
    powers.push_back(z->coordinates(p));
    p = star(*V, V->alpha(), p);
  }
  linalg::RowSpace rs(n);
  for (const auto& v : powers) rs.insert(linalg::dense_to_sparse(v));
  CHECK(rs.rank() == n);
  // relation forced by the u = v = alpha, n = -2 generator
  CHECK(z->equivalent(V->state({2, 1}), Rational(-1) * V->state({1, 1})));
  // and by u = alpha, v = 1, n = -2
  CHECK(z->equivalent(V->state({2}), Rational(-1) * V->alpha()));
  CHECK_FALSE(z->equivalent(V->state({2}), Rational(-1) * V->state({1, 1})));
}

TEST_CASE("instability is reported") {
  auto V = heis();
  ZhuOptions opts;
  opts.slack_ceiling = 0;
  CHECK_THROWS_AS(zhu_quotient(V, 2, opts), UnstableAtCutoff);
  CHECK_THROWS_AS(zhu_quotient(std::make_shared<HeisenbergAlgebra>(3), 2), CutoffExceeded);
}

TEST_CASE("A(V)-modules from generator images") {
  auto V = heis();
  auto z = zhu_quotient(V, 4);
  DenseMatrix lam{{Rational(3)}};
  auto M = AVModule::from_generator_images(z, 1, {{V->alpha(), lam}});
  CHECK(M.rho(V->vacuum()) == identity_matrix(1));
  CHECK(M.rho(V->state({1, 1})) == DenseMatrix{{Rational(9)}});
  CHECK(M.rho(V->state({2})) == DenseMatrix{{Rational(-3)}});
  CHECK_FALSE(M.representation_defect());

  DenseMatrix jordan{{Rational(2), Rational(1)}, {Rational(0), Rational(2)}};
  auto J = AVModule::from_generator_images(z, 2, {{V->alpha(), jordan}});
  CHECK(J.rho(V->alpha()) == jordan);
  CHECK(J.rho(V->state({1, 1})) == multiply(jordan, jordan));
  CHECK_FALSE(J.representation_defect());
}

TEST_CASE("top level of Fock modules") {
  auto V = heis();
  auto z = zhu_quotient(V, 3);
  for (Rational lam : {Rational(0), Rational(2), ratio(-1, 2)}) {
    FockModule F(V, lam, 4);
    auto T = top_level(F, z, 3);
    REQUIRE(T.basis.size() == 1);
    CHECK(T.basis[0] == F.lowest());
    CHECK(T.module.rho(V->alpha()) == DenseMatrix{{lam}});
    CHECK(T.module.rho(V->vacuum()) == identity_matrix(1));
    CHECK(T.module.rho(star(*V, V->alpha(), V->alpha())) == DenseMatrix{{lam * lam}});
    CHECK_FALSE(T.module.representation_defect());
  }
}

#ifdef VOXCALC_WITH_VIRASORO
TEST_CASE("virasoro Zhu quotient is generated by omega") {
  auto V = std::make_shared<VirasoroAlgebra>(ratio(1, 2), 14);
  auto z = zhu_quotient(V, 2);
  CHECK(z->dim() == 2);
  auto z4 = zhu_quotient(V, 4);
  CHECK(z4->dim() == 3);
}
#endif
