#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>

#include "voxcalc/backends.hpp"

using namespace voxcalc;
using namespace voxcalc::backends;

namespace {

// Independent oracle: the free-field formula
//   Y(alpha(-n_1)...alpha(-n_k)1, x) = :d^(n_1-1)alpha(x) ... d^(n_k-1)alpha(x):
// so u_n = sum over (m_1..m_k) with sum m_i = n + 1 - wt u of
//   prod C(-m_i-1, n_i-1) :alpha(m_1)...alpha(m_k):
// with creators left, alpha(0) = lambda, annihilators applied first.
StateVector free_field_component(const Partition& u, long n, const Partition& v, const Rational& lambda) {
  StateVector out;
  if (u.empty()) {
    if (n == -1) out.emplace(v, 1);
    return out;
  }
  const long total = n + 1 - size_of(u);
  const long bound = size_of(v) + std::abs(total) + size_of(u) + 2;
  std::vector<long> modes(u.size());
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long remaining) {
    if (i + 1 == u.size()) {
      modes[i] = remaining;
    } else {
      for (long m = -bound; m <= bound; ++m) {
        modes[i] = m;
        rec(i + 1, remaining - m);
      }
      return;
    }
    Rational coef = 1;
    for (std::size_t j = 0; j < u.size(); ++j) coef *= binomial(-modes[j] - 1, u[j] - 1);
    if (coef == 0) return;
    StateVector state;
    state.emplace(v, coef);
    auto apply = [&](long m) {
      StateVector next;
      for (const auto& [p, c] : state) add_into(next, heisenberg_mode(m, p, lambda), c);
      state = std::move(next);
    };
    for (long m : modes)
      if (m > 0) apply(m);
    for (long m : modes)
      if (m == 0) apply(0);
    for (long m : modes)
      if (m < 0) apply(m);
    add_into(out, state, 1);
  };
  rec(0, total);
  return out;
}

long partition_count(long n) {
  // count by brute-force enumeration of multiplicity vectors
  std::function<long(long, long)> count = [&](long rest, long largest) -> long {
    if (rest == 0) return 1;
    long c = 0;
    for (long part = 1; part <= std::min(rest, largest); ++part) c += count(rest - part, part);
    return c;
  };
  return count(n, n);
}

StateVector single(const Partition& p, const Rational& c = 1) {
  StateVector s;
  s.emplace(p, c);
  return s;
}

}  // namespace

TEST_CASE("partition basis dimensions match brute-force counts") {
  PartitionBasis b(1);
  for (long n = 0; n <= 8; ++n) CHECK(b.dim(n) == static_cast<std::size_t>(partition_count(n)));
  CHECK(b.at(3, 0) == Partition{3});
  CHECK(b.at(3, 2) == Partition{1, 1, 1});
  CHECK(b.index_of(Partition{2, 1}) == 1);
  PartitionBasis v(2);
  CHECK(v.dim(1) == 0);
  CHECK(v.dim(4) == 2);
  CHECK(v.dim(6) == 4);
}

TEST_CASE("heisenberg components agree with the free-field formula") {
  HeisenbergAlgebra h(12);
  ModeEngine engine(1, [](long k, const Partition& s) { return heisenberg_mode(k, s, Rational(0)); });
  for (long wu = 0; wu <= 3; ++wu)
    for (const auto& u : partitions(wu, 1))
      for (long wv = 0; wv <= 3; ++wv)
        for (const auto& v : partitions(wv, 1))
          for (long n = -4; n <= wu + wv; ++n) {
            CAPTURE(n);
            CHECK(engine.component(u, n, v) == free_field_component(u, n, v, Rational(0)));
          }
}

TEST_CASE("fock components agree with the free-field formula") {
  for (Rational lambda : {Rational(1), ratio(-1, 2), Rational(3)}) {
    ModeEngine engine(1, [lambda](long k, const Partition& s) { return heisenberg_mode(k, s, lambda); });
    for (long wu = 0; wu <= 3; ++wu)
      for (const auto& u : partitions(wu, 1))
        for (long dw = 0; dw <= 2; ++dw)
          for (const auto& w : partitions(dw, 1))
            for (long n = -3; n <= wu + dw; ++n)
              CHECK(engine.component(u, n, w) == free_field_component(u, n, w, lambda));
  }
}

TEST_CASE("heisenberg through the vertex algebra interface") {
  auto h = std::make_shared<HeisenbergAlgebra>(6);
  auto a = h->alpha();
  // alpha_1 alpha = 1, alpha_0 alpha = 0, alpha_{-1} alpha = alpha(-1)^2 1
  CHECK(h->component(a, 1, a) == h->vacuum());
  CHECK(h->component(a, 0, a).is_zero());
  CHECK(h->component(a, -1, a) == h->state({1, 1}));
  CHECK(h->component(a, -2, a) == h->state({2, 1}));
  CHECK(h->label({3, 1}) == "alpha(-2)alpha(-1)1");
  CHECK(h->label({0, 0}) == "1");
  CHECK_THROWS_AS(h->dim(7), CutoffExceeded);
  CHECK_THROWS_AS(h->component(h->state({3, 3}), -1, h->state({1})), CutoffExceeded);

  FockModule m(h, ratio(-1, 2), 4);
  CHECK(m.action(a, 0, m.lowest()) == ratio(-1, 2) * m.lowest());
  CHECK(m.action(a, -1, m.lowest()) == m.state({1}));
  CHECK(m.label({2, 1}) == "alpha(-1)alpha(-1)w");
  CHECK(m.name() == "fock(-1/2)");
  CHECK_THROWS_AS(m.action(a, -5, m.lowest()), CutoffExceeded);
}

TEST_CASE("vacuum and creation properties") {
  auto h = std::make_shared<HeisenbergAlgebra>(6);
  for (auto key : h->basis_up_to(3)) {
    auto u = GradedVector::basis(key.grade, key.index);
    CHECK(h->component(u, -1, h->vacuum()) == u);
    CHECK(h->component(h->vacuum(), -1, u) == u);
    CHECK(h->component(u, 0, h->vacuum()).is_zero());
    CHECK(h->component(h->vacuum(), 0, u).is_zero());
  }
}

#ifdef VOXCALC_WITH_VIRASORO
TEST_CASE("virasoro conformal vector") {
  Rational c(1, 2);
  VirasoroAlgebra vir(c, 8);
  auto w = vir.omega();
  // omega_1 = L(0), omega_0 = L(-1), omega_3 omega = c/2 1
  CHECK(vir.component(w, 1, w) == Rational(2) * w);
  CHECK(vir.component(w, 0, w) == GradedVector::basis(3, 0));
  CHECK(vir.component(w, 3, w) == c / 2 * vir.vacuum());
  CHECK(vir.component(w, 2, w).is_zero());
  CHECK(vir.label({4, 1}) == "L(-2)L(-2)1");
  CHECK(vir.name() == "virasoro:c=1/2");
}

TEST_CASE("virasoro L(0) acts by weight") {
  VirasoroAlgebra vir(Rational(3), 8);
  auto w = vir.omega();
  for (auto key : vir.basis_up_to(6)) {
    auto u = GradedVector::basis(key.grade, key.index);
    CHECK(vir.component(w, 1, u) == Rational(key.grade) * u);
  }
}

TEST_CASE("virasoro commutator formula on states") {
  // [L(m), L(n)] = (m-n) L(m+n) + c/12 (m^3-m) delta_{m+n,0}, through omega_{m+1}
  Rational c(7, 3);
  VirasoroAlgebra vir(c, 10);
  auto w = vir.omega();
  for (auto key : vir.basis_up_to(4)) {
    auto v = GradedVector::basis(key.grade, key.index);
    for (long m = -2; m <= 3; ++m)
      for (long n = -2; n <= 3; ++n) {
        auto lhs = vir.component(w, m + 1, vir.component(w, n + 1, v)) -
                   vir.component(w, n + 1, vir.component(w, m + 1, v));
        auto rhs = Rational(m - n) * vir.component(w, m + n + 1, v);
        if (m + n == 0) rhs = rhs + c / 12 * Rational(m * m * m - m) * v;
        CHECK(lhs == rhs);
      }
  }
}
#endif

TEST_CASE("backend selection") {
  CHECK(make_algebra("heisenberg", 3)->name() == "heisenberg");
  CHECK_THROWS_AS(make_algebra("lattice", 3), std::invalid_argument);
#ifdef VOXCALC_WITH_VIRASORO
  CHECK(make_algebra("virasoro:c=1/2", 3)->name() == "virasoro:c=1/2");
#endif
}
