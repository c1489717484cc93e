#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "voxcalc/backends.hpp"
#include "voxcalc/identities.hpp"
#include "voxcalc/mutation.hpp"

using namespace voxcalc;
using namespace voxcalc::backends;

namespace {

struct Fixture {
  std::shared_ptr<HeisenbergAlgebra> V = std::make_shared<HeisenbergAlgebra>(14);
  std::vector<GradedVector> us, ws;
  std::vector<std::shared_ptr<FockModule>> modules;

  Fixture() {
    for (auto k : V->basis_up_to(3)) us.push_back(GradedVector::basis(k.grade, k.index));
    for (auto k : V->basis_up_to(2)) ws.push_back(GradedVector::basis(k.grade, k.index));
    for (Rational lambda : {Rational(0), Rational(1), ratio(-1, 2)})
      modules.push_back(std::make_shared<FockModule>(V, lambda, 4));
  }
};

}  // namespace

TEST_CASE("worked values on the Fock lowest-weight vector") {
  Fixture f;
  auto a = f.V->alpha();
  for (const auto& M : f.modules) {
    auto w = M->lowest();
    const Rational lam = M->lambda();
    CHECK(product_side(*M, a, a, w, 0, 0) == lam * lam * w);
    CHECK(product_side(*M, a, a, w, 1, 0).is_zero());
    CHECK(product_side(*M, f.V->vacuum(), a, w, -1, 0) == M->action(a, 0, w));
    CHECK(product_side(*M, f.V->vacuum(), a, w, 0, 0).is_zero());
    CHECK(iterate_side(*M, a, a, w, 0, 0, 1, 1) == lam * lam * w);
    CHECK(iterate_side(*M, a, a, w, -1, -1, 1, 1) == M->state({1, 1}));
    CHECK(minimal_truncation(*M, a, w) == (lam == 0 ? 0 : 1));
    CHECK_THROWS_AS(iterate_side(*M, a, a, w, 0, 1, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("product equals iterate over complete index boxes") {
  Fixture f;
  for (const auto& M : f.modules)
    for (const auto& u : f.us)
      for (const auto& v : f.us)
        for (const auto& w : f.ws)
          for (auto [p, q] : nonvanishing_box(*M, u, v, w)) {
            auto r = check_prop21(*M, u, v, w, p, q);
            CHECK(r.holds);
          }
}

TEST_CASE("iterate sum does not depend on enlarged l and k") {
  Fixture f;
  const auto& M = f.modules[1];
  for (const auto& u : f.us)
    for (const auto& v : f.us)
      for (const auto& w : f.ws) {
        auto lk = minimal_truncations(*M, u, v, w);
        auto g = grading_truncations(u, v, w);
        CHECK(lk.l <= g.l);
        CHECK(lk.k <= g.k);
        for (auto [p, q] : nonvanishing_box(*M, u, v, w)) {
          if (q >= lk.k) continue;
          auto base = iterate_side(*M, u, v, w, p, q, lk.l, lk.k);
          CHECK(iterate_side(*M, u, v, w, p, q, g.l + 1, g.k + 1) == base);
          CHECK(iterate_side(*M, u, v, w, p, q, g.l, g.k) == base);
        }
      }
}

TEST_CASE("weak associativity sides agree") {
  Fixture f;
  for (const auto& M : f.modules)
    for (const auto& u : f.us)
      for (const auto& v : f.us)
        for (const auto& w : f.ws) {
          long l = minimal_truncation(*M, u, w);
          auto [lhs, rhs] = weak_associativity_sides(*M, u, v, w, l);
          CHECK(lhs == rhs);
        }
}

TEST_CASE("vacuum in the first slot gives Y(v, x2) w on both sides") {
  Fixture f;
  const auto& M = f.modules[2];
  auto one = f.V->vacuum();
  for (const auto& v : f.us)
    for (const auto& w : f.ws) {
      auto [lhs, rhs] = weak_associativity_sides(*M, one, v, w, 0);
      CHECK(lhs == rhs);
      for (const auto& [mono, c] : lhs.terms()) {
        CHECK(mono.exponent("x0") == 0);
        CHECK(c == M->action(v, -mono.exponent("x2") - 1, w));
      }
    }
}

TEST_CASE("residues vanish beyond the truncation index") {
  Fixture f;
  for (const auto& M : f.modules)
    for (const auto& u : f.us)
      for (const auto& v : f.us)
        for (const auto& w : f.ws) {
          auto lk = minimal_truncations(*M, u, v, w);
          for (long q = lk.k; q <= lk.k + 5; ++q) {
            CHECK(check_vanishing_residues(*M, u, v, w, q, lk.l, lk.k, VanishingForm::Product));
            CHECK(check_vanishing_residues(*M, u, v, w, q, lk.l, lk.k, VanishingForm::Iterate));
          }
        }
}

TEST_CASE("shifted iterate residues vanish for i >= k - q") {
  Fixture f;
  const long N = f.V->weight_cutoff();
  for (const auto& M : f.modules)
    for (const auto& u : f.us)
      for (const auto& v : f.us)
        for (const auto& w : f.ws) {
          auto g = grading_truncations(u, v, w);
          const long total = u.grade() + v.grade() + w.grade();
          for (long s = total - 2 - M->degree_cutoff(); s <= total - 2; ++s)
            for (long q = -3; q <= 3; ++q) {
              long p = s - q;
              // u_{p-i-j} v has weight total - deg w - p - 1 + i + j
              for (long i = std::max(0L, g.k - q); total - w.grade() - p - 1 + i + g.l <= N; ++i)
                CHECK(shifted_iterate_residue(*M, u, v, w, p, q, i, g.l).is_zero());
            }
        }
}

TEST_CASE("weighted iterate component vanishes below the bound") {
  Fixture f;
  const long N = f.V->weight_cutoff();
  for (const auto& M : f.modules)
    for (const auto& u : f.us)
      for (const auto& v : f.us)
        for (const auto& w : f.ws) {
          const long wu = u.grade(), wv = v.grade(), dw = w.grade();
          // result degree is deg w - K
          for (long K = dw - M->degree_cutoff(); K <= dw; ++K)
            for (long mm = K - 2 * dw - 2; wu + wv - mm - 1 <= N; --mm)
              CHECK(weighted_iterate_component(*M, u, v, w, K, mm).is_zero());
        }
}

TEST_CASE("weighted iterate component is nonzero at the first excluded index for some triple") {
  Fixture f;
  const auto& M = f.modules[1];
  bool seen = false;
  for (const auto& u : f.us)
    for (const auto& v : f.us)
      for (const auto& w : f.ws)
        for (long K = w.grade() - 3; K <= w.grade(); ++K)
          if (!weighted_iterate_component(*M, u, v, w, K, K - 2 * w.grade() - 1).is_zero()) seen = true;
  CHECK(seen);
}

TEST_CASE("a perturbed entry keeps the product-form vanishing but breaks the iterate form") {
  Fixture f;
  auto base = f.modules[1];
  // (alpha(-1)^2 1)_1 w_lambda = lambda^2 w_lambda, shifted by w_lambda
  Corruption c = shift_entry(*base, {2, 1}, 1, {0, 0}, 0, Rational(1));
  auto bad = std::make_shared<PerturbedModule>(base, c);
  bool product_ok = true, iterate_broken = false;
  for (const auto& u : f.us)
    for (const auto& v : f.us)
      for (const auto& w : f.ws) {
        auto g = grading_truncations(u, v, w);
        for (long q = g.k; q <= g.k + 3; ++q) {
          product_ok &= check_vanishing_residues(*bad, u, v, w, q, g.l, g.k, VanishingForm::Product);
          iterate_broken |= !check_vanishing_residues(*bad, u, v, w, q, g.l, g.k, VanishingForm::Iterate);
        }
      }
  CHECK(product_ok);
  CHECK(iterate_broken);
}

TEST_CASE("seeded corruptions are deterministic and change the table") {
  Fixture f;
  const auto& M = *f.modules[0];
  auto a = seeded_corruptions(M, 7, 10, 3, 2);
  auto b = seeded_corruptions(M, 7, 10, 3, 2);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].describe(M) == b[i].describe(M));
    CHECK(a[i].replacement != M.action_basis(a[i].u, a[i].n, a[i].w));
  }
}
