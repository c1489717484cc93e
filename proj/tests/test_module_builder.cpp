#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "voxcalc/backends.hpp"
#include "voxcalc/identities.hpp"
#include "voxcalc/module_builder.hpp"
#include "voxcalc/module_spec.hpp"

using namespace voxcalc;
using namespace voxcalc::backends;

namespace {

std::shared_ptr<HeisenbergAlgebra> algebra() {
  static auto V = std::make_shared<HeisenbergAlgebra>(16);
  return V;
}

// number of partitions of n, by the standard recursion on the largest part
std::size_t partition_count(long n, long largest) {
  if (n == 0) return 1;
  std::size_t total = 0;
  for (long k = std::min(n, largest); k >= 1; --k) total += partition_count(n - k, k);
  return total;
}

std::vector<std::size_t> partition_dims(long D, std::size_t mult) {
  std::vector<std::size_t> out;
  for (long n = 0; n <= D; ++n) out.push_back(mult * partition_count(n, n));
  return out;
}

std::shared_ptr<const TruncatedModule> build(const std::string& spec, long D, long slack_start = 3) {
  BuildOptions o;
  o.slack = slack_start;
  return build_S(algebra(), module_from_spec(algebra(), spec), D, o);
}

// c_s w_lambda in the Fock module, for the class of a free word of one letter
GradedVector fock_image(const FockModule& F, const FreeWord& w) {
  GradedVector x = F.lowest();
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    x = F.action(GradedVector::basis(it->first.grade, it->first.index), it->second, x);
  return x;
}

}  // namespace

TEST_CASE("free word degree") {
  FreeWord w;
  CHECK(w.degree() == 0);
  w.letters = {{{1, 0}, -1}, {{2, 1}, 0}};
  CHECK(w.degree() == 1 + 1);
  const auto& V = *algebra();
  CHECK(w.render(V) == "[" + V.label({1, 0}) + "](-1)[" + V.label({2, 1}) + "](0)w0");
}

TEST_CASE("module specs") {
  auto V = algebra();
  auto M = module_from_spec(V, "scalar:λ=-1/2");
  CHECK(M.dim() == 1);
  CHECK(M.rho(V->alpha()) == DenseMatrix{{ratio(-1, 2)}});
  auto J = module_from_spec(V, "jordan2:lambda=3");
  CHECK(J.rho(V->alpha()) == DenseMatrix{{Rational(3), Rational(1)}, {Rational(0), Rational(3)}});
  CHECK(module_from_spec(V, "zero").dim() == 0);
  CHECK(module_from_spec(V, "diag:λ=1,2").dim() == 2);
  CHECK_THROWS_AS(module_from_spec(V, "scalar:2"), std::invalid_argument);
  CHECK_THROWS_AS(module_from_spec(V, "bogus"), std::invalid_argument);
  auto E = extend_module(M, 5);
  CHECK(E.zhu().cutoff() == 5);
  CHECK(E.rho(V->state({1, 1, 1, 1})) == DenseMatrix{{ratio(1, 16)}});
  CHECK(module_to_json(M).find("\"[alpha(-1)1]\"") != std::string::npos);
}

TEST_CASE("S1 keeps M in degree 0 and alpha(-1)w in degree 1") {
  auto V = algebra();
  for (const char* spec : {"scalar:λ=0", "scalar:λ=1", "jordan2:λ=0"}) {
    auto M = module_from_spec(V, spec);
    auto S1 = build_S1(V, M, 2, 2, {});
    CHECK(S1->dim(0) == M.dim());
    // alpha(0) w = rho(alpha) w
    for (std::uint32_t i = 0; i < M.dim(); ++i) {
      GradedVector got = S1->action_basis({1, 0}, 0, {0, i});
      const DenseMatrix R = M.rho(V->alpha());
      for (std::uint32_t k = 0; k < M.dim(); ++k) CHECK(got.coefficient({0, k}) == R[k][i]);
    }
    FreeWord a1;
    a1.letters = {{{1, 0}, -1}};
    CHECK_FALSE(S1->reduce(a1).is_zero());
  }
}

TEST_CASE("S of the scalar module has partition dimensions") {
  for (const char* spec : {"scalar:λ=0", "scalar:λ=1", "scalar:λ=-1/2"}) {
    auto S = build(spec, 3);
    CHECK(S->dims() == partition_dims(3, 1));
    const auto& t = S->trace();
    REQUIRE(t.size() >= 3);
    CHECK(t[t.size() - 1].dims == t[t.size() - 2].dims);
    CHECK(t[t.size() - 2].dims == t[t.size() - 3].dims);
    CHECK(t.back().ambient_weight_cutoff == S->ambient_weight_cutoff());
  }
}

TEST_CASE("zero module gives zero") {
  auto S = build("zero", 3);
  CHECK(S->dims() == std::vector<std::size_t>(4, 0));
}

TEST_CASE("J meets M trivially, and an injected relation is caught") {
  auto V = algebra();
  auto M = module_from_spec(V, "scalar:λ=1");
  auto S1 = build_S1(V, M, 2, 2, {.slack = 4});
  auto r = verify_J_cap_M(*S1);
  CHECK(r.trivial);
  CHECK(r.witness.empty());
  auto bad = verify_J_cap_M(*S1, {{0, {{0, Rational(5)}}}});
  CHECK_FALSE(bad.trivial);
  CHECK(bad.witness == linalg::SparseVector{{0, Rational(1)}});

  auto D2 = module_from_spec(V, "diag:λ=1,2");
  auto S1d = build_S1(V, D2, 2, 2, {.slack = 4});
  CHECK(verify_J_cap_M(*S1d).trivial);
}

TEST_CASE("relation generators vanish in S") {
  auto V = algebra();
  auto M = module_from_spec(V, "scalar:λ=1");
  BuildOptions o;
  o.slack = 4;
  o.stabilize = false;
  auto S = build_S(V, M, 2, o);
  auto S1 = build_S1(V, M, 2, 2, o);
  auto J = j_generators(*S1);
  REQUIRE_FALSE(J.vectors.empty());
  for (const auto& g : J.vectors) {
    CHECK(S->reduce(g.degree, g.vector).is_zero());
    CHECK(S1->reduce(g.degree, g.vector).is_zero());
  }
  // u = v = alpha, w in M, K = 0, m = -2:
  // (alpha_{-2} alpha)(2) w + (alpha_{-1} alpha)(1) w, already zero in degree 0
  const BasisKey a2a1 = V->state({2, 1}).entries().begin()->first;
  const BasisKey a1a1 = V->state({1, 1}).entries().begin()->first;
  CHECK(V->component(V->alpha(), -2, V->alpha()) == GradedVector::basis(a2a1.grade, a2a1.index));
  FreeWord x{{{a2a1, 2}}, 0}, y{{{a1a1, 1}}, 0};
  CHECK(x.degree() == 0);
  CHECK(y.degree() == 0);
  CHECK((S1->reduce(x) + S1->reduce(y)).is_zero());
  CHECK_FALSE(S1->reduce(y).is_zero());
}

TEST_CASE("rewriting agrees with the Fock module on two-letter words") {
  auto V = algebra();
  for (Rational lam : {Rational(0), Rational(2), ratio(-1, 2)}) {
    FockModule F(V, lam, 3);
    auto S = build("scalar:λ=" + to_short_string(lam), 3, 5);
    std::size_t checked = 0;
    for (const auto& u : V->basis_up_to(2))
      for (const auto& v : V->basis_up_to(2))
        for (long q = v.grade - 1; v.grade - q - 1 <= 3; --q)
          for (long p = u.grade + (v.grade - q - 1) - 1; u.grade + (v.grade - q - 1) - p - 1 <= 3; --p) {
            FreeWord w{{{u, p}, {v, q}}, 0};
            GradedVector cls = S->reduce(w);
            GradedVector x;
            for (const auto& [k, c] : cls.entries()) x.add_scaled(fock_image(F, S->basis_word(k)), c);
            CHECK(x == fock_image(F, w));
            ++checked;
          }
    CHECK(checked > 100);
  }
}

TEST_CASE("induced map onto the Fock module is an isomorphism") {
  auto V = algebra();
  for (Rational lam : {Rational(0), Rational(1), ratio(-1, 2)}) {
    auto S = build("scalar:λ=" + to_short_string(lam), 3);
    FockModule F(V, lam, 3);
    auto r = induced_map(*S, F, {F.lowest()}, 2);
    CHECK(r.f_is_module_map);
    CHECK(r.well_defined);
    CHECK(r.intertwines);
    CHECK(r.injective(*S));
    CHECK(r.surjective(F));
    CHECK(r.checked > 0);

    auto zero = induced_map(*S, F, {GradedVector()}, 1);
    CHECK(zero.well_defined);
    for (auto rank : zero.ranks) CHECK(rank == 0);

    // a map that is not an A(V)-map is flagged
    FockModule G(V, lam + 1, 3);
    CHECK_FALSE(induced_map(*S, G, {G.lowest()}, 1).f_is_module_map);
  }
}

TEST_CASE("T after S recovers M") {
  for (const char* spec : {"scalar:λ=1", "diag:λ=1,2", "jordan2:λ=0"}) {
    auto S = build(spec, 3);
    auto r = check_T_after_S(*S, 3);
    CHECK_MESSAGE(r.holds, spec << ": " << r.failure);
    CHECK(r.top_dim == r.module_dim);
  }
}

TEST_CASE("Jordan block module: dimensions, indecomposable action, functoriality") {
  auto V = algebra();
  const long D = 3;
  BuildOptions o;
  o.slack = 5;
  o.stabilize = false;
  auto SJ = build_S(V, module_from_spec(V, "jordan2:λ=0"), D, o);
  auto SL = build_S(V, module_from_spec(V, "scalar:λ=0"), D, o);
  CHECK(SJ->dims() == partition_dims(D, 2));
  CHECK(SL->dims() == partition_dims(D, 1));
  // o(alpha) on degree 0 keeps the off-diagonal entry
  CHECK(SJ->action_basis({1, 0}, 0, {0, 1}) == GradedVector::basis(0, 0));
  // ... and alpha(0) still mixes the two copies in degree 1
  GradedVector up = SJ->action_basis({1, 0}, -1, {0, 1});
  GradedVector mixed = SJ->action(V->alpha(), 0, up);
  CHECK_FALSE(mixed.is_zero());

  DenseMatrix inclusion{{Rational(1)}, {Rational(0)}};
  DenseMatrix projection{{Rational(0), Rational(1)}};
  auto inc = functor_map(*SL, *SJ, inclusion, 2);
  auto proj = functor_map(*SJ, *SL, projection, 2);
  for (const auto* r : {&inc, &proj}) {
    CHECK(r->f_is_module_map);
    CHECK(r->well_defined);
    CHECK_MESSAGE(r->commutes, r->failure);
    CHECK(r->checked > 0);
  }
  // the swap is not an A(V)-map
  DenseMatrix swap{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
  CHECK_FALSE(functor_map(*SJ, *SJ, swap, 1).f_is_module_map);
}

TEST_CASE("weak associativity holds on S(M)") {
  auto V = algebra();
  BuildOptions o;
  o.slack = 5;
  o.stabilize = false;
  auto S = build_S(V, module_from_spec(V, "scalar:λ=-1/2"), 3, o);
  std::size_t checked = 0;
  for (const auto& u : V->basis_up_to(2))
    for (const auto& v : V->basis_up_to(2))
      for (long e = 0; e <= 3; ++e)
        for (std::uint32_t i = 0; i < S->dim(e); ++i) {
          GradedVector gu = GradedVector::basis(u.grade, u.index), gv = GradedVector::basis(v.grade, v.index),
                       gw = GradedVector::basis(e, i);
          WeakAssociativityWindow win{-(u.grade + v.grade) - 1, S->weight_cutoff() - u.grade - v.grade,
                                      -(v.grade + e) - 1, 3 - v.grade - e};
          auto [lhs, rhs] = weak_associativity_sides(*S, gu, gv, gw, u.grade + e, win);
          CHECK(lhs == rhs);
          ++checked;
        }
  CHECK(checked == 4 * 4 * 7);
}

TEST_CASE("cutoff failures are loud") {
  auto V = algebra();
  auto M = module_from_spec(V, "scalar:λ=1");
  BuildOptions o;
  o.slack = 2;
  o.slack_ceiling = 3;
  CHECK_THROWS_AS(build_S(V, M, 5, o), NonStabilization);
  try {
    build_S(V, M, 5, o);
  } catch (const NonStabilization& e) {
    CHECK(e.trace().size() == 2);
  }
  auto small = std::make_shared<HeisenbergAlgebra>(4);
  CHECK_THROWS_AS(build_S(small, module_from_spec(small, "scalar:λ=1"), 3, {}), CutoffExceeded);
  auto S = build("scalar:λ=1", 2);
  CHECK_THROWS_AS(S->action_basis({1, 0}, -3, {0, 0}), CutoffExceeded);
  CHECK_THROWS_AS(build_S1(V, M, -1, 2), std::invalid_argument);
}

TEST_CASE("action digest is deterministic") {
  auto a = build("scalar:λ=1", 2);
  auto b = build("scalar:λ=1", 2);
  CHECK(a->action_digest(2) == b->action_digest(2));
  CHECK(a->action_digest(2) != build("scalar:λ=2", 2)->action_digest(2));
}
