#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "voxcalc/backends.hpp"
#include "voxcalc/identity_dsl.hpp"
#include "voxcalc/mutation.hpp"

using namespace voxcalc;
using namespace voxcalc::backends;
using namespace voxcalc::dsl;

namespace {

const std::string corpus = VOXCALC_IDENTITY_DIR;

IdentityAst load(const std::string& name) { return parse_file(corpus + "/" + name + ".vid"); }

struct Fixture {
  std::shared_ptr<HeisenbergAlgebra> V = std::make_shared<HeisenbergAlgebra>(16);
  std::shared_ptr<FockModule> fock = std::make_shared<FockModule>(V, Rational(1), 5);
  std::shared_ptr<PerturbedModule> perturbed;

  Fixture() { perturbed = std::make_shared<PerturbedModule>(fock, seeded_corruptions(*fock, 0, 1, 3, 2).back()); }
};

GradedVector element(const Assignment& a, const std::string& name) {
  const BasisKey& k = a.elements.at(name).second;
  return GradedVector::basis(k.grade, k.index);
}

GradedVector constant_part(const ModulePoly& p) {
  CHECK(p.size() <= 1);
  return p.coefficient(Monomial()).value_or(GradedVector());
}

ParseError::Kind error_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no parse error for: " << text);
  return ParseError::Kind::Syntax;
}

}  // namespace

TEST_CASE("every corpus file parses and round-trips through render") {
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(corpus)) {
    if (e.path().extension() != ".vid") continue;
    const auto ast = parse_file(e.path().string());
    CHECK(ast.name == e.path().stem().string());
    CHECK(parse(render(ast)) == ast);
    ++files;
  }
  CHECK(files == 12);
}

TEST_CASE("bare identities bind their names by convention") {
  const auto ast = parse(
      "Res[x2] x2^q * (x0+x2 @x2)^l * Y[W](u, x0+x2 @x2) * Y[W](v, x2) * w == 0 where q >= k");
  CHECK(ast.statements.empty());
  CHECK(ast.guards.size() == 1);
  REQUIRE(ast.lhs.terms.size() == 1);
  const Term& t = ast.lhs.terms[0];
  REQUIRE(t.prefixes.size() == 1);
  CHECK(t.prefixes[0].name == "x2");
  REQUIRE(t.factors.size() == 5);
  CHECK(t.factors[1].kind == Factor::Kind::Binomial);
  CHECK(t.factors[1].var.direction == "x2");
  CHECK(t.factors[2].kind == Factor::Kind::Vertex);
  CHECK(t.factors[2].var.is_sum());
  CHECK(t.factors[4].kind == Factor::Kind::Slot);
  CHECK(parse(render(ast)) == ast);
}

TEST_CASE("diagnostics") {
  try {
    parse("Res[x2 x2^q");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("unclosed '[' opened at 1:4") != std::string::npos);
    CHECK(e.expected().count("']'"));
  }
  CHECK(error_kind("forall u : V\nforall w : W\nMode[W](u, n) * w == 0") == ParseError::Kind::UnboundVariable);
  CHECK(error_kind("forall u : V\nforall w : W\nRes[x0] (x0+x2)^2 * Y[W](u, x0) * w == 0") ==
        ParseError::Kind::MissingDirection);
  CHECK(error_kind("forall w : W\nx0^(1/2) * w == w") == ParseError::Kind::NonIntegerExponent);
  CHECK(error_kind("forall w : W\nx0^x2 * w == w") == ParseError::Kind::NonIntegerExponent);
  CHECK(error_kind("forall u : V\nforall w : W\nx0^wt(u) * w == x0^u * w") == ParseError::Kind::NonIntegerExponent);
  CHECK(error_kind("forall w : W\nY[W](w, x) * w == w") == ParseError::Kind::SpaceMismatch);
  CHECK(error_kind("forall u : V\nforall w : W\nw * Y[W](u, x) == w") == ParseError::Kind::SpaceMismatch);
  CHECK(error_kind("forall u : V\nforall u : W\nu == u") == ParseError::Kind::DuplicateBinding);
  CHECK(error_kind("forall w : W\nRes[x] Res[x] x^-1 * w == w") == ParseError::Kind::DuplicateBinding);
  CHECK(error_kind("forall w : W\nw == w\nforall u : V") == ParseError::Kind::Syntax);
  CHECK(kind_name(ParseError::Kind::MissingDirection) != kind_name(ParseError::Kind::UnboundVariable));
}

TEST_CASE("vacuum identity holds on every module") {
  Fixture f;
  const auto ast = parse("forall w : W\nY[W](1, x) * w == w");
  for (const CandidateModule* W : {static_cast<const CandidateModule*>(f.fock.get()),
                                   static_cast<const CandidateModule*>(f.perturbed.get())}) {
    const auto r = check(ast, *f.V, *W, SamplingPlan{});
    CHECK(r.samples == 4);
    CHECK(r.passed());
  }
  // Y(alpha, x) w is a genuine series: the grading window keeps it finite
  Assignment a;
  a.elements["w"] = {Space::W, {0, 0}};
  const auto series = evaluate(parse("forall w : W\nY[W](2 * 1 - 1, x) * w == 0").lhs, *f.V, *f.fock, a);
  CHECK(series == ModulePoly::constant(f.fock->lowest()));
}

TEST_CASE("unbounded two-variable expansions are reported") {
  Fixture f;
  Assignment a;
  a.elements["u"] = {Space::V, {1, 0}};
  a.elements["w"] = {Space::W, {0, 0}};
  const auto ast = parse("forall u : V\nforall w : W\nY[W](u, x0+x2 @x2) * w == 0");
  CHECK_THROWS_AS(evaluate(ast.lhs, *f.V, *f.fock, a), WindowError);
}

TEST_CASE("component forms agree with the native associator") {
  Fixture f;
  for (const CandidateModule* W : {static_cast<const CandidateModule*>(f.fock.get()),
                                   static_cast<const CandidateModule*>(f.perturbed.get())}) {
    const auto ast = load("eq2_1");
    std::size_t nonzero = 0;
    for (const auto& a : assignments(ast, *f.V, *W, SamplingPlan{})) {
      const auto u = element(a, "u"), v = element(a, "v"), w = element(a, "w");
      const long p = a.ints.at("p"), q = a.ints.at("q"), l = a.ints.at("l"), k = a.ints.at("k");
      const auto lhs = constant_part(evaluate(ast.lhs, *f.V, *W, a));
      CHECK(lhs == product_side(*W, u, v, w, p, q));
      if (k - q >= 1) CHECK(constant_part(evaluate(ast.rhs, *f.V, *W, a)) == iterate_side(*W, u, v, w, p, q, l, k));
      nonzero += lhs.is_zero() ? 0 : 1;
    }
    CHECK(nonzero > 0);
  }
}

TEST_CASE("residue forms agree with the native series") {
  Fixture f;
  const CandidateModule& W = *f.perturbed;
  std::size_t differing = 0;

  const auto product = load("eq2_4"), iterate = load("eq2_5");
  for (const auto& a : assignments(iterate, *f.V, W, SamplingPlan{})) {
    const auto u = element(a, "u"), v = element(a, "v"), w = element(a, "w");
    const long q = a.ints.at("q"), l = a.ints.at("l");
    CHECK(evaluate(product.lhs, *f.V, W, a) == vanishing_series(W, u, v, w, q, l, VanishingForm::Product));
    const auto series = evaluate(iterate.lhs, *f.V, W, a);
    CHECK(series == vanishing_series(W, u, v, w, q, l, VanishingForm::Iterate));
    differing += series.is_zero_poly() ? 0 : 1;
  }

  const auto shifted = load("eq2_6");
  const auto all = assignments(shifted, *f.V, W, SamplingPlan{});
  for (std::size_t i = 0; i < all.size(); i += 5) {
    const auto& a = all[i];
    const auto u = element(a, "u"), v = element(a, "v"), w = element(a, "w");
    const auto value = constant_part(evaluate(shifted.lhs, *f.V, W, a));
    CHECK(value ==
          shifted_iterate_residue(W, u, v, w, a.ints.at("p"), a.ints.at("q"), a.ints.at("i"), a.ints.at("l")));
    differing += value.is_zero() ? 0 : 1;
  }

  const auto weighted = load("eq2_9");
  const auto wall = assignments(weighted, *f.V, W, SamplingPlan{});
  for (std::size_t i = 0; i < wall.size(); i += 5) {
    const auto& a = wall[i];
    const auto u = element(a, "u"), v = element(a, "v"), w = element(a, "w");
    CHECK(constant_part(evaluate(weighted.lhs, *f.V, W, a)) ==
          weighted_iterate_component(W, u, v, w, a.ints.at("K"), a.ints.at("m")));
  }
  CHECK(differing > 0);
}

TEST_CASE("residue and component forms are equivalent") {
  Fixture f;
  const auto component = load("eq2_1"), residue = load("eq2_2"), shifted = load("eq2_3");
  const auto all = assignments(component, *f.V, *f.perturbed, SamplingPlan{});
  for (std::size_t i = 0; i < all.size(); i += 7) {
    const auto& a = all[i];
    const auto lhs = constant_part(evaluate(component.lhs, *f.V, *f.perturbed, a));
    CHECK(constant_part(evaluate(residue.lhs, *f.V, *f.perturbed, a)) == lhs);
    CHECK(constant_part(evaluate(residue.rhs, *f.V, *f.perturbed, a)) ==
          constant_part(evaluate(component.rhs, *f.V, *f.perturbed, a)));
    CHECK(constant_part(evaluate(shifted.rhs, *f.V, *f.perturbed, a)) ==
          constant_part(evaluate(component.rhs, *f.V, *f.perturbed, a)));
  }
}

TEST_CASE("a perturbed action keeps the product-form vanishing but not the iterate form") {
  Fixture f;
  const auto product = check(load("eq2_4"), *f.V, *f.perturbed, SamplingPlan{});
  const auto iterate = check(load("eq2_5"), *f.V, *f.perturbed, SamplingPlan{});
  CHECK(product.passed());
  CHECK(product.samples == iterate.samples);
  CHECK_FALSE(iterate.passed());
  REQUIRE(iterate.first_failure);
  CHECK(iterate.first_failure->index == iterate.verdicts.find('F'));
  CHECK(iterate.first_failure->assignment.find("u=") == 0);
  CHECK(iterate.first_failure->detail != "0");
  CHECK(check(load("eq2_5"), *f.V, *f.fock, SamplingPlan{}).passed());
}

TEST_CASE("reports are deterministic") {
  Fixture f;
  const auto ast = load("eq2_5");
  SamplingPlan one, many;
  one.threads = 1;
  many.threads = 4;
  CHECK(check(ast, *f.V, *f.perturbed, one).render() == check(ast, *f.V, *f.perturbed, many).render());

  SamplingPlan sub;
  sub.sample = 40;
  sub.seed = 7;
  const auto a = check(load("eq2_1"), *f.V, *f.fock, sub), b = check(load("eq2_1"), *f.V, *f.fock, sub);
  CHECK(a.samples == 40);
  CHECK_FALSE(a.complete);
  CHECK(a.render() == b.render());
  CHECK(a.render().find("subsample") != std::string::npos);
  CHECK(a.render().find("eq2_1: pass") == 0);
}

TEST_CASE("builtin cutoffs and guards") {
  Fixture f;
  const auto ast = parse("forall w : W\nforall n in 0 .. D\nwhere n > N - 14\nx^n * w == x^n * w");
  const auto all = assignments(ast, *f.V, *f.fock, SamplingPlan{});
  CHECK(all.size() == 4 * 3);
  CHECK(all.front().ints.at("n") == 3);
  CHECK(all.front().render(*f.V, *f.fock) == "w=w n=3");
}
