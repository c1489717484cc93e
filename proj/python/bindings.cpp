#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "voxcalc/backends.hpp"
#include "voxcalc/identity_dsl.hpp"
#include "voxcalc/module_builder.hpp"
#include "voxcalc/module_spec.hpp"
#include "voxcalc/mutation.hpp"
#include "voxcalc/zhu.hpp"

namespace py = pybind11;
using namespace voxcalc;
using namespace voxcalc::backends;

namespace {

py::dict check_identity(const std::string& path, const std::string& lambda, long weight, long degree,
                        std::size_t sample, std::uint64_t seed, unsigned threads, long mutate) {
  dsl::CheckReport r;
  {
    py::gil_scoped_release unlocked;
    const auto ast = dsl::parse_file(path);
    const long D = weight + degree;
    auto V = std::make_shared<backends::HeisenbergAlgebra>(2 * weight + degree + D + 3);
    auto F = std::make_shared<backends::FockModule>(V, parse_rational(lambda), D);
    dsl::SamplingPlan plan{weight, degree, sample, seed, threads};
    if (mutate > 0) {
      PerturbedModule P(F, seeded_corruptions(*F, seed, mutate, weight, degree).back());
      r = dsl::check(ast, *V, P, plan);
    } else {
      r = dsl::check(ast, *V, *F, plan);
    }
  }
  py::dict out;
  out["identity"] = r.identity;
  out["module"] = r.module;
  out["passed"] = r.passed();
  out["complete"] = r.complete;
  out["samples"] = r.samples;
  out["failures"] = r.failures;
  out["errors"] = r.errors;
  out["witness"] = r.first_failure ? py::object(py::str(r.first_failure->assignment)) : py::object(py::none());
  out["report"] = r.render();
  return out;
}

std::vector<std::string> zhu_basis(long N) {
  py::gil_scoped_release unlocked;
  auto V = std::make_shared<backends::HeisenbergAlgebra>(N + 8);
  auto z = zhu_quotient(V, N);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < z->dim(); ++i) out.push_back(V->render(z->representative(i)));
  return out;
}

py::dict build_module(const std::string& spec, long degree) {
  std::vector<std::size_t> dims;
  bool j_cap_m = false, t_after_s = false;
  {
    py::gil_scoped_release unlocked;
    auto V = std::make_shared<backends::HeisenbergAlgebra>(degree + 12);
    const AVModule M = module_from_spec(V, spec);
    auto S = build_S(V, M, degree);
    dims = S->dims();
    j_cap_m = verify_J_cap_M(*build_S1(V, M, degree, std::max<long>(degree, 1))).trivial;
    t_after_s = check_T_after_S(*S, degree).holds;
  }
  py::dict out;
  out["dims"] = dims;
  out["J_cap_M_trivial"] = j_cap_m;
  out["T_after_S"] = t_after_s;
  return out;
}

}  // namespace

PYBIND11_MODULE(voxcalc, m) {
  m.doc() = "exact residue identities, Zhu algebras and the functor S over the Heisenberg algebra";
  py::register_exception<dsl::ParseError>(m, "ParseError", PyExc_ValueError);
  m.def("parse", [](const std::string& text) { return dsl::render(dsl::parse(text)); }, py::arg("text"),
        "Parse identity source and return its canonical rendering.");
  m.def("check", &check_identity, py::arg("path"), py::arg("lam") = "1", py::arg("weight") = 3, py::arg("degree") = 2,
        py::arg("sample") = 0, py::arg("seed") = 0, py::arg("threads") = 0, py::arg("mutate") = 0,
        "Check a .vid identity on the Fock module with the given eigenvalue.");
  m.def("zhu_basis", &zhu_basis, py::arg("cutoff"), "Representatives of a basis of the truncated Zhu algebra.");
  m.def("build_module", &build_module, py::arg("spec"), py::arg("degree") = 3,
        "Build S(M) from a module spec and report its dims and structural checks.");
}
