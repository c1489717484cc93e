#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "voxcalc/backends.hpp"
#include "voxcalc/identity_dsl.hpp"
#include "voxcalc/module_builder.hpp"
#include "voxcalc/module_spec.hpp"
#include "voxcalc/mutation.hpp"

using namespace voxcalc;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

enum Exit { Pass = 0, Failure = 1, Unstable = 2 };

struct Config {
  std::string backend = "heisenberg";
  long weight = 3;
  long degree = 2;
  long module_degree = 0;
  long cutoff = 3;
  long slack_ceiling = 8;
  std::uint64_t seed = 0;
  std::size_t sample = 0;
  int mutate = 0;
  std::vector<std::string> lambdas{"0", "1", "-1/2"};
  std::vector<std::string> paths;
  std::string module = "scalar:λ=0";
  std::string out;
  std::string format = "text";
};

void render_text(const json& j, const std::string& indent, std::ostream& os) {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      os << indent << key << ":\n";
      render_text(value, indent + "  ", os);
    } else if (value.is_array() && !value.empty() && value.front().is_object()) {
      os << indent << key << ":\n";
      for (const auto& item : value) {
        os << indent << "  -\n";
        render_text(item, indent + "    ", os);
      }
    } else if (value.is_string()) {
      os << indent << key << ": " << value.get<std::string>() << "\n";
    } else {
      os << indent << key << ": " << value.dump() << "\n";
    }
  }
}

void emit(const json& report, const Config& c) {
  std::ostringstream os;
  if (c.format == "json")
    os << report.dump(2) << "\n";
  else
    render_text(report, "", os);
  if (c.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    f << os.str();
  }
}

std::vector<fs::path> identity_files(const std::vector<std::string>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".vid") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      out.emplace_back(p);
    } else {
      throw std::runtime_error("no such file: " + p);
    }
  }
  return out;
}

json witness_json(const dsl::Witness& w) {
  return json{{"sample", w.index}, {"assignment", w.assignment}, {"detail", w.detail}};
}

std::shared_ptr<const backends::HeisenbergAlgebra> heisenberg(const Config& c, long weight_cutoff) {
  if (c.backend != "heisenberg") throw std::runtime_error("check runs on Fock modules and needs --backend heisenberg");
  return std::make_shared<backends::HeisenbergAlgebra>(weight_cutoff);
}

int cmd_check(const Config& c) {
  const long D = c.module_degree > 0 ? c.module_degree : c.weight + c.degree;
  const long N = 2 * c.weight + c.degree + D + 3;
  auto V = heisenberg(c, N);
  const auto files = identity_files(c.paths);
  std::vector<std::shared_ptr<const CandidateModule>> modules;
  json config{{"command", "check"},       {"backend", c.backend},     {"weight", c.weight},
              {"degree", c.degree},       {"module_degree", D},       {"algebra_weight", N},
              {"seed", c.seed},           {"sample", c.sample}};
  if (c.mutate > 0) {
    auto base = std::make_shared<backends::FockModule>(V, parse_rational(c.lambdas.front()), D);
    auto corruptions = seeded_corruptions(*base, c.seed, c.mutate, c.weight, c.degree);
    const Corruption& k = corruptions.back();
    config["mutation"] = json{{"index", c.mutate}, {"entry", k.describe(*base)}};
    modules.push_back(std::make_shared<PerturbedModule>(base, k));
  } else {
    for (const auto& l : c.lambdas) modules.push_back(std::make_shared<backends::FockModule>(V, parse_rational(l), D));
  }
  json report{{"config", config}};
  json checks = json::array();
  std::size_t failed = 0, unstable = 0;
  for (const auto& f : files) {
    const auto ast = dsl::parse_file(f.string());
    for (const auto& m : modules) {
      dsl::SamplingPlan plan;
      plan.max_weight = c.weight;
      plan.max_degree = c.degree;
      plan.sample = c.sample;
      plan.seed = c.seed;
      const auto r = dsl::check(ast, *V, *m, plan);
      json j{{"identity", r.identity},
             {"file", f.filename().string()},
             {"module", r.module},
             {"verdict", r.passed() ? "pass" : r.failures ? "fail" : "unstable"},
             {"samples", r.samples},
             {"failures", r.failures},
             {"errors", r.errors},
             {"coverage", r.complete ? "complete within cutoffs" : "subsample"},
             {"cutoffs", r.cutoffs},
             {"verdicts", r.verdicts}};
      if (r.first_failure) j["first_failure"] = witness_json(*r.first_failure);
      if (r.first_error) j["first_error"] = witness_json(*r.first_error);
      failed += r.failures ? 1 : 0;
      unstable += !r.failures && r.errors ? 1 : 0;
      checks.push_back(std::move(j));
    }
  }
  report["checks"] = checks;
  report["summary"] = json{{"checks", checks.size()}, {"failed", failed}, {"unstable", unstable}};
  emit(report, c);
  return failed ? Failure : unstable ? Unstable : Pass;
}

json trace_json(const std::vector<StabilizationStep>& trace) {
  json t = json::array();
  for (const auto& s : trace)
    t.push_back(json{{"slack", s.slack},
                     {"generators", s.generators},
                     {"relation_dim", s.relation_dim},
                     {"quotient_dim", s.quotient_dim}});
  return t;
}

std::string vector_text(const std::vector<Rational>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + to_short_string(v[i]);
  return out + ")";
}

int cmd_zhu(const Config& c) {
  auto V = backends::make_algebra(c.backend, c.cutoff + c.slack_ceiling + 2);
  json report{{"config", json{{"command", "zhu"},
                              {"backend", c.backend},
                              {"cutoff", c.cutoff},
                              {"slack_ceiling", c.slack_ceiling}}}};
  try {
    auto Z = zhu_quotient(V, c.cutoff, ZhuOptions{2, c.slack_ceiling});
    json basis = json::array();
    for (std::size_t i = 0; i < Z->dim(); ++i) basis.push_back(Z->label(i));
    json products = json::array();
    for (std::size_t i = 0; i < Z->dim(); ++i)
      for (std::size_t j = 0; j < Z->dim(); ++j)
        if (auto s = Z->structure_constants(i, j))
          products.push_back(Z->label(i) + " * " + Z->label(j) + " = " + vector_text(*s));
    report["dimension"] = Z->dim();
    report["basis"] = basis;
    report["generator"] = "[" + V->label(zhu_generator(*V).entries().begin()->first) + "]";
    report["products"] = products;
    report["slack"] = Z->slack();
    report["trace"] = trace_json(Z->trace());
    report["verdict"] = "stable";
    emit(report, c);
    return Pass;
  } catch (const UnstableAtCutoff& e) {
    report["verdict"] = "unstable";
    report["error"] = e.what();
    emit(report, c);
    return Unstable;
  }
}

json build_trace_json(const std::vector<BuildStep>& trace) {
  json t = json::array();
  for (const auto& s : trace)
    t.push_back(json{{"weight_cutoff", s.weight_cutoff},
                     {"ambient_weight_cutoff", s.ambient_weight_cutoff},
                     {"dims", s.dims},
                     {"generators", s.generators},
                     {"skipped", s.skipped}});
  return t;
}

int cmd_build_module(const Config& c) {
  const long D = c.module_degree > 0 ? c.module_degree : 3;
  auto V = backends::make_algebra(c.backend, D + c.slack_ceiling + 4);
  json report{{"config", json{{"command", "build-module"},
                              {"backend", c.backend},
                              {"module", c.module},
                              {"degree", D},
                              {"slack_ceiling", c.slack_ceiling}}}};
  BuildOptions o;
  o.slack_ceiling = c.slack_ceiling;
  try {
    const AVModule M = module_from_spec(V, c.module);
    auto S1 = build_S1(V, M, D, std::max<long>(D, 1));
    auto S = build_S(V, M, D, o);
    json verdicts;
    bool ok = true;
    auto verdict = [&](const char* name, bool holds, const std::string& why = {}) {
      ok = ok && holds;
      verdicts[name] = holds ? "pass" : "fail" + (why.empty() ? std::string() : ": " + why);
    };
    report["dims"] = S->dims();
    const auto jm = verify_J_cap_M(*S1);
    verdict("J_cap_M_trivial", jm.trivial);
    const auto ts = check_T_after_S(*S, D);
    verdict("T_after_S", ts.holds, ts.failure);
    const auto wa = check_weak_associativity(*S, std::min<long>(2, S->weight_cutoff()), D, S->weight_cutoff());
    verdict("weak_associativity", wa.holds(), wa.first_failure);
    if (c.backend == "heisenberg" && M.dim() == 1) {
      // a scalar module: S(M) should be the Fock module with the same eigenvalue
      const Rational lambda = M.rho(zhu_generator(*V))[0][0];
      auto H = std::dynamic_pointer_cast<const backends::HeisenbergAlgebra>(V);
      backends::FockModule F(H, lambda, D);
      const auto im = induced_map(*S, F, {F.lowest()}, 2);
      verdict("induced_map_onto_fock",
              im.f_is_module_map && im.well_defined && im.intertwines && im.injective(*S) && im.surjective(F),
              im.failure);
    }
    report["verdicts"] = verdicts;
    report["weak_associativity_triples"] = wa.checked;
    report["weak_associativity_skipped"] = wa.skipped;
    report["action_digest"] = S->action_digest(2);
    report["trace"] = build_trace_json(S->trace());
    emit(report, c);
    return ok ? Pass : Failure;
  } catch (const NonStabilization& e) {
    report["verdict"] = "unstable";
    report["error"] = e.what();
    report["trace"] = build_trace_json(e.trace());
    emit(report, c);
    return Unstable;
  } catch (const CutoffExceeded& e) {
    report["verdict"] = "unstable";
    report["error"] = e.what();
    emit(report, c);
    return Unstable;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact residue identities, Zhu algebras and the functor S"};
  app.require_subcommand(1);
  Config c;
  auto common = [&](CLI::App* s) {
    s->add_option("--backend", c.backend, "heisenberg or virasoro:c=<rational>");
    s->add_option("--slack-ceiling", c.slack_ceiling, "largest slack tried before giving up");
    s->add_option("--seed", c.seed, "seed for sampling and mutation");
    s->add_option("--out", c.out, "write the report here instead of stdout");
    s->add_option("--format", c.format, "report format")->check(CLI::IsMember({"text", "json"}));
  };

  auto* check = app.add_subcommand("check", "check identity files on Fock modules");
  common(check);
  check->add_option("paths", c.paths, ".vid files or directories");
  check->add_option("--weight", c.weight, "u, v range over weights <= this");
  check->add_option("--degree", c.degree, "w ranges over degrees <= this");
  check->add_option("--module-degree", c.module_degree, "degree cutoff of the modules (default weight + degree)");
  check->add_option("--lambda", c.lambdas, "Fock eigenvalues")->delimiter(',');
  check->add_option("--sample", c.sample, "check a seeded subsample of this size");
  check->add_option("--mutate", c.mutate, "check against the k-th seeded single-entry corruption");

  auto* zhu = app.add_subcommand("zhu", "truncated Zhu algebra");
  common(zhu);
  zhu->add_option("--cutoff,--weight", c.cutoff, "representatives of weight <= this");

  auto* build = app.add_subcommand("build-module", "S(M) for an A(V)-module M");
  common(build);
  build->add_option("--module", c.module, "scalar:λ=q, jordan2:λ=q, diag:λ=q,..., zero or file:path");
  build->add_option("--degree", c.module_degree, "degrees <= this");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(c);
    if (*zhu) return cmd_zhu(c);
    return cmd_build_module(c);
  } catch (const dsl::ParseError& e) {
    std::cerr << "parse error (" << dsl::kind_name(e.kind()) << ") at " << e.line() << ":" << e.column() << ": "
              << e.what() << "\n";
    return Failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Failure;
  }
}
