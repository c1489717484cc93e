#include "voxcalc/mutation.hpp"

#include <random>

namespace voxcalc {

std::string Corruption::describe(const CandidateModule& m) const {
  const auto& V = m.algebra();
  GradedVector uu = GradedVector::basis(u.grade, u.index);
  GradedVector ww = GradedVector::basis(w.grade, w.index);
  return "(" + V.render(uu) + ")_" + std::to_string(n) + " (" + m.render(ww) + ") := " + m.render(replacement);
}

PerturbedModule::PerturbedModule(std::shared_ptr<const CandidateModule> base, Corruption corruption)
    : base_(std::move(base)), corruption_(std::move(corruption)) {}

GradedVector PerturbedModule::action_basis(const BasisKey& u, long n, const BasisKey& w) const {
  if (u == corruption_.u && n == corruption_.n && w == corruption_.w) return corruption_.replacement;
  return base_->action_basis(u, n, w);
}

Corruption shift_entry(const CandidateModule& m, BasisKey u, long n, BasisKey w, std::uint32_t target_index,
                       const Rational& delta) {
  const long degree = u.grade + w.grade - n - 1;
  if (degree < 0) throw std::invalid_argument("corrupted entry must land in a nonnegative degree");
  if (target_index >= m.dim(degree)) throw std::out_of_range("corruption target index out of range");
  Corruption c{u, n, w, m.action_basis(u, n, w)};
  c.replacement.add({degree, target_index}, delta);
  return c;
}

std::vector<Corruption> seeded_corruptions(const CandidateModule& m, std::uint64_t seed, int count, long max_weight,
                                           long max_degree) {
  std::mt19937_64 rng(seed);
  auto us = m.algebra().basis_up_to(max_weight);
  auto ws = m.basis_up_to(max_degree);
  std::vector<Corruption> out;
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  while (static_cast<int>(out.size()) < count) {
    BasisKey u = us[pick(us.size())];
    BasisKey w = ws[pick(ws.size())];
    long degree = static_cast<long>(pick(static_cast<std::size_t>(max_degree + 1)));
    long n = u.grade + w.grade - degree - 1;
    auto target = static_cast<std::uint32_t>(pick(m.dim(degree)));
    long delta = static_cast<long>(pick(3)) + 1;
    if (pick(2) == 1) delta = -delta;
    out.push_back(shift_entry(m, u, n, w, target, Rational(delta)));
  }
  return out;
}

}  // namespace voxcalc
