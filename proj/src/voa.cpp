#include "voxcalc/voa.hpp"

#include <cassert>
#include <mutex>

namespace voxcalc {

bool respects_grading(long weight_u, long degree_w, long n, const GradedVector& result) {
  for (long g : result.grades())
    if (g != weight_u + degree_w - n - 1) return false;
  return true;
}

std::size_t VertexAlgebra::MemoHash::operator()(const MemoKey& k) const {
  std::size_t h = static_cast<std::size_t>(k.u.grade) * 131 + k.u.index;
  h = h * 1000003u ^ static_cast<std::size_t>(k.n + 4096);
  h = h * 1000003u ^ (static_cast<std::size_t>(k.v.grade) * 131 + k.v.index);
  return h;
}

const GradedVector& VertexAlgebra::component_memo(const BasisKey& u, long n, const BasisKey& v) const {
  const MemoKey key{u, n, v};
  {
    std::shared_lock lock(memo_mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  GradedVector value = component_basis(u, n, v);
  std::unique_lock lock(memo_mutex_);
  return memo_.emplace(key, std::move(value)).first->second;
}

GradedVector VertexAlgebra::component(const GradedVector& u, long n, const GradedVector& v) const {
  GradedVector out;
  for (const auto& [ku, cu] : u.entries())
    for (const auto& [kv, cv] : v.entries()) {
      if (ku.grade + kv.grade - n - 1 < 0) continue;
      const GradedVector& term = component_memo(ku, n, kv);
      assert(respects_grading(ku.grade, kv.grade, n, term));
      out.add_scaled(term, cu * cv);
    }
  return out;
}

std::vector<BasisKey> VertexAlgebra::basis_up_to(long max_weight) const {
  std::vector<BasisKey> out;
  for (long w = 0; w <= max_weight; ++w)
    for (std::size_t i = 0; i < dim(w); ++i) out.push_back({w, static_cast<std::uint32_t>(i)});
  return out;
}

std::string VertexAlgebra::render(const GradedVector& v) const {
  return v.render([this](const BasisKey& k) { return label(k); });
}

std::size_t CandidateModule::MemoHash::operator()(const MemoKey& k) const {
  std::size_t h = static_cast<std::size_t>(k.u.grade) * 131 + k.u.index;
  h = h * 1000003u ^ static_cast<std::size_t>(k.n + 4096);
  h = h * 1000003u ^ (static_cast<std::size_t>(k.w.grade) * 131 + k.w.index);
  return h;
}

const GradedVector& CandidateModule::action_memo(const BasisKey& u, long n, const BasisKey& w) const {
  const MemoKey key{u, n, w};
  {
    std::shared_lock lock(memo_mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  GradedVector value = action_basis(u, n, w);
  std::unique_lock lock(memo_mutex_);
  return memo_.emplace(key, std::move(value)).first->second;
}

GradedVector CandidateModule::action(const GradedVector& u, long n, const GradedVector& w) const {
  GradedVector out;
  for (const auto& [ku, cu] : u.entries())
    for (const auto& [kw, cw] : w.entries()) {
      if (ku.grade + kw.grade - n - 1 < 0) continue;
      const GradedVector& term = action_memo(ku, n, kw);
      assert(respects_grading(ku.grade, kw.grade, n, term));
      out.add_scaled(term, cu * cw);
    }
  return out;
}

std::vector<BasisKey> CandidateModule::basis_up_to(long max_degree) const {
  std::vector<BasisKey> out;
  for (long d = 0; d <= max_degree; ++d)
    for (std::size_t i = 0; i < dim(d); ++i) out.push_back({d, static_cast<std::uint32_t>(i)});
  return out;
}

std::string CandidateModule::render(const GradedVector& v) const {
  return v.render([this](const BasisKey& k) { return label(k); });
}

AdjointModule::AdjointModule(std::shared_ptr<const VertexAlgebra> algebra, long degree_cutoff)
    : algebra_(std::move(algebra)), cutoff_(degree_cutoff) {
  if (cutoff_ > algebra_->weight_cutoff())
    throw CutoffExceeded("adjoint module cutoff exceeds the algebra's weight cutoff");
}

std::size_t AdjointModule::dim(long degree) const {
  if (degree > cutoff_) throw CutoffExceeded("degree " + std::to_string(degree) + " above adjoint cutoff");
  return algebra_->dim(degree);
}

GradedVector AdjointModule::action_basis(const BasisKey& u, long n, const BasisKey& w) const {
  if (u.grade + w.grade - n - 1 > cutoff_)
    throw CutoffExceeded("adjoint action u_" + std::to_string(n) + " leaves degree cutoff " +
                         std::to_string(cutoff_));
  return algebra_->component_basis(u, n, w);
}

}  // namespace voxcalc
