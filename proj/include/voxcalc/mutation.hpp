#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "voxcalc/voa.hpp"

namespace voxcalc {

/// One replaced entry u_n w of an action table.
struct Corruption {
  BasisKey u;
  long n = 0;
  BasisKey w;
  GradedVector replacement;

  std::string describe(const CandidateModule& m) const;
};

/// A candidate module that agrees with `base` except on one table entry. The
/// replacement keeps the grading, so the action stays lower-truncated.
class PerturbedModule final : public CandidateModule {
 public:
  PerturbedModule(std::shared_ptr<const CandidateModule> base, Corruption corruption);

  std::string name() const override { return base_->name() + "+perturbed"; }
  const VertexAlgebra& algebra() const override { return base_->algebra(); }
  long degree_cutoff() const override { return base_->degree_cutoff(); }
  std::size_t dim(long degree) const override { return base_->dim(degree); }
  std::string label(const BasisKey& key) const override { return base_->label(key); }
  GradedVector action_basis(const BasisKey& u, long n, const BasisKey& w) const override;

  const Corruption& corruption() const { return corruption_; }

 private:
  std::shared_ptr<const CandidateModule> base_;
  Corruption corruption_;
};

/// Adds `delta` times basis element (degree, index) to the entry u_n w.
Corruption shift_entry(const CandidateModule& m, BasisKey u, long n, BasisKey w, std::uint32_t target_index,
                       const Rational& delta);

/// `count` single-entry corruptions drawn from a seeded generator: u of weight
/// <= max_weight, w of degree <= max_degree, n chosen so that u_n w lands in
/// degree [0, max_degree]; one coefficient of the entry is shifted by a
/// nonzero integer.
std::vector<Corruption> seeded_corruptions(const CandidateModule& m, std::uint64_t seed, int count, long max_weight,
                                           long max_degree);

}  // namespace voxcalc
