#pragma once

#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "voxcalc/graded_vector.hpp"

namespace voxcalc {

/// A computation needed a weight or degree beyond the declared cutoff.
class CutoffExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An N-graded vertex algebra given by finite weight-graded bases and a
/// computable component action u_n v.
class VertexAlgebra {
 public:
  virtual ~VertexAlgebra() = default;

  virtual std::string name() const = 0;
  /// Largest weight whose basis may be requested.
  virtual long weight_cutoff() const = 0;
  /// dim V_(weight); 0 for negative weights; CutoffExceeded above the cutoff.
  virtual std::size_t dim(long weight) const = 0;
  virtual std::string label(const BasisKey& key) const = 0;
  /// u_n v on basis elements. wt(u_n v) = wt u + wt v - n - 1.
  virtual GradedVector component_basis(const BasisKey& u, long n, const BasisKey& v) const = 0;

  GradedVector vacuum() const { return GradedVector::basis(0, 0); }
  /// component_basis, memoized; safe for concurrent use.
  const GradedVector& component_memo(const BasisKey& u, long n, const BasisKey& v) const;
  /// Bilinear extension of component_basis.
  GradedVector component(const GradedVector& u, long n, const GradedVector& v) const;
  std::vector<BasisKey> basis_up_to(long max_weight) const;
  std::string render(const GradedVector& v) const;

 private:
  struct MemoKey {
    BasisKey u;
    long n;
    BasisKey v;
    bool operator==(const MemoKey&) const = default;
  };
  struct MemoHash {
    std::size_t operator()(const MemoKey& k) const;
  };
  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<MemoKey, GradedVector, MemoHash> memo_;
};

/// A graded vector space with a candidate vertex-operator action of some
/// vertex algebra. Nothing beyond the grading law is assumed.
class CandidateModule {
 public:
  virtual ~CandidateModule() = default;

  virtual std::string name() const = 0;
  virtual const VertexAlgebra& algebra() const = 0;
  virtual long degree_cutoff() const = 0;
  virtual std::size_t dim(long degree) const = 0;
  virtual std::string label(const BasisKey& key) const = 0;
  /// u_n w for basis u of V and basis w; degree wt u + deg w - n - 1.
  /// Results beyond the degree cutoff raise CutoffExceeded.
  virtual GradedVector action_basis(const BasisKey& u, long n, const BasisKey& w) const = 0;

  /// action_basis, memoized; safe for concurrent use. Failures are not cached.
  const GradedVector& action_memo(const BasisKey& u, long n, const BasisKey& w) const;
  GradedVector action(const GradedVector& u, long n, const GradedVector& w) const;
  std::vector<BasisKey> basis_up_to(long max_degree) const;
  std::string render(const GradedVector& v) const;

 private:
  struct MemoKey {
    BasisKey u;
    long n;
    BasisKey w;
    bool operator==(const MemoKey&) const = default;
  };
  struct MemoHash {
    std::size_t operator()(const MemoKey& k) const;
  };
  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<MemoKey, GradedVector, MemoHash> memo_;
};

/// V viewed as a module over itself.
class AdjointModule final : public CandidateModule {
 public:
  AdjointModule(std::shared_ptr<const VertexAlgebra> algebra, long degree_cutoff);

  std::string name() const override { return "adjoint(" + algebra_->name() + ")"; }
  const VertexAlgebra& algebra() const override { return *algebra_; }
  long degree_cutoff() const override { return cutoff_; }
  std::size_t dim(long degree) const override;
  std::string label(const BasisKey& key) const override { return algebra_->label(key); }
  GradedVector action_basis(const BasisKey& u, long n, const BasisKey& w) const override;

 private:
  std::shared_ptr<const VertexAlgebra> algebra_;
  long cutoff_;
};

/// Checks the grading-shift law on one computed value (debug builds assert it
/// on every action call).
bool respects_grading(long weight_u, long degree_w, long n, const GradedVector& result);

}  // namespace voxcalc
