#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxcalc/linalg.hpp"
#include "voxcalc/voa.hpp"

namespace voxcalc {

using DenseMatrix = std::vector<std::vector<Rational>>;

DenseMatrix identity_matrix(std::size_t n);
DenseMatrix zero_matrix(std::size_t n);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix add_scaled(const DenseMatrix& a, const DenseMatrix& b, const Rational& c);
std::vector<Rational> apply(const DenseMatrix& a, const std::vector<Rational>& x);

/// u * v = sum_{j=0}^{wt u} C(wt u, j) u_{j-1} v, bilinear over homogeneous parts.
GradedVector star(const VertexAlgebra& V, const GradedVector& u, const GradedVector& v);

/// Res_x x^n Y((x+1)^{L(0)} u, x) v = sum_{j=0}^{wt u} C(wt u, j) u_{n+j} v for n <= -2.
struct OvGenerator {
  BasisKey u;
  BasisKey v;
  long n = -2;
  GradedVector value;
};

/// Lowest and highest weight a generator can touch: [wt v - n - 1, wt u + wt v - n - 1].
std::pair<long, long> ov_support(long wt_u, long wt_v, long n);

/// Every generator over basis u, v whose weight support lies in [0, support_bound].
std::vector<OvGenerator> ov_generators(const VertexAlgebra& V, long support_bound);

class UnstableAtCutoff : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StabilizationStep {
  long slack = 0;
  std::size_t generators = 0;
  std::size_t relation_dim = 0;  // dim O(V) cap V_{<=N} seen at this slack
  std::size_t quotient_dim = 0;
};

/// A(V) truncated to representatives in V_{<=N}. Columns of V_{<=N} are
/// ordered heaviest weight first, so canonical representatives use the
/// lightest basis vectors available.
class ZhuPresentation {
 public:
  ZhuPresentation(std::shared_ptr<const VertexAlgebra> algebra, long cutoff, long slack,
                  std::vector<StabilizationStep> trace, linalg::SubspaceBasis relations);

  const VertexAlgebra& algebra() const { return *algebra_; }
  std::shared_ptr<const VertexAlgebra> algebra_ptr() const { return algebra_; }
  long cutoff() const { return cutoff_; }
  long slack() const { return slack_; }
  const std::vector<StabilizationStep>& trace() const { return trace_; }
  const linalg::SubspaceBasis& relations() const { return relations_; }

  std::size_t dim() const { return quotient_keys_.size(); }
  /// Basis elements of V whose classes form the quotient basis, in column order.
  const std::vector<BasisKey>& quotient_keys() const { return quotient_keys_; }
  GradedVector representative(std::size_t i) const;
  std::string label(std::size_t i) const;

  /// Coordinates of the class of v in the quotient basis. Throws
  /// CutoffExceeded if v has weight above the cutoff.
  std::vector<Rational> coordinates(const GradedVector& v) const;
  /// Canonical representative of the class of v.
  GradedVector canonical(const GradedVector& v) const;
  bool equivalent(const GradedVector& a, const GradedVector& b) const;

  /// Class of rep_i * rep_j when wt rep_i + wt rep_j <= cutoff.
  std::optional<std::vector<Rational>> structure_constants(std::size_t i, std::size_t j) const;

 private:
  std::size_t column(const BasisKey& k) const;

  std::shared_ptr<const VertexAlgebra> algebra_;
  long cutoff_;
  long slack_;
  std::vector<StabilizationStep> trace_;
  std::vector<BasisKey> keys_;  // column -> key, heaviest first
  std::map<BasisKey, std::size_t> columns_;
  linalg::SubspaceBasis relations_;
  std::vector<BasisKey> quotient_keys_;
  std::vector<std::size_t> quotient_columns_;
};

struct ZhuOptions {
  long slack_step = 2;
  long slack_ceiling = 8;
};

/// O(V) cap V_{<=N} from generators of support <= N + slack, raising the slack
/// by slack_step until two consecutive slacks give the same dimension.
/// Throws UnstableAtCutoff (with the trace) if the ceiling is reached first.
std::shared_ptr<const ZhuPresentation> zhu_quotient(std::shared_ptr<const VertexAlgebra> algebra, long N,
                                                    const ZhuOptions& options = {});

/// Finite-dimensional A(V)-module given by one matrix per quotient basis element.
class AVModule {
 public:
  AVModule(std::shared_ptr<const ZhuPresentation> zhu, std::size_t dim, std::vector<DenseMatrix> basis_images);

  /// Extends images of chosen elements (typically generators) to every basis
  /// class through star-words whose weight stays within the cutoff. Throws
  /// std::invalid_argument if the words do not span the quotient or the
  /// images are inconsistent.
  static AVModule from_generator_images(std::shared_ptr<const ZhuPresentation> zhu, std::size_t dim,
                                        const std::vector<std::pair<GradedVector, DenseMatrix>>& images);

  std::size_t dim() const { return dim_; }
  const ZhuPresentation& zhu() const { return *zhu_; }
  std::shared_ptr<const ZhuPresentation> zhu_ptr() const { return zhu_; }
  /// rho(u + O(V)) for any u of weight <= cutoff.
  DenseMatrix rho(const GradedVector& u) const;
  const std::vector<DenseMatrix>& basis_images() const { return images_; }

  /// First pair (i, j) with rho(rep_i * rep_j) != rho(rep_i) rho(rep_j), if any.
  std::optional<std::pair<std::size_t, std::size_t>> representation_defect() const;

 private:
  std::shared_ptr<const ZhuPresentation> zhu_;
  std::size_t dim_;
  std::vector<DenseMatrix> images_;
};

/// o(u) = u_{wt u - 1} summed over homogeneous parts.
GradedVector zero_mode(const CandidateModule& W, const GradedVector& u, const GradedVector& w);

/// T(W) within the cutoffs: vectors of degree <= max_degree killed by every
/// degree-lowering u_n with u of weight <= the presentation cutoff, with
/// rho(u) = o(u) restricted to it.
struct TopLevel {
  std::vector<GradedVector> basis;
  AVModule module;
};
TopLevel top_level(const CandidateModule& W, std::shared_ptr<const ZhuPresentation> zhu, long max_degree = 0);

}  // namespace voxcalc
