#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "voxcalc/voa.hpp"

namespace voxcalc::backends {

/// Weakly decreasing list of positive parts.
using Partition = std::vector<int>;
/// Combination of PBW monomials a(-n_1)...a(-n_k)x, keyed by partition.
using StateVector = std::map<Partition, Rational>;

long size_of(const Partition& p);
std::vector<Partition> partitions(long n, int min_part);
void add_into(StateVector& target, const StateVector& source, const Rational& factor);

/// Partitions of each weight with parts >= min_part, in a fixed order
/// (lexicographically decreasing), with reverse lookup.
class PartitionBasis {
 public:
  explicit PartitionBasis(int min_part) : min_part_(min_part) {}
  std::size_t dim(long weight) const;
  const Partition& at(long weight, std::size_t index) const;
  std::uint32_t index_of(const Partition& p) const;

 private:
  const std::vector<Partition>& level(long weight) const;

  int min_part_;
  mutable std::shared_mutex mutex_;
  mutable std::map<long, std::vector<Partition>> levels_;
  mutable std::map<Partition, std::uint32_t> index_;
};

/// Component action for a vertex algebra strongly generated by one field a of
/// weight h, on a space of PBW states. Modes use the component convention
/// a_k = Res_x x^k Y(a, x); the state a(-n)u' equals a_{h-1-n} u'. Composite
/// states are handled by the iterate formula
///   (a_k b)_n = sum_{j>=0} (-1)^j C(k,j) (a_{k-j} b_{n+j} - (-1)^k b_{k+n-j} a_j).
/// Results are memoized per (u, n, v); the cache is safe for concurrent use.
class ModeEngine {
 public:
  using GeneratorMode = std::function<StateVector(long k, const Partition& state)>;

  ModeEngine(int generator_weight, GeneratorMode generator_mode);

  StateVector component(const Partition& u, long n, const Partition& v) const;
  StateVector component(const Partition& u, long n, const StateVector& v) const;
  StateVector generator(long k, const StateVector& v) const;
  int generator_weight() const { return weight_; }

 private:
  struct Key {
    Partition u;
    long n;
    Partition v;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  int weight_;
  GeneratorMode mode_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<Key, StateVector, KeyHash> memo_;
};

/// Rank-one Heisenberg vertex algebra (free boson), generator alpha of weight 1
/// with [alpha(m), alpha(n)] = m delta_{m+n,0}.
class HeisenbergAlgebra final : public VertexAlgebra {
 public:
  explicit HeisenbergAlgebra(long weight_cutoff);

  std::string name() const override { return "heisenberg"; }
  long weight_cutoff() const override { return cutoff_; }
  std::size_t dim(long weight) const override;
  std::string label(const BasisKey& key) const override;
  GradedVector component_basis(const BasisKey& u, long n, const BasisKey& v) const override;

  /// alpha(m) for m >= 1, moved rightward with the commutator until it
  /// reaches the vacuum.
  GradedVector annihilator_action(long m, const GradedVector& v) const;

  const PartitionBasis& basis() const { return basis_; }
  GradedVector from_state(const StateVector& s) const;
  StateVector to_state(const GradedVector& v) const;
  /// The weight-1 generator alpha = alpha(-1)1.
  GradedVector alpha() const { return GradedVector::basis(1, 0); }
  GradedVector state(const Partition& p) const;

 private:
  long cutoff_;
  PartitionBasis basis_{1};
  ModeEngine engine_;
};

/// alpha(m) acting on the Fock state with lowest-weight eigenvalue lambda.
StateVector heisenberg_mode(long m, const Partition& state, const Rational& lambda);

/// Fock module M(1, lambda): w_lambda with alpha(0) w = lambda w and
/// alpha(n) w = 0 for n >= 1; basis alpha(-n_1)...alpha(-n_k) w_lambda.
class FockModule final : public CandidateModule {
 public:
  FockModule(std::shared_ptr<const HeisenbergAlgebra> algebra, Rational lambda, long degree_cutoff);

  std::string name() const override { return "fock(" + to_short_string(lambda_) + ")"; }
  const VertexAlgebra& algebra() const override { return *algebra_; }
  long degree_cutoff() const override { return cutoff_; }
  std::size_t dim(long degree) const override;
  std::string label(const BasisKey& key) const override;
  GradedVector action_basis(const BasisKey& u, long n, const BasisKey& w) const override;

  const Rational& lambda() const { return lambda_; }
  GradedVector lowest() const { return GradedVector::basis(0, 0); }
  GradedVector state(const Partition& p) const;

 private:
  std::shared_ptr<const HeisenbergAlgebra> algebra_;
  Rational lambda_;
  long cutoff_;
  ModeEngine engine_;
};

#ifdef VOXCALC_WITH_VIRASORO
/// Universal Virasoro vertex algebra of central charge c, generator
/// omega = L(-2)1; basis L(-n_1)...L(-n_k)1 with parts >= 2.
class VirasoroAlgebra final : public VertexAlgebra {
 public:
  VirasoroAlgebra(Rational central_charge, long weight_cutoff);

  std::string name() const override { return "virasoro:c=" + to_short_string(c_); }
  long weight_cutoff() const override { return cutoff_; }
  std::size_t dim(long weight) const override;
  std::string label(const BasisKey& key) const override;
  GradedVector component_basis(const BasisKey& u, long n, const BasisKey& v) const override;

  GradedVector omega() const { return GradedVector::basis(2, 0); }
  const Rational& central_charge() const { return c_; }

 private:
  StateVector virasoro_mode(long m, const Partition& state) const;

  Rational c_;
  long cutoff_;
  PartitionBasis basis_{2};
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<long, Partition>, StateVector> mode_memo_;
  ModeEngine engine_;
};
#endif

/// "heisenberg" or "virasoro:c=<rational>".
std::shared_ptr<const VertexAlgebra> make_algebra(const std::string& spec, long weight_cutoff);

}  // namespace voxcalc::backends
