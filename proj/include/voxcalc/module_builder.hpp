#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voxcalc/linalg.hpp"
#include "voxcalc/voa.hpp"
#include "voxcalc/zhu.hpp"

namespace voxcalc {

/// u_1(m_1) ... u_k(m_k) w: basis elements u_i of V, a basis element w of M.
struct FreeWord {
  std::vector<std::pair<BasisKey, long>> letters;  // leftmost first
  std::uint32_t tail = 0;

  /// sum of wt u_i - m_i - 1; the tail has degree 0.
  long degree() const;
  std::string render(const VertexAlgebra& V) const;
};

/// The same A(V)-module presented over a Zhu quotient with a larger cutoff.
/// Presentations are cached per (algebra, cutoff).
AVModule extend_module(const AVModule& M, long cutoff);
std::shared_ptr<const ZhuPresentation> cached_zhu_quotient(std::shared_ptr<const VertexAlgebra> algebra, long N);

class WordSpace;

struct BuildStep {
  long weight_cutoff = 0;          // N_V: words whose letter has weight <= N_V form the basis
  long ambient_weight_cutoff = 0;  // every computation stays within this weight
  std::vector<std::size_t> dims;
  std::size_t generators = 0;  // relation vectors produced, before reduction
  std::size_t skipped = 0;     // generators or actions that left the cutoffs
};

class NonStabilization : public std::runtime_error {
 public:
  NonStabilization(const std::string& what, std::vector<BuildStep> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<BuildStep>& trace() const { return trace_; }

 private:
  std::vector<BuildStep> trace_;
};

/// A relation vector added by hand in the coordinates of the free words of
/// one degree. Used to test that the verifications notice tampering.
struct InjectedRelation {
  long degree = 0;
  linalg::SparseVector vector;
};

struct BuildOptions {
  long weight_cutoff = 0;  // N_V; 0 means max(D, 1)
  long slack = 2;          // ambient weight cutoff is N_V + slack
  bool stabilize = true;   // raise the slack until the dimensions settle
  long slack_step = 1;
  long slack_ceiling = 8;
  int agreeing_increments = 2;
  unsigned threads = 0;      // 0 means VOXCALC_THREADS or 1
  std::vector<InjectedRelation> injected;
};

/// Length-one words u(m)w modulo relations, truncated to degrees <= D, with
/// the action induced from the rewriting rule. A basis element of degree d is
/// a word whose letter has weight <= N_V and is not a pivot of the relations.
class TruncatedModule final : public CandidateModule {
 public:
  enum class Stage { S1, S };

  TruncatedModule(std::shared_ptr<const WordSpace> words, std::vector<linalg::RowSpace> relations, Stage stage,
                  std::vector<BuildStep> trace);

  std::string name() const override;
  const VertexAlgebra& algebra() const override;
  long degree_cutoff() const override;
  std::size_t dim(long degree) const override;
  std::string label(const BasisKey& key) const override;
  /// Throws CutoffExceeded if the result needs a word beyond the ambient
  /// weight, a degree beyond D, or a word not expressible in the basis.
  GradedVector action_basis(const BasisKey& u, long n, const BasisKey& w) const override;

  Stage stage() const { return stage_; }
  long weight_cutoff() const;
  long ambient_weight_cutoff() const;
  const AVModule& top_module() const;
  const std::vector<BuildStep>& trace() const { return trace_; }
  std::vector<std::size_t> dims() const;

  FreeWord basis_word(const BasisKey& key) const;
  /// Class of a free word in basis coordinates.
  GradedVector reduce(const FreeWord& word) const;
  /// Class of a vector of free words of one degree in basis coordinates.
  GradedVector reduce(long degree, const linalg::SparseVector& v) const;
  /// Ambient columns of degree d that are not relation pivots, at any weight.
  std::vector<std::size_t> quotient_columns(long degree) const;

  const std::vector<linalg::RowSpace>& relations() const { return relations_; }
  const WordSpace& words() const { return *words_; }
  std::shared_ptr<const WordSpace> words_ptr() const { return words_; }
  /// Stable digest of the action table of every u of weight <= max_weight on
  /// every basis element, for comparing runs.
  std::string action_digest(long max_weight) const;

 private:
  std::shared_ptr<const WordSpace> words_;
  std::vector<linalg::RowSpace> relations_;
  Stage stage_;
  std::vector<BuildStep> trace_;
  std::vector<std::vector<std::size_t>> basis_columns_;   // per degree
  std::vector<std::vector<long>> column_positions_;       // per degree: column -> basis index or -1
};

/// Length-one words up to the cutoffs modulo the relations that rewrite
/// products u(p)v(q)w into single letters (together with the identification of
/// degree-0 words with the action of A(V) on M), closed under the action.
std::shared_ptr<const TruncatedModule> build_S1(std::shared_ptr<const VertexAlgebra> algebra, const AVModule& M,
                                                long D, long weight_cutoff, const BuildOptions& options = {});

/// Relations sum_{j=0}^{wt u + deg w} C(wt u + deg w, j) (u_{j+m} v)(K + wt u + wt v - j - m - 2) w
/// for basis u, v and basis words w of S1, m <= K - 2 deg w - 2, with every
/// term inside the cutoffs. One vector per (u, v, w, K, m) that survives.
struct JGenerators {
  std::vector<InjectedRelation> vectors;  // degree and value
  std::size_t skipped = 0;
};
JGenerators j_generators(const TruncatedModule& S1, unsigned threads = 0);

/// S1 modulo the submodule generated by the j_generators. The basis keeps
/// letters of weight <= N_V while the ambient weight N_V + slack grows until
/// the dimensions for degrees <= D agree over agreeing_increments consecutive
/// increments. Throws NonStabilization with the trace otherwise.
std::shared_ptr<const TruncatedModule> build_S(std::shared_ptr<const VertexAlgebra> algebra, const AVModule& M,
                                               long D, const BuildOptions& options = {});

struct JCapMResult {
  bool trivial = true;
  linalg::SparseVector witness;  // nonzero element of the intersection, in M coordinates
};
/// Degree-0 part of the submodule of S1 generated by the j_generators (and
/// any injected relations).
JCapMResult verify_J_cap_M(const TruncatedModule& S1, const std::vector<InjectedRelation>& injected = {});

struct InducedMapResult {
  bool f_is_module_map = true;
  bool well_defined = true;
  bool intertwines = true;
  std::string failure;
  std::vector<DenseMatrix> blocks;  // per degree: W_(d) coordinates of the images of the basis
  std::vector<std::size_t> ranks;
  std::size_t checked = 0;
  std::size_t skipped = 0;

  bool injective(const TruncatedModule& S) const;
  bool surjective(const CandidateModule& W) const;
};
/// The map sending the class of u(m)w to u_m f(w). f lists the images of the
/// basis of M, each in W_(0).
InducedMapResult induced_map(const TruncatedModule& S, const CandidateModule& W, const std::vector<GradedVector>& f,
                             long max_action_weight);

struct TAfterSResult {
  bool holds = true;
  std::size_t top_dim = 0;
  std::size_t module_dim = 0;
  std::string failure;
};
/// T(S(M)) within degree max_degree against M through the degree-0 embedding.
TAfterSResult check_T_after_S(const TruncatedModule& S, long max_degree);

struct ModuleMapResult {
  bool f_is_module_map = true;
  bool well_defined = true;
  bool commutes = true;
  std::string failure;
  std::vector<DenseMatrix> blocks;  // per degree: target basis coordinates of the images of the source basis
  std::size_t checked = 0;
  std::size_t skipped = 0;
};
/// S(f) for an A(V)-module map f: M1 -> M2 (a dim M2 x dim M1 matrix). Both
/// modules must share algebra and cutoffs.
ModuleMapResult functor_map(const TruncatedModule& source, const TruncatedModule& target, const DenseMatrix& f,
                            long max_action_weight);

}  // namespace voxcalc
