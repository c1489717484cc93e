#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "voxcalc/laurent.hpp"
#include "voxcalc/voa.hpp"

namespace voxcalc {

/// Laurent polynomial whose coefficients are module (or algebra) elements.
using ModulePoly = LaurentPoly<GradedVector>;

/// Largest and smallest grade present in a nonzero vector.
long top_grade(const GradedVector& v);
long bottom_grade(const GradedVector& v);

/// Smallest l >= 0 with u_n w = 0 for every n >= l, found by probing
/// downward from the grading bound.
long minimal_truncation(const CandidateModule& m, const GradedVector& u, const GradedVector& w);

struct TruncationPair {
  long l = 0;  // u_n w = 0 for n >= l
  long k = 0;  // v_n w = 0 for n >= k
};

TruncationPair minimal_truncations(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                   const GradedVector& w);
/// l = top(u) + top(w), k = top(v) + top(w): valid for any graded action.
TruncationPair grading_truncations(const GradedVector& u, const GradedVector& v, const GradedVector& w);

/// u_p (v_q w).
GradedVector product_side(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                          const GradedVector& w, long p, long q);

/// sum_{i=0}^{k-q-1} sum_{j=0}^{l} C(p-l,i) C(l,j) (u_{p-l-i+j} v)_{q+l+i-j} w.
/// Throws std::invalid_argument unless k - q >= 1.
GradedVector iterate_side(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                          const GradedVector& w, long p, long q, long l, long k);

struct IdentityResult {
  bool holds = true;
  GradedVector discrepancy;  // left minus right
};

/// u_p v_q w against the iterate sum. l, k default to the minimal values.
IdentityResult check_prop21(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                            const GradedVector& w, long p, long q,
                            std::optional<TruncationPair> override_lk = std::nullopt);

/// Coefficient of x0^a x2^b in (x0+x2)^l Y(u, x0+x2) Y(v, x2) w, the binomial
/// expanded in nonnegative powers of x2:
///   sum_{i>=0} C(a+i, i) u_{l-1-a-i} v_{i-b-1} w.
/// The sum stops where v_{i-b-1} w vanishes by grading.
GradedVector product_coefficient(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                 const GradedVector& w, long l, long a, long b);

/// Coefficient of x0^a x2^b in (x0+x2)^l Y(Y(u, x0) v, x2) w:
///   sum_{j=0}^{l} C(l, j) (u_{l-j-a-1} v)_{j-b-1} w.
GradedVector iterate_coefficient(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                 const GradedVector& w, long l, long a, long b);

/// Exponent box for the two sides of weak associativity. Monomials whose
/// coefficient would land above the module's degree cutoff are dropped, the
/// rest must lie inside the box.
struct WeakAssociativityWindow {
  long a_lo = 0, a_hi = 0;  // x0
  long b_lo = 0, b_hi = 0;  // x2
};

/// Widest box for homogeneous u, v, w whose coefficients can be computed
/// without leaving the algebra's weight cutoff or the module's degree cutoff.
WeakAssociativityWindow default_weak_associativity_window(const CandidateModule& m, const GradedVector& u,
                                                          const GradedVector& v, const GradedVector& w, long l);

/// Both sides of (x0+x2)^l Y(u, x0+x2) Y(v, x2) w = (x0+x2)^l Y(Y(u, x0) v, x2) w
/// restricted to the window, over variables x0 and x2. Any coefficient that
/// would need a computation outside the cutoffs raises CutoffExceeded.
std::pair<ModulePoly, ModulePoly> weak_associativity_sides(const CandidateModule& m, const GradedVector& u,
                                                           const GradedVector& v, const GradedVector& w, long l,
                                                           const WeakAssociativityWindow& window);
std::pair<ModulePoly, ModulePoly> weak_associativity_sides(const CandidateModule& m, const GradedVector& u,
                                                           const GradedVector& v, const GradedVector& w, long l);

struct WeakAssociativityReport {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;  // triples whose actions leave the module's cutoffs
  std::string first_failure;  // the triple and both sides

  bool holds() const { return failed == 0; }
};

/// Weak associativity with l = wt u + deg w for basis u, v of weight <=
/// max_weight and every basis w of degree <= max_degree. The x0-window stops
/// where u_n v would pass iterate_weight, the x2-window at the degree cutoff.
WeakAssociativityReport check_weak_associativity(const CandidateModule& m, long max_weight, long max_degree,
                                                 long iterate_weight);

enum class VanishingForm {
  Product,  // Res_x2 x2^q (x0+x2)^l Y(u, x0+x2) Y(v, x2) w
  Iterate,  // Res_x2 x2^q (x0+x2)^l Y(Y(u, x0) v, x2) w
};

/// The x0-series of the chosen residue, over every x0 exponent whose
/// coefficient lies in the module's degree range and whose intermediate
/// vectors stay inside the cutoffs.
ModulePoly vanishing_series(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                            const GradedVector& w, long q, long l, VanishingForm form);

/// True iff vanishing_series is zero. Requires q >= k.
bool check_vanishing_residues(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                              const GradedVector& w, long q, long l, long k, VanishingForm form);

/// Res_x0 Res_x2 x0^{p-l-i} x2^{q+i} (x0+x2)^l Y(Y(u, x0) v, x2) w, which
/// vanishes for i >= k - q.
GradedVector shifted_iterate_residue(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                     const GradedVector& w, long p, long q, long i, long l);

/// sum_{j=0}^{wt u + deg w} C(wt u + deg w, j) (u_{j+mm} v)_{K + wt u + wt v - j - mm - 2} w
/// for homogeneous u, v, w; zero whenever mm <= K - 2 deg w - 2.
GradedVector weighted_iterate_component(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                        const GradedVector& w, long K, long mm);

/// All (p, q) with v_q w and u_p v_q w of degree in [0, degree cutoff], for
/// homogeneous u, v, w. Outside this set u_p v_q w is zero or beyond the
/// truncation.
std::vector<std::pair<long, long>> nonvanishing_box(const CandidateModule& m, const GradedVector& u,
                                                    const GradedVector& v, const GradedVector& w);

}  // namespace voxcalc
