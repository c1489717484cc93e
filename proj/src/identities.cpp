#include "voxcalc/identities.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace voxcalc {

namespace {

long top_or(const GradedVector& v, long fallback) { return v.is_zero() ? fallback : top_grade(v); }

void require_homogeneous(const GradedVector& v, const char* what) {
  if (!v.is_homogeneous()) throw std::invalid_argument(std::string(what) + " must be homogeneous");
}

}  // namespace

long top_grade(const GradedVector& v) {
  auto g = v.grades();
  if (g.empty()) throw std::invalid_argument("zero vector has no grade");
  return *g.rbegin();
}

long bottom_grade(const GradedVector& v) {
  auto g = v.grades();
  if (g.empty()) throw std::invalid_argument("zero vector has no grade");
  return *g.begin();
}

long minimal_truncation(const CandidateModule& m, const GradedVector& u, const GradedVector& w) {
  if (u.is_zero() || w.is_zero()) return 0;
  for (long n = top_grade(u) + top_grade(w) - 1; n >= 0; --n)
    if (!m.action(u, n, w).is_zero()) return n + 1;
  return 0;
}

TruncationPair minimal_truncations(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                   const GradedVector& w) {
  return {minimal_truncation(m, u, w), minimal_truncation(m, v, w)};
}

TruncationPair grading_truncations(const GradedVector& u, const GradedVector& v, const GradedVector& w) {
  long dw = top_or(w, 0);
  return {std::max(0L, top_or(u, 0) + dw), std::max(0L, top_or(v, 0) + dw)};
}

GradedVector product_side(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                          const GradedVector& w, long p, long q) {
  return m.action(u, p, m.action(v, q, w));
}

GradedVector iterate_side(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                          const GradedVector& w, long p, long q, long l, long k) {
  if (k - q < 1) throw std::invalid_argument("iterate_side needs k - q >= 1");
  const VertexAlgebra& V = m.algebra();
  GradedVector out;
  for (long i = 0; i <= k - q - 1; ++i) {
    Rational ci = binomial(p - l, i);
    if (ci == 0) continue;
    for (long j = 0; j <= l; ++j) {
      GradedVector uv = V.component(u, p - l - i + j, v);
      if (uv.is_zero()) continue;
      out.add_scaled(m.action(uv, q + l + i - j, w), ci * binomial(l, j));
    }
  }
  return out;
}

IdentityResult check_prop21(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                            const GradedVector& w, long p, long q, std::optional<TruncationPair> override_lk) {
  TruncationPair lk = override_lk ? *override_lk : minimal_truncations(m, u, v, w);
  IdentityResult r;
  if (lk.k - q < 1) {
    // v_q w = 0 already; the iterate sum is empty
    r.discrepancy = product_side(m, u, v, w, p, q);
  } else {
    r.discrepancy = product_side(m, u, v, w, p, q) - iterate_side(m, u, v, w, p, q, lk.l, lk.k);
  }
  r.holds = r.discrepancy.is_zero();
  return r;
}

GradedVector product_coefficient(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                 const GradedVector& w, long l, long a, long b) {
  GradedVector out;
  if (u.is_zero() || v.is_zero() || w.is_zero()) return out;
  const long last = top_grade(v) + top_grade(w) + b;  // v_{i-b-1} w = 0 beyond this
  for (long i = 0; i <= last; ++i) {
    Rational c = binomial(a + i, i);
    if (c == 0) continue;
    GradedVector vw = m.action(v, i - b - 1, w);
    if (vw.is_zero()) continue;
    out.add_scaled(m.action(u, l - 1 - a - i, vw), c);
  }
  return out;
}

GradedVector iterate_coefficient(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                 const GradedVector& w, long l, long a, long b) {
  if (l < 0) throw std::invalid_argument("iterate_coefficient needs l >= 0");
  const VertexAlgebra& V = m.algebra();
  GradedVector out;
  for (long j = 0; j <= l; ++j) {
    GradedVector uv = V.component(u, l - j - a - 1, v);
    if (uv.is_zero()) continue;
    out.add_scaled(m.action(uv, j - b - 1, w), binomial(l, j));
  }
  return out;
}

WeakAssociativityWindow default_weak_associativity_window(const CandidateModule& m, const GradedVector& u,
                                                          const GradedVector& v, const GradedVector& w,
                                                          long /*l*/) {
  require_homogeneous(u, "u");
  require_homogeneous(v, "v");
  require_homogeneous(w, "w");
  const long wu = top_or(u, 0), wv = top_or(v, 0), dw = top_or(w, 0);
  const long D = m.degree_cutoff(), N = m.algebra().weight_cutoff();
  WeakAssociativityWindow win;
  // x0 exponents below -(wt u + wt v) are zero on the iterate side; one extra
  // column checks the product side there too.
  win.a_lo = -(wu + wv) - 1;
  win.a_hi = N - wu - wv;
  win.b_lo = -(wv + dw) - 1;
  win.b_hi = D - wv - dw;
  return win;
}

std::pair<ModulePoly, ModulePoly> weak_associativity_sides(const CandidateModule& m, const GradedVector& u,
                                                           const GradedVector& v, const GradedVector& w, long l,
                                                           const WeakAssociativityWindow& win) {
  ModulePoly lhs, rhs;
  if (u.is_zero() || v.is_zero() || w.is_zero()) return {lhs, rhs};
  const long base = top_grade(u) + top_grade(v) + top_grade(w) - l;
  const long floor = bottom_grade(u) + bottom_grade(v) + bottom_grade(w) - l;
  const long D = m.degree_cutoff();
  for (long a = win.a_lo; a <= win.a_hi; ++a)
    for (long b = win.b_lo; b <= win.b_hi; ++b) {
      // coefficient degree is wt u + wt v + deg w - l + a + b
      if (base + a + b < 0 || floor + a + b > D) continue;
      Monomial mono = Monomial::var("x0", a) * Monomial::var("x2", b);
      lhs.add_term(mono, product_coefficient(m, u, v, w, l, a, b));
      rhs.add_term(mono, iterate_coefficient(m, u, v, w, l, a, b));
    }
  return {lhs, rhs};
}

std::pair<ModulePoly, ModulePoly> weak_associativity_sides(const CandidateModule& m, const GradedVector& u,
                                                           const GradedVector& v, const GradedVector& w, long l) {
  return weak_associativity_sides(m, u, v, w, l, default_weak_associativity_window(m, u, v, w, l));
}

WeakAssociativityReport check_weak_associativity(const CandidateModule& m, long max_weight, long max_degree,
                                                 long iterate_weight) {
  WeakAssociativityReport r;
  const auto& V = m.algebra();
  const long D = std::min(max_degree, m.degree_cutoff());
  for (const auto& u : V.basis_up_to(max_weight))
    for (const auto& v : V.basis_up_to(max_weight))
      for (const auto& w : m.basis_up_to(D)) {
        const GradedVector gu = GradedVector::basis(u.grade, u.index), gv = GradedVector::basis(v.grade, v.index),
                           gw = GradedVector::basis(w.grade, w.index);
        WeakAssociativityWindow win{-(u.grade + v.grade) - 1, iterate_weight - u.grade - v.grade,
                                    -(v.grade + w.grade) - 1, m.degree_cutoff() - v.grade - w.grade};
        ModulePoly lhs, rhs;
        try {
          std::tie(lhs, rhs) = weak_associativity_sides(m, gu, gv, gw, u.grade + w.grade, win);
        } catch (const CutoffExceeded&) {
          ++r.skipped;
          continue;
        }
        ++r.checked;
        if (lhs == rhs) continue;
        if (r.failed++ == 0) {
          auto text = [&](const GradedVector& c) { return m.render(c); };
          r.first_failure = "u=" + V.label(u) + " v=" + V.label(v) + " w=" + m.label(w) +
                            ": product side " + lhs.render(text) + ", iterate side " + rhs.render(text);
        }
      }
  return r;
}

ModulePoly vanishing_series(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                            const GradedVector& w, long q, long l, VanishingForm form) {
  ModulePoly out;
  if (u.is_zero() || v.is_zero() || w.is_zero()) return out;
  const long b = -1 - q;
  const long D = m.degree_cutoff(), N = m.algebra().weight_cutoff();
  long a_lo = l - b - (top_grade(u) + top_grade(v) + top_grade(w));
  long a_hi = D + l - b - (bottom_grade(u) + bottom_grade(v) + bottom_grade(w));
  if (form == VanishingForm::Iterate) a_hi = std::min(a_hi, N - top_grade(u) - top_grade(v));
  for (long a = a_lo; a <= a_hi; ++a) {
    GradedVector c = form == VanishingForm::Product ? product_coefficient(m, u, v, w, l, a, b)
                                                    : iterate_coefficient(m, u, v, w, l, a, b);
    out.add_term(Monomial::var("x0", a), c);
  }
  return out;
}

bool check_vanishing_residues(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                              const GradedVector& w, long q, long l, long k, VanishingForm form) {
  if (q < k) throw std::invalid_argument("vanishing residues need q >= k");
  return vanishing_series(m, u, v, w, q, l, form).is_zero_poly();
}

GradedVector shifted_iterate_residue(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                     const GradedVector& w, long p, long q, long i, long l) {
  return iterate_coefficient(m, u, v, w, l, -1 - (p - l - i), -1 - (q + i));
}

GradedVector weighted_iterate_component(const CandidateModule& m, const GradedVector& u, const GradedVector& v,
                                        const GradedVector& w, long K, long mm) {
  GradedVector out;
  if (u.is_zero() || v.is_zero() || w.is_zero()) return out;
  require_homogeneous(u, "u");
  require_homogeneous(v, "v");
  require_homogeneous(w, "w");
  const long wu = u.grade(), wv = v.grade(), L = wu + w.grade();
  const VertexAlgebra& V = m.algebra();
  for (long j = 0; j <= L; ++j) {
    GradedVector uv = V.component(u, j + mm, v);
    if (uv.is_zero()) continue;
    out.add_scaled(m.action(uv, K + wu + wv - j - mm - 2, w), binomial(L, j));
  }
  return out;
}

std::vector<std::pair<long, long>> nonvanishing_box(const CandidateModule& m, const GradedVector& u,
                                                    const GradedVector& v, const GradedVector& w) {
  std::vector<std::pair<long, long>> out;
  if (u.is_zero() || v.is_zero() || w.is_zero()) return out;
  require_homogeneous(u, "u");
  require_homogeneous(v, "v");
  require_homogeneous(w, "w");
  const long wu = u.grade(), wv = v.grade(), dw = w.grade(), D = m.degree_cutoff();
  for (long q = wv + dw - 1; wv + dw - q - 1 <= D; --q) {
    const long d1 = wv + dw - q - 1;
    for (long p = wu + d1 - 1; wu + d1 - p - 1 <= D; --p) out.emplace_back(p, q);
  }
  return out;
}

}  // namespace voxcalc
