#include "voxcalc/zhu.hpp"

#include <sstream>

namespace voxcalc {

DenseMatrix identity_matrix(std::size_t n) {
  DenseMatrix m = zero_matrix(n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

DenseMatrix zero_matrix(std::size_t n) { return DenseMatrix(n, std::vector<Rational>(n, Rational(0))); }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  DenseMatrix out = zero_matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

DenseMatrix add_scaled(const DenseMatrix& a, const DenseMatrix& b, const Rational& c) {
  DenseMatrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] += c * b[i][j];
  return out;
}

std::vector<Rational> apply(const DenseMatrix& a, const std::vector<Rational>& x) {
  std::vector<Rational> out(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  return out;
}

GradedVector star(const VertexAlgebra& V, const GradedVector& u, const GradedVector& v) {
  GradedVector out;
  for (long wt : u.grades()) {
    GradedVector part = u.component(wt);
    for (long j = 0; j <= wt; ++j) out.add_scaled(V.component(part, j - 1, v), binomial(wt, j));
  }
  return out;
}

std::pair<long, long> ov_support(long wt_u, long wt_v, long n) { return {wt_v - n - 1, wt_u + wt_v - n - 1}; }

std::vector<OvGenerator> ov_generators(const VertexAlgebra& V, long support_bound) {
  std::vector<OvGenerator> out;
  // the top of the support is wt u + wt v - n - 1 >= wt u + wt v + 1
  auto keys = V.basis_up_to(std::max(0L, support_bound - 1));
  for (const auto& ku : keys)
    for (const auto& kv : keys)
      for (long n = -2; ov_support(ku.grade, kv.grade, n).second <= support_bound; --n) {
        OvGenerator g{ku, kv, n, {}};
        GradedVector u = GradedVector::basis(ku.grade, ku.index);
        GradedVector v = GradedVector::basis(kv.grade, kv.index);
        for (long j = 0; j <= ku.grade; ++j) g.value.add_scaled(V.component(u, n + j, v), binomial(ku.grade, j));
        if (!g.value.is_zero()) out.push_back(std::move(g));
      }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<BasisKey> heavy_first_keys(const VertexAlgebra& V, long top) {
  std::vector<BasisKey> keys;
  for (long w = top; w >= 0; --w)
    for (std::size_t i = 0; i < V.dim(w); ++i) keys.push_back({w, static_cast<std::uint32_t>(i)});
  return keys;
}

long top_grade_or_zero(const GradedVector& v) { return v.is_zero() ? 0 : *v.grades().rbegin(); }

std::string render_trace(const std::vector<StabilizationStep>& trace) {
  std::ostringstream out;
  for (const auto& s : trace) out << " [slack " << s.slack << ": dim " << s.quotient_dim << "]";
  return out.str();
}

}  // namespace

ZhuPresentation::ZhuPresentation(std::shared_ptr<const VertexAlgebra> algebra, long cutoff, long slack,
                                 std::vector<StabilizationStep> trace, linalg::SubspaceBasis relations)
    : algebra_(std::move(algebra)),
      cutoff_(cutoff),
      slack_(slack),
      trace_(std::move(trace)),
      keys_(heavy_first_keys(*algebra_, cutoff)),
      relations_(std::move(relations)) {
  for (std::size_t c = 0; c < keys_.size(); ++c) columns_.emplace(keys_[c], c);
  if (relations_.ambient_dim != keys_.size()) throw linalg::DimensionMismatch("relations do not match V_{<=N}");
  std::vector<bool> pivot(keys_.size(), false);
  for (auto p : relations_.pivot_cols) pivot[p] = true;
  for (std::size_t c = 0; c < keys_.size(); ++c)
    if (!pivot[c]) {
      quotient_columns_.push_back(c);
      quotient_keys_.push_back(keys_[c]);
    }
}

std::size_t ZhuPresentation::column(const BasisKey& k) const {
  auto it = columns_.find(k);
  if (it == columns_.end())
    throw CutoffExceeded("weight " + std::to_string(k.grade) + " above the Zhu cutoff " + std::to_string(cutoff_));
  return it->second;
}

GradedVector ZhuPresentation::representative(std::size_t i) const {
  return GradedVector::basis(quotient_keys_.at(i).grade, quotient_keys_.at(i).index);
}

std::string ZhuPresentation::label(std::size_t i) const { return "[" + algebra_->label(quotient_keys_.at(i)) + "]"; }

std::vector<Rational> ZhuPresentation::coordinates(const GradedVector& v) const {
  linalg::SparseVector s;
  for (const auto& [k, c] : v.entries()) s[column(k)] += c;
  auto reduced = linalg::quotient_coordinates(keys_.size(), relations_, s);
  std::vector<Rational> out(quotient_columns_.size(), Rational(0));
  for (std::size_t i = 0; i < quotient_columns_.size(); ++i) {
    auto it = reduced.find(quotient_columns_[i]);
    if (it != reduced.end()) out[i] = it->second;
  }
  return out;
}

GradedVector ZhuPresentation::canonical(const GradedVector& v) const {
  auto c = coordinates(v);
  GradedVector out;
  for (std::size_t i = 0; i < c.size(); ++i) out.add(quotient_keys_[i], c[i]);
  return out;
}

bool ZhuPresentation::equivalent(const GradedVector& a, const GradedVector& b) const {
  return coordinates(a - b) == std::vector<Rational>(dim(), Rational(0));
}

std::optional<std::vector<Rational>> ZhuPresentation::structure_constants(std::size_t i, std::size_t j) const {
  if (quotient_keys_.at(i).grade + quotient_keys_.at(j).grade > cutoff_) return std::nullopt;
  return coordinates(star(*algebra_, representative(i), representative(j)));
}

std::shared_ptr<const ZhuPresentation> zhu_quotient(std::shared_ptr<const VertexAlgebra> algebra, long N,
                                                    const ZhuOptions& options) {
  if (N < 0) throw std::invalid_argument("Zhu cutoff must be nonnegative");
  if (options.slack_step <= 0) throw std::invalid_argument("slack step must be positive");
  const VertexAlgebra& V = *algebra;
  std::vector<StabilizationStep> trace;
  std::optional<linalg::SubspaceBasis> previous;
  for (long slack = 0; slack <= options.slack_ceiling; slack += options.slack_step) {
    const long top = N + slack;
    if (top > V.weight_cutoff())
      throw CutoffExceeded("Zhu quotient at N=" + std::to_string(N) + " with slack " + std::to_string(slack) +
                           " needs weight " + std::to_string(top) + " but the algebra stops at " +
                           std::to_string(V.weight_cutoff()));
    auto keys = heavy_first_keys(V, top);
    std::map<BasisKey, std::size_t> col;
    for (std::size_t c = 0; c < keys.size(); ++c) col.emplace(keys[c], c);
    const std::size_t light_start = keys.size() - heavy_first_keys(V, N).size();

    linalg::RowSpace rows(keys.size());
    auto gens = ov_generators(V, top);
    for (const auto& g : gens) {
      linalg::SparseVector s;
      for (const auto& [k, c] : g.value.entries()) s[col.at(k)] += c;
      rows.insert(s);
    }
    linalg::SubspaceBasis light;
    light.ambient_dim = keys.size() - light_start;
    for (const auto& [pivot, row] : rows.rows()) {
      if (pivot < light_start) continue;
      linalg::SparseVector shifted;
      for (const auto& [c, x] : row) shifted.emplace(c - light_start, x);
      light.vectors.push_back(std::move(shifted));
      light.pivot_cols.push_back(pivot - light_start);
    }
    trace.push_back({slack, gens.size(), light.rank(), light.ambient_dim - light.rank()});
    if (previous && previous->rank() == light.rank())
      return std::make_shared<ZhuPresentation>(algebra, N, slack, trace, std::move(light));
    previous = std::move(light);
  }
  throw UnstableAtCutoff("Zhu quotient unstable at cutoff " + std::to_string(N) + ":" + render_trace(trace));
}

// ---------------------------------------------------------------------------

namespace {

/// Dense elimination that remembers how each stored row was built from the
/// inserted vectors.
class TrackedSpan {
 public:
  explicit TrackedSpan(std::size_t dim) : dim_(dim) {}

  /// Reduces x; returns the residual and the combination c with
  /// x = residual + sum c_i inserted_i.
  std::pair<std::vector<Rational>, std::vector<Rational>> reduce(std::vector<Rational> x) const {
    std::vector<Rational> combo(count_, Rational(0));
    for (const auto& [pivot, row] : rows_) {
      if (x[pivot] == 0) continue;
      Rational f = x[pivot];
      for (std::size_t c = 0; c < dim_; ++c) x[c] -= f * row.first[c];
      for (std::size_t i = 0; i < row.second.size(); ++i) combo[i] += f * row.second[i];
    }
    return {x, combo};
  }

  /// Inserts x as inserted vector number count(); returns false (and a
  /// combination of earlier vectors equal to x) if dependent.
  std::optional<std::vector<Rational>> insert(const std::vector<Rational>& x) {
    auto [res, combo] = reduce(x);
    std::size_t pivot = dim_;
    for (std::size_t c = 0; c < dim_; ++c)
      if (res[c] != 0) {
        pivot = c;
        break;
      }
    const std::size_t id = count_++;
    for (auto& [p, row] : rows_) row.second.resize(count_, Rational(0));
    if (pivot == dim_) return combo;
    // res = x - sum combo_i inserted_i
    std::vector<Rational> track(count_, Rational(0));
    for (std::size_t i = 0; i < combo.size(); ++i) track[i] = -combo[i];
    track[id] = 1;
    Rational lead = res[pivot];
    for (auto& r : res) r /= lead;
    for (auto& t : track) t /= lead;
    for (auto& [p, row] : rows_) {
      Rational f = row.first[pivot];
      if (f == 0) continue;
      for (std::size_t c = 0; c < dim_; ++c) row.first[c] -= f * res[c];
      for (std::size_t i = 0; i < count_; ++i) row.second[i] -= f * track[i];
    }
    rows_.emplace(pivot, std::make_pair(res, track));
    return std::nullopt;
  }

  std::size_t rank() const { return rows_.size(); }
  std::size_t count() const { return count_; }

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::map<std::size_t, std::pair<std::vector<Rational>, std::vector<Rational>>> rows_;
};

}  // namespace

AVModule::AVModule(std::shared_ptr<const ZhuPresentation> zhu, std::size_t dim, std::vector<DenseMatrix> images)
    : zhu_(std::move(zhu)), dim_(dim), images_(std::move(images)) {
  if (images_.size() != zhu_->dim()) throw std::invalid_argument("one image per quotient basis element required");
  for (const auto& m : images_) {
    if (m.size() != dim_) throw std::invalid_argument("image matrix has the wrong size");
    for (const auto& row : m)
      if (row.size() != dim_) throw std::invalid_argument("image matrix has the wrong size");
  }
}

AVModule AVModule::from_generator_images(std::shared_ptr<const ZhuPresentation> zhu, std::size_t dim,
                                         const std::vector<std::pair<GradedVector, DenseMatrix>>& images) {
  const VertexAlgebra& V = zhu->algebra();
  const long N = zhu->cutoff();
  struct Word {
    GradedVector value;
    DenseMatrix matrix;
  };
  std::vector<Word> kept;
  TrackedSpan span(zhu->dim());
  std::vector<Word> frontier{{V.vacuum(), identity_matrix(dim)}};
  auto consider = [&](Word w) {
    auto dependent = span.insert(zhu->coordinates(w.value));
    if (!dependent) {
      kept.push_back(w);
      return true;
    }
    DenseMatrix expect = zero_matrix(dim);
    for (std::size_t i = 0; i < kept.size(); ++i)
      if ((*dependent)[i] != 0) expect = add_scaled(expect, kept[i].matrix, (*dependent)[i]);
    if (expect != w.matrix)
      throw std::invalid_argument("generator images are not compatible with the relations of A(V)");
    kept.push_back(w);  // keep indices aligned with the span's inserted vectors
    return false;
  };
  std::vector<Word> next;
  for (auto& w : frontier)
    if (consider(w)) next.push_back(w);
  while (!next.empty()) {
    std::vector<Word> grown;
    for (const auto& w : next)
      for (const auto& [g, m] : images) {
        if (top_grade_or_zero(g) + top_grade_or_zero(w.value) > N) continue;
        Word x{star(V, g, w.value), multiply(m, w.matrix)};
        if (consider(x)) grown.push_back(std::move(x));
      }
    next = std::move(grown);
  }
  if (span.rank() != zhu->dim())
    throw std::invalid_argument("star-words in the given elements do not span A(V) at cutoff " + std::to_string(N));
  std::vector<DenseMatrix> basis_images;
  for (std::size_t b = 0; b < zhu->dim(); ++b) {
    std::vector<Rational> e(zhu->dim(), Rational(0));
    e[b] = 1;
    auto [res, combo] = span.reduce(e);
    DenseMatrix m = zero_matrix(dim);
    for (std::size_t i = 0; i < combo.size(); ++i)
      if (combo[i] != 0) m = add_scaled(m, kept[i].matrix, combo[i]);
    basis_images.push_back(std::move(m));
  }
  return AVModule(std::move(zhu), dim, std::move(basis_images));
}

DenseMatrix AVModule::rho(const GradedVector& u) const {
  auto c = zhu_->coordinates(u);
  DenseMatrix out = zero_matrix(dim_);
  for (std::size_t b = 0; b < c.size(); ++b)
    if (c[b] != 0) out = add_scaled(out, images_[b], c[b]);
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> AVModule::representation_defect() const {
  for (std::size_t i = 0; i < zhu_->dim(); ++i)
    for (std::size_t j = 0; j < zhu_->dim(); ++j) {
      auto sc = zhu_->structure_constants(i, j);
      if (!sc) continue;
      DenseMatrix lhs = zero_matrix(dim_);
      for (std::size_t b = 0; b < sc->size(); ++b)
        if ((*sc)[b] != 0) lhs = add_scaled(lhs, images_[b], (*sc)[b]);
      if (lhs != multiply(images_[i], images_[j])) return std::make_pair(i, j);
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

GradedVector zero_mode(const CandidateModule& W, const GradedVector& u, const GradedVector& w) {
  GradedVector out;
  for (long wt : u.grades()) out.add_scaled(W.action(u.component(wt), wt - 1, w), Rational(1));
  return out;
}

TopLevel top_level(const CandidateModule& W, std::shared_ptr<const ZhuPresentation> zhu, long max_degree) {
  const VertexAlgebra& V = W.algebra();
  const long N = zhu->cutoff();
  auto us = V.basis_up_to(N);
  std::vector<GradedVector> basis;
  std::vector<std::pair<long, linalg::SubspaceBasis>> blocks;  // per degree, kernel in W_(d) coordinates
  for (long d = 0; d <= max_degree; ++d) {
    const std::size_t n = W.dim(d);
    if (n == 0) continue;
    std::vector<linalg::SparseVector> rows;
    for (const auto& ku : us)
      for (long target = 0; target < d; ++target) {
        const long mode = ku.grade + d - target - 1;  // lowers degree d -> target
        std::map<std::size_t, linalg::SparseVector> by_output;
        for (std::size_t i = 0; i < n; ++i) {
          GradedVector img = W.action_basis(ku, mode, {d, static_cast<std::uint32_t>(i)});
          for (const auto& [k, c] : img.entries()) by_output[k.index][i] = c;
        }
        for (auto& [o, r] : by_output) rows.push_back(std::move(r));
      }
    linalg::SparseMatrix m(rows.size(), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& [c, x] : rows[r]) m.set(r, c, x);
    linalg::SubspaceBasis ker;
    if (rows.empty()) {
      ker.ambient_dim = n;
      for (std::size_t i = 0; i < n; ++i) {
        ker.vectors.push_back({{i, Rational(1)}});
        ker.pivot_cols.push_back(i);
      }
    } else {
      ker = linalg::kernel(m);
    }
    for (const auto& v : ker.vectors) {
      GradedVector g;
      for (const auto& [c, x] : v) g.add({d, static_cast<std::uint32_t>(c)}, x);
      basis.push_back(std::move(g));
    }
    blocks.emplace_back(d, std::move(ker));
  }

  // coordinates of a vector of T(W) in `basis`, read off at pivot columns
  auto coords = [&](const GradedVector& x) {
    std::vector<Rational> out(basis.size(), Rational(0));
    std::size_t offset = 0;
    GradedVector rebuilt;
    for (const auto& [d, ker] : blocks) {
      for (std::size_t r = 0; r < ker.rank(); ++r) {
        Rational c = x.coefficient({d, static_cast<std::uint32_t>(ker.pivot_cols[r])});
        out[offset + r] = c;
        rebuilt.add_scaled(basis[offset + r], c);
      }
      offset += ker.rank();
    }
    if (rebuilt != x) throw std::logic_error("zero mode leaves the top level");
    return out;
  };

  std::vector<DenseMatrix> images;
  for (std::size_t b = 0; b < zhu->dim(); ++b) {
    DenseMatrix m = zero_matrix(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      auto col = coords(zero_mode(W, zhu->representative(b), basis[j]));
      for (std::size_t i = 0; i < basis.size(); ++i) m[i][j] = col[i];
    }
    images.push_back(std::move(m));
  }
  std::size_t dim = basis.size();
  return {std::move(basis), AVModule(std::move(zhu), dim, std::move(images))};
}

}  // namespace voxcalc
