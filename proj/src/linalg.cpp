#include "voxcalc/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace voxcalc::linalg {

void axpy(SparseVector& target, const Rational& factor, const SparseVector& source) {
  if (factor == 0) return;
  for (const auto& [col, value] : source) {
    auto [it, inserted] = target.try_emplace(col, 0);
    it->second += factor * value;
    if (it->second == 0) target.erase(it);
  }
}

void scale(SparseVector& v, const Rational& factor) {
  if (factor == 0) {
    v.clear();
    return;
  }
  for (auto& entry : v) entry.second *= factor;
}

SparseVector dense_to_sparse(const std::vector<Rational>& dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0) v.emplace(i, dense[i]);
  return v;
}

std::vector<Rational> sparse_to_dense(const SparseVector& v, std::size_t dim) {
  std::vector<Rational> out(dim, Rational(0));
  for (const auto& [col, value] : v) {
    if (col >= dim) throw DimensionMismatch("sparse vector exceeds dimension");
    out[col] = value;
  }
  return out;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<Rational>>& dense) {
  std::size_t cols = dense.empty() ? 0 : dense.front().size();
  SparseMatrix m(dense.size(), cols);
  for (std::size_t r = 0; r < dense.size(); ++r) {
    if (dense[r].size() != cols) throw DimensionMismatch("ragged dense matrix");
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, dense[r][c]);
  }
  return m;
}

void SparseMatrix::set(std::size_t row, std::size_t col, const Rational& value) {
  if (row >= rows_ || col >= cols_) throw DimensionMismatch("matrix index out of bounds");
  if (value == 0)
    entries_.erase({row, col});
  else
    entries_[{row, col}] = value;
}

Rational SparseMatrix::at(std::size_t row, std::size_t col) const {
  auto it = entries_.find({row, col});
  return it == entries_.end() ? Rational(0) : it->second;
}

SparseVector SparseMatrix::row(std::size_t r) const {
  SparseVector v;
  for (auto it = entries_.lower_bound({r, 0}); it != entries_.end() && it->first.first == r; ++it)
    v.emplace(it->first.second, it->second);
  return v;
}

bool SubspaceBasis::contains(const SparseVector& v) const {
  return quotient_coordinates(ambient_dim, *this, v).empty();
}

// ---------------------------------------------------------------------------
// RowSpace

void RowSpace::check_dims(const SparseVector& v) const {
  if (!v.empty() && v.rbegin()->first >= ambient_dim_)
    throw DimensionMismatch("vector index " + std::to_string(v.rbegin()->first) +
                            " outside ambient dimension " + std::to_string(ambient_dim_));
}

SparseVector RowSpace::reduce(SparseVector v) const {
  check_dims(v);
  std::vector<std::pair<std::size_t, Rational>> hits;
  for (const auto& [col, value] : v)
    if (rows_.count(col)) hits.emplace_back(col, value);
  // Stored rows carry no foreign pivot columns, so one pass suffices.
  for (const auto& [col, value] : hits) axpy(v, -value, rows_.at(col));
  return v;
}

bool RowSpace::insert(const SparseVector& input) { return !insert_residual(input).empty(); }

SparseVector RowSpace::insert_residual(const SparseVector& input) {
  SparseVector v = reduce(input);
  if (v.empty()) return v;
  SparseVector residual = v;
  const std::size_t pivot = v.begin()->first;
  scale(v, 1 / Rational(v.begin()->second));

  auto users = column_users_.find(pivot);
  if (users != column_users_.end()) {
    std::vector<std::size_t> owners = users->second;
    for (std::size_t owner : owners) {
      SparseVector& row = rows_.at(owner);
      auto hit = row.find(pivot);
      if (hit == row.end()) continue;
      Rational factor = -hit->second;
      for (const auto& [col, value] : v) {
        auto [it, inserted] = row.try_emplace(col, 0);
        it->second += factor * value;
        if (it->second == 0) {
          row.erase(it);
        } else if (inserted) {
          column_users_[col].push_back(owner);
        }
      }
    }
    column_users_.erase(pivot);
  }
  for (const auto& entry : v)
    if (entry.first != pivot) column_users_[entry.first].push_back(pivot);
  rows_.emplace(pivot, std::move(v));
  return residual;
}

SubspaceBasis RowSpace::basis() const {
  SubspaceBasis b;
  b.ambient_dim = ambient_dim_;
  for (const auto& [pivot, row] : rows_) {
    b.pivot_cols.push_back(pivot);
    b.vectors.push_back(row);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Batch elimination

namespace {

using IntRow = std::map<std::size_t, Integer>;

IntRow to_primitive_integer_row(const SparseVector& v) {
  Integer lcm = 1;
  for (const auto& entry : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), entry.second.get_den_mpz_t());
  IntRow row;
  Integer content = 0;
  for (const auto& [col, value] : v) {
    Integer x = value.get_num() * (lcm / value.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), x.get_mpz_t());
    row.emplace(col, x);
  }
  if (content > 1)
    for (auto& entry : row) entry.second /= content;
  return row;
}

void make_primitive(IntRow& row) {
  Integer content = 0;
  for (const auto& entry : row) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), entry.second.get_mpz_t());
  if (content > 1)
    for (auto& entry : row) entry.second /= content;
}

}  // namespace

SubspaceBasis rref(std::size_t ambient_dim, const std::vector<SparseVector>& rows) {
  // Forward pass: integer rows, row_i <- p * row_i - a * pivot_row, content removed.
  std::map<std::size_t, IntRow> echelon;
  for (const auto& input : rows) {
    if (!input.empty() && input.rbegin()->first >= ambient_dim)
      throw DimensionMismatch("row exceeds ambient dimension");
    IntRow row = to_primitive_integer_row(input);
    while (!row.empty()) {
      auto lead = row.begin();
      auto found = echelon.find(lead->first);
      if (found == echelon.end()) break;
      const Integer p = found->second.begin()->second;
      const Integer a = lead->second;
      for (auto& entry : row) entry.second *= p;
      for (const auto& [col, value] : found->second) {
        auto [it, inserted] = row.try_emplace(col, 0);
        it->second -= a * value;
        if (it->second == 0) row.erase(it);
      }
      make_primitive(row);
    }
    if (!row.empty()) echelon.emplace(row.begin()->first, std::move(row));
  }

  // Back-substitution in rationals, from the last pivot upwards.
  std::map<std::size_t, SparseVector> reduced;
  for (auto it = echelon.rbegin(); it != echelon.rend(); ++it) {
    SparseVector v;
    const Integer& lead = it->second.begin()->second;
    for (const auto& [col, value] : it->second) v.emplace(col, ratio(value, lead));
    std::vector<std::pair<std::size_t, Rational>> hits;
    for (const auto& [col, value] : v)
      if (col != it->first && reduced.count(col)) hits.emplace_back(col, value);
    for (const auto& [col, value] : hits) axpy(v, -value, reduced.at(col));
    reduced.emplace(it->first, std::move(v));
  }

  SubspaceBasis b;
  b.ambient_dim = ambient_dim;
  for (auto& [pivot, v] : reduced) {
    b.pivot_cols.push_back(pivot);
    b.vectors.push_back(std::move(v));
  }
  return b;
}

SubspaceBasis rref(const SparseMatrix& m) {
  std::vector<SparseVector> rows;
  rows.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rref(m.cols(), rows);
}

SparseVector quotient_coordinates(std::size_t ambient_dim, const SubspaceBasis& relations,
                                  const SparseVector& v) {
  if (relations.ambient_dim != ambient_dim)
    throw DimensionMismatch("relations live in a different ambient space");
  if (!v.empty() && v.rbegin()->first >= ambient_dim)
    throw DimensionMismatch("vector exceeds ambient dimension");
  SparseVector out = v;
  for (std::size_t i = 0; i < relations.vectors.size(); ++i) {
    auto hit = v.find(relations.pivot_cols[i]);
    if (hit != v.end()) axpy(out, -hit->second, relations.vectors[i]);
  }
  return out;
}

SubspaceBasis intersect_with_coordinate_subspace(const SubspaceBasis& relations,
                                                 std::vector<std::size_t> keep_cols) {
  std::sort(keep_cols.begin(), keep_cols.end());
  keep_cols.erase(std::unique(keep_cols.begin(), keep_cols.end()), keep_cols.end());
  std::vector<bool> kept(relations.ambient_dim, false);
  for (std::size_t c : keep_cols) {
    if (c >= relations.ambient_dim) throw DimensionMismatch("keep column outside ambient space");
    kept[c] = true;
  }
  // Renumber so every dropped column precedes every kept one; rows whose
  // pivot lands among the kept columns are then supported on them.
  std::vector<std::size_t> position(relations.ambient_dim);
  std::size_t next = 0;
  for (std::size_t c = 0; c < relations.ambient_dim; ++c)
    if (!kept[c]) position[c] = next++;
  const std::size_t dropped = next;
  for (std::size_t c : keep_cols) position[c] = next++;

  std::vector<SparseVector> permuted;
  for (const auto& v : relations.vectors) {
    SparseVector p;
    for (const auto& [col, value] : v) p.emplace(position[col], value);
    permuted.push_back(std::move(p));
  }
  SubspaceBasis reordered = rref(relations.ambient_dim, permuted);

  std::vector<SparseVector> kept_rows;
  for (std::size_t i = 0; i < reordered.vectors.size(); ++i) {
    if (reordered.pivot_cols[i] < dropped) continue;
    SparseVector local;
    for (const auto& [col, value] : reordered.vectors[i]) local.emplace(col - dropped, value);
    kept_rows.push_back(std::move(local));
  }
  return rref(keep_cols.size(), kept_rows);
}

SubspaceBasis kernel(const SparseMatrix& m) {
  SubspaceBasis rows = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t p : rows.pivot_cols) is_pivot[p] = true;
  std::vector<SparseVector> generators;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    SparseVector x;
    x.emplace(free, 1);
    for (std::size_t i = 0; i < rows.vectors.size(); ++i) {
      auto hit = rows.vectors[i].find(free);
      if (hit != rows.vectors[i].end()) x.emplace(rows.pivot_cols[i], -hit->second);
    }
    generators.push_back(std::move(x));
  }
  return rref(m.cols(), generators);
}

std::string render(const SparseVector& v) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const auto& [col, value] : v) {
    if (!first) out << ", ";
    first = false;
    out << col << ": " << to_short_string(value);
  }
  out << '}';
  return out.str();
}

}  // namespace voxcalc::linalg
