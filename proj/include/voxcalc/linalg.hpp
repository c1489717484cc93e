#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voxcalc/rational.hpp"

namespace voxcalc::linalg {

/// Sparse rational vector: column index -> nonzero entry.
using SparseVector = std::map<std::size_t, Rational>;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adds `factor * source` into `target`, dropping entries that cancel.
void axpy(SparseVector& target, const Rational& factor, const SparseVector& source);
void scale(SparseVector& v, const Rational& factor);
SparseVector dense_to_sparse(const std::vector<Rational>& dense);
std::vector<Rational> sparse_to_dense(const SparseVector& v, std::size_t dim);

class SparseMatrix {
 public:
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  static SparseMatrix from_dense(const std::vector<std::vector<Rational>>& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  /// Stores `value` at (row, col); a zero value erases the entry.
  void set(std::size_t row, std::size_t col, const Rational& value);
  Rational at(std::size_t row, std::size_t col) const;
  SparseVector row(std::size_t r) const;
  const std::map<std::pair<std::size_t, std::size_t>, Rational>& entries() const { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::map<std::pair<std::size_t, std::size_t>, Rational> entries_;
};

/// Row-reduced echelon basis of a subspace of Q^ambient_dim.
/// Each vector has leading entry 1 at its pivot column, and pivot columns
/// vanish in every other vector. Vectors are ordered by pivot.
struct SubspaceBasis {
  std::size_t ambient_dim = 0;
  std::vector<SparseVector> vectors;
  std::vector<std::size_t> pivot_cols;

  std::size_t rank() const { return vectors.size(); }
  bool contains(const SparseVector& v) const;
  friend bool operator==(const SubspaceBasis&, const SubspaceBasis&) = default;
};

/// Incremental reduced row echelon form. Pivots are the smallest column of a
/// row, so callers control elimination order through their column numbering.
class RowSpace {
 public:
  explicit RowSpace(std::size_t ambient_dim) : ambient_dim_(ambient_dim) {}

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t rank() const { return rows_.size(); }

  /// Reduces v against the stored rows; the result has no pivot columns.
  SparseVector reduce(SparseVector v) const;
  /// Inserts v; returns true iff the rank grew.
  bool insert(const SparseVector& v);
  /// Inserts v and returns its residual after reduction (empty if v was
  /// already in the span).
  SparseVector insert_residual(const SparseVector& v);
  bool contains(const SparseVector& v) const { return reduce(v).empty(); }
  bool is_pivot(std::size_t col) const { return rows_.count(col) != 0; }
  const std::map<std::size_t, SparseVector>& rows() const { return rows_; }

  SubspaceBasis basis() const;

 private:
  void check_dims(const SparseVector& v) const;

  std::size_t ambient_dim_;
  std::map<std::size_t, SparseVector> rows_;
  // column -> pivots of rows that carry a nonzero entry in that column
  std::map<std::size_t, std::vector<std::size_t>> column_users_;
};

/// Row space of m in reduced row-echelon form. Uses fraction-free elimination
/// on integer-scaled rows followed by back-substitution.
SubspaceBasis rref(const SparseMatrix& m);
SubspaceBasis rref(std::size_t ambient_dim, const std::vector<SparseVector>& rows);

/// Canonical representative of v + span(relations): v with every pivot
/// column eliminated. Equal outputs iff the inputs are congruent.
SparseVector quotient_coordinates(std::size_t ambient_dim, const SubspaceBasis& relations,
                                  const SparseVector& v);

/// Basis of { v in span(relations) : supp(v) within keep_cols }, written in the
/// coordinates of keep_cols (position i <-> keep_cols[i], sorted ascending).
SubspaceBasis intersect_with_coordinate_subspace(const SubspaceBasis& relations,
                                                 std::vector<std::size_t> keep_cols);

/// Kernel of m (vectors x with m x = 0), as an rref basis in Q^cols.
SubspaceBasis kernel(const SparseMatrix& m);

std::string render(const SparseVector& v);

}  // namespace voxcalc::linalg
