#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "voxcalc/rational.hpp"

namespace voxcalc {

/// Address of a basis element: its weight (or degree) and its index in the
/// ordered basis of that graded piece.
struct BasisKey {
  long grade = 0;
  std::uint32_t index = 0;
  friend auto operator<=>(const BasisKey&, const BasisKey&) = default;
};

/// Finite rational combination of basis elements of a graded space.
class GradedVector {
 public:
  using Entries = std::map<BasisKey, Rational>;

  GradedVector() = default;
  static GradedVector basis(long grade, std::uint32_t index, const Rational& c = Rational(1));

  void add(const BasisKey& key, const Rational& c);
  void add_scaled(const GradedVector& other, const Rational& c);

  const Entries& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  Rational coefficient(const BasisKey& key) const;

  std::set<long> grades() const;
  bool is_homogeneous() const { return grades().size() <= 1; }
  /// The grade of a nonzero homogeneous vector; throws otherwise.
  long grade() const;
  GradedVector component(long grade) const;

  GradedVector operator+(const GradedVector& o) const;
  GradedVector operator-(const GradedVector& o) const;
  GradedVector operator-() const;
  friend GradedVector operator*(const Rational& c, const GradedVector& v);
  friend bool operator==(const GradedVector&, const GradedVector&) = default;

  /// "coef*[label]" terms joined with " + "; labels supplied by the owner.
  std::string render(const std::function<std::string(const BasisKey&)>& label) const;

 private:
  Entries entries_;
};

inline bool is_zero(const GradedVector& v) { return v.is_zero(); }

}  // namespace voxcalc
