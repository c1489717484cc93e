#include "voxcalc/graded_vector.hpp"

#include <stdexcept>

namespace voxcalc {

GradedVector GradedVector::basis(long grade, std::uint32_t index, const Rational& c) {
  GradedVector v;
  v.add({grade, index}, c);
  return v;
}

void GradedVector::add(const BasisKey& key, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = entries_.try_emplace(key, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) entries_.erase(it);
}

void GradedVector::add_scaled(const GradedVector& other, const Rational& c) {
  if (c == 0) return;
  for (const auto& [key, value] : other.entries_) add(key, c * value);
}

Rational GradedVector::coefficient(const BasisKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? Rational(0) : it->second;
}

std::set<long> GradedVector::grades() const {
  std::set<long> out;
  for (const auto& entry : entries_) out.insert(entry.first.grade);
  return out;
}

long GradedVector::grade() const {
  auto g = grades();
  if (g.size() != 1) throw std::logic_error("grade() requires a nonzero homogeneous vector");
  return *g.begin();
}

GradedVector GradedVector::component(long grade) const {
  GradedVector out;
  for (const auto& [key, value] : entries_)
    if (key.grade == grade) out.entries_.emplace(key, value);
  return out;
}

GradedVector GradedVector::operator+(const GradedVector& o) const {
  GradedVector out = *this;
  out.add_scaled(o, 1);
  return out;
}

GradedVector GradedVector::operator-(const GradedVector& o) const {
  GradedVector out = *this;
  out.add_scaled(o, -1);
  return out;
}

GradedVector GradedVector::operator-() const {
  GradedVector out;
  out.add_scaled(*this, -1);
  return out;
}

GradedVector operator*(const Rational& c, const GradedVector& v) {
  GradedVector out;
  out.add_scaled(v, c);
  return out;
}

std::string GradedVector::render(const std::function<std::string(const BasisKey&)>& label) const {
  if (entries_.empty()) return "0";
  std::string out;
  for (const auto& [key, value] : entries_) {
    if (!out.empty()) out += " + ";
    out += to_short_string(value) + "*[" + label(key) + "]";
  }
  return out;
}

}  // namespace voxcalc
