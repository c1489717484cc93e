#include "voxcalc/backends.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace voxcalc::backends {

long size_of(const Partition& p) { return std::accumulate(p.begin(), p.end(), 0L); }

namespace {

void partitions_into(long n, int max_part, int min_part, Partition& prefix, std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(prefix);
    return;
  }
  for (long part = std::min<long>(n, max_part); part >= min_part; --part) {
    prefix.push_back(static_cast<int>(part));
    partitions_into(n - part, static_cast<int>(part), min_part, prefix, out);
    prefix.pop_back();
  }
}

Partition insert_part(const Partition& p, int part) {
  Partition q = p;
  q.insert(std::upper_bound(q.begin(), q.end(), part, std::greater<int>()), part);
  return q;
}

int parity_sign(long k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace

std::vector<Partition> partitions(long n, int min_part) {
  std::vector<Partition> out;
  if (n < 0) return out;
  Partition prefix;
  partitions_into(n, static_cast<int>(n), min_part, prefix, out);
  return out;
}

void add_into(StateVector& target, const StateVector& source, const Rational& factor) {
  if (factor == 0) return;
  for (const auto& [p, c] : source) {
    auto [it, inserted] = target.try_emplace(p, 0);
    it->second += factor * c;
    if (it->second == 0) target.erase(it);
  }
}

// ---------------------------------------------------------------------------

const std::vector<Partition>& PartitionBasis::level(long weight) const {
  {
    std::shared_lock lock(mutex_);
    auto it = levels_.find(weight);
    if (it != levels_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  auto it = levels_.find(weight);
  if (it != levels_.end()) return it->second;
  auto parts = partitions(weight, min_part_);
  for (std::size_t i = 0; i < parts.size(); ++i) index_.emplace(parts[i], static_cast<std::uint32_t>(i));
  return levels_.emplace(weight, std::move(parts)).first->second;
}

std::size_t PartitionBasis::dim(long weight) const { return weight < 0 ? 0 : level(weight).size(); }

const Partition& PartitionBasis::at(long weight, std::size_t index) const {
  const auto& lv = level(weight);
  if (index >= lv.size()) throw std::out_of_range("basis index out of range");
  return lv[index];
}

std::uint32_t PartitionBasis::index_of(const Partition& p) const {
  level(size_of(p));
  std::shared_lock lock(mutex_);
  auto it = index_.find(p);
  if (it == index_.end()) throw std::out_of_range("partition is not a basis label");
  return it->second;
}

// ---------------------------------------------------------------------------

ModeEngine::ModeEngine(int generator_weight, GeneratorMode generator_mode)
    : weight_(generator_weight), mode_(std::move(generator_mode)) {}

std::size_t ModeEngine::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<long>()(k.n);
  for (int x : k.u) h = h * 1000003u ^ static_cast<std::size_t>(x);
  h = h * 31u + 7u;
  for (int x : k.v) h = h * 1000003u ^ static_cast<std::size_t>(x);
  return h;
}

StateVector ModeEngine::generator(long k, const StateVector& v) const {
  StateVector out;
  for (const auto& [p, c] : v) add_into(out, mode_(k, p), c);
  return out;
}

StateVector ModeEngine::component(const Partition& u, long n, const StateVector& v) const {
  StateVector out;
  for (const auto& [p, c] : v) add_into(out, component(u, n, p), c);
  return out;
}

StateVector ModeEngine::component(const Partition& u, long n, const Partition& v) const {
  if (u.empty()) {
    StateVector out;
    if (n == -1) out.emplace(v, 1);
    return out;
  }
  const long wu = size_of(u), wv = size_of(v);
  if (wu + wv - n - 1 < 0) return {};

  Key key{u, n, v};
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }

  const Partition rest(u.begin() + 1, u.end());
  const long wr = size_of(rest);
  const long k = weight_ - 1 - u.front();
  const long last = std::max(wr + wv - n - 1, static_cast<long>(weight_) + wv - 1);
  StateVector out;
  for (long j = 0; j <= last; ++j) {
    const Rational coef = Rational(parity_sign(j)) * binomial(k, j);
    if (n + j <= wr + wv - 1) add_into(out, generator(k - j, component(rest, n + j, v)), coef);
    if (j <= weight_ + wv - 1) {
      StateVector av = mode_(j, v);
      if (!av.empty()) add_into(out, component(rest, k + n - j, av), -coef * parity_sign(k));
    }
  }

  std::unique_lock lock(mutex_);
  return memo_.emplace(std::move(key), std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Heisenberg

StateVector heisenberg_mode(long m, const Partition& state, const Rational& lambda) {
  StateVector out;
  if (m < 0) {
    out.emplace(insert_part(state, static_cast<int>(-m)), 1);
  } else if (m == 0) {
    if (lambda != 0) out.emplace(state, lambda);
  } else {
    auto count = std::count(state.begin(), state.end(), static_cast<int>(m));
    if (count > 0) {
      Partition q = state;
      q.erase(std::find(q.begin(), q.end(), static_cast<int>(m)));
      out.emplace(std::move(q), Rational(m * count));
    }
  }
  return out;
}

namespace {

std::string heisenberg_label(const Partition& p, const std::string& tail) {
  if (p.empty()) return tail;
  std::string out;
  for (int part : p) out += "alpha(-" + std::to_string(part) + ")";
  return out + tail;
}

}  // namespace

HeisenbergAlgebra::HeisenbergAlgebra(long weight_cutoff)
    : cutoff_(weight_cutoff),
      engine_(1, [](long k, const Partition& s) { return heisenberg_mode(k, s, Rational(0)); }) {
  if (cutoff_ < 0) throw std::invalid_argument("weight cutoff must be nonnegative");
}

std::size_t HeisenbergAlgebra::dim(long weight) const {
  if (weight > cutoff_)
    throw CutoffExceeded("weight " + std::to_string(weight) + " above heisenberg cutoff " + std::to_string(cutoff_));
  return basis_.dim(weight);
}

std::string HeisenbergAlgebra::label(const BasisKey& key) const {
  return heisenberg_label(basis_.at(key.grade, key.index), "1");
}

GradedVector HeisenbergAlgebra::from_state(const StateVector& s) const {
  GradedVector out;
  for (const auto& [p, c] : s) {
    long w = size_of(p);
    if (w > cutoff_)
      throw CutoffExceeded("heisenberg result of weight " + std::to_string(w) + " above cutoff " +
                           std::to_string(cutoff_));
    out.add({w, basis_.index_of(p)}, c);
  }
  return out;
}

StateVector HeisenbergAlgebra::to_state(const GradedVector& v) const {
  StateVector out;
  for (const auto& [k, c] : v.entries()) out.emplace(basis_.at(k.grade, k.index), c);
  return out;
}

GradedVector HeisenbergAlgebra::state(const Partition& p) const {
  StateVector s;
  s.emplace(p, 1);
  return from_state(s);
}

GradedVector HeisenbergAlgebra::component_basis(const BasisKey& u, long n, const BasisKey& v) const {
  dim(u.grade);
  dim(v.grade);
  return from_state(engine_.component(basis_.at(u.grade, u.index), n, basis_.at(v.grade, v.index)));
}

GradedVector HeisenbergAlgebra::annihilator_action(long m, const GradedVector& v) const {
  if (m < 1) throw std::invalid_argument("annihilator_action needs m >= 1");
  StateVector out;
  for (const auto& [p, c] : to_state(v)) add_into(out, heisenberg_mode(m, p, Rational(0)), c);
  return from_state(out);
}

FockModule::FockModule(std::shared_ptr<const HeisenbergAlgebra> algebra, Rational lambda, long degree_cutoff)
    : algebra_(std::move(algebra)),
      lambda_(std::move(lambda)),
      cutoff_(degree_cutoff),
      engine_(1, [l = lambda_](long k, const Partition& s) { return heisenberg_mode(k, s, l); }) {}

std::size_t FockModule::dim(long degree) const {
  if (degree > cutoff_)
    throw CutoffExceeded("degree " + std::to_string(degree) + " above fock cutoff " + std::to_string(cutoff_));
  return algebra_->basis().dim(degree);
}

std::string FockModule::label(const BasisKey& key) const {
  return heisenberg_label(algebra_->basis().at(key.grade, key.index), "w");
}

GradedVector FockModule::state(const Partition& p) const {
  return GradedVector::basis(size_of(p), algebra_->basis().index_of(p));
}

GradedVector FockModule::action_basis(const BasisKey& u, long n, const BasisKey& w) const {
  algebra_->dim(u.grade);
  dim(w.grade);
  const long target = u.grade + w.grade - n - 1;
  if (target > cutoff_)
    throw CutoffExceeded("fock action lands in degree " + std::to_string(target) + " above cutoff " +
                         std::to_string(cutoff_));
  const auto& basis = algebra_->basis();
  StateVector s = engine_.component(basis.at(u.grade, u.index), n, basis.at(w.grade, w.index));
  GradedVector out;
  for (const auto& [p, c] : s) out.add({size_of(p), basis.index_of(p)}, c);
  return out;
}

// ---------------------------------------------------------------------------
// Virasoro

#ifdef VOXCALC_WITH_VIRASORO

VirasoroAlgebra::VirasoroAlgebra(Rational central_charge, long weight_cutoff)
    : c_(std::move(central_charge)),
      cutoff_(weight_cutoff),
      engine_(2, [this](long k, const Partition& s) { return virasoro_mode(k - 1, s); }) {}

StateVector VirasoroAlgebra::virasoro_mode(long m, const Partition& state) const {
  StateVector out;
  if (state.empty()) {
    if (m <= -2) out.emplace(Partition{static_cast<int>(-m)}, 1);
    return out;
  }
  if (m < 0 && -m >= state.front()) {
    Partition q = state;
    q.insert(q.begin(), static_cast<int>(-m));
    out.emplace(std::move(q), 1);
    return out;
  }
  auto key = std::make_pair(m, state);
  {
    std::shared_lock lock(mutex_);
    auto it = mode_memo_.find(key);
    if (it != mode_memo_.end()) return it->second;
  }
  // L(m) L(-n) rest = L(-n) L(m) rest + (m + n) L(m - n) rest + c/12 (m^3 - m) delta_{m,n} rest
  const int n = state.front();
  const Partition rest(state.begin() + 1, state.end());
  StateVector inner = virasoro_mode(m, rest);
  for (const auto& [p, c] : inner) add_into(out, virasoro_mode(-n, p), c);
  if (m + n != 0) add_into(out, virasoro_mode(m - n, rest), Rational(m + n));
  if (m == n) {
    StateVector r;
    r.emplace(rest, 1);
    add_into(out, r, c_ * ratio(m * m * m - m, 12));
  }
  std::unique_lock lock(mutex_);
  return mode_memo_.emplace(std::move(key), std::move(out)).first->second;
}

std::size_t VirasoroAlgebra::dim(long weight) const {
  if (weight > cutoff_)
    throw CutoffExceeded("weight " + std::to_string(weight) + " above virasoro cutoff " + std::to_string(cutoff_));
  return basis_.dim(weight);
}

std::string VirasoroAlgebra::label(const BasisKey& key) const {
  const auto& p = basis_.at(key.grade, key.index);
  if (p.empty()) return "1";
  std::string out;
  for (int part : p) out += "L(-" + std::to_string(part) + ")";
  return out + "1";
}

GradedVector VirasoroAlgebra::component_basis(const BasisKey& u, long n, const BasisKey& v) const {
  dim(u.grade);
  dim(v.grade);
  StateVector s = engine_.component(basis_.at(u.grade, u.index), n, basis_.at(v.grade, v.index));
  GradedVector out;
  for (const auto& [p, c] : s) {
    long w = size_of(p);
    if (w > cutoff_)
      throw CutoffExceeded("virasoro result of weight " + std::to_string(w) + " above cutoff");
    out.add({w, basis_.index_of(p)}, c);
  }
  return out;
}

#endif

std::shared_ptr<const VertexAlgebra> make_algebra(const std::string& spec, long weight_cutoff) {
  if (spec == "heisenberg") return std::make_shared<HeisenbergAlgebra>(weight_cutoff);
  const std::string prefix = "virasoro:c=";
  if (spec.rfind(prefix, 0) == 0) {
#ifdef VOXCALC_WITH_VIRASORO
    return std::make_shared<VirasoroAlgebra>(parse_rational(spec.substr(prefix.size())), weight_cutoff);
#else
    throw std::invalid_argument("virasoro backend disabled in this build");
#endif
  }
  throw std::invalid_argument("unknown backend '" + spec + "' (expected heisenberg or virasoro:c=<rational>)");
}

}  // namespace voxcalc::backends
