#include "voxcalc/module_builder.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace voxcalc {

using linalg::SparseVector;

long FreeWord::degree() const {
  long d = 0;
  for (const auto& [u, m] : letters) d += u.grade - m - 1;
  return d;
}

std::string FreeWord::render(const VertexAlgebra& V) const {
  std::string out;
  for (const auto& [u, m] : letters) out += "[" + V.label(u) + "](" + std::to_string(m) + ")";
  return out + "w" + std::to_string(tail);
}

std::shared_ptr<const ZhuPresentation> cached_zhu_quotient(std::shared_ptr<const VertexAlgebra> algebra, long N) {
  static std::mutex mutex;
  static std::map<std::pair<const VertexAlgebra*, long>, std::shared_ptr<const ZhuPresentation>> cache;
  const auto key = std::make_pair(algebra.get(), N);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto z = zhu_quotient(algebra, N);
  std::lock_guard lock(mutex);
  return cache.emplace(key, z).first->second;
}

AVModule extend_module(const AVModule& M, long cutoff) {
  if (M.zhu().cutoff() >= cutoff) return M;
  auto z = cached_zhu_quotient(M.zhu().algebra_ptr(), cutoff);
  std::vector<std::pair<GradedVector, DenseMatrix>> images;
  for (std::size_t b = 0; b < M.zhu().dim(); ++b)
    images.emplace_back(M.zhu().representative(b), M.basis_images()[b]);
  return AVModule::from_generator_images(z, M.dim(), images);
}

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VOXCALC_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

/// Runs body(i) for i in [0, n) on `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct ActKey {
  std::uint32_t letter;
  long mode;
  long degree;
  std::size_t column;
  bool operator==(const ActKey&) const = default;
};

struct ActKeyHash {
  std::size_t operator()(const ActKey& k) const {
    std::size_t h = k.letter;
    h = h * 1000003u ^ static_cast<std::size_t>(k.mode + 4096);
    h = h * 1000003u ^ static_cast<std::size_t>(k.degree);
    h = h * 1000003u ^ k.column;
    return h;
  }
};

}  // namespace

/// Free length-one words c(s)w of degree 1..D with wt c <= the ambient weight,
/// plus M in degree 0, and the rewriting action on them. Columns of a positive
/// degree are ordered heaviest letter first.
class WordSpace {
 public:
  WordSpace(std::shared_ptr<const VertexAlgebra> V, const AVModule& M, long D, long light, long heavy)
      : V_(std::move(V)), M_(extend_module(M, heavy)), D_(D), light_(light), heavy_(heavy), tails_(M.dim()) {
    if (V_->weight_cutoff() < heavy)
      throw CutoffExceeded("algebra cutoff " + std::to_string(V_->weight_cutoff()) + " below ambient weight " +
                           std::to_string(heavy));
    letters_ = V_->basis_up_to(heavy);
    std::stable_sort(letters_.begin(), letters_.end(), [](const BasisKey& a, const BasisKey& b) {
      return a.grade != b.grade ? a.grade > b.grade : a.index < b.index;
    });
    for (std::size_t i = 0; i < letters_.size(); ++i) letter_index_.emplace(letters_[i], i);
    for (const auto& c : letters_) rho_.push_back(M_.rho(GradedVector::basis(c.grade, c.index)));
  }

  const VertexAlgebra& algebra() const { return *V_; }
  std::shared_ptr<const VertexAlgebra> algebra_ptr() const { return V_; }
  const AVModule& module() const { return M_; }
  long D() const { return D_; }
  long light() const { return light_; }
  long heavy() const { return heavy_; }
  std::size_t tails() const { return tails_; }
  const std::vector<BasisKey>& letters() const { return letters_; }

  std::size_t columns(long d) const { return d == 0 ? tails_ : letters_.size() * tails_; }
  std::size_t column(const BasisKey& c, std::uint32_t tail) const { return letter_index_.at(c) * tails_ + tail; }
  std::optional<std::size_t> letter_index(const BasisKey& c) const {
    auto it = letter_index_.find(c);
    if (it == letter_index_.end()) return std::nullopt;
    return it->second;
  }
  const BasisKey& letter_of(std::size_t col) const { return letters_[col / tails_]; }
  std::uint32_t tail_of(long d, std::size_t col) const {
    return static_cast<std::uint32_t>(d == 0 ? col : col % tails_);
  }
  bool is_light(long d, std::size_t col) const { return d == 0 || letter_of(col).grade <= light_; }

  FreeWord word(long d, std::size_t col) const {
    FreeWord w;
    w.tail = tail_of(d, col);
    if (d > 0) {
      const BasisKey& c = letter_of(col);
      w.letters.emplace_back(c, c.grade - d - 1);
    }
    return w;
  }
  std::string label(long d, std::size_t col) const { return word(d, col).render(*V_); }

  /// Adds coef * (letter)(mode)(tail) to out, a vector of degree wt - mode - 1.
  bool emit(const GradedVector& b, long mode, std::uint32_t tail, const Rational& coef, SparseVector& out) const {
    for (const auto& [key, c] : b.entries()) {
      const long d = key.grade - mode - 1;
      if (d < 0) continue;
      if (d > D_ || key.grade > heavy_) return false;
      if (d == 0) {
        const DenseMatrix& R = rho_[letter_index_.at(key)];
        for (std::size_t k = 0; k < tails_; ++k)
          if (R[k][tail] != 0) linalg::axpy(out, coef * c * R[k][tail], {{k, Rational(1)}});
      } else {
        linalg::axpy(out, coef * c, {{column(key, tail), Rational(1)}});
      }
    }
    return true;
  }

  /// a(r) on one column of degree e. Returns nullptr if the result leaves the cutoffs.
  std::shared_ptr<const SparseVector> act_column(std::size_t a, long r, long e, std::size_t col) const {
    const ActKey key{static_cast<std::uint32_t>(a), r, e, col};
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto value = compute_column(a, r, e, col);
    std::unique_lock lock(mutex_);
    return cache_.emplace(key, std::move(value)).first->second;
  }

  bool act(std::size_t a, long r, long e, const SparseVector& x, SparseVector& out) const {
    const long d = e + letters_[a].grade - r - 1;
    if (d < 0 || x.empty()) return true;
    if (d > D_) return false;
    for (const auto& [col, c] : x) {
      auto y = act_column(a, r, e, col);
      if (!y) return false;
      linalg::axpy(out, c, *y);
    }
    return true;
  }

  /// b(r) x for an arbitrary vector b of V.
  bool act_vector(const GradedVector& b, long r, long e, const SparseVector& x, SparseVector& out) const {
    for (const auto& [key, c] : b.entries()) {
      auto a = letter_index(key);
      if (!a) return false;
      SparseVector part;
      if (!act(*a, r, e, x, part)) return false;
      linalg::axpy(out, c, part);
    }
    return true;
  }

  const DenseMatrix& rho(std::size_t letter) const { return rho_[letter]; }

 private:
  std::shared_ptr<const SparseVector> compute_column(std::size_t ai, long r, long e, std::size_t col) const {
    const BasisKey& a = letters_[ai];
    auto out = std::make_shared<SparseVector>();
    if (e == 0) {
      if (!emit(GradedVector::basis(a.grade, a.index), r, static_cast<std::uint32_t>(col), Rational(1), *out))
        return nullptr;
      return out;
    }
    // a(r) c(s) w = sum_i sum_j C(r - wt a, i) C(wt a, j) (a_{r - wt a - i + j} c)(s + wt a + i - j) w
    const BasisKey& c = letter_of(col);
    const std::uint32_t tail = tail_of(e, col);
    const long s = c.grade - e - 1;
    const bool vacuum = a == BasisKey{0, 0};
    // the heaviest term decides escape before anything is computed
    for (long i = 0; i <= e; ++i) {
      if (binomial(r - a.grade, i) == 0) continue;
      const long k = r - a.grade - i;
      if (a.grade + c.grade - k - 1 > heavy_ && !vacuum) return nullptr;
    }
    for (long i = 0; i <= e; ++i) {
      const Rational b1 = binomial(r - a.grade, i);
      if (b1 == 0) continue;
      for (long j = 0; j <= a.grade; ++j) {
        const long k = r - a.grade - i + j;
        const long weight = a.grade + c.grade - k - 1;
        if (weight < 0 || (vacuum && k != -1)) continue;
        if (weight > heavy_) return nullptr;
        const GradedVector& ac = V_->component_memo(a, k, c);
        if (ac.is_zero()) continue;
        if (!emit(ac, s + a.grade + i - j, tail, b1 * binomial(a.grade, j), *out)) return nullptr;
      }
    }
    return out;
  }

  std::shared_ptr<const VertexAlgebra> V_;
  AVModule M_;
  long D_, light_, heavy_;
  std::size_t tails_;
  std::vector<BasisKey> letters_;
  std::map<BasisKey, std::size_t> letter_index_;
  std::vector<DenseMatrix> rho_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<ActKey, std::shared_ptr<const SparseVector>, ActKeyHash> cache_;
};

namespace {

/// Relation spaces per degree, kept closed under the action of every letter.
class Assembly {
 public:
  Assembly(std::shared_ptr<const WordSpace> ws, unsigned threads) : ws_(std::move(ws)), threads_(threads) {
    for (long d = 0; d <= ws_->D(); ++d) {
      relations_.emplace_back(ws_->columns(d));
      pending_.emplace_back();
    }
  }
  Assembly(std::shared_ptr<const WordSpace> ws, std::vector<linalg::RowSpace> relations, unsigned threads)
      : ws_(std::move(ws)), threads_(threads), relations_(std::move(relations)) {
    pending_.resize(relations_.size());
  }

  void add(long d, const SparseVector& v) {
    ++generators_;
    if (v.empty()) return;
    SparseVector r = relations_[d].insert_residual(v);
    if (!r.empty()) pending_[d].push_back(std::move(r));
  }
  void skip(std::size_t n = 1) { skipped_ += n; }

  /// Image of pending relations under every letter, until nothing new appears.
  void close() {
    const auto& letters = ws_->letters();
    const long D = ws_->D();
    for (;;) {
      long e = -1;
      for (long d = 0; d <= D; ++d)
        if (!pending_[d].empty()) {
          e = d;
          break;
        }
      if (e < 0) return;
      std::vector<SparseVector> batch = std::move(pending_[e]);
      pending_[e].clear();
      // results[b][a * (D+1) + d]
      std::vector<std::vector<std::optional<SparseVector>>> results(batch.size());
      parallel_for(batch.size(), threads_, [&](std::size_t b) {
        auto& row = results[b];
        row.resize(letters.size() * (D + 1));
        for (std::size_t a = 0; a < letters.size(); ++a)
          for (long d = 0; d <= D; ++d) {
            const long r = e + letters[a].grade - 1 - d;
            SparseVector y;
            if (ws_->act(a, r, e, batch[b], y)) row[a * (D + 1) + d] = std::move(y);
          }
      });
      for (auto& row : results)
        for (std::size_t idx = 0; idx < row.size(); ++idx) {
          if (!row[idx]) {
            ++skipped_;
            continue;
          }
          const long d = static_cast<long>(idx % (D + 1));
          if (row[idx]->empty()) continue;
          SparseVector r = relations_[d].insert_residual(*row[idx]);
          if (!r.empty()) pending_[d].push_back(std::move(r));
        }
    }
  }

  /// u(r) rho(b) w - sum_j C(wt u, j) (u_{r - wt u + j} b)(wt b - 1 + wt u - j) w for every
  /// letter pair and positive target degree.
  void add_rewriting_relations() {
    const auto& letters = ws_->letters();
    const VertexAlgebra& V = ws_->algebra();
    const long D = ws_->D();
    const std::size_t L = letters.size(), T = ws_->tails();
    std::vector<std::vector<std::optional<std::pair<long, SparseVector>>>> results(L);
    parallel_for(L, threads_, [&](std::size_t ai) {
      const BasisKey& a = letters[ai];
      auto& out = results[ai];
      for (std::size_t bi = 0; bi < L; ++bi) {
        const BasisKey& b = letters[bi];
        for (std::uint32_t t = 0; t < T; ++t)
          for (long d = 1; d <= D; ++d) {
            const long r = a.grade - 1 - d;
            SparseVector w0;
            const DenseMatrix& R = ws_->rho(bi);
            for (std::size_t k = 0; k < T; ++k)
              if (R[k][t] != 0) w0[k] = R[k][t];
            SparseVector rel;
            bool ok = ws_->act(ai, r, 0, w0, rel);
            for (long j = 0; ok && j <= a.grade; ++j) {
              const long k = r - a.grade + j;
              const long weight = a.grade + b.grade - k - 1;
              if (weight < 0) continue;
              if (weight > ws_->heavy()) {
                ok = false;
                break;
              }
              const GradedVector& ab = V.component_memo(a, k, b);
              ok = ws_->emit(ab, b.grade - 1 + a.grade - j, t, -binomial(a.grade, j), rel);
            }
            if (ok)
              out.emplace_back(std::make_pair(d, std::move(rel)));
            else
              out.emplace_back(std::nullopt);
          }
      }
    });
    for (auto& out : results)
      for (auto& r : out) {
        if (r)
          add(r->first, r->second);
        else
          skip();
      }
  }

  void add_vectors(const std::vector<InjectedRelation>& vs) {
    for (const auto& v : vs) {
      if (v.degree < 0 || v.degree > ws_->D()) throw std::invalid_argument("relation degree outside the truncation");
      add(v.degree, v.vector);
    }
  }

  std::vector<linalg::RowSpace>& relations() { return relations_; }
  std::size_t generators() const { return generators_; }
  std::size_t skipped() const { return skipped_; }

 private:
  std::shared_ptr<const WordSpace> ws_;
  unsigned threads_;
  std::vector<linalg::RowSpace> relations_;
  std::vector<std::vector<SparseVector>> pending_;
  std::size_t generators_ = 0;
  std::size_t skipped_ = 0;
};

BuildStep make_step(const WordSpace& ws, const TruncatedModule& m, std::size_t generators, std::size_t skipped) {
  BuildStep s;
  s.weight_cutoff = ws.light();
  s.ambient_weight_cutoff = ws.heavy();
  s.dims = m.dims();
  s.generators = generators;
  s.skipped = skipped;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

TruncatedModule::TruncatedModule(std::shared_ptr<const WordSpace> words, std::vector<linalg::RowSpace> relations,
                                 Stage stage, std::vector<BuildStep> trace)
    : words_(std::move(words)), relations_(std::move(relations)), stage_(stage), trace_(std::move(trace)) {
  for (long d = 0; d <= words_->D(); ++d) {
    std::vector<std::size_t> basis;
    std::vector<long> pos(words_->columns(d), -1);
    for (std::size_t c = 0; c < words_->columns(d); ++c)
      if (words_->is_light(d, c) && !relations_[d].is_pivot(c)) {
        pos[c] = static_cast<long>(basis.size());
        basis.push_back(c);
      }
    basis_columns_.push_back(std::move(basis));
    column_positions_.push_back(std::move(pos));
  }
}

std::string TruncatedModule::name() const {
  return std::string(stage_ == Stage::S ? "S" : "S1") + "(M) over " + words_->algebra().name() +
         " [D=" + std::to_string(words_->D()) + ", N_V=" + std::to_string(words_->light()) + "]";
}
const VertexAlgebra& TruncatedModule::algebra() const { return words_->algebra(); }
long TruncatedModule::degree_cutoff() const { return words_->D(); }
long TruncatedModule::weight_cutoff() const { return words_->light(); }
long TruncatedModule::ambient_weight_cutoff() const { return words_->heavy(); }
const AVModule& TruncatedModule::top_module() const { return words_->module(); }

std::size_t TruncatedModule::dim(long degree) const {
  if (degree < 0) return 0;
  if (degree > words_->D()) throw CutoffExceeded("degree " + std::to_string(degree) + " above the truncation");
  return basis_columns_[degree].size();
}

std::vector<std::size_t> TruncatedModule::dims() const {
  std::vector<std::size_t> out;
  for (const auto& b : basis_columns_) out.push_back(b.size());
  return out;
}

std::string TruncatedModule::label(const BasisKey& key) const {
  return words_->label(key.grade, basis_columns_.at(key.grade).at(key.index));
}

FreeWord TruncatedModule::basis_word(const BasisKey& key) const {
  return words_->word(key.grade, basis_columns_.at(key.grade).at(key.index));
}

std::vector<std::size_t> TruncatedModule::quotient_columns(long degree) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < words_->columns(degree); ++c)
    if (!relations_[degree].is_pivot(c)) out.push_back(c);
  return out;
}

GradedVector TruncatedModule::reduce(long degree, const SparseVector& v) const {
  GradedVector out;
  for (const auto& [c, x] : relations_.at(degree).reduce(v)) {
    const long p = column_positions_[degree][c];
    if (p < 0)
      throw CutoffExceeded("word " + words_->label(degree, c) + " has no expression in the basis of degree " +
                           std::to_string(degree));
    out.add({degree, static_cast<std::uint32_t>(p)}, x);
  }
  return out;
}

GradedVector TruncatedModule::reduce(const FreeWord& word) const {
  if (word.tail >= words_->tails()) throw std::out_of_range("word tail outside M");
  long e = 0;
  SparseVector x{{word.tail, Rational(1)}};
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    auto a = words_->letter_index(it->first);
    if (!a) throw CutoffExceeded("letter above the ambient weight");
    const long d = e + it->first.grade - it->second - 1;
    if (d < 0) return {};
    SparseVector y;
    if (!words_->act(*a, it->second, e, x, y)) throw CutoffExceeded("rewriting " + word.render(algebra()) +
                                                                    " leaves the cutoffs");
    x = std::move(y);
    e = d;
  }
  return reduce(e, x);
}

GradedVector TruncatedModule::action_basis(const BasisKey& u, long n, const BasisKey& w) const {
  const long d = w.grade + u.grade - n - 1;
  if (d < 0) return {};
  if (d > words_->D()) throw CutoffExceeded("u_n w lands in degree " + std::to_string(d) + " above the truncation");
  auto a = words_->letter_index(u);
  if (!a) throw CutoffExceeded("weight " + std::to_string(u.grade) + " above the ambient weight");
  const std::size_t col = basis_columns_.at(w.grade).at(w.index);
  auto y = words_->act_column(*a, n, w.grade, col);
  if (!y) throw CutoffExceeded("rewriting " + algebra().label(u) + "(" + std::to_string(n) + ") on " +
                               label(w) + " leaves the cutoffs");
  return reduce(d, *y);
}

std::string TruncatedModule::action_digest(long max_weight) const {
  // FNV-1a over the rendered table, skipping entries that leave the cutoffs
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  for (const auto& u : algebra().basis_up_to(std::min(max_weight, ambient_weight_cutoff())))
    for (long e = 0; e <= degree_cutoff(); ++e)
      for (std::size_t i = 0; i < dim(e); ++i)
        for (long d = 0; d <= degree_cutoff(); ++d) {
          const long n = e + u.grade - 1 - d;
          std::string entry = std::to_string(u.grade) + "." + std::to_string(u.index) + "|" + std::to_string(n) +
                              "|" + std::to_string(e) + "." + std::to_string(i) + "=";
          try {
            GradedVector r = action_basis(u, n, {e, static_cast<std::uint32_t>(i)});
            for (const auto& [k, c] : r.entries())
              entry += std::to_string(k.grade) + "." + std::to_string(k.index) + ":" + to_string(c) + ";";
          } catch (const CutoffExceeded&) {
            entry += "?";
          }
          feed(entry);
        }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

Assembly assemble_S1(const std::shared_ptr<const WordSpace>& ws, unsigned threads) {
  Assembly as(ws, threads);
  as.add_rewriting_relations();
  as.close();
  return as;
}

void check_dims_args(long D, long weight_cutoff) {
  if (D < 0) throw std::invalid_argument("degree cutoff must be nonnegative");
  if (weight_cutoff < 1) throw std::invalid_argument("weight cutoff must be at least 1");
}

}  // namespace

std::shared_ptr<const TruncatedModule> build_S1(std::shared_ptr<const VertexAlgebra> algebra, const AVModule& M,
                                                long D, long weight_cutoff, const BuildOptions& options) {
  check_dims_args(D, weight_cutoff);
  const unsigned threads = resolve_threads(options.threads);
  auto ws = std::make_shared<const WordSpace>(algebra, M, D, weight_cutoff, weight_cutoff + options.slack);
  Assembly as = assemble_S1(ws, threads);
  auto out = std::make_shared<TruncatedModule>(ws, as.relations(), TruncatedModule::Stage::S1, std::vector<BuildStep>{});
  std::vector<BuildStep> trace{make_step(*ws, *out, as.generators(), as.skipped())};
  return std::make_shared<const TruncatedModule>(ws, as.relations(), TruncatedModule::Stage::S1, trace);
}

JGenerators j_generators(const TruncatedModule& S1, unsigned threads) {
  threads = resolve_threads(threads);
  const WordSpace& ws = S1.words();
  const VertexAlgebra& V = ws.algebra();
  const auto& letters = ws.letters();
  const long D = ws.D(), heavy = ws.heavy();

  struct Target {
    long degree;
    std::size_t column;
  };
  std::vector<Target> ws_basis;
  for (long dw = 0; dw <= D; ++dw)
    for (std::size_t c : S1.quotient_columns(dw)) ws_basis.push_back({dw, c});

  // one task per (u, v)
  const std::size_t L = letters.size();
  std::vector<JGenerators> parts(L * L);
  parallel_for(L * L, threads, [&](std::size_t task) {
    const BasisKey& u = letters[task / L];
    const BasisKey& v = letters[task % L];
    JGenerators& out = parts[task];
    for (const auto& [dw, col] : ws_basis) {
      const SparseVector w{{col, Rational(1)}};
      const long top = u.grade + dw;
      for (long d = 0; d <= D; ++d) {
        const long K = dw - d;
        for (long m = K - 2 * dw - 2; v.grade - dw - m - 1 <= heavy; --m) {
          SparseVector value;
          bool ok = true;
          for (long j = 0; j <= top && ok; ++j) {
            const long weight = u.grade + v.grade - j - m - 1;
            if (weight < 0) continue;
            if (weight > heavy) {
              ok = false;
              break;
            }
            const GradedVector& uv = V.component_memo(u, j + m, v);
            if (uv.is_zero()) continue;
            SparseVector part;
            ok = ws.act_vector(uv, K + u.grade + v.grade - j - m - 2, dw, w, part);
            if (ok) linalg::axpy(value, binomial(top, j), part);
          }
          if (!ok) {
            ++out.skipped;
            continue;
          }
          if (!value.empty()) out.vectors.push_back({d, std::move(value)});
        }
      }
    }
  });
  JGenerators all;
  for (auto& p : parts) {
    all.skipped += p.skipped;
    for (auto& v : p.vectors) all.vectors.push_back(std::move(v));
  }
  return all;
}

namespace {

std::shared_ptr<const TruncatedModule> build_S_at(const std::shared_ptr<const VertexAlgebra>& algebra,
                                                  const AVModule& M, long D, long weight_cutoff, long slack,
                                                  const BuildOptions& options, unsigned threads,
                                                  std::vector<BuildStep>& trace) {
  auto ws = std::make_shared<const WordSpace>(algebra, M, D, weight_cutoff, weight_cutoff + slack);
  Assembly as = assemble_S1(ws, threads);
  TruncatedModule S1(ws, as.relations(), TruncatedModule::Stage::S1, {});
  JGenerators J = j_generators(S1, threads);
  as.skip(J.skipped);
  as.add_vectors(J.vectors);
  as.add_vectors(options.injected);
  as.close();
  TruncatedModule probe(ws, as.relations(), TruncatedModule::Stage::S, {});
  trace.push_back(make_step(*ws, probe, as.generators(), as.skipped()));
  return std::make_shared<const TruncatedModule>(ws, as.relations(), TruncatedModule::Stage::S, trace);
}

}  // namespace

std::shared_ptr<const TruncatedModule> build_S(std::shared_ptr<const VertexAlgebra> algebra, const AVModule& M,
                                               long D, const BuildOptions& options) {
  const long N = options.weight_cutoff > 0 ? options.weight_cutoff : std::max(D, 1L);
  check_dims_args(D, N);
  if (options.slack < 0 || options.slack_step < 1) throw std::invalid_argument("bad slack schedule");
  const unsigned threads = resolve_threads(options.threads);
  std::vector<BuildStep> trace;
  if (!options.stabilize) return build_S_at(algebra, M, D, N, options.slack, options, threads, trace);
  const std::size_t need = static_cast<std::size_t>(std::max(options.agreeing_increments, 1)) + 1;
  for (long slack = options.slack; slack <= options.slack_ceiling; slack += options.slack_step) {
    auto S = build_S_at(algebra, M, D, N, slack, options, threads, trace);
    const std::size_t n = trace.size();
    if (n < need) continue;
    bool agree = true;
    for (std::size_t i = n - need; i + 1 < n; ++i) agree = agree && trace[i].dims == trace[n - 1].dims;
    if (agree) return S;
  }
  std::ostringstream os;
  os << "dimensions did not settle by slack " << options.slack_ceiling << " (N_V = " << N << "):";
  for (const auto& s : trace) {
    os << " [ambient " << s.ambient_weight_cutoff << ":";
    for (auto d : s.dims) os << " " << d;
    os << "]";
  }
  throw NonStabilization(os.str(), trace);
}

JCapMResult verify_J_cap_M(const TruncatedModule& S1, const std::vector<InjectedRelation>& injected) {
  Assembly as(S1.words_ptr(), S1.relations(), resolve_threads(0));
  JGenerators J = j_generators(S1);
  as.add_vectors(J.vectors);
  as.add_vectors(injected);
  as.close();
  JCapMResult out;
  const auto& rows = as.relations()[0].rows();
  if (!rows.empty()) {
    out.trivial = false;
    out.witness = rows.begin()->second;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// rectangular product; the rows of a have b.size() entries
DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b, std::size_t cols) {
  DenseMatrix out(a.size(), std::vector<Rational>(cols));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

GradedVector matrix_column(const DenseMatrix& R, std::size_t col) {
  GradedVector out;
  for (std::size_t k = 0; k < R.size(); ++k)
    if (R[k][col] != 0) out.add({0, static_cast<std::uint32_t>(k)}, R[k][col]);
  return out;
}

std::vector<Rational> coordinates_in(const CandidateModule& W, long d, const GradedVector& x) {
  std::vector<Rational> out(W.dim(d), Rational(0));
  for (const auto& [k, c] : x.entries()) {
    if (k.grade != d) throw std::logic_error("image in the wrong degree");
    out.at(k.index) = c;
  }
  return out;
}

std::size_t rank_of_columns(const DenseMatrix& block) {
  if (block.empty() || block[0].empty()) return 0;
  std::vector<SparseVector> cols;
  for (std::size_t j = 0; j < block[0].size(); ++j) {
    SparseVector v;
    for (std::size_t i = 0; i < block.size(); ++i)
      if (block[i][j] != 0) v[i] = block[i][j];
    cols.push_back(std::move(v));
  }
  return linalg::rref(block.size(), cols).rank();
}

}  // namespace

bool InducedMapResult::injective(const TruncatedModule& S) const {
  for (std::size_t d = 0; d < ranks.size(); ++d)
    if (ranks[d] != S.dim(static_cast<long>(d))) return false;
  return true;
}

bool InducedMapResult::surjective(const CandidateModule& W) const {
  for (std::size_t d = 0; d < ranks.size(); ++d)
    if (ranks[d] != W.dim(static_cast<long>(d))) return false;
  return true;
}

InducedMapResult induced_map(const TruncatedModule& S, const CandidateModule& W, const std::vector<GradedVector>& f,
                             long max_action_weight) {
  const WordSpace& ws = S.words();
  const VertexAlgebra& V = S.algebra();
  if (f.size() != ws.tails()) throw std::invalid_argument("f must list one image per basis element of M");
  for (const auto& x : f)
    for (long g : x.grades())
      if (g != 0) throw std::invalid_argument("images of f must lie in degree 0");
  InducedMapResult out;

  for (const auto& u : V.basis_up_to(ws.light())) {
    const DenseMatrix R = ws.module().rho(GradedVector::basis(u.grade, u.index));
    for (std::size_t i = 0; i < f.size() && out.f_is_module_map; ++i) {
      GradedVector lhs;
      for (std::size_t k = 0; k < f.size(); ++k)
        if (R[k][i] != 0) lhs.add_scaled(f[k], R[k][i]);
      if (lhs != zero_mode(W, GradedVector::basis(u.grade, u.index), f[i])) {
        out.f_is_module_map = false;
        out.failure = "f does not intertwine rho(" + V.label(u) + ") with o(" + V.label(u) + ")";
      }
    }
  }

  // image of a free-word column: c_s f(w)
  auto image = [&](long d, std::size_t col) {
    FreeWord w = ws.word(d, col);
    GradedVector x = f[w.tail];
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
      x = W.action(GradedVector::basis(it->first.grade, it->first.index), it->second, x);
    return x;
  };
  auto image_of = [&](long d, const SparseVector& v) {
    GradedVector x;
    for (const auto& [c, a] : v) x.add_scaled(image(d, c), a);
    return x;
  };

  for (long d = 0; d <= ws.D() && out.well_defined; ++d)
    for (const auto& [pivot, row] : S.relations()[d].rows())
      if (!image_of(d, row).is_zero()) {
        out.well_defined = false;
        out.failure = "relation with leading word " + ws.label(d, pivot) + " does not map to zero";
        break;
      }

  std::vector<std::vector<GradedVector>> basis_images(ws.D() + 1);
  for (long d = 0; d <= ws.D(); ++d) {
    DenseMatrix block(W.dim(d), std::vector<Rational>(S.dim(d), Rational(0)));
    for (std::size_t j = 0; j < S.dim(d); ++j) {
      FreeWord w = S.basis_word({d, static_cast<std::uint32_t>(j)});
      GradedVector x = image(d, d == 0 ? w.tail : ws.column(w.letters[0].first, w.tail));
      auto c = coordinates_in(W, d, x);
      for (std::size_t i = 0; i < c.size(); ++i) block[i][j] = c[i];
      basis_images[d].push_back(std::move(x));
    }
    out.ranks.push_back(rank_of_columns(block));
    out.blocks.push_back(std::move(block));
  }

  auto map_vector = [&](const GradedVector& y) {
    GradedVector x;
    for (const auto& [k, c] : y.entries()) x.add_scaled(basis_images[k.grade][k.index], c);
    return x;
  };
  for (const auto& u : V.basis_up_to(std::min(max_action_weight, ws.heavy())))
    for (long e = 0; e <= ws.D(); ++e)
      for (std::size_t b = 0; b < S.dim(e); ++b)
        for (long d = 0; d <= ws.D(); ++d) {
          const long n = e + u.grade - 1 - d;
          GradedVector lhs;
          try {
            lhs = map_vector(S.action_basis(u, n, {e, static_cast<std::uint32_t>(b)}));
          } catch (const CutoffExceeded&) {
            ++out.skipped;
            continue;
          }
          ++out.checked;
          GradedVector rhs = W.action(GradedVector::basis(u.grade, u.index), n, basis_images[e][b]);
          if (lhs != rhs && out.intertwines) {
            out.intertwines = false;
            out.failure = "induced map fails to intertwine " + V.label(u) + "(" + std::to_string(n) + ") on " +
                          S.label({e, static_cast<std::uint32_t>(b)});
          }
        }
  return out;
}

TAfterSResult check_T_after_S(const TruncatedModule& S, long max_degree) {
  TAfterSResult out;
  const WordSpace& ws = S.words();
  const VertexAlgebra& V = S.algebra();
  out.module_dim = ws.tails();
  max_degree = std::min(max_degree, ws.D());
  // lowering components of weight z on a basis word of weight <= N_V stay below N_V + z - 1
  const long z = std::max(1L, std::min(ws.light(), ws.heavy() - ws.light() + 1));
  try {
    auto T = top_level(S, cached_zhu_quotient(ws.algebra_ptr(), z), max_degree);
    out.top_dim = T.basis.size();
    for (const auto& b : T.basis)
      for (long g : b.grades())
        if (g != 0) {
          out.holds = false;
          out.failure = "top level meets degree " + std::to_string(g);
        }
  } catch (const CutoffExceeded& e) {
    out.holds = false;
    out.failure = std::string("top level leaves the cutoffs: ") + e.what();
    return out;
  }
  if (out.top_dim != out.module_dim || S.dim(0) != out.module_dim) {
    out.holds = false;
    if (out.failure.empty())
      out.failure = "dim T(S(M)) = " + std::to_string(out.top_dim) + " but dim M = " + std::to_string(out.module_dim);
    return out;
  }
  // e_M(rho(u) w) = o(u) e_M(w); the basis of S(M)_(0) is the basis of M
  for (const auto& u : V.basis_up_to(ws.light())) {
    const DenseMatrix R = ws.module().rho(GradedVector::basis(u.grade, u.index));
    for (std::size_t i = 0; i < out.module_dim; ++i) {
      GradedVector lhs = S.action_basis(u, u.grade - 1, {0, static_cast<std::uint32_t>(i)});
      if (lhs != matrix_column(R, i)) {
        out.holds = false;
        out.failure = "o(" + V.label(u) + ") differs from rho on w" + std::to_string(i);
        return out;
      }
    }
  }
  return out;
}

ModuleMapResult functor_map(const TruncatedModule& source, const TruncatedModule& target, const DenseMatrix& f,
                            long max_action_weight) {
  const WordSpace& a = source.words();
  const WordSpace& b = target.words();
  if (&a.algebra() != &b.algebra() || a.D() != b.D() || a.light() != b.light() || a.heavy() != b.heavy())
    throw std::invalid_argument("functor_map needs modules built with the same algebra and cutoffs");
  if (f.size() != b.tails() || (b.tails() > 0 && f[0].size() != a.tails()))
    throw std::invalid_argument("f must be a dim M2 x dim M1 matrix");
  const VertexAlgebra& V = source.algebra();
  ModuleMapResult out;

  for (std::size_t li = 0; li < a.letters().size(); ++li) {
    const BasisKey& u = a.letters()[li];
    if (u.grade > a.light()) continue;
    if (product(f, a.rho(li), a.tails()) != product(b.rho(li), f, a.tails())) {
      out.f_is_module_map = false;
      out.failure = "f does not commute with rho(" + V.label(u) + ")";
      return out;
    }
  }

  auto map_column = [&](long d, std::size_t col) {
    SparseVector out_v;
    const std::uint32_t t = a.tail_of(d, col);
    for (std::size_t k = 0; k < b.tails(); ++k) {
      if (f[k][t] == 0) continue;
      const std::size_t c = d == 0 ? k : b.column(a.letter_of(col), static_cast<std::uint32_t>(k));
      out_v[c] = f[k][t];
    }
    return out_v;
  };
  auto map_vector = [&](long d, const SparseVector& v) {
    SparseVector x;
    for (const auto& [c, s] : v) linalg::axpy(x, s, map_column(d, c));
    return x;
  };

  for (long d = 0; d <= a.D() && out.well_defined; ++d)
    for (const auto& [pivot, row] : source.relations()[d].rows())
      if (!target.relations()[d].contains(map_vector(d, row))) {
        out.well_defined = false;
        out.failure = "relation with leading word " + a.label(d, pivot) + " is not sent to a relation";
        break;
      }

  std::vector<std::vector<GradedVector>> images(a.D() + 1);
  for (long d = 0; d <= a.D(); ++d) {
    DenseMatrix block(target.dim(d), std::vector<Rational>(source.dim(d), Rational(0)));
    for (std::size_t j = 0; j < source.dim(d); ++j) {
      FreeWord w = source.basis_word({d, static_cast<std::uint32_t>(j)});
      const std::size_t col = d == 0 ? w.tail : a.column(w.letters[0].first, w.tail);
      GradedVector x = target.reduce(d, map_column(d, col));
      for (const auto& [k, c] : x.entries()) block[k.index][j] = c;
      images[d].push_back(std::move(x));
    }
    out.blocks.push_back(std::move(block));
  }
  auto apply_map = [&](const GradedVector& y) {
    GradedVector x;
    for (const auto& [k, c] : y.entries()) x.add_scaled(images[k.grade][k.index], c);
    return x;
  };

  for (const auto& u : V.basis_up_to(std::min(max_action_weight, a.heavy())))
    for (long e = 0; e <= a.D(); ++e)
      for (std::size_t j = 0; j < source.dim(e); ++j)
        for (long d = 0; d <= a.D(); ++d) {
          const long n = e + u.grade - 1 - d;
          GradedVector lhs, rhs;
          try {
            lhs = apply_map(source.action_basis(u, n, {e, static_cast<std::uint32_t>(j)}));
            rhs = target.action(GradedVector::basis(u.grade, u.index), n, images[e][j]);
          } catch (const CutoffExceeded&) {
            ++out.skipped;
            continue;
          }
          ++out.checked;
          if (lhs != rhs && out.commutes) {
            out.commutes = false;
            out.failure = "S(f) does not commute with " + V.label(u) + "(" + std::to_string(n) + ") on " +
                          source.label({e, static_cast<std::uint32_t>(j)});
          }
        }
  return out;
}

}  // namespace voxcalc
