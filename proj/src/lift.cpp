#include "flipmm/lift.hpp"

#include <bit>
#include <cstdint>
#include <memory>

namespace flipmm {

namespace {

using Word = std::uint64_t;

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }
bool get_bit(const Word* v, std::size_t i) { return (v[i >> 6] >> (i & 63)) & 1; }
void flip_bit(Word* v, std::size_t i) { v[i >> 6] ^= Word{1} << (i & 63); }

struct Layout {
  Format f;
  std::size_t rank;
  int na, nb, nc;

  Layout(const Format& fmt, std::size_t r) : f(fmt), rank(r), na(fmt.a_size()), nb(fmt.b_size()), nc(fmt.c_size()) {}
  std::size_t per_term() const { return static_cast<std::size_t>(na + nb + nc); }
  std::size_t vars() const { return rank * per_term(); }
  std::size_t equations() const { return static_cast<std::size_t>(na) * nb * nc; }
  std::size_t eq(int ia, int ib, int ic) const { return (static_cast<std::size_t>(ia) * nb + ib) * nc + ic; }
  bool target(int ia, int ib, int ic) const {
    const int i1 = ia / f.m, i2 = ia % f.m;
    const int j1 = ib / f.p, j2 = ib % f.p;
    const int k1 = ic / f.n, k2 = ic % f.n;
    return i2 == j1 && j2 == k1 && k2 == i1;
  }
};

std::vector<std::uint8_t> entries(const GF2Matrix& m) {
  std::vector<std::uint8_t> out;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(static_cast<std::uint8_t>(m.at(i, j)));
  return out;
}

std::vector<std::int64_t> flatten(const IntScheme& s) {
  std::vector<std::int64_t> x;
  for (const auto& t : s.terms())
    for (Slot slot : kSlots) {
      auto e = t[slot].entries();
      x.insert(x.end(), e.begin(), e.end());
    }
  return x;
}

IntScheme unflatten(const std::vector<std::int64_t>& x, const Format& f, const Ring& ring) {
  std::vector<IntTerm> terms;
  std::size_t pos = 0;
  const int dims[3][2] = {{f.n, f.m}, {f.m, f.p}, {f.p, f.n}};
  while (pos < x.size()) {
    IntTerm t;
    for (int s = 0; s < 3; ++s) {
      const int size = dims[s][0] * dims[s][1];
      t[kSlots[s]] = IntMatrix(dims[s][0], dims[s][1],
                               std::vector<std::int64_t>(x.begin() + static_cast<std::ptrdiff_t>(pos),
                                                         x.begin() + static_cast<std::ptrdiff_t>(pos + size)));
      pos += size;
    }
    terms.push_back(std::move(t));
  }
  return IntScheme(f, ring, std::move(terms));
}

// Brent residuals modulo 2^64 of the coefficient vector x.
std::vector<Word> residuals(const Layout& lay, const std::vector<std::int64_t>& x) {
  std::vector<Word> r(lay.equations(), 0);
  for (int ia = 0; ia < lay.na; ++ia)
    for (int ib = 0; ib < lay.nb; ++ib)
      for (int ic = 0; ic < lay.nc; ++ic)
        if (lay.target(ia, ib, ic)) r[lay.eq(ia, ib, ic)] -= 1;
  std::vector<int> ai, bi, ci;
  for (std::size_t l = 0; l < lay.rank; ++l) {
    const std::int64_t* base = x.data() + l * lay.per_term();
    const std::int64_t* a = base;
    const std::int64_t* b = base + lay.na;
    const std::int64_t* c = base + lay.na + lay.nb;
    ai.clear(), bi.clear(), ci.clear();
    for (int i = 0; i < lay.na; ++i)
      if (a[i]) ai.push_back(i);
    for (int i = 0; i < lay.nb; ++i)
      if (b[i]) bi.push_back(i);
    for (int i = 0; i < lay.nc; ++i)
      if (c[i]) ci.push_back(i);
    for (int ia : ai)
      for (int ib : bi) {
        const Word ab = static_cast<Word>(a[ia]) * static_cast<Word>(b[ib]);
        for (int ic : ci) r[lay.eq(ia, ib, ic)] += ab * static_cast<Word>(c[ic]);
      }
  }
  return r;
}

// Dense Gauss-Jordan elimination of the mod-2 Jacobian restricted to a set
// of unknowns. The row operations are recorded so that each later right-hand
// side costs one pass over the pivots.
class Solver {
 public:
  Solver(const Layout& lay, const GF2Scheme& base, std::vector<std::size_t> columns)
      : columns_(std::move(columns)), rows_(lay.equations()), width_(words_for(columns_.size())),
        height_(words_for(rows_)), matrix_(rows_ * width_, 0) {
    std::vector<std::ptrdiff_t> local(lay.vars(), -1);
    for (std::size_t j = 0; j < columns_.size(); ++j) local[columns_[j]] = static_cast<std::ptrdiff_t>(j);

    for (std::size_t l = 0; l < lay.rank; ++l) {
      const auto a = entries(base[l].a);
      const auto b = entries(base[l].b);
      const auto c = entries(base[l].c);
      const std::size_t off = l * lay.per_term();
      for (int ia = 0; ia < lay.na; ++ia)
        for (int ib = 0; ib < lay.nb; ++ib)
          for (int ic = 0; ic < lay.nc; ++ic) {
            Word* row = &matrix_[lay.eq(ia, ib, ic) * width_];
            auto put = [&](std::size_t var) {
              if (local[var] >= 0) flip_bit(row, static_cast<std::size_t>(local[var]));
            };
            if (b[ib] && c[ic]) put(off + ia);
            if (a[ia] && c[ic]) put(off + lay.na + ib);
            if (a[ia] && b[ib]) put(off + lay.na + lay.nb + ic);
          }
    }
    eliminate();
  }

  bool consistent(std::vector<Word> rhs) const { return eliminate_rhs(rhs); }

  /// A solution over the global unknowns, or nullopt if inconsistent.
  std::optional<std::vector<bool>> solve(std::vector<Word> rhs, std::size_t vars, Rng* rng) const {
    if (!eliminate_rhs(rhs)) return std::nullopt;

    std::vector<Word> free(width_, 0);
    std::vector<bool> is_pivot(columns_.size(), false);
    for (std::size_t c : pivots_) is_pivot[c] = true;
    for (std::size_t j = 0; j < columns_.size(); ++j)
      if (rng && !is_pivot[j] && ((*rng)() & 1)) flip_bit(free.data(), j);

    std::vector<bool> delta(vars, false);
    for (std::size_t j = 0; j < columns_.size(); ++j)
      if (get_bit(free.data(), j)) delta[columns_[j]] = true;
    for (std::size_t t = 0; t < pivots_.size(); ++t) {
      const Word* row = &matrix_[t * width_];
      int parity = get_bit(rhs.data(), t);
      for (std::size_t w = 0; w < width_; ++w) parity ^= std::popcount(row[w] & free[w]) & 1;
      delta[columns_[pivots_[t]]] = parity;
    }
    return delta;
  }

 private:
  bool eliminate_rhs(std::vector<Word>& rhs) const {
    for (std::size_t t = 0; t < pivots_.size(); ++t) {
      const std::size_t p = swaps_[t];
      if (p != t && get_bit(rhs.data(), p) != get_bit(rhs.data(), t)) {
        flip_bit(rhs.data(), p);
        flip_bit(rhs.data(), t);
      }
      if (get_bit(rhs.data(), t)) {
        const Word* mask = &masks_[t * height_];
        for (std::size_t w = 0; w < height_; ++w) rhs[w] ^= mask[w];
      }
    }
    for (std::size_t r = pivots_.size(); r < rows_; ++r)
      if (get_bit(rhs.data(), r)) return false;
    return true;
  }

  void eliminate() {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < columns_.size() && rank < rows_; ++col) {
      std::size_t p = rank;
      while (p < rows_ && !get_bit(&matrix_[p * width_], col)) ++p;
      if (p == rows_) continue;
      if (p != rank)
        for (std::size_t w = 0; w < width_; ++w) std::swap(matrix_[p * width_ + w], matrix_[rank * width_ + w]);
      std::vector<Word> mask(height_, 0);
      const Word* pivot = &matrix_[rank * width_];
      for (std::size_t r = 0; r < rows_; ++r) {
        if (r == rank) continue;
        Word* row = &matrix_[r * width_];
        if (!get_bit(row, col)) continue;
        for (std::size_t w = col / 64; w < width_; ++w) row[w] ^= pivot[w];
        flip_bit(mask.data(), r);
      }
      pivots_.push_back(col);
      swaps_.push_back(p);
      masks_.insert(masks_.end(), mask.begin(), mask.end());
      ++rank;
    }
  }

  std::vector<std::size_t> columns_;
  std::size_t rows_, width_, height_;
  std::vector<Word> matrix_;
  std::vector<std::size_t> pivots_;
  std::vector<std::size_t> swaps_;
  std::vector<Word> masks_;
};

// Lifting context for one GF(2) base scheme; the Jacobian mod 2 depends only
// on the base, so both factorizations are shared by every step.
class Lifter {
 public:
  explicit Lifter(const GF2Scheme& base) : base_(base), lay_(base.format(), base.size()) {}

  // x satisfies the equations mod 2^k; returns coefficients valid mod 2^(k+1).
  // Several random corrections are tried. A candidate that is already exact
  // over Z wins outright; otherwise the first one whose own next step is
  // solvable is kept, which steers away from branches that die immediately.
  std::vector<std::int64_t> step(const std::vector<std::int64_t>& x, int k, Rng& rng) {
    const Ring next = Ring::mod2k(k + 1);
    auto rhs = next_rhs(x, k);
    if (!rhs) {
      std::vector<std::int64_t> same(x);
      for (auto& v : same) v = next.reduce(v);
      return same;
    }
    std::optional<std::vector<std::int64_t>> good, fallback;
    for (int t = 0; t < kCandidates; ++t) {
      // Past the first bit, the plain solution comes first: random kernel
      // components at every level make the 2-adic digits noise. Odd
      // candidates may also move even coefficients.
      Rng* source = (k == 1 || t > 0) ? &rng : nullptr;
      std::optional<std::vector<bool>> delta;
      if (t % 2 == 0) delta = support().solve(*rhs, lay_.vars(), source);
      if (!delta) delta = full().solve(*rhs, lay_.vars(), source);
      if (!delta) throw LiftObstructed(k);
      std::vector<std::int64_t> y(x);
      for (std::size_t v = 0; v < y.size(); ++v)
        y[v] = next.reduce((*delta)[v] ? y[v] + (std::int64_t{1} << k) : y[v]);
      if (k + 1 >= 62) return y;
      if (exact(y)) return y;
      if (!good) {
        auto ahead = next_rhs(y, k + 1);
        if (!ahead || support().consistent(*ahead) || full().consistent(*ahead)) good = y;
      }
      if (!fallback) fallback = std::move(y);
    }
    return good ? *good : *fallback;
  }

  const Layout& layout() const { return lay_; }

 private:
  static constexpr int kCandidates = 16;

  // Bit e set iff residual e is an odd multiple of 2^k; nullopt if all vanish
  // modulo 2^(k+1).
  std::optional<std::vector<Word>> next_rhs(const std::vector<std::int64_t>& x, int k) const {
    const Word low = (Word{1} << k) - 1;
    const auto r = residuals(lay_, x);
    std::vector<Word> rhs(words_for(r.size()), 0);
    bool zero = true;
    for (std::size_t e = 0; e < r.size(); ++e) {
      if (r[e] & low) throw SchemeError("scheme does not satisfy the Brent equations modulo 2^" + std::to_string(k));
      if ((r[e] >> k) & 1) {
        flip_bit(rhs.data(), e);
        zero = false;
      }
    }
    if (zero) return std::nullopt;
    return rhs;
  }

  bool exact(const std::vector<std::int64_t>& y) const {
    for (auto r : residuals(lay_, y))
      if (r != 0) return false;
    return true;
  }

  const Solver& support() {
    if (!support_) {
      std::vector<std::size_t> cols;
      std::size_t v = 0;
      for (const auto& t : base_.terms())
        for (Slot s : kSlots)
          for (auto bit : entries(t[s])) {
            if (bit) cols.push_back(v);
            ++v;
          }
      support_ = std::make_unique<Solver>(lay_, base_, std::move(cols));
    }
    return *support_;
  }
  const Solver& full() {
    if (!full_) {
      std::vector<std::size_t> cols(lay_.vars());
      for (std::size_t v = 0; v < cols.size(); ++v) cols[v] = v;
      full_ = std::make_unique<Solver>(lay_, base_, std::move(cols));
    }
    return *full_;
  }

  GF2Scheme base_;
  Layout lay_;
  std::unique_ptr<Solver> support_;
  std::unique_ptr<Solver> full_;
};

int modulus_bits(const IntScheme& s) {
  if (!s.ring().is_mod2k()) throw SchemeError("Hensel lifting needs a scheme over Z/2^k");
  return s.ring().bits();
}

}  // namespace

LiftObstructed::LiftObstructed(int k)
    : std::runtime_error("obstructed at 2^" + std::to_string(k + 1)), k_(k) {}

IntScheme hensel_step(const IntScheme& s, Rng& rng) {
  const int k = modulus_bits(s);
  if (k >= 62) throw SchemeError("cannot lift beyond 2^62");
  Lifter lifter(to_gf2(s));
  return unflatten(lifter.step(flatten(s), k, rng), s.format(), Ring::mod2k(k + 1));
}

IntScheme hensel_step(const GF2Scheme& s, Rng& rng) {
  Lifter lifter(s);
  return unflatten(lifter.step(flatten(to_int(s, Ring::integer())), 1, rng), s.format(), Ring::mod2k(2));
}

std::optional<IntScheme> reconstruct_integers(const IntScheme& s) {
  if (!s.ring().is_mod2k()) throw std::invalid_argument("reconstruct_integers needs a scheme over Z/2^k");
  std::vector<IntTerm> terms(s.terms().begin(), s.terms().end());
  IntScheme z(s.format(), Ring::integer(), std::move(terms));
  if (!verify(z)) return std::nullopt;
  return z;
}

LiftResult lift(const GF2Scheme& s, int attempts, int k_max, Rng& rng) {
  if (attempts < 1) throw std::invalid_argument("attempts must be positive");
  if (k_max < 2 || k_max > 62) throw std::invalid_argument("k_max must lie in [2, 62]");
  if (!verify(s)) throw SchemeError("refusing to lift broken scheme");

  Lifter lifter(s);
  const Format& f = s.format();
  LiftResult result;
  for (int a = 0; a < attempts; ++a) {
    LiftAttempt report;
    std::vector<std::int64_t> x = flatten(to_int(s, Ring::integer()));
    try {
      int k = 1;
      while (k < k_max) {
        auto y = lifter.step(x, k, rng);
        ++k;
        report.max_k = k;
        const bool stable = y == x;
        x = std::move(y);
        if (stable || k == k_max) {
          if (auto z = reconstruct_integers(unflatten(x, f, Ring::mod2k(k)))) {
            report.success = true;
            result.scheme = std::move(*z);
            break;
          }
        }
      }
      if (!report.success) report.failure = "coefficients not stabilized";
    } catch (const LiftObstructed& e) {
      report.failure = e.what();
    }
    result.attempts.push_back(report);
    if (report.success) break;
  }
  return result;
}

}  // namespace flipmm
