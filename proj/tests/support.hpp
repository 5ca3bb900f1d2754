#pragma once

// Independent oracles and generators shared by the test binaries. Nothing
// here calls verify(), apply_scheme() or the move finders it is used to check.

#include <cstdint>
#include <vector>

#include "flipmm/moves.hpp"
#include "flipmm/scheme.hpp"
#include "flipmm/search.hpp"

namespace oracle {

using Dense = std::vector<std::vector<std::int64_t>>;

struct PlainTerm {
  Dense a, b, c;
};

template <class M>
Dense dense(const M& m) {
  Dense d(static_cast<std::size_t>(m.rows()), std::vector<std::int64_t>(static_cast<std::size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) d[i][j] = static_cast<std::int64_t>(m.at(i, j));
  return d;
}

template <class M>
std::vector<PlainTerm> plain(const flipmm::BasicScheme<M>& s) {
  std::vector<PlainTerm> out;
  for (const auto& t : s.terms()) out.push_back({dense(t.a), dense(t.b), dense(t.c)});
  return out;
}

inline std::int64_t reduce_mod(std::int64_t v, std::int64_t modulus) {
  if (modulus == 0) return v;
  v %= modulus;
  return v < 0 ? v + modulus : v;
}

/// Direct evaluation of the (nm)(mp)(pn) Brent equations, written out as six
/// nested loops over matrix positions. modulus 0 means exact integers.
inline bool brent_holds(int n, int m, int p, const std::vector<PlainTerm>& terms, std::int64_t modulus) {
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < m; ++i2)
      for (int j1 = 0; j1 < m; ++j1)
        for (int j2 = 0; j2 < p; ++j2)
          for (int k1 = 0; k1 < p; ++k1)
            for (int k2 = 0; k2 < n; ++k2) {
              std::int64_t sum = 0;
              for (const auto& t : terms) sum += t.a[i1][i2] * t.b[j1][j2] * t.c[k1][k2];
              const std::int64_t want = (i2 == j1 && j2 == k1 && k2 == i1) ? 1 : 0;
              if (reduce_mod(sum - want, modulus) != 0) return false;
            }
  return true;
}

template <class M>
bool brent_holds(const flipmm::BasicScheme<M>& s) {
  const auto& f = s.format();
  std::int64_t modulus = 0;
  if (s.ring().is_gf2()) modulus = 2;
  if (s.ring().is_mod2k()) modulus = std::int64_t{1} << s.ring().bits();
  return brent_holds(f.n, f.m, f.p, plain(s), modulus);
}

inline Dense multiply(const Dense& x, const Dense& y, std::int64_t modulus) {
  Dense z(x.size(), std::vector<std::int64_t>(y.front().size(), 0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < y.front().size(); ++k) {
      std::int64_t sum = 0;
      for (std::size_t j = 0; j < y.size(); ++j) sum += x[i][j] * y[j][k];
      z[i][k] = reduce_mod(sum, modulus);
    }
  return z;
}

inline int shared_slots(const flipmm::GF2Term& x, const flipmm::GF2Term& y) {
  return (x.a == y.a) + (x.b == y.b) + (x.c == y.c);
}

/// All pairs i < j agreeing in at least two slots, by exhaustive comparison.
inline std::vector<flipmm::ReductionMove> reductions(const flipmm::GF2Scheme& s) {
  std::vector<flipmm::ReductionMove> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (shared_slots(s[i], s[j]) >= 2) out.push_back({i, j});
  return out;
}

/// Two directions per ordered pair and shared slot, identical terms excluded.
inline std::size_t flip_count(const flipmm::GF2Scheme& s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j || s[i] == s[j]) continue;
      for (flipmm::Slot slot : flipmm::kSlots)
        if (s[i][slot] == s[j][slot]) n += 2;
    }
  return n;
}

}  // namespace oracle

namespace gen {

using flipmm::Rng;

inline flipmm::GF2Matrix gf2_matrix(int rows, int cols, Rng& rng, bool nonzero = true) {
  for (;;) {
    flipmm::GF2Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (rng() & 1) m.set(i, j, 1);
    if (!nonzero || !m.is_zero()) return m;
  }
}

inline flipmm::IntMatrix int_matrix(int rows, int cols, Rng& rng, std::int64_t lo, std::int64_t hi) {
  flipmm::IntMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m.set(i, j, lo + static_cast<std::int64_t>(flipmm::uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1))));
  return m;
}

inline flipmm::GF2Term gf2_term(const flipmm::Format& f, Rng& rng) {
  return {gf2_matrix(f.n, f.m, rng), gf2_matrix(f.m, f.p, rng), gf2_matrix(f.p, f.n, rng)};
}

/// Random scheme, mostly not a valid algorithm. With `pool` > 0 components are
/// drawn from a small pool per slot so that shared components are common.
inline flipmm::GF2Scheme gf2_scheme(const flipmm::Format& f, std::size_t rank, Rng& rng, int pool = 0) {
  std::vector<flipmm::GF2Term> pa;
  for (int k = 0; k < pool; ++k) pa.push_back(gf2_term(f, rng));
  std::vector<flipmm::GF2Term> terms;
  for (std::size_t l = 0; l < rank; ++l) {
    if (pool == 0) {
      terms.push_back(gf2_term(f, rng));
    } else {
      auto pick = [&] { return pa[flipmm::uniform_below(rng, static_cast<std::uint64_t>(pool))]; };
      terms.push_back({pick().a, pick().b, pick().c});
    }
  }
  return flipmm::GF2Scheme(f, flipmm::Ring::gf2(), std::move(terms));
}

/// A verified scheme some random flips away from the standard one.
inline flipmm::GF2Scheme walked(const flipmm::Format& f, int flips, Rng& rng) {
  auto s = flipmm::standard_scheme<flipmm::GF2Matrix>(f, flipmm::Ring::gf2());
  for (int k = 0; k < flips; ++k) {
    const auto moves = flipmm::enumerate_flips(s);
    if (moves.empty()) break;
    s = flipmm::flip(s, moves[flipmm::uniform_below(rng, moves.size())]);
  }
  return s;
}

}  // namespace gen
