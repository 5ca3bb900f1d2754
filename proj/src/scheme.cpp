#include "flipmm/scheme.hpp"

#include <algorithm>
#include <bit>
#include <type_traits>

namespace flipmm {

namespace {

template <class M>
inline constexpr bool is_gf2_v = std::is_same_v<M, GF2Matrix>;

// Over Z, |entry| <= 2^38 keeps every accumulated triple product sum of up
// to 2^12 terms inside a signed 128-bit integer.
constexpr std::int64_t kExactEntryBound = std::int64_t{1} << 38;
constexpr std::size_t kExactTermBound = std::size_t{1} << 12;

template <class M>
void check_component(const M& x, int rows, int cols, const Ring& ring, std::size_t term, Slot slot) {
  if (x.rows() != rows || x.cols() != cols)
    throw SchemeError("term " + std::to_string(term) + ": component " + slot_name(slot) + " must be " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  if constexpr (!is_gf2_v<M>) {
    if (ring.is_mod2k())
      for (auto v : x.entries())
        if (!ring.contains(v))
          throw SchemeError("term " + std::to_string(term) + ": entry " + std::to_string(v) +
                            " is not a balanced residue mod 2^" + std::to_string(ring.bits()));
  }
}

std::vector<int> support(const GF2Matrix& x) {
  std::vector<int> out;
  for (int i = 0; i < x.rows(); ++i)
    for (auto w = x.row(i); w; w &= w - 1) out.push_back(i * x.cols() + std::countr_zero(w));
  return out;
}

VerifyReport verify_gf2(const GF2Scheme& s) {
  const Format& f = s.format();
  const int nm = f.a_size(), mp = f.b_size();
  VerifyReport report;
  report.equations = f.equation_count();

  std::vector<std::vector<std::size_t>> terms_by_a(static_cast<std::size_t>(nm));
  std::vector<std::vector<int>> b_support(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) {
    for (int alpha : support(s[l].a)) terms_by_a[alpha].push_back(l);
    b_support[l] = support(s[l].b);
  }

  // acc[beta * p + k1] is row k1 of sum_l A_l[alpha] B_l[beta] C_l.
  std::vector<GF2Matrix::Word> acc(static_cast<std::size_t>(mp * f.p));
  for (int alpha = 0; alpha < nm; ++alpha) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t l : terms_by_a[alpha]) {
      const GF2Matrix& c = s[l].c;
      for (int beta : b_support[l])
        for (int k1 = 0; k1 < f.p; ++k1) acc[beta * f.p + k1] ^= c.row(k1);
    }
    const int i1 = alpha / f.m, i2 = alpha % f.m;
    for (int beta = 0; beta < mp; ++beta) {
      const int j1 = beta / f.p, j2 = beta % f.p;
      for (int k1 = 0; k1 < f.p; ++k1) {
        GF2Matrix::Word expected = (i2 == j1 && k1 == j2) ? (GF2Matrix::Word{1} << i1) : 0;
        report.violations += static_cast<std::uint64_t>(std::popcount(acc[beta * f.p + k1] ^ expected));
      }
    }
  }
  report.ok = report.violations == 0;
  return report;
}

template <class Acc>
VerifyReport verify_int_impl(const IntScheme& s) {
  const Format& f = s.format();
  const int nm = f.a_size(), mp = f.b_size(), pn = f.c_size();
  const Ring& ring = s.ring();
  VerifyReport report;
  report.equations = f.equation_count();

  struct Sparse {
    std::vector<std::pair<int, std::int64_t>> entries;
  };
  auto sparse = [](const IntMatrix& x) {
    Sparse out;
    auto e = x.entries();
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0) out.entries.emplace_back(static_cast<int>(i), e[i]);
    return out;
  };

  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> terms_by_a(static_cast<std::size_t>(nm));
  std::vector<Sparse> b_sparse(s.size()), c_sparse(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) {
    for (auto [alpha, v] : sparse(s[l].a).entries) terms_by_a[alpha].emplace_back(l, v);
    b_sparse[l] = sparse(s[l].b);
    c_sparse[l] = sparse(s[l].c);
  }

  std::vector<Acc> acc(static_cast<std::size_t>(mp) * pn);
  for (int alpha = 0; alpha < nm; ++alpha) {
    std::fill(acc.begin(), acc.end(), Acc{0});
    for (auto [l, a] : terms_by_a[alpha])
      for (auto [beta, b] : b_sparse[l].entries) {
        const Acc ab = static_cast<Acc>(a) * static_cast<Acc>(b);
        for (auto [gamma, c] : c_sparse[l].entries)
          acc[static_cast<std::size_t>(beta) * pn + gamma] += ab * static_cast<Acc>(c);
      }
    const int i1 = alpha / f.m, i2 = alpha % f.m;
    for (int beta = 0; beta < mp; ++beta) {
      const int j1 = beta / f.p, j2 = beta % f.p;
      for (int gamma = 0; gamma < pn; ++gamma) {
        const int k1 = gamma / f.n, k2 = gamma % f.n;
        const Acc expected = (i2 == j1 && j2 == k1 && k2 == i1) ? 1 : 0;
        Acc got = acc[static_cast<std::size_t>(beta) * pn + gamma];
        bool equal;
        if constexpr (std::is_same_v<Acc, std::uint64_t>) {
          const std::uint64_t mask = (std::uint64_t{1} << ring.bits()) - 1;
          equal = ((got - expected) & mask) == 0;
        } else {
          equal = got == expected;
        }
        if (!equal) ++report.violations;
      }
    }
  }
  report.ok = report.violations == 0;
  return report;
}

VerifyReport verify_int(const IntScheme& s) {
  if (s.ring().is_mod2k()) return verify_int_impl<std::uint64_t>(s);
  if (s.size() > kExactTermBound)
    throw std::overflow_error("too many terms for exact integer verification");
  for (const auto& t : s.terms())
    for (Slot slot : kSlots)
      for (auto v : t[slot].entries())
        if (v > kExactEntryBound || v < -kExactEntryBound)
          throw std::overflow_error("coefficient too large for exact integer verification");
  return verify_int_impl<__int128>(s);
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw std::overflow_error("integer overflow in apply_scheme");
  return r;
}

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw std::overflow_error("integer overflow in apply_scheme");
  return r;
}

}  // namespace

const char* slot_name(Slot s) {
  switch (s) {
    case Slot::a:
      return "A";
    case Slot::b:
      return "B";
    case Slot::c:
      return "C";
  }
  return "?";
}

template <class M>
BasicScheme<M>::BasicScheme(Format format, Ring ring, std::vector<term_type> terms)
    : format_(format), ring_(ring), terms_(std::move(terms)) {
  if (is_gf2_v<M> != ring_.is_gf2())
    throw SchemeError("ring " + ring_.name() + " does not match the coefficient storage");
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    check_component(terms_[l].a, format_.n, format_.m, ring_, l, Slot::a);
    check_component(terms_[l].b, format_.m, format_.p, ring_, l, Slot::b);
    check_component(terms_[l].c, format_.p, format_.n, ring_, l, Slot::c);
  }
}

template <class M>
BasicScheme<M> standard_scheme(Format f, Ring ring) {
  std::vector<BasicTerm<M>> terms;
  terms.reserve(static_cast<std::size_t>(f.naive_rank()));
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.m; ++j)
      for (int k = 0; k < f.p; ++k)
        terms.push_back({M::unit(f.n, f.m, i, j), M::unit(f.m, f.p, j, k), M::unit(f.p, f.n, k, i)});
  return BasicScheme<M>(f, ring, std::move(terms));
}

Scheme standard_scheme(Format f, Ring ring) {
  if (ring.is_gf2()) return standard_scheme<GF2Matrix>(f, ring);
  return standard_scheme<IntMatrix>(f, ring);
}

template <class M>
VerifyReport verify_report(const BasicScheme<M>& s) {
  if constexpr (is_gf2_v<M>)
    return verify_gf2(s);
  else
    return verify_int(s);
}

bool verify(const Scheme& s) {
  return std::visit([](const auto& x) { return verify(x); }, s);
}

GF2Matrix apply_scheme(const GF2Scheme& s, const GF2Matrix& x, const GF2Matrix& y) {
  const Format& f = s.format();
  if (x.rows() != f.n || x.cols() != f.m || y.rows() != f.m || y.cols() != f.p)
    throw SchemeError("format mismatch");
  auto inner = [](const GF2Matrix& u, const GF2Matrix& v) {
    int parity = 0;
    for (int i = 0; i < u.rows(); ++i) parity ^= std::popcount(u.row(i) & v.row(i)) & 1;
    return parity;
  };
  GF2Matrix acc(f.p, f.n);
  for (const auto& t : s.terms())
    if (inner(t.a, x) & inner(t.b, y)) acc += t.c;
  return acc.transposed();
}

IntMatrix apply_scheme(const IntScheme& s, const IntMatrix& x, const IntMatrix& y) {
  const Format& f = s.format();
  if (x.rows() != f.n || x.cols() != f.m || y.rows() != f.m || y.cols() != f.p)
    throw SchemeError("format mismatch");
  const Ring& ring = s.ring();
  IntMatrix z(f.n, f.p);
  if (ring.is_mod2k()) {
    auto inner = [](const IntMatrix& u, const IntMatrix& v) {
      std::uint64_t sum = 0;
      auto ue = u.entries(), ve = v.entries();
      for (std::size_t i = 0; i < ue.size(); ++i)
        sum += static_cast<std::uint64_t>(ue[i]) * static_cast<std::uint64_t>(ve[i]);
      return sum;
    };
    std::vector<std::uint64_t> acc(static_cast<std::size_t>(f.n * f.p));
    for (const auto& t : s.terms()) {
      const std::uint64_t prod = inner(t.a, x) * inner(t.b, y);
      for (int k = 0; k < f.p; ++k)
        for (int i = 0; i < f.n; ++i) acc[i * f.p + k] += static_cast<std::uint64_t>(t.c.at(k, i)) * prod;
    }
    for (int i = 0; i < f.n; ++i)
      for (int k = 0; k < f.p; ++k) z.set(i, k, ring.reduce(static_cast<std::int64_t>(acc[i * f.p + k])));
    return z;
  }
  auto inner = [](const IntMatrix& u, const IntMatrix& v) {
    std::int64_t sum = 0;
    auto ue = u.entries(), ve = v.entries();
    for (std::size_t i = 0; i < ue.size(); ++i) sum = checked_add(sum, checked_mul(ue[i], ve[i]));
    return sum;
  };
  for (const auto& t : s.terms()) {
    const std::int64_t prod = checked_mul(inner(t.a, x), inner(t.b, y));
    if (prod == 0) continue;
    for (int k = 0; k < f.p; ++k)
      for (int i = 0; i < f.n; ++i)
        if (auto c = t.c.at(k, i)) z.set(i, k, checked_add(z.at(i, k), checked_mul(c, prod)));
  }
  return z;
}

template <class M>
BasicScheme<M> normalize(const BasicScheme<M>& s) {
  std::vector<BasicTerm<M>> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms())
    if (!t.has_zero_component()) terms.push_back(t);
  std::sort(terms.begin(), terms.end());
  if constexpr (is_gf2_v<M>) {
    // x + x = 0: keep one copy of each odd-length run.
    std::vector<BasicTerm<M>> kept;
    kept.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size();) {
      std::size_t j = i;
      while (j < terms.size() && terms[j] == terms[i]) ++j;
      if ((j - i) % 2 == 1) kept.push_back(terms[i]);
      i = j;
    }
    terms = std::move(kept);
  }
  return BasicScheme<M>(s.format(), s.ring(), std::move(terms));
}

Scheme normalize(const Scheme& s) {
  return std::visit([](const auto& x) -> Scheme { return normalize(x); }, s);
}

std::size_t rank(const Scheme& s) {
  return std::visit([](const auto& x) { return rank(x); }, s);
}

GF2Scheme to_gf2(const IntScheme& s) {
  std::vector<GF2Term> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) terms.push_back({to_gf2(t.a), to_gf2(t.b), to_gf2(t.c)});
  return GF2Scheme(s.format(), Ring::gf2(), std::move(terms));
}

IntScheme to_int(const GF2Scheme& s, Ring ring) {
  std::vector<IntTerm> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) terms.push_back({to_int(t.a), to_int(t.b), to_int(t.c)});
  return IntScheme(s.format(), ring, std::move(terms));
}

const Format& format_of(const Scheme& s) {
  return std::visit([](const auto& x) -> const Format& { return x.format(); }, s);
}

const Ring& ring_of(const Scheme& s) {
  return std::visit([](const auto& x) -> const Ring& { return x.ring(); }, s);
}

template class BasicScheme<GF2Matrix>;
template class BasicScheme<IntMatrix>;
template GF2Scheme standard_scheme<GF2Matrix>(Format, Ring);
template IntScheme standard_scheme<IntMatrix>(Format, Ring);
template VerifyReport verify_report(const GF2Scheme&);
template VerifyReport verify_report(const IntScheme&);
template GF2Scheme normalize(const GF2Scheme&);
template IntScheme normalize(const IntScheme&);

}  // namespace flipmm
