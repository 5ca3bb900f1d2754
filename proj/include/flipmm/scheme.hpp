#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flipmm/format.hpp"
#include "flipmm/matrix.hpp"

namespace flipmm {

/// Raised for structurally invalid schemes and invalid scheme operations.
class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Slot : int { a = 0, b = 1, c = 2 };

inline constexpr Slot kSlots[3] = {Slot::a, Slot::b, Slot::c};

const char* slot_name(Slot s);

/// One rank-one summand A (x) B (x) C, i.e. one multiplication of the scheme.
/// For format (n,m,p): A is n x m, B is m x p, C is p x n.
template <class M>
struct BasicTerm {
  M a;
  M b;
  M c;

  M& operator[](Slot s) { return s == Slot::a ? a : (s == Slot::b ? b : c); }
  const M& operator[](Slot s) const { return s == Slot::a ? a : (s == Slot::b ? b : c); }

  bool has_zero_component() const { return a.is_zero() || b.is_zero() || c.is_zero(); }

  friend bool operator==(const BasicTerm&, const BasicTerm&) = default;
  friend std::strong_ordering operator<=>(const BasicTerm& x, const BasicTerm& y) {
    if (auto r = x.a <=> y.a; r != 0) return r;
    if (auto r = x.b <=> y.b; r != 0) return r;
    return x.c <=> y.c;
  }
};

/// A bilinear algorithm for the format, as a list of rank-one terms.
///
/// Product convention: with m_l = <A_l, X> * <B_l, Y> (entrywise inner
/// products), the result is Z[i][k] = sum_l C_l[k][i] * m_l. Equivalently the
/// terms satisfy the cyclic Brent equations
///   sum_l A_l[i1][i2] B_l[j1][j2] C_l[k1][k2] = [i2==j1][j2==k1][k2==i1].
///
/// Instances are immutable; every operation returns a new scheme.
template <class M>
class BasicScheme {
 public:
  using matrix_type = M;
  using term_type = BasicTerm<M>;

  /// Throws SchemeError if a component has the wrong shape, if the ring does
  /// not match the matrix type, or (for Z/2^k) if an entry is not a balanced
  /// residue.
  BasicScheme(Format format, Ring ring, std::vector<term_type> terms = {});

  const Format& format() const { return format_; }
  const Ring& ring() const { return ring_; }
  std::span<const term_type> terms() const { return terms_; }
  const term_type& operator[](std::size_t i) const { return terms_[i]; }
  /// Raw term count; rank() counts after normalization.
  std::size_t size() const { return terms_.size(); }

  friend bool operator==(const BasicScheme&, const BasicScheme&) = default;

 private:
  Format format_;
  Ring ring_;
  std::vector<term_type> terms_;
};

using GF2Term = BasicTerm<GF2Matrix>;
using IntTerm = BasicTerm<IntMatrix>;
using GF2Scheme = BasicScheme<GF2Matrix>;
using IntScheme = BasicScheme<IntMatrix>;

/// A scheme over any supported ring.
using Scheme = std::variant<GF2Scheme, IntScheme>;

template <class M>
BasicScheme<M> standard_scheme(Format f, Ring ring);
/// Schoolbook algorithm: one term e_ij (x) e_jk (x) e_ki per (i,j,k).
Scheme standard_scheme(Format f, Ring ring);

struct VerifyReport {
  bool ok = false;
  std::uint64_t equations = 0;
  std::uint64_t violations = 0;
};

/// Checks all (nm)(mp)(pn) Brent equations in the scheme's ring.
template <class M>
VerifyReport verify_report(const BasicScheme<M>& s);

template <class M>
bool verify(const BasicScheme<M>& s) {
  return verify_report(s).ok;
}
bool verify(const Scheme& s);

/// Runs the bilinear algorithm on concrete inputs. Throws SchemeError
/// ("format mismatch") if X is not n x m or Y is not m x p.
GF2Matrix apply_scheme(const GF2Scheme& s, const GF2Matrix& x, const GF2Matrix& y);
/// Over Z the computation is overflow-checked; over Z/2^k results are
/// balanced residues.
IntMatrix apply_scheme(const IntScheme& s, const IntMatrix& x, const IntMatrix& y);

/// Drops terms with a zero component and sorts terms. Over GF(2) equal terms
/// cancel in pairs. Idempotent.
template <class M>
BasicScheme<M> normalize(const BasicScheme<M>& s);
Scheme normalize(const Scheme& s);

/// Number of terms after normalization.
template <class M>
std::size_t rank(const BasicScheme<M>& s) {
  return normalize(s).size();
}
std::size_t rank(const Scheme& s);

/// Reduction of an integer or Z/2^k scheme modulo 2.
GF2Scheme to_gf2(const IntScheme& s);
/// The 0/1 scheme viewed over `ring` (Z or Z/2^k).
IntScheme to_int(const GF2Scheme& s, Ring ring);

const Format& format_of(const Scheme& s);
const Ring& ring_of(const Scheme& s);

}  // namespace flipmm
