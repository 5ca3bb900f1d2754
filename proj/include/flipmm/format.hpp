#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace flipmm {

/// Largest supported matrix dimension. One 32-bit word holds a GF(2) row.
inline constexpr int kMaxDim = 32;

/// Dimensions of an (n x m) by (m x p) matrix product.
struct Format {
  int n = 1;
  int m = 1;
  int p = 1;

  Format() = default;
  /// Throws std::invalid_argument unless 1 <= n, m, p <= kMaxDim.
  Format(int n, int m, int p);

  int a_size() const { return n * m; }
  int b_size() const { return m * p; }
  int c_size() const { return p * n; }

  /// Rank of the schoolbook algorithm.
  int naive_rank() const { return n * m * p; }

  /// Number of Brent equations, (nm)(mp)(pn).
  std::uint64_t equation_count() const;

  /// "(n,m,p)"
  std::string to_string() const;

  friend bool operator==(const Format&, const Format&) = default;
  friend auto operator<=>(const Format&, const Format&) = default;
};

enum class RingKind : std::uint8_t { gf2, mod2k, integer };

/// Coefficient ring of a scheme: Z/2, Z/2^k (2 <= k <= 62) or Z.
class Ring {
 public:
  static Ring gf2() { return Ring(RingKind::gf2, 1); }
  static Ring mod2k(int k);
  static Ring integer() { return Ring(RingKind::integer, 0); }

  /// Accepts "gf2", "integer" and "mod2^K".
  static Ring parse(std::string_view text);

  RingKind kind() const { return kind_; }
  bool is_gf2() const { return kind_ == RingKind::gf2; }
  bool is_integer() const { return kind_ == RingKind::integer; }
  bool is_mod2k() const { return kind_ == RingKind::mod2k; }

  /// Exponent k for Z/2^k; 1 for GF(2); 0 for Z.
  int bits() const { return k_; }

  /// Canonical representative: {0,1} for GF(2), the balanced residue in
  /// (-2^(k-1), 2^(k-1)] for Z/2^k, the value itself for Z.
  std::int64_t reduce(std::int64_t v) const;

  /// True iff v is already a canonical representative.
  bool contains(std::int64_t v) const { return reduce(v) == v; }

  std::string name() const;

  friend bool operator==(const Ring&, const Ring&) = default;

 private:
  Ring(RingKind kind, int k) : kind_(kind), k_(k) {}

  RingKind kind_;
  int k_;
};

}  // namespace flipmm
