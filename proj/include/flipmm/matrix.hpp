#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flipmm/format.hpp"

namespace flipmm {

/// Dense matrix over GF(2), one 32-bit word per row. Bit j of row i is entry
/// (i, j); bits at positions >= cols() are always zero so equality and
/// hashing are plain word comparisons.
class GF2Matrix {
 public:
  using Word = std::uint32_t;

  GF2Matrix() = default;
  GF2Matrix(int rows, int cols);

  static GF2Matrix zero(int rows, int cols) { return GF2Matrix(rows, cols); }
  static GF2Matrix unit(int rows, int cols, int i, int j);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int i, int j) const { return (data_[i] >> j) & 1u; }
  std::int64_t at(int i, int j) const { return get(i, j) ? 1 : 0; }
  void set(int i, int j, std::int64_t v);
  void toggle(int i, int j) { data_[i] ^= Word{1} << j; }

  Word row(int i) const { return data_[i]; }
  /// Bits outside the column range are masked off.
  void set_row(int i, Word w) { data_[i] = w & col_mask(); }

  bool is_zero() const;
  int nonzeros() const;

  GF2Matrix& operator+=(const GF2Matrix& other);
  friend GF2Matrix operator+(GF2Matrix lhs, const GF2Matrix& rhs) { return lhs += rhs; }

  GF2Matrix transposed() const;
  /// Keeps the listed rows and columns, in the given order.
  GF2Matrix cropped(std::span<const int> rows, std::span<const int> cols) const;
  /// Places this matrix at (row_offset, col_offset) inside a zero matrix.
  GF2Matrix embedded(int rows, int cols, int row_offset, int col_offset) const;

  /// Row-major bit string: bit (i*cols + j) is entry (i, j).
  std::vector<std::uint64_t> flattened() const;

  std::size_t hash() const;

  friend bool operator==(const GF2Matrix& x, const GF2Matrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.data_ == y.data_;
  }
  friend std::strong_ordering operator<=>(const GF2Matrix& x, const GF2Matrix& y);

 private:
  Word col_mask() const { return cols_ == 32 ? ~Word{0} : ((Word{1} << cols_) - 1); }

  int rows_ = 0;
  int cols_ = 0;
  std::array<Word, kMaxDim> data_{};
};

/// Dense matrix with 64-bit integer entries, used for Z and Z/2^k schemes.
/// The ring is tracked by the owning scheme; the matrix itself is plain Z.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}
  IntMatrix(int rows, int cols, std::vector<std::int64_t> entries);

  static IntMatrix zero(int rows, int cols) { return IntMatrix(rows, cols); }
  static IntMatrix unit(int rows, int cols, int i, int j);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  std::int64_t at(int i, int j) const { return data_[index(i, j)]; }
  void set(int i, int j, std::int64_t v) { data_[index(i, j)] = v; }
  std::span<const std::int64_t> entries() const { return data_; }

  bool is_zero() const;
  int nonzeros() const;

  IntMatrix& operator+=(const IntMatrix& other);
  IntMatrix& operator-=(const IntMatrix& other);
  friend IntMatrix operator+(IntMatrix lhs, const IntMatrix& rhs) { return lhs += rhs; }
  friend IntMatrix operator-(IntMatrix lhs, const IntMatrix& rhs) { return lhs -= rhs; }

  /// Entrywise canonical representatives in `ring`.
  IntMatrix reduced(const Ring& ring) const;

  IntMatrix transposed() const;
  IntMatrix cropped(std::span<const int> rows, std::span<const int> cols) const;
  IntMatrix embedded(int rows, int cols, int row_offset, int col_offset) const;

  std::size_t hash() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
  friend std::strong_ordering operator<=>(const IntMatrix& x, const IntMatrix& y);

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * cols_ + j); }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> data_;
};

GF2Matrix to_gf2(const IntMatrix& m);
IntMatrix to_int(const GF2Matrix& m);

struct MatrixHash {
  template <class M>
  std::size_t operator()(const M& m) const {
    return m.hash();
  }
};

}  // namespace flipmm
