#include "flipmm/matrix.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace flipmm {

namespace {

void check_dims(int rows, int cols) {
  if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim)
    throw std::invalid_argument("matrix dimensions out of range");
}

std::size_t mix(std::size_t seed, std::uint64_t v) {
  // splitmix64 finalizer
  v += 0x9e3779b97f4a7c15ULL + seed;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return static_cast<std::size_t>(v ^ (v >> 31));
}

void check_selection(std::span<const int> idx, int bound) {
  for (int i : idx)
    if (i < 0 || i >= bound) throw std::out_of_range("selector index out of range");
}

}  // namespace

// GF2Matrix

GF2Matrix::GF2Matrix(int rows, int cols) : rows_(rows), cols_(cols) { check_dims(rows, cols); }

GF2Matrix GF2Matrix::unit(int rows, int cols, int i, int j) {
  GF2Matrix m(rows, cols);
  m.set(i, j, 1);
  return m;
}

void GF2Matrix::set(int i, int j, std::int64_t v) {
  const Word bit = Word{1} << j;
  if (v & 1)
    data_[i] |= bit;
  else
    data_[i] &= ~bit;
}

bool GF2Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.begin() + rows_, [](Word w) { return w == 0; });
}

int GF2Matrix::nonzeros() const {
  int count = 0;
  for (int i = 0; i < rows_; ++i) count += std::popcount(data_[i]);
  return count;
}

GF2Matrix& GF2Matrix::operator+=(const GF2Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix size mismatch");
  for (int i = 0; i < rows_; ++i) data_[i] ^= other.data_[i];
  return *this;
}

GF2Matrix GF2Matrix::transposed() const {
  GF2Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (Word w = data_[i]; w; w &= w - 1) t.data_[std::countr_zero(w)] |= Word{1} << i;
  return t;
}

GF2Matrix GF2Matrix::cropped(std::span<const int> rows, std::span<const int> cols) const {
  check_selection(rows, rows_);
  check_selection(cols, cols_);
  GF2Matrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (get(rows[i], cols[j])) out.data_[i] |= Word{1} << j;
  return out;
}

GF2Matrix GF2Matrix::embedded(int rows, int cols, int row_offset, int col_offset) const {
  if (row_offset < 0 || col_offset < 0 || row_offset + rows_ > rows || col_offset + cols_ > cols)
    throw std::invalid_argument("embedding does not fit");
  GF2Matrix out(rows, cols);
  for (int i = 0; i < rows_; ++i) out.data_[row_offset + i] = data_[i] << col_offset;
  return out;
}

std::vector<std::uint64_t> GF2Matrix::flattened() const {
  const int bits = rows_ * cols_;
  std::vector<std::uint64_t> out(static_cast<std::size_t>((bits + 63) / 64));
  for (int i = 0; i < rows_; ++i)
    for (Word w = data_[i]; w; w &= w - 1) {
      const int pos = i * cols_ + std::countr_zero(w);
      out[pos / 64] |= std::uint64_t{1} << (pos % 64);
    }
  return out;
}

std::size_t GF2Matrix::hash() const {
  std::size_t h = mix(static_cast<std::size_t>(rows_ * 64 + cols_), 0);
  for (int i = 0; i < rows_; ++i) h = mix(h, data_[i]);
  return h;
}

std::strong_ordering operator<=>(const GF2Matrix& x, const GF2Matrix& y) {
  if (auto c = x.rows_ <=> y.rows_; c != 0) return c;
  if (auto c = x.cols_ <=> y.cols_; c != 0) return c;
  for (int i = 0; i < x.rows_; ++i)
    if (auto c = x.data_[i] <=> y.data_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

// IntMatrix

IntMatrix::IntMatrix(int rows, int cols, std::vector<std::int64_t> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != static_cast<std::size_t>(rows * cols))
    throw std::invalid_argument("entry count does not match matrix size");
}

IntMatrix IntMatrix::unit(int rows, int cols, int i, int j) {
  IntMatrix m(rows, cols);
  m.set(i, j, 1);
  return m;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::int64_t v) { return v == 0; });
}

int IntMatrix::nonzeros() const {
  return static_cast<int>(std::count_if(data_.begin(), data_.end(), [](std::int64_t v) { return v != 0; }));
}

IntMatrix& IntMatrix::operator+=(const IntMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

IntMatrix& IntMatrix::operator-=(const IntMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

IntMatrix IntMatrix::reduced(const Ring& ring) const {
  IntMatrix out = *this;
  for (auto& v : out.data_) v = ring.reduce(v);
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
  return t;
}

IntMatrix IntMatrix::cropped(std::span<const int> rows, std::span<const int> cols) const {
  check_selection(rows, rows_);
  check_selection(cols, cols_);
  IntMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.set(static_cast<int>(i), static_cast<int>(j), at(rows[i], cols[j]));
  return out;
}

IntMatrix IntMatrix::embedded(int rows, int cols, int row_offset, int col_offset) const {
  if (row_offset < 0 || col_offset < 0 || row_offset + rows_ > rows || col_offset + cols_ > cols)
    throw std::invalid_argument("embedding does not fit");
  IntMatrix out(rows, cols);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.set(row_offset + i, col_offset + j, at(i, j));
  return out;
}

std::size_t IntMatrix::hash() const {
  std::size_t h = mix(static_cast<std::size_t>(rows_ * 64 + cols_), 1);
  for (auto v : data_) h = mix(h, static_cast<std::uint64_t>(v));
  return h;
}

std::strong_ordering operator<=>(const IntMatrix& x, const IntMatrix& y) {
  if (auto c = x.rows_ <=> y.rows_; c != 0) return c;
  if (auto c = x.cols_ <=> y.cols_; c != 0) return c;
  return std::lexicographical_compare_three_way(x.data_.begin(), x.data_.end(), y.data_.begin(), y.data_.end());
}

GF2Matrix to_gf2(const IntMatrix& m) {
  GF2Matrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.set(i, j, m.at(i, j) & 1);
  return out;
}

IntMatrix to_int(const GF2Matrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.set(i, j, m.at(i, j));
  return out;
}

}  // namespace flipmm
