#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "flipmm/scheme.hpp"

namespace flipmm {

/// Malformed scheme text. line() is 1-based; 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Canonical text form:
///
///   format N M P RING RANK
///   # optional note lines
///   a_11 a_12 ... | b_11 ... | c_11 ...
///
/// RING is gf2, integer or mod2^K. One line per term; each block lists one
/// component row-major (A is n x m, B is m x p, C is p x n) as decimal
/// integers. Terms are written in normalized order.
struct SchemeFile {
  Scheme scheme;
  std::string note;
};

template <class M>
std::string serialize(const BasicScheme<M>& s);
std::string serialize(const Scheme& s);
/// Note lines go right after the header, one "# " line per note line.
std::string serialize(const SchemeFile& file);

/// Inverse of serialize. Accepts any whitespace layout within a line, blank
/// lines and '#' comments. Throws ParseError.
Scheme parse(std::string_view text);
SchemeFile parse_file(std::string_view text);

SchemeFile load_scheme_file(const std::filesystem::path& path);
Scheme load_scheme(const std::filesystem::path& path);
/// Writes via a temporary file and rename, so readers never see a partial file.
void save_scheme(const std::filesystem::path& path, const Scheme& s, const std::string& note = {});

/// How an imported file was mapped onto this library's convention.
struct ImportVariant {
  /// Slot X of the result is raw factor permutation[X] ('a', 'b', 'c' =
  /// 0, 1, 2), transposed if transposed[X].
  std::array<int, 3> permutation{0, 1, 2};
  std::array<bool, 3> transposed{false, false, false};
  /// Index base detected in the file (0 or 1).
  int index_base = 1;

  std::string describe() const;
};

struct ImportResult {
  Scheme scheme;
  ImportVariant variant;
};

struct ImportHint {
  /// Only accept candidates of this format.
  std::optional<Format> format;
  /// Try this variant first.
  std::optional<ImportVariant> variant;
};

/// Reads a scheme written as a sum of products of three linear forms, e.g.
///
///   (a11+a22)*(b11+b22)*(c11+c22)
///   +(a21+a22)*(b11)*(c12-c22)
///
/// Variables are a/b/c with indices written as a12, a1_2, a_1_2, a[1,2],
/// a(1,2) or a_{1,2}; coefficients as "3*a11" or "-a11"; terms are separated
/// by newlines, '+', '-' or ';'. Text starting with "format" is read as the
/// canonical format instead. Every assignment of the three factors to the
/// slots A, B, C, with or without transposition, is tried until one
/// verifies, first over Z and then modulo 2. Throws ParseError on syntax
/// errors and SchemeError("unrecognized convention or broken scheme") if no
/// variant verifies.
ImportResult import_published(std::string_view text, const ImportHint& hint = {});

}  // namespace flipmm
