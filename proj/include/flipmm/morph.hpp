#pragma once

#include <array>
#include <optional>
#include <vector>

#include "flipmm/scheme.hpp"

namespace flipmm {

enum class Axis { n, m, p };

/// Blockwise concatenation along p: (n,m,p) and (n,m,q) give (n,m,p+q).
/// The first scheme computes the leading p output columns, the second the
/// remaining q. Throws SchemeError("incompatible formats") on ring or (n,m)
/// mismatch.
template <class M>
BasicScheme<M> extend(const BasicScheme<M>& first, const BasicScheme<M>& second);
Scheme extend(const Scheme& first, const Scheme& second);

/// Concatenation along any axis, via rotations around the p-axis version.
template <class M>
BasicScheme<M> extend_along(const BasicScheme<M>& first, const BasicScheme<M>& second, Axis axis);
Scheme extend_along(const Scheme& first, const Scheme& second, Axis axis);

/// Surviving indices per axis: rows of A (n), the inner dimension (m) and
/// columns of B (p). Indices may be given in any order; they must be
/// distinct and in range.
struct Selector {
  std::vector<int> n;
  std::vector<int> m;
  std::vector<int> p;

  /// Keeps the leading indices, i.e. zeroes trailing rows/columns.
  static Selector leading(Format target);
};

/// Zeroes every variable outside the selection and drops terms that vanish.
/// Throws std::out_of_range if a selector index is invalid.
template <class M>
BasicScheme<M> restrict(const BasicScheme<M>& s, const Selector& sel);
Scheme restrict(const Scheme& s, const Selector& sel);
/// Default selector: Selector::leading(target). Throws std::invalid_argument
/// if the target is larger than the source along any axis.
Scheme restrict(const Scheme& s, Format target);

/// (A,B,C) -> (B,C,A); format (n,m,p) -> (m,p,n).
template <class M>
BasicScheme<M> rotate(const BasicScheme<M>& s);
Scheme rotate(const Scheme& s);

/// (A,B,C) -> (B^T, A^T, C^T); format (n,m,p) -> (p,m,n).
template <class M>
BasicScheme<M> transpose(const BasicScheme<M>& s);
Scheme transpose(const Scheme& s);

/// The six elements of the symmetry group, as (transpose?, rotations).
struct Symmetry {
  bool transposed = false;
  int rotations = 0;
};

inline constexpr std::array<Symmetry, 6> kSymmetries = {
    Symmetry{false, 0}, Symmetry{false, 1}, Symmetry{false, 2},
    Symmetry{true, 0},  Symmetry{true, 1},  Symmetry{true, 2}};

/// rotate^rotations, then transpose if requested.
template <class M>
BasicScheme<M> apply_symmetry(const BasicScheme<M>& s, Symmetry g);
Scheme apply_symmetry(const Scheme& s, Symmetry g);

/// Format after applying g to a scheme of format f.
Format apply_symmetry(Format f, Symmetry g);

/// First symmetry (in kSymmetries order) that yields n <= m <= p.
template <class M>
BasicScheme<M> canonical_format(const BasicScheme<M>& s);
Scheme canonical_format(const Scheme& s);

}  // namespace flipmm
