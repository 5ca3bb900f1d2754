#pragma once

#include <cstddef>
#include <vector>

#include "flipmm/scheme.hpp"

namespace flipmm {

/// Rewrites two terms that agree in slot `shared`. With u, v the two other
/// slots in cyclic order (A -> B -> C -> A):
///   direction 0:  T_i[u] += T_j[u],  T_j[v] -= T_i[v]
///   direction 1:  T_i[v] += T_j[v],  T_j[u] -= T_i[u]
/// e.g. a(x)b_i(x)c_i + a(x)b_j(x)c_j = a(x)(b_i+b_j)(x)c_i + a(x)b_j(x)(c_j-c_i).
struct FlipMove {
  std::size_t i = 0;
  std::size_t j = 0;
  Slot shared = Slot::a;
  int direction = 0;

  friend bool operator==(const FlipMove&, const FlipMove&) = default;
};

/// Two terms agreeing in at least two slots; they merge into one term (or
/// cancel when all three slots agree).
struct ReductionMove {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const ReductionMove&, const ReductionMove&) = default;
  friend auto operator<=>(const ReductionMove&, const ReductionMove&) = default;
};

/// Replaces term i by two terms whose `slot` components are `mask` and
/// T_i[slot] + mask.
struct SplitMove {
  std::size_t i = 0;
  Slot slot = Slot::a;
  GF2Matrix mask;
};

/// The two slots other than `s`, in cyclic order.
inline Slot next_slot(Slot s) { return static_cast<Slot>((static_cast<int>(s) + 1) % 3); }
inline Slot prev_slot(Slot s) { return static_cast<Slot>((static_cast<int>(s) + 2) % 3); }

/// Throws SchemeError("not a flip") unless the terms differ, share the slot
/// and both indices are valid. Terms left with a zero component are dropped;
/// the order of the remaining terms is kept.
GF2Scheme flip(const GF2Scheme& s, const FlipMove& mv);

/// All pairs i < j agreeing in two or three slots, sorted.
std::vector<ReductionMove> find_reductions(const GF2Scheme& s);

/// Merged term takes position i, term j is removed. Throws SchemeError("not a
/// reduction") if the terms agree in fewer than two slots.
GF2Scheme reduce(const GF2Scheme& s, const ReductionMove& mv);

/// Every valid flip. Each unordered pair {i, j} with T_i[s] == T_j[s] (and
/// T_i != T_j) contributes (i,j,0), (i,j,1), (j,i,0), (j,i,1). Moves are
/// grouped by slot A, B, C; within a slot, groups appear in order of their
/// first term.
std::vector<FlipMove> enumerate_flips(const GF2Scheme& s);

/// Number of moves enumerate_flips would return.
std::size_t count_flips(const GF2Scheme& s);

/// First half stays at position i, second half is appended. Throws
/// SchemeError("degenerate split") if the mask is zero, equals the current
/// component or has the wrong shape.
GF2Scheme split(const GF2Scheme& s, const SplitMove& mv);

}  // namespace flipmm
