#include "flipmm/moves.hpp"

#include <algorithm>
#include <unordered_map>

namespace flipmm {

namespace {

int shared_slots(const GF2Term& x, const GF2Term& y) {
  return (x.a == y.a) + (x.b == y.b) + (x.c == y.c);
}

GF2Scheme without_zero_terms(const GF2Scheme& s, std::vector<GF2Term> terms) {
  std::erase_if(terms, [](const GF2Term& t) { return t.has_zero_component(); });
  return GF2Scheme(s.format(), s.ring(), std::move(terms));
}

struct PairHash {
  std::size_t operator()(const std::pair<GF2Matrix, GF2Matrix>& p) const {
    return p.first.hash() * 31 + p.second.hash();
  }
};

// Buckets of equal components in order of first appearance.
std::vector<std::vector<std::size_t>> slot_groups(const GF2Scheme& s, Slot slot) {
  std::unordered_map<GF2Matrix, std::size_t, MatrixHash> index;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t l = 0; l < s.size(); ++l) {
    auto [it, inserted] = index.try_emplace(s[l][slot], groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(l);
  }
  return groups;
}

}  // namespace

GF2Scheme flip(const GF2Scheme& s, const FlipMove& mv) {
  if (mv.i == mv.j || mv.i >= s.size() || mv.j >= s.size() || (mv.direction != 0 && mv.direction != 1) ||
      s[mv.i][mv.shared] != s[mv.j][mv.shared] || s[mv.i] == s[mv.j])
    throw SchemeError("not a flip");

  const Slot u = next_slot(mv.shared), v = prev_slot(mv.shared);
  const Slot grow = mv.direction == 0 ? u : v;
  const Slot shrink = mv.direction == 0 ? v : u;

  std::vector<GF2Term> terms(s.terms().begin(), s.terms().end());
  terms[mv.i][grow] += s[mv.j][grow];
  terms[mv.j][shrink] += s[mv.i][shrink];
  return without_zero_terms(s, std::move(terms));
}

std::vector<ReductionMove> find_reductions(const GF2Scheme& s) {
  std::vector<ReductionMove> out;
  const std::pair<Slot, Slot> keys[3] = {{Slot::a, Slot::b}, {Slot::b, Slot::c}, {Slot::a, Slot::c}};
  for (auto [x, y] : keys) {
    std::unordered_map<std::pair<GF2Matrix, GF2Matrix>, std::vector<std::size_t>, PairHash> buckets;
    for (std::size_t l = 0; l < s.size(); ++l) buckets[{s[l][x], s[l][y]}].push_back(l);
    for (const auto& [key, members] : buckets)
      for (std::size_t p = 0; p < members.size(); ++p)
        for (std::size_t q = p + 1; q < members.size(); ++q) out.push_back({members[p], members[q]});
  }
  // Identical terms land in all three bucket kinds.
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GF2Scheme reduce(const GF2Scheme& s, const ReductionMove& mv) {
  if (mv.i == mv.j || mv.i >= s.size() || mv.j >= s.size() || shared_slots(s[mv.i], s[mv.j]) < 2)
    throw SchemeError("not a reduction");

  std::vector<GF2Term> terms(s.terms().begin(), s.terms().end());
  for (Slot slot : kSlots)
    if (s[mv.i][slot] != s[mv.j][slot]) terms[mv.i][slot] += s[mv.j][slot];
  if (s[mv.i] == s[mv.j]) terms[mv.i].a = GF2Matrix::zero(s.format().n, s.format().m);
  terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(mv.j));
  return without_zero_terms(s, std::move(terms));
}

std::vector<FlipMove> enumerate_flips(const GF2Scheme& s) {
  std::vector<FlipMove> out;
  for (Slot slot : kSlots)
    for (const auto& group : slot_groups(s, slot))
      for (std::size_t p = 0; p < group.size(); ++p)
        for (std::size_t q = p + 1; q < group.size(); ++q) {
          const std::size_t i = group[p], j = group[q];
          if (s[i] == s[j]) continue;
          for (auto [x, y] : {std::pair{i, j}, std::pair{j, i}})
            for (int d = 0; d < 2; ++d) out.push_back({x, y, slot, d});
        }
  return out;
}

std::size_t count_flips(const GF2Scheme& s) {
  std::size_t count = 0;
  for (Slot slot : kSlots)
    for (const auto& group : slot_groups(s, slot))
      for (std::size_t p = 0; p < group.size(); ++p)
        for (std::size_t q = p + 1; q < group.size(); ++q)
          if (s[group[p]] != s[group[q]]) count += 4;
  return count;
}

GF2Scheme split(const GF2Scheme& s, const SplitMove& mv) {
  if (mv.i >= s.size()) throw SchemeError("degenerate split");
  const GF2Matrix& current = s[mv.i][mv.slot];
  if (mv.mask.rows() != current.rows() || mv.mask.cols() != current.cols() || mv.mask.is_zero() ||
      mv.mask == current)
    throw SchemeError("degenerate split");

  std::vector<GF2Term> terms(s.terms().begin(), s.terms().end());
  GF2Term second = terms[mv.i];
  second[mv.slot] = current + mv.mask;
  terms[mv.i][mv.slot] = mv.mask;
  terms.push_back(std::move(second));
  return GF2Scheme(s.format(), s.ring(), std::move(terms));
}

}  // namespace flipmm
