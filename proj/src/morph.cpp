#include "flipmm/morph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flipmm {

namespace {

void check_selection(const std::vector<int>& idx, int bound, const char* axis) {
  if (idx.empty()) throw std::out_of_range(std::string("selector for axis ") + axis + " is empty");
  std::vector<int> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= bound)
    throw std::out_of_range(std::string("selector index out of range on axis ") + axis);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::out_of_range(std::string("repeated selector index on axis ") + axis);
}

std::vector<int> iota(int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

template <class F>
Scheme visit_same(const Scheme& x, const Scheme& y, F&& f) {
  if (x.index() != y.index()) throw SchemeError("incompatible formats");
  return std::visit(
      [&](const auto& a) -> Scheme {
        using S = std::decay_t<decltype(a)>;
        return f(a, std::get<S>(y));
      },
      x);
}

}  // namespace

template <class M>
BasicScheme<M> extend(const BasicScheme<M>& first, const BasicScheme<M>& second) {
  const Format& f1 = first.format();
  const Format& f2 = second.format();
  if (first.ring() != second.ring() || f1.n != f2.n || f1.m != f2.m) throw SchemeError("incompatible formats");
  const Format out(f1.n, f1.m, f1.p + f2.p);

  std::vector<BasicTerm<M>> terms;
  terms.reserve(first.size() + second.size());
  for (const auto& t : first.terms())
    terms.push_back({t.a, t.b.embedded(out.m, out.p, 0, 0), t.c.embedded(out.p, out.n, 0, 0)});
  for (const auto& t : second.terms())
    terms.push_back({t.a, t.b.embedded(out.m, out.p, 0, f1.p), t.c.embedded(out.p, out.n, f1.p, 0)});
  return BasicScheme<M>(out, first.ring(), std::move(terms));
}

Scheme extend(const Scheme& first, const Scheme& second) {
  return visit_same(first, second, [](const auto& a, const auto& b) { return extend(a, b); });
}

template <class M>
BasicScheme<M> extend_along(const BasicScheme<M>& first, const BasicScheme<M>& second, Axis axis) {
  switch (axis) {
    case Axis::p:
      return extend(first, second);
    case Axis::n:
      return rotate(rotate(extend(rotate(first), rotate(second))));
    case Axis::m:
      return rotate(extend(rotate(rotate(first)), rotate(rotate(second))));
  }
  throw std::invalid_argument("bad axis");
}

Scheme extend_along(const Scheme& first, const Scheme& second, Axis axis) {
  return visit_same(first, second, [axis](const auto& a, const auto& b) { return extend_along(a, b, axis); });
}

Selector Selector::leading(Format target) { return {iota(target.n), iota(target.m), iota(target.p)}; }

template <class M>
BasicScheme<M> restrict(const BasicScheme<M>& s, const Selector& sel) {
  const Format& f = s.format();
  check_selection(sel.n, f.n, "n");
  check_selection(sel.m, f.m, "m");
  check_selection(sel.p, f.p, "p");
  const Format out(static_cast<int>(sel.n.size()), static_cast<int>(sel.m.size()), static_cast<int>(sel.p.size()));

  std::vector<BasicTerm<M>> terms;
  for (const auto& t : s.terms()) {
    BasicTerm<M> r{t.a.cropped(sel.n, sel.m), t.b.cropped(sel.m, sel.p), t.c.cropped(sel.p, sel.n)};
    if (!r.has_zero_component()) terms.push_back(std::move(r));
  }
  return BasicScheme<M>(out, s.ring(), std::move(terms));
}

Scheme restrict(const Scheme& s, const Selector& sel) {
  return std::visit([&](const auto& x) -> Scheme { return restrict(x, sel); }, s);
}

Scheme restrict(const Scheme& s, Format target) {
  const Format& f = format_of(s);
  if (target.n > f.n || target.m > f.m || target.p > f.p)
    throw std::invalid_argument("restriction target " + target.to_string() + " exceeds source " + f.to_string());
  return restrict(s, Selector::leading(target));
}

template <class M>
BasicScheme<M> rotate(const BasicScheme<M>& s) {
  const Format& f = s.format();
  std::vector<BasicTerm<M>> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) terms.push_back({t.b, t.c, t.a});
  return BasicScheme<M>(Format(f.m, f.p, f.n), s.ring(), std::move(terms));
}

Scheme rotate(const Scheme& s) {
  return std::visit([](const auto& x) -> Scheme { return rotate(x); }, s);
}

template <class M>
BasicScheme<M> transpose(const BasicScheme<M>& s) {
  const Format& f = s.format();
  std::vector<BasicTerm<M>> terms;
  terms.reserve(s.size());
  for (const auto& t : s.terms()) terms.push_back({t.b.transposed(), t.a.transposed(), t.c.transposed()});
  return BasicScheme<M>(Format(f.p, f.m, f.n), s.ring(), std::move(terms));
}

Scheme transpose(const Scheme& s) {
  return std::visit([](const auto& x) -> Scheme { return transpose(x); }, s);
}

template <class M>
BasicScheme<M> apply_symmetry(const BasicScheme<M>& s, Symmetry g) {
  BasicScheme<M> out = s;
  for (int r = 0; r < g.rotations; ++r) out = rotate(out);
  if (g.transposed) out = transpose(out);
  return out;
}

Scheme apply_symmetry(const Scheme& s, Symmetry g) {
  return std::visit([g](const auto& x) -> Scheme { return apply_symmetry(x, g); }, s);
}

Format apply_symmetry(Format f, Symmetry g) {
  for (int r = 0; r < g.rotations; ++r) f = Format(f.m, f.p, f.n);
  if (g.transposed) f = Format(f.p, f.m, f.n);
  return f;
}

template <class M>
BasicScheme<M> canonical_format(const BasicScheme<M>& s) {
  for (Symmetry g : kSymmetries) {
    const Format f = apply_symmetry(s.format(), g);
    if (f.n <= f.m && f.m <= f.p) return apply_symmetry(s, g);
  }
  throw std::logic_error("no symmetry sorts the format");
}

Scheme canonical_format(const Scheme& s) {
  return std::visit([](const auto& x) -> Scheme { return canonical_format(x); }, s);
}

template GF2Scheme extend(const GF2Scheme&, const GF2Scheme&);
template IntScheme extend(const IntScheme&, const IntScheme&);
template GF2Scheme extend_along(const GF2Scheme&, const GF2Scheme&, Axis);
template IntScheme extend_along(const IntScheme&, const IntScheme&, Axis);
template GF2Scheme restrict(const GF2Scheme&, const Selector&);
template IntScheme restrict(const IntScheme&, const Selector&);
template GF2Scheme rotate(const GF2Scheme&);
template IntScheme rotate(const IntScheme&);
template GF2Scheme transpose(const GF2Scheme&);
template IntScheme transpose(const IntScheme&);
template GF2Scheme apply_symmetry(const GF2Scheme&, Symmetry);
template IntScheme apply_symmetry(const IntScheme&, Symmetry);
template GF2Scheme canonical_format(const GF2Scheme&);
template IntScheme canonical_format(const IntScheme&);

}  // namespace flipmm
