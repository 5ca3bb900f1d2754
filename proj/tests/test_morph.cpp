#include <doctest.h>

#include <numeric>
#include <set>

#include "flipmm/io.hpp"
#include "flipmm/morph.hpp"
#include "support.hpp"

using namespace flipmm;

namespace {

std::vector<int> iota(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<int> random_subset(int n, int k, Rng& rng) {
  std::vector<int> all = iota(n);
  for (int i = 0; i < k; ++i) std::swap(all[i], all[i + static_cast<int>(uniform_below(rng, n - i))]);
  all.resize(static_cast<std::size_t>(k));
  return all;
}

Format random_format(Rng& rng, int lo, int hi) {
  auto d = [&] { return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1))); };
  return Format(d(), d(), d());
}

IntScheme strassen() { return std::get<IntScheme>(load_scheme(FLIPMM_FIXTURES "/strassen.scheme")); }

}  // namespace

TEST_SUITE("morph") {
  TEST_CASE("rank-23 (3,3,3) plus standard (3,3,1) gives a rank-32 (3,3,4) scheme") {
    SearchConfig cfg;
    cfg.seed = 1;
    cfg.target_rank = 23;
    Rng rng(cfg.seed);
    const GF2Scheme s23 = walk(standard_scheme<GF2Matrix>(Format(3, 3, 3), Ring::gf2()), cfg, rng).best;
    REQUIRE(s23.size() == 23);
    const GF2Scheme s = extend(s23, standard_scheme<GF2Matrix>(Format(3, 3, 1), Ring::gf2()));
    CHECK(s.format() == Format(3, 3, 4));
    CHECK(s.size() == 32);
    CHECK(verify(s));
    CHECK(oracle::brent_holds(s));
  }

  TEST_CASE("extension is additive and correct along every axis") {
    Rng rng(4);
    for (int trial = 0; trial < 60; ++trial) {
      const Format f = random_format(rng, 1, 3);
      const int extra = 1 + static_cast<int>(uniform_below(rng, 2));
      const Axis axis = static_cast<Axis>(uniform_below(rng, 3));
      Format g = f;
      (axis == Axis::n ? g.n : axis == Axis::m ? g.m : g.p) = extra;
      const GF2Scheme s1 = gen::walked(f, 15, rng), s2 = gen::walked(g, 15, rng);
      const GF2Scheme s = extend_along(s1, s2, axis);
      CHECK(s.size() == s1.size() + s2.size());
      CHECK(verify(s));
      CHECK(oracle::brent_holds(s));
      Format want = f;
      (axis == Axis::n ? want.n : axis == Axis::m ? want.m : want.p) += extra;
      CHECK(s.format() == want);
      // Cropping away the added block gives back the first operand.
      Selector sel{iota(f.n), iota(f.m), iota(f.p)};
      CHECK(normalize(restrict(s, sel)) == normalize(s1));
    }
  }

  TEST_CASE("extension over Z") {
    const IntScheme s = strassen();
    const IntScheme wide = extend(s, standard_scheme<IntMatrix>(Format(2, 2, 1), Ring::integer()));
    CHECK(wide.size() == 11);
    CHECK(verify(wide));
    CHECK(oracle::brent_holds(wide));
    const Scheme along_n = extend_along(Scheme(s), Scheme(s), Axis::n);
    CHECK(format_of(along_n) == Format(4, 2, 2));
    CHECK(verify(along_n));
  }

  TEST_CASE("extend rejects incompatible operands") {
    const auto a = standard_scheme<GF2Matrix>(Format(2, 2, 2), Ring::gf2());
    const auto b = standard_scheme<GF2Matrix>(Format(2, 3, 1), Ring::gf2());
    CHECK_THROWS_WITH_AS(extend(a, b), "incompatible formats", SchemeError);
    CHECK_THROWS_WITH_AS(extend(Scheme(a), Scheme(strassen())), "incompatible formats", SchemeError);
    const auto big = standard_scheme<GF2Matrix>(Format(2, 2, 31), Ring::gf2());
    CHECK_THROWS_AS(extend(big, a), std::invalid_argument);
  }

  TEST_CASE("restricting the first two rows of (3,3,3)") {
    const auto s = standard_scheme<GF2Matrix>(Format(3, 3, 3), Ring::gf2());
    const auto r = restrict(s, Selector{{0, 1}, {0, 1, 2}, {0, 1, 2}});
    CHECK(r.format() == Format(2, 3, 3));
    CHECK(r.size() == 18);
    CHECK(verify(r));
    CHECK(normalize(r) == normalize(standard_scheme<GF2Matrix>(Format(2, 3, 3), Ring::gf2())));
    CHECK(Scheme(r) == restrict(Scheme(s), Format(2, 3, 3)));
  }

  TEST_CASE("restricting to the full format is the identity") {
    Rng rng(6);
    const auto s = gen::walked(Format(2, 3, 4), 30, rng);
    CHECK(restrict(s, Selector::leading(s.format())) == s);
  }

  TEST_CASE("restriction with random selectors preserves correctness") {
    Rng rng(10);
    for (int trial = 0; trial < 80; ++trial) {
      const Format f = random_format(rng, 2, 4);
      const GF2Scheme s = gen::walked(f, 30, rng);
      const Format t(1 + static_cast<int>(uniform_below(rng, f.n)), 1 + static_cast<int>(uniform_below(rng, f.m)),
                     1 + static_cast<int>(uniform_below(rng, f.p)));
      const Selector sel{random_subset(f.n, t.n, rng), random_subset(f.m, t.m, rng), random_subset(f.p, t.p, rng)};
      const GF2Scheme r = restrict(s, sel);
      CHECK(r.format() == t);
      CHECK(r.size() <= s.size());
      CHECK(verify(r));
      CHECK(oracle::brent_holds(r));
    }
  }

  TEST_CASE("restrict rejects bad selectors") {
    const auto s = standard_scheme<GF2Matrix>(Format(2, 2, 2), Ring::gf2());
    CHECK_THROWS_AS(restrict(s, Selector{{0, 2}, {0}, {0}}), std::out_of_range);
    CHECK_THROWS_AS(restrict(s, Selector{{}, {0}, {0}}), std::out_of_range);
    CHECK_THROWS_AS(restrict(s, Selector{{1, 1}, {0}, {0}}), std::out_of_range);
    CHECK_THROWS_AS(restrict(Scheme(s), Format(3, 2, 2)), std::invalid_argument);
  }

  TEST_CASE("rotate has order three and preserves correctness") {
    const auto s = standard_scheme<GF2Matrix>(Format(2, 3, 4), Ring::gf2());
    const auto r = rotate(s);
    CHECK(r.format() == Format(3, 4, 2));
    CHECK(r.size() == 24);
    CHECK(verify(r));
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
      const Format f = random_format(rng, 1, 4);
      const auto x = gen::gf2_scheme(f, uniform_below(rng, 20), rng);
      CHECK(rotate(rotate(rotate(x))) == x);
      CHECK(rotate(x).size() == x.size());
      CHECK(verify(rotate(x)) == verify(x));
    }
    CHECK(verify(rotate(strassen())));
  }

  TEST_CASE("transpose is an involution and preserves correctness") {
    Rng rng(14);
    const auto s = gen::walked(Format(4, 5, 6), 40, rng);
    const auto t = transpose(s);
    CHECK(t.format() == Format(6, 5, 4));
    CHECK(t.size() == s.size());
    CHECK(verify(t));
    CHECK(transpose(t) == s);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = gen::gf2_scheme(random_format(rng, 1, 3), uniform_below(rng, 15), rng);
      CHECK(transpose(transpose(x)) == x);
      CHECK(verify(transpose(x)) == verify(x));
    }
    const IntScheme z = transpose(strassen());
    CHECK(verify(z));
    CHECK(oracle::brent_holds(z));
  }

  TEST_CASE("the symmetry orbit of a (2,3,4) scheme") {
    Rng rng(15);
    const auto s = gen::walked(Format(2, 3, 4), 30, rng);
    std::set<std::tuple<int, int, int>> formats;
    std::set<std::string> images;
    for (const Symmetry& g : kSymmetries) {
      const auto x = apply_symmetry(s, g);
      CHECK(verify(x));
      CHECK(x.format() == apply_symmetry(s.format(), g));
      formats.insert({x.format().n, x.format().m, x.format().p});
      images.insert(serialize(x));
      CHECK(canonical_format(x).format() == Format(2, 3, 4));
      CHECK(verify(canonical_format(x)));
    }
    CHECK(formats.size() == 6);
    CHECK(images.size() == 6);
  }

  TEST_CASE("canonical format examples") {
    const auto s = standard_scheme<GF2Matrix>(Format(7, 5, 6), Ring::gf2());
    const auto c = canonical_format(s);
    CHECK(c.format() == Format(5, 6, 7));
    CHECK(c.size() == s.size());
    CHECK(verify(c));
    const auto sorted = standard_scheme<GF2Matrix>(Format(2, 3, 3), Ring::gf2());
    CHECK(canonical_format(sorted) == sorted);
  }
}
