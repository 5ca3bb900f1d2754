#include <doctest.h>

#include <algorithm>
#include <limits>

#include "flipmm/io.hpp"
#include "support.hpp"

using namespace flipmm;

namespace {

IntScheme strassen() { return std::get<IntScheme>(load_scheme(FLIPMM_FIXTURES "/strassen.scheme")); }

GF2Scheme without_term(const GF2Scheme& s, std::size_t drop) {
  std::vector<GF2Term> terms;
  for (std::size_t l = 0; l < s.size(); ++l)
    if (l != drop) terms.push_back(s[l]);
  return GF2Scheme(s.format(), s.ring(), std::move(terms));
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("format bounds and derived sizes") {
    Format f(3, 3, 4);
    CHECK(f.naive_rank() == 36);
    CHECK(f.a_size() == 9);
    CHECK(f.b_size() == 12);
    CHECK(f.c_size() == 12);
    CHECK(f.equation_count() == 9u * 12u * 12u);
    CHECK(f.to_string() == "(3,3,4)");
    CHECK_THROWS_AS(Format(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(Format(1, 33, 1), std::invalid_argument);
    CHECK_NOTHROW(Format(32, 32, 32));
  }

  TEST_CASE("rings") {
    CHECK(Ring::gf2().reduce(3) == 1);
    CHECK(Ring::gf2().reduce(-1) == 1);
    const Ring r8 = Ring::mod2k(3);
    CHECK(r8.reduce(4) == 4);
    CHECK(r8.reduce(5) == -3);
    CHECK(r8.reduce(-4) == 4);
    CHECK(r8.reduce(-3) == -3);
    CHECK(r8.contains(4));
    CHECK_FALSE(r8.contains(-4));
    CHECK(Ring::mod2k(62).reduce(std::int64_t{1} << 61) == std::int64_t{1} << 61);
    CHECK_THROWS_AS(Ring::mod2k(1), std::invalid_argument);
    CHECK_THROWS_AS(Ring::mod2k(63), std::invalid_argument);
    CHECK(Ring::parse("gf2") == Ring::gf2());
    CHECK(Ring::parse("integer") == Ring::integer());
    CHECK(Ring::parse("mod2^5") == Ring::mod2k(5));
    CHECK(Ring::mod2k(5).name() == "mod2^5");
    CHECK_THROWS_AS(Ring::parse("mod3"), std::invalid_argument);
  }

  TEST_CASE("gf2 matrices keep unused bits clear") {
    GF2Matrix m(3, 5);
    m.set_row(0, 0xffffffffu);
    CHECK(m.row(0) == 0x1fu);
    CHECK(m.nonzeros() == 5);
    GF2Matrix t = m.transposed();
    CHECK(t.rows() == 5);
    CHECK(t.cols() == 3);
    CHECK(t.nonzeros() == 5);
    CHECK(t.transposed() == m);
    m += m;
    CHECK(m.is_zero());
    GF2Matrix full(32, 32);
    full.set_row(31, 0xffffffffu);
    CHECK(full.nonzeros() == 32);
  }

  TEST_CASE("crop and embed") {
    Rng rng(5);
    const GF2Matrix m = gen::gf2_matrix(4, 5, rng);
    const int rows[] = {1, 3};
    const int cols[] = {0, 4, 2};
    const GF2Matrix c = m.cropped(rows, cols);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) CHECK(c.get(i, j) == m.get(rows[i], cols[j]));
    const GF2Matrix e = m.embedded(6, 7, 2, 1);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 7; ++j) {
        const bool inside = i >= 2 && i < 6 && j >= 1 && j < 6;
        CHECK(e.get(i, j) == (inside ? m.get(i - 2, j - 1) : false));
      }
    const int bad[] = {4};
    CHECK_THROWS_AS(m.cropped(bad, cols), std::out_of_range);
  }

  TEST_CASE("standard scheme examples") {
    CHECK(standard_scheme<GF2Matrix>(Format(2, 2, 2), Ring::gf2()).size() == 8);
    const auto one = standard_scheme<GF2Matrix>(Format(1, 1, 1), Ring::gf2());
    REQUIRE(one.size() == 1);
    CHECK(one[0].a.get(0, 0));
    CHECK(one[0].b.get(0, 0));
    CHECK(one[0].c.get(0, 0));
    CHECK(rank(standard_scheme(Format(3, 3, 4), Ring::integer())) == 36);
    CHECK(rank(standard_scheme(Format(5, 5, 5), Ring::gf2())) == 125);
  }

  TEST_CASE("verify agrees with the brute-force oracle on standard schemes") {
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 3; ++m)
        for (int p = 1; p <= 3; ++p)
          for (const Ring& r : {Ring::gf2(), Ring::integer(), Ring::mod2k(4)}) {
            const Scheme s = standard_scheme(Format(n, m, p), r);
            CHECK(verify(s));
            std::visit([](const auto& x) { CHECK(oracle::brent_holds(x)); }, s);
          }
  }

  TEST_CASE("verify agrees with the oracle on random and walked schemes") {
    Rng rng(11);
    int valid = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const Format f(1 + static_cast<int>(uniform_below(rng, 3)), 1 + static_cast<int>(uniform_below(rng, 3)),
                     1 + static_cast<int>(uniform_below(rng, 3)));
      GF2Scheme s = trial % 2 ? gen::walked(f, 30, rng) : gen::gf2_scheme(f, 1 + uniform_below(rng, 12), rng);
      if (trial % 3 == 0 && s.size() > 0) s = without_term(s, uniform_below(rng, s.size()));
      const bool got = verify(s);
      CHECK(got == oracle::brent_holds(s));
      valid += got;
    }
    CHECK(valid > 50);
  }

  TEST_CASE("verify reports the equation count") {
    const auto s = standard_scheme<GF2Matrix>(Format(2, 3, 4), Ring::gf2());
    const auto r = verify_report(s);
    CHECK(r.ok);
    CHECK(r.equations == 6u * 12u * 8u);
    CHECK(r.violations == 0);
    const auto broken = verify_report(without_term(s, 0));
    CHECK_FALSE(broken.ok);
    CHECK(broken.violations == 1);
  }

  TEST_CASE("deleting any term of the standard (2,2,2) scheme breaks it") {
    const auto s = standard_scheme<GF2Matrix>(Format(2, 2, 2), Ring::gf2());
    for (std::size_t l = 0; l < s.size(); ++l) {
      const auto t = without_term(s, l);
      CHECK_FALSE(verify(t));
      CHECK_FALSE(oracle::brent_holds(t));
    }
  }

  TEST_CASE("Strassen's scheme verifies over Z and mod 2") {
    const IntScheme s = strassen();
    CHECK(s.size() == 7);
    CHECK(verify(s));
    CHECK(oracle::brent_holds(s));
    CHECK(verify(to_gf2(s)));
  }

  TEST_CASE("apply_scheme matches direct multiplication when verify holds") {
    Rng rng(3);
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 3; ++m)
        for (int p = 1; p <= 3; ++p) {
          const Format f(n, m, p);
          const GF2Scheme g = gen::walked(f, 40, rng);
          REQUIRE(verify(g));
          const IntScheme z = to_int(standard_scheme<GF2Matrix>(f, Ring::gf2()), Ring::integer());
          for (int trial = 0; trial < 500; ++trial) {
            const GF2Matrix x = gen::gf2_matrix(n, m, rng, false), y = gen::gf2_matrix(m, p, rng, false);
            CHECK(oracle::dense(apply_scheme(g, x, y)) == oracle::multiply(oracle::dense(x), oracle::dense(y), 2));
            if (trial % 10 == 0) {
              const IntMatrix xi = gen::int_matrix(n, m, rng, -5, 5), yi = gen::int_matrix(m, p, rng, -5, 5);
              CHECK(oracle::dense(apply_scheme(z, xi, yi)) ==
                    oracle::multiply(oracle::dense(xi), oracle::dense(yi), 0));
            }
          }
        }
  }

  TEST_CASE("apply_scheme on identities and shape errors") {
    const auto s = standard_scheme<GF2Matrix>(Format(2, 2, 2), Ring::gf2());
    GF2Matrix id(2, 2);
    id.set(0, 0, 1);
    id.set(1, 1, 1);
    CHECK(apply_scheme(s, id, id) == id);
    CHECK_THROWS_WITH_AS(apply_scheme(s, GF2Matrix(2, 3), id), "format mismatch", SchemeError);
    CHECK_THROWS_WITH_AS(apply_scheme(strassen(), IntMatrix(2, 2), IntMatrix(3, 2)), "format mismatch", SchemeError);
  }

  TEST_CASE("integer apply refuses to overflow") {
    const IntScheme s = strassen();
    IntMatrix x(2, 2), y(2, 2);
    x.set(0, 0, std::numeric_limits<std::int64_t>::max() / 2);
    x.set(1, 1, std::numeric_limits<std::int64_t>::max() / 2);
    y.set(0, 0, 4);
    CHECK_THROWS_AS(apply_scheme(s, x, y), std::overflow_error);
  }

  TEST_CASE("integer verify rejects coefficients beyond its exact range") {
    const IntScheme base = strassen();
    std::vector<IntTerm> terms(base.terms().begin(), base.terms().end());
    terms[0].a.set(0, 0, std::int64_t{1} << 50);
    const IntScheme s(Format(2, 2, 2), Ring::integer(), std::move(terms));
    CHECK_THROWS_AS(verify(s), std::overflow_error);
  }

  TEST_CASE("constructor validation") {
    GF2Term bad{GF2Matrix(2, 2), GF2Matrix(2, 3), GF2Matrix(2, 2)};
    CHECK_THROWS_AS(GF2Scheme(Format(2, 2, 2), Ring::gf2(), {bad}), SchemeError);
    CHECK_THROWS_AS(GF2Scheme(Format(1, 1, 1), Ring::integer(), {}), SchemeError);
    CHECK_THROWS_AS(IntScheme(Format(1, 1, 1), Ring::gf2(), {}), SchemeError);
    IntTerm unbalanced{IntMatrix(1, 1, {4}), IntMatrix(1, 1, {1}), IntMatrix(1, 1, {1})};
    CHECK_THROWS_AS(IntScheme(Format(1, 1, 1), Ring::mod2k(2), {unbalanced}), SchemeError);
    IntTerm balanced{IntMatrix(1, 1, {2}), IntMatrix(1, 1, {1}), IntMatrix(1, 1, {1})};
    CHECK_NOTHROW(IntScheme(Format(1, 1, 1), Ring::mod2k(2), {balanced}));
  }

  TEST_CASE("mutating one coefficient of a verified scheme is detected") {
    Rng rng(17);
    const GF2Scheme base = to_gf2(strassen());
    int detected = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<GF2Term> terms(base.terms().begin(), base.terms().end());
      auto& t = terms[uniform_below(rng, terms.size())];
      GF2Matrix& m = t[kSlots[uniform_below(rng, 3)]];
      m.toggle(static_cast<int>(uniform_below(rng, 2)), static_cast<int>(uniform_below(rng, 2)));
      detected += !verify(GF2Scheme(base.format(), base.ring(), std::move(terms)));
    }
    MESSAGE("mutations detected: " << detected << " / 1000");
    CHECK(detected >= 990);
  }

  TEST_CASE("normalize drops zero terms, sorts and is idempotent") {
    Rng rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
      const Format f(1 + static_cast<int>(uniform_below(rng, 3)), 1 + static_cast<int>(uniform_below(rng, 3)),
                     1 + static_cast<int>(uniform_below(rng, 3)));
      std::vector<GF2Term> terms;
      const auto s0 = gen::gf2_scheme(f, uniform_below(rng, 10), rng, 3);
      terms.assign(s0.terms().begin(), s0.terms().end());
      if (!terms.empty() && trial % 4 == 0) terms[0].b = GF2Matrix(f.m, f.p);
      const GF2Scheme s(f, Ring::gf2(), terms);
      const GF2Scheme n1 = normalize(s);
      CHECK(normalize(n1) == n1);
      CHECK(std::is_sorted(n1.terms().begin(), n1.terms().end()));
      CHECK(std::none_of(n1.terms().begin(), n1.terms().end(), [](const auto& t) { return t.has_zero_component(); }));
      CHECK(verify(n1) == verify(s));
      std::vector<GF2Term> shuffled = terms;
      std::reverse(shuffled.begin(), shuffled.end());
      CHECK(serialize(GF2Scheme(f, Ring::gf2(), shuffled)) == serialize(s));
    }
  }

  TEST_CASE("normalize removes a term whose A is zero") {
    auto s = standard_scheme<GF2Matrix>(Format(2, 2, 2), Ring::gf2());
    std::vector<GF2Term> terms(s.terms().begin(), s.terms().end());
    terms[3].a = GF2Matrix(2, 2);
    CHECK(rank(GF2Scheme(s.format(), s.ring(), terms)) == 7);
  }

  TEST_CASE("normalize over Z keeps duplicates, over GF(2) they cancel") {
    const IntScheme z = strassen();
    std::vector<IntTerm> zt(z.terms().begin(), z.terms().end());
    zt.push_back(zt[0]);
    CHECK(rank(IntScheme(z.format(), z.ring(), zt)) == 8);
    const GF2Scheme g = to_gf2(z);
    std::vector<GF2Term> gt(g.terms().begin(), g.terms().end());
    gt.push_back(gt[0]);
    gt.push_back(gt[1]);
    gt.push_back(gt[1]);
    const GF2Scheme dup(g.format(), g.ring(), gt);
    CHECK(rank(dup) == 6);
    CHECK(verify(normalize(dup)) == verify(dup));
  }

  TEST_CASE("ring conversions") {
    const IntScheme z = strassen();
    const GF2Scheme g = to_gf2(z);
    const IntScheme back = to_int(g, Ring::mod2k(3));
    CHECK(back.ring() == Ring::mod2k(3));
    CHECK(to_gf2(back) == g);
    for (std::size_t l = 0; l < z.size(); ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(g[l].a.at(i, j) == (z[l].a.at(i, j) & 1));
  }
}
