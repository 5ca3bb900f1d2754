#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flipmm/io.hpp"
#include "support.hpp"

using namespace flipmm;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

IntScheme strassen() { return std::get<IntScheme>(load_scheme(FLIPMM_FIXTURES "/strassen.scheme")); }

Scheme random_scheme(Rng& rng) {
  auto d = [&] { return 1 + static_cast<int>(uniform_below(rng, 4)); };
  const Format f(d(), d(), d());
  const std::size_t rank = uniform_below(rng, 12);
  switch (uniform_below(rng, 3)) {
    case 0:
      return gen::gf2_scheme(f, rank, rng);
    case 1: {
      std::vector<IntTerm> terms;
      for (std::size_t l = 0; l < rank; ++l)
        terms.push_back({gen::int_matrix(f.n, f.m, rng, -5, 5), gen::int_matrix(f.m, f.p, rng, -5, 5),
                         gen::int_matrix(f.p, f.n, rng, -5, 5)});
      return IntScheme(f, Ring::integer(), std::move(terms));
    }
    default: {
      const Ring ring = Ring::mod2k(2 + static_cast<int>(uniform_below(rng, 10)));
      std::vector<IntTerm> terms;
      for (std::size_t l = 0; l < rank; ++l)
        terms.push_back({gen::int_matrix(f.n, f.m, rng, -300, 300).reduced(ring),
                         gen::int_matrix(f.m, f.p, rng, -300, 300).reduced(ring),
                         gen::int_matrix(f.p, f.n, rng, -300, 300).reduced(ring)});
      return IntScheme(f, ring, std::move(terms));
    }
  }
}

int parse_error_line(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string parse_error(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("the smallest scheme") {
    const auto s = standard_scheme<GF2Matrix>(Format(1, 1, 1), Ring::gf2());
    CHECK(serialize(s) == "format 1 1 1 gf2 1\n1 | 1 | 1\n");
  }

  TEST_CASE("Strassen survives a round trip") {
    const IntScheme s = strassen();
    const Scheme back = parse(serialize(s));
    CHECK(format_of(back) == Format(2, 2, 2));
    CHECK(rank(back) == 7);
    CHECK(verify(back));
    CHECK(back == Scheme(normalize(s)));
  }

  TEST_CASE("serialize, parse, serialize is stable on random schemes") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
      const Scheme s = random_scheme(rng);
      const std::string text = serialize(s);
      const Scheme back = parse(text);
      CHECK(back == normalize(s));
      CHECK(serialize(back) == text);
    }
  }

  TEST_CASE("term order does not change the bytes") {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
      const GF2Scheme s = gen::walked(Format(2, 3, 2), 20, rng);
      std::vector<GF2Term> terms(s.terms().begin(), s.terms().end());
      for (std::size_t i = terms.size(); i > 1; --i) std::swap(terms[i - 1], terms[uniform_below(rng, i)]);
      CHECK(serialize(GF2Scheme(s.format(), s.ring(), terms)) == serialize(s));
    }
  }

  TEST_CASE("whitespace, blank lines and notes") {
    // The canonical Strassen text with its spacing disturbed.
    std::string body = serialize(strassen());
    body = body.substr(body.find('\n') + 1);
    std::string text = "\n  format   2 2 2 integer 7  \n# Strassen 1969\n#second line\n\n";
    for (char ch : body) {
      if (ch == ' ') text += "  ";
      else if (ch == '|') text += "\t|";
      else if (ch == '\n') text += " \n\n";
      else text += ch;
    }
    const SchemeFile file = parse_file(text);
    CHECK(file.note == "Strassen 1969\nsecond line");
    CHECK(rank(file.scheme) == 7);
    CHECK(verify(file.scheme));
    const std::string canonical = serialize(file);
    CHECK(canonical.starts_with("format 2 2 2 integer 7\n# Strassen 1969\n# second line\n"));
    const SchemeFile again = parse_file(canonical);
    CHECK(again.note == file.note);
    CHECK(again.scheme == file.scheme);
  }

  TEST_CASE("ring tokens") {
    const IntScheme s = to_int(standard_scheme<GF2Matrix>(Format(1, 2, 1), Ring::gf2()), Ring::mod2k(5));
    const std::string text = serialize(s);
    CHECK(text.starts_with("format 1 2 1 mod2^5 2\n"));
    CHECK(parse(text) == Scheme(normalize(s)));
  }

  TEST_CASE("header and body disagree on the rank") {
    std::string text = serialize(strassen());
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    CHECK(parse_error_line(text) == 1);
    CHECK(parse_error(text).find("rank 7") != std::string::npos);
    CHECK(parse_error(text).find("6 terms") != std::string::npos);
  }

  TEST_CASE("a coefficient outside GF(2) names its line") {
    const std::string text = "format 1 1 1 gf2 2\n1 | 1 | 1\n# note\n2 | 1 | 1\n";
    CHECK(parse_error_line(text) == 4);
    CHECK(parse_error(text).starts_with("line 4: "));
    CHECK(parse_error(text).find("gf2") != std::string::npos);
  }

  TEST_CASE("malformed input") {
    CHECK(parse_error_line("") == 0);
    CHECK(parse_error_line("formt 1 1 1 gf2 1\n1 | 1 | 1\n") == 1);
    CHECK(parse_error_line("format 1 0 1 gf2 1\n1 | 1 | 1\n") == 1);
    CHECK(parse_error_line("format 1 1 1 gf3 1\n1 | 1 | 1\n") == 1);
    CHECK(parse_error_line("format 1 1 1 gf2 1\n1 | 1\n") == 2);
    CHECK(parse_error_line("format 1 2 1 gf2 1\n1 | 1 | 1\n") == 2);
    CHECK(parse_error_line("format 1 1 1 integer 1\n1 | x | 1\n") == 2);
    CHECK(parse_error_line("format 1 1 1 mod2^3 1\n1 | 8 | 1\n") == 2);
    CHECK(parse_error(("format 1 1 1 gf2 1\n1 | 1 1 | 1\n")).find("needs 1 coefficients, found 2") !=
          std::string::npos);
  }

  TEST_CASE("save and load") {
    const auto dir = std::filesystem::temp_directory_path() / "flipmm-io-test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "s.scheme";
    save_scheme(path, strassen(), "from the fixture");
    const SchemeFile file = load_scheme_file(path);
    CHECK(file.note == "from the fixture");
    CHECK(file.scheme == Scheme(normalize(strassen())));
    CHECK(slurp(path) == serialize(SchemeFile{file.scheme, file.note}));
    for (const auto& entry : std::filesystem::directory_iterator(dir)) CHECK(entry.path() == path);
    CHECK_THROWS(load_scheme(dir / "missing.scheme"));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("importing Strassen written as products of linear forms") {
    const ImportResult r = import_published(slurp(FLIPMM_FIXTURES "/strassen_products.txt"));
    CHECK(format_of(r.scheme) == Format(2, 2, 2));
    CHECK(rank(r.scheme) == 7);
    CHECK(ring_of(r.scheme) == Ring::integer());
    CHECK(verify(r.scheme));
    CHECK(oracle::brent_holds(std::get<IntScheme>(r.scheme)));
    CHECK(r.variant.index_base == 1);
    CHECK(r.variant.describe() == "A=a,B=b,C=c^T base=1");
  }

  TEST_CASE("index syntaxes and bases") {
    // The standard (1,2,1) scheme in several spellings. C entries are written
    // in the file's own (row, column) order of Z, so C must be transposed.
    for (const char* text : {
             "a11*b11*c11 + a12*b21*c11",
             "(a1_1)*(b1_1)*(c1_1); (a1_2)*(b2_1)*(c1_1)",
             "a_{1,1}*b_{1,1}*c_{1,1}\na_{1,2}*b_{2,1}*c_{1,1}",
             "a[1,1]*b[1,1]*c[1,1] + a(1,2)*b(2,1)*c(1,1)",
             "a00*b00*c00 + a01*b10*c00",
             "% comment\na_0_0*b_0_0*c_0_0 // tail\n+a_0_1*b_1_0*c_0_0",
         }) {
      CAPTURE(text);
      const ImportResult r = import_published(text, {Format(1, 2, 1), std::nullopt});
      CHECK(format_of(r.scheme) == Format(1, 2, 1));
      CHECK(rank(r.scheme) == 2);
      CHECK(verify(r.scheme));
    }
    CHECK(import_published("a00*b00*c00 + a01*b10*c00").variant.index_base == 0);
    CHECK(import_published("a11*b11*c11 + a12*b21*c11").variant.index_base == 1);
  }

  TEST_CASE("integer coefficients and the GF(2) fallback") {
    const ImportResult z = import_published("2*a11*b11*c11 - a11*b11*c11");
    CHECK(ring_of(z.scheme) == Ring::integer());
    CHECK(verify(z.scheme));
    // 3*x = x only modulo 2.
    const ImportResult g = import_published("3*a11*b11*c11");
    CHECK(ring_of(g.scheme) == Ring::gf2());
    CHECK(verify(g.scheme));
  }

  TEST_CASE("the canonical format imports directly") {
    const ImportResult r = import_published(serialize(strassen()));
    CHECK(r.scheme == Scheme(normalize(strassen())));
  }

  TEST_CASE("the hint restricts the format") {
    const std::string text = slurp(FLIPMM_FIXTURES "/strassen_products.txt");
    CHECK_THROWS_WITH_AS(import_published(text, {Format(2, 2, 3), std::nullopt}),
                         "unrecognized convention or broken scheme", SchemeError);
    ImportVariant v;
    v.transposed = {false, false, true};
    CHECK(import_published(text, {std::nullopt, v}).variant.describe() == v.describe());
  }

  TEST_CASE("import failures") {
    std::string text = slurp(FLIPMM_FIXTURES "/strassen_products.txt");
    text.erase(text.rfind("\n+"));
    CHECK_THROWS_WITH_AS(import_published(text), "unrecognized convention or broken scheme", SchemeError);
    CHECK_THROWS_AS(import_published("(a11+*b11)*c11"), ParseError);
    CHECK_THROWS_AS(import_published("a11*b11"), ParseError);
    CHECK_THROWS_AS(import_published(""), ParseError);
  }
}
