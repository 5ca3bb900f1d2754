#include "flipmm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace flipmm {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<std::int64_t> to_int(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

template <class M>
void write_block(std::ostringstream& out, const M& x) {
  bool first = true;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      if (!first) out << ' ';
      out << x.at(i, j);
      first = false;
    }
}

template <class M>
M read_block(std::string_view block, int rows, int cols, const Ring& ring, int line, const char* name) {
  const auto toks = split_ws(block);
  if (toks.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError(line, std::string("component ") + name + " needs " + std::to_string(rows * cols) +
                               " coefficients, found " + std::to_string(toks.size()));
  M out(rows, cols);
  for (std::size_t t = 0; t < toks.size(); ++t) {
    auto v = to_int(toks[t]);
    if (!v) throw ParseError(line, "bad coefficient '" + std::string(toks[t]) + "'");
    if (!ring.contains(*v))
      throw ParseError(line, "coefficient " + std::to_string(*v) + " is not an element of " + ring.name());
    out.set(static_cast<int>(t) / cols, static_cast<int>(t) % cols, *v);
  }
  return out;
}

template <class M>
Scheme parse_body(const Format& f, const Ring& ring, const std::vector<std::pair<int, std::string_view>>& body) {
  std::vector<BasicTerm<M>> terms;
  terms.reserve(body.size());
  for (auto [line, text] : body) {
    const auto bar1 = text.find('|');
    const auto bar2 = bar1 == std::string_view::npos ? bar1 : text.find('|', bar1 + 1);
    if (bar2 == std::string_view::npos || text.find('|', bar2 + 1) != std::string_view::npos)
      throw ParseError(line, "term needs three blocks separated by '|'");
    terms.push_back({read_block<M>(text.substr(0, bar1), f.n, f.m, ring, line, "A"),
                     read_block<M>(text.substr(bar1 + 1, bar2 - bar1 - 1), f.m, f.p, ring, line, "B"),
                     read_block<M>(text.substr(bar2 + 1), f.p, f.n, ring, line, "C")});
  }
  return BasicScheme<M>(f, ring, std::move(terms));
}

// ---- published-corpus reader ----

struct RawEntry {
  int i, j;
  std::int64_t coef;
};

struct RawTerm {
  std::array<std::vector<RawEntry>, 3> factor;
};

class ProductReader {
 public:
  explicit ProductReader(std::string_view text) : text_(text) {}

  std::vector<RawTerm> read() {
    std::vector<RawTerm> terms;
    for (;;) {
      skip_separators();
      if (at_end()) break;
      std::int64_t sign = 1;
      while (!at_end() && (peek() == '+' || peek() == '-')) {
        if (peek() == '-') sign = -sign;
        ++pos_;
        skip_space();
      }
      terms.push_back(read_product(sign));
    }
    return terms;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  int line() const { return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + pos_, '\n')); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line(), what); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  void skip_separators() {
    while (!at_end()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == ',' || c == '[' || c == ']' || c == ':' ||
          c == '=') {
        ++pos_;
      } else if (c == '#' || c == '%' || (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool try_integer(std::int64_t& out) {
    std::size_t j = pos_;
    while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
    if (j == pos_) return false;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + j, out);
    if (ec != std::errc()) fail("coefficient out of range");
    pos_ = j;
    return true;
  }

  int read_index() {
    std::int64_t v;
    if (!try_integer(v)) fail("expected an index");
    return static_cast<int>(v);
  }

  // After the letter: 12 | 1_2 | _1_2 | _12 | [1,2] | (1,2) | _{1,2} | _{12}
  std::pair<int, int> read_indices() {
    auto digits_here = [&] { return !at_end() && std::isdigit(static_cast<unsigned char>(peek())); };
    auto two_digits = [&]() -> std::pair<int, int> {
      std::size_t j = pos_;
      while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
      if (j - pos_ == 2 && (j >= text_.size() || text_[j] != '_')) {
        std::pair<int, int> r{text_[pos_] - '0', text_[pos_ + 1] - '0'};
        pos_ = j;
        return r;
      }
      int i = read_index();
      if (at_end() || (peek() != '_' && peek() != ',')) fail("ambiguous index; separate row and column");
      ++pos_;
      return {i, read_index()};
    };
    if (!at_end() && peek() == '_') {
      ++pos_;
      if (!at_end() && peek() == '{') {
        ++pos_;
        auto r = two_digits();
        if (at_end() || peek() != '}') fail("expected '}'");
        ++pos_;
        return r;
      }
      return two_digits();
    }
    if (!at_end() && (peek() == '[' || peek() == '(')) {
      const char close = peek() == '[' ? ']' : ')';
      ++pos_;
      skip_space();
      int i = read_index();
      skip_space();
      if (at_end() || peek() != ',') fail("expected ','");
      ++pos_;
      skip_space();
      int j = read_index();
      skip_space();
      if (at_end() || peek() != close) fail(std::string("expected '") + close + "'");
      ++pos_;
      return {i, j};
    }
    if (digits_here()) return two_digits();
    fail("expected variable indices");
  }

  int letter_slot(char c) const {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'a':
        return 0;
      case 'b':
        return 1;
      case 'c':
        return 2;
      default:
        return -1;
    }
  }

  // Linear form in one letter, e.g. a11 - 2*a23.
  std::pair<int, std::vector<RawEntry>> read_linear() {
    int slot = -1;
    std::vector<RawEntry> entries;
    bool first = true;
    for (;;) {
      skip_space();
      std::int64_t sign = 1;
      if (!at_end() && (peek() == '+' || peek() == '-')) {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_space();
      } else if (!first) {
        break;
      }
      std::int64_t coef = 1;
      if (try_integer(coef)) {
        skip_space();
        if (!at_end() && peek() == '*') ++pos_;
        skip_space();
      }
      if (at_end() || letter_slot(peek()) < 0) fail("expected a variable a.., b.. or c..");
      const int s = letter_slot(peek());
      if (slot >= 0 && s != slot) fail("linear form mixes variables of different matrices");
      slot = s;
      ++pos_;
      auto [i, j] = read_indices();
      entries.push_back({i, j, sign * coef});
      first = false;
    }
    return {slot, std::move(entries)};
  }

  RawTerm read_product(std::int64_t sign) {
    RawTerm term;
    std::array<bool, 3> seen{};
    std::int64_t scalar = sign;
    int factors = 0;
    for (;;) {
      skip_space();
      std::int64_t c;
      if (try_integer(c)) {
        scalar *= c;
      } else if (!at_end() && peek() == '(') {
        ++pos_;
        auto [slot, entries] = read_linear();
        skip_space();
        if (at_end() || peek() != ')') fail("expected ')'");
        ++pos_;
        if (seen[slot]) fail("product repeats a factor");
        seen[slot] = true;
        term.factor[slot] = std::move(entries);
        ++factors;
      } else if (!at_end() && letter_slot(peek()) >= 0) {
        const int slot = letter_slot(peek());
        ++pos_;
        auto [i, j] = read_indices();
        if (seen[slot]) fail("product repeats a factor");
        seen[slot] = true;
        term.factor[slot] = {{i, j, 1}};
        ++factors;
      } else {
        fail("expected a factor");
      }
      skip_space();
      if (!at_end() && peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (factors != 3) fail("a product needs one factor each in a, b and c");
    for (auto& e : term.factor[0]) e.coef *= scalar;
    return term;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct RawShape {
  int rows = 0;
  int cols = 0;
};

IntMatrix raw_matrix(const std::vector<RawEntry>& entries, RawShape shape, int base) {
  IntMatrix m(shape.rows, shape.cols);
  for (const auto& e : entries) m.set(e.i - base, e.j - base, m.at(e.i - base, e.j - base) + e.coef);
  return m;
}

std::vector<ImportVariant> all_variants() {
  std::vector<ImportVariant> out;
  std::array<int, 3> perm{0, 1, 2};
  constexpr int masks[] = {0b000, 0b100, 0b011, 0b111, 0b001, 0b010, 0b101, 0b110};
  do {
    for (int mask : masks) {
      ImportVariant v;
      v.permutation = perm;
      for (int s = 0; s < 3; ++s) v.transposed[s] = (mask >> (2 - s)) & 1;
      out.push_back(v);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

template <class M>
std::string serialize(const BasicScheme<M>& s) {
  const auto ns = normalize(s);
  const Format& f = ns.format();
  std::ostringstream out;
  out << "format " << f.n << ' ' << f.m << ' ' << f.p << ' ' << ns.ring().name() << ' ' << ns.size() << '\n';
  for (const auto& t : ns.terms()) {
    write_block(out, t.a);
    out << " | ";
    write_block(out, t.b);
    out << " | ";
    write_block(out, t.c);
    out << '\n';
  }
  return out.str();
}

std::string serialize(const Scheme& s) {
  return std::visit([](const auto& x) { return serialize(x); }, s);
}

std::string serialize(const SchemeFile& file) {
  std::string body = serialize(file.scheme);
  if (file.note.empty()) return body;
  const auto header_end = body.find('\n') + 1;
  std::string notes;
  for (auto line : split_lines(file.note)) notes += "# " + std::string(line) + "\n";
  return body.substr(0, header_end) + notes + body.substr(header_end);
}

SchemeFile parse_file(std::string_view text) {
  const auto lines = split_lines(text);
  int header_line = 0;
  std::vector<std::string_view> header;
  std::string note;
  std::vector<std::pair<int, std::string_view>> body;

  for (std::size_t k = 0; k < lines.size(); ++k) {
    const int lineno = static_cast<int>(k) + 1;
    auto line = trim(lines[k]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      if (!note.empty()) note += '\n';
      note += line;
      continue;
    }
    if (header_line == 0) {
      header_line = lineno;
      header = split_ws(line);
      continue;
    }
    body.emplace_back(lineno, line);
  }

  if (header_line == 0) throw ParseError(0, "empty scheme file");
  if (header.size() != 6 || header[0] != "format") throw ParseError(header_line, "malformed header");
  auto dim = [&](std::size_t idx) {
    auto v = to_int(header[idx]);
    if (!v || *v < 1 || *v > kMaxDim) throw ParseError(header_line, "bad dimension '" + std::string(header[idx]) + "'");
    return static_cast<int>(*v);
  };
  const Format f(dim(1), dim(2), dim(3));
  Ring ring = Ring::gf2();
  try {
    ring = Ring::parse(header[4]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(header_line, e.what());
  }
  auto declared = to_int(header[5]);
  if (!declared || *declared < 0) throw ParseError(header_line, "bad rank '" + std::string(header[5]) + "'");
  if (static_cast<std::size_t>(*declared) != body.size())
    throw ParseError(header_line, "header declares rank " + std::to_string(*declared) + " but the body has " +
                                      std::to_string(body.size()) + " terms");

  Scheme s = ring.is_gf2() ? parse_body<GF2Matrix>(f, ring, body) : parse_body<IntMatrix>(f, ring, body);
  return {std::move(s), std::move(note)};
}

Scheme parse(std::string_view text) { return parse_file(text).scheme; }

SchemeFile load_scheme_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_file(ss.str());
}

Scheme load_scheme(const std::filesystem::path& path) { return load_scheme_file(path).scheme; }

void save_scheme(const std::filesystem::path& path, const Scheme& s, const std::string& note) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << serialize(SchemeFile{s, note});
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ImportVariant::describe() const {
  std::string out;
  for (int s = 0; s < 3; ++s) {
    if (s) out += ",";
    out += slot_name(static_cast<Slot>(s));
    out += "=";
    out += static_cast<char>('a' + permutation[s]);
    if (transposed[s]) out += "^T";
  }
  out += " base=" + std::to_string(index_base);
  return out;
}

ImportResult import_published(std::string_view text, const ImportHint& hint) {
  {
    auto first = trim(text);
    if (first.starts_with("format")) {
      Scheme s = parse(text);
      if (!verify(s)) throw SchemeError("unrecognized convention or broken scheme");
      return {std::move(s), ImportVariant{}};
    }
  }

  const auto terms = ProductReader(text).read();
  if (terms.empty()) throw ParseError(0, "no products found");

  int min_index = 1;
  std::array<int, 3> max_i{}, max_j{};
  for (const auto& t : terms)
    for (int s = 0; s < 3; ++s)
      for (const auto& e : t.factor[s]) {
        min_index = std::min({min_index, e.i, e.j});
        max_i[s] = std::max(max_i[s], e.i);
        max_j[s] = std::max(max_j[s], e.j);
      }
  if (min_index < 0) throw ParseError(0, "negative index");
  const int base = min_index == 0 ? 0 : 1;
  std::array<RawShape, 3> shape;
  for (int s = 0; s < 3; ++s) {
    shape[s] = {max_i[s] + 1 - base, max_j[s] + 1 - base};
    if (shape[s].rows < 1 || shape[s].cols < 1 || shape[s].rows > kMaxDim || shape[s].cols > kMaxDim)
      throw ParseError(0, "matrix size out of range");
  }

  std::vector<std::array<IntMatrix, 3>> raw;
  raw.reserve(terms.size());
  for (const auto& t : terms)
    raw.push_back({raw_matrix(t.factor[0], shape[0], base), raw_matrix(t.factor[1], shape[1], base),
                   raw_matrix(t.factor[2], shape[2], base)});

  std::vector<ImportVariant> variants = all_variants();
  if (hint.variant) variants.insert(variants.begin(), *hint.variant);

  auto build = [&](const ImportVariant& v) -> std::optional<IntScheme> {
    std::array<RawShape, 3> sh;
    for (int s = 0; s < 3; ++s) {
      sh[s] = shape[v.permutation[s]];
      if (v.transposed[s]) std::swap(sh[s].rows, sh[s].cols);
    }
    // A: n x m, B: m x p, C: p x n
    if (sh[0].cols != sh[1].rows || sh[1].cols != sh[2].rows || sh[2].cols != sh[0].rows) return std::nullopt;
    const Format f(sh[0].rows, sh[1].rows, sh[2].rows);
    if (hint.format && *hint.format != f) return std::nullopt;
    std::vector<IntTerm> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
      IntTerm t;
      for (int s = 0; s < 3; ++s) {
        const IntMatrix& x = r[v.permutation[s]];
        t[static_cast<Slot>(s)] = v.transposed[s] ? x.transposed() : x;
      }
      out.push_back(std::move(t));
    }
    return IntScheme(f, Ring::integer(), std::move(out));
  };

  for (bool modular : {false, true})
    for (auto v : variants) {
      auto s = build(v);
      if (!s) continue;
      v.index_base = base;
      if (!modular) {
        if (verify(*s)) return {Scheme(std::move(*s)), v};
      } else {
        GF2Scheme g = to_gf2(*s);
        if (verify(g)) return {Scheme(std::move(g)), v};
      }
    }
  throw SchemeError("unrecognized convention or broken scheme");
}

template std::string serialize(const GF2Scheme&);
template std::string serialize(const IntScheme&);

}  // namespace flipmm
