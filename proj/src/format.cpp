#include "flipmm/format.hpp"

#include <charconv>
#include <stdexcept>

namespace flipmm {

Format::Format(int n_, int m_, int p_) : n(n_), m(m_), p(p_) {
  auto ok = [](int d) { return d >= 1 && d <= kMaxDim; };
  if (!ok(n) || !ok(m) || !ok(p))
    throw std::invalid_argument("format dimensions must lie in [1, 32]: " + to_string());
}

std::uint64_t Format::equation_count() const {
  return static_cast<std::uint64_t>(a_size()) * static_cast<std::uint64_t>(b_size()) *
         static_cast<std::uint64_t>(c_size());
}

std::string Format::to_string() const {
  return "(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(p) + ")";
}

Ring Ring::mod2k(int k) {
  if (k < 2 || k > 62) throw std::invalid_argument("mod2^k ring requires 2 <= k <= 62");
  return Ring(RingKind::mod2k, k);
}

Ring Ring::parse(std::string_view text) {
  if (text == "gf2" || text == "z2") return gf2();
  if (text == "integer" || text == "z") return integer();
  constexpr std::string_view prefix = "mod2^";
  if (text.starts_with(prefix)) {
    int k = 0;
    auto digits = text.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return mod2k(k);
  }
  throw std::invalid_argument("unknown ring '" + std::string(text) + "'");
}

std::int64_t Ring::reduce(std::int64_t v) const {
  switch (kind_) {
    case RingKind::gf2:
      return v & 1;
    case RingKind::integer:
      return v;
    case RingKind::mod2k: {
      const std::uint64_t modulus = std::uint64_t{1} << k_;
      const std::uint64_t u = static_cast<std::uint64_t>(v) & (modulus - 1);
      if (u > modulus / 2) return static_cast<std::int64_t>(u) - static_cast<std::int64_t>(modulus);
      return static_cast<std::int64_t>(u);
    }
  }
  return v;
}

std::string Ring::name() const {
  switch (kind_) {
    case RingKind::gf2:
      return "gf2";
    case RingKind::integer:
      return "integer";
    case RingKind::mod2k:
      return "mod2^" + std::to_string(k_);
  }
  return "?";
}

}  // namespace flipmm
