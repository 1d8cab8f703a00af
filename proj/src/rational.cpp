#include "progeq/rational.hpp"

#include <cctype>

namespace progeq {

Rat parse_rational(const std::string& text) {
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      if (!is_int(text)) throw std::invalid_argument("");
      return Rat(BigInt(text));
    }
    std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw std::invalid_argument("");
    BigInt d(den);
    if (d == 0) throw std::invalid_argument("");
    return Rat(BigInt(num), d);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational: '" + text + "'");
  }
}

std::string format_rational(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

Rat rat_pow(const Rat& r, unsigned long e) {
  Rat acc = 1, base = r;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

}  // namespace progeq
