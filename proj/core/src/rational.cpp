#include "effgap/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace effgap {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::string format_scaled(const Rational& r, __int128 scale, int decimals) {
  __int128 num = static_cast<__int128>(r.numerator()) * scale;
  const __int128 den = r.denominator();
  const bool negative = num < 0;
  if (negative) num = -num;
  __int128 unit = 1;
  for (int i = 0; i < decimals; ++i) unit *= 10;
  // round(num * unit / den), half away from zero
  __int128 q = (2 * num * unit + den) / (2 * den);
  const __int128 whole = q / unit;
  __int128 frac = q % unit;
  std::string out = negative && q != 0 ? "-" : "";
  out += std::to_string(static_cast<long long>(whole));
  if (decimals > 0) {
    std::string digits(static_cast<std::size_t>(decimals), '0');
    for (int i = decimals - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(frac % 10));
      frac /= 10;
    }
    out += "." + digits;
  }
  return out;
}

}  // namespace

std::string format_percent(const Rational& r, int decimals) {
  return format_scaled(r, 100, decimals);
}

std::string format_decimal(const Rational& r, int decimals) {
  return format_scaled(r, 1, decimals);
}

Rational parse_rational(const std::string& text) {
  auto bad = [&] { return std::invalid_argument("malformed rational: '" + text + "'"); };
  if (text.empty()) throw bad();
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used = 0;
      const long long n = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw bad();
      const std::string den_text = text.substr(slash + 1);
      const long long d = std::stoll(den_text, &used);
      if (used != den_text.size() || d == 0) throw bad();
      return Rational(n, d);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const long long n = std::stoll(text, &used);
      if (used != text.size()) throw bad();
      return Rational(n);
    }
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) throw bad();
    for (char c : frac) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    }
    const bool negative = !whole.empty() && whole[0] == '-';
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t w = 0;
    if (!whole.empty() && whole != "-" && whole != "+") {
      std::size_t used = 0;
      w = std::stoll(whole, &used);
      if (used != whole.size()) throw bad();
    }
    const std::int64_t f = std::stoll(frac);
    const std::int64_t magnitude = (w < 0 ? -w : w) * scale + f;
    return Rational(negative ? -magnitude : magnitude, scale);
  } catch (const std::invalid_argument&) {
    throw bad();
  } catch (const std::out_of_range&) {
    throw bad();
  }
}

}  // namespace effgap
