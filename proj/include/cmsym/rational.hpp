#ifndef CMSYM_RATIONAL_HPP
#define CMSYM_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "cmsym/error.hpp"

namespace cmsym {

// Arbitrary-precision rational; mpq_class keeps gcd(num, den) = 1, den > 0.
using BigRational = mpq_class;
using BigInteger = mpz_class;

inline BigRational make_rational(const BigInteger &num, const BigInteger &den) {
  if (den == 0)
    throw ZeroDenominatorError("rational with zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

inline BigInteger pow10(unsigned long e) {
  BigInteger r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

// Exact conversion of an unsigned decimal literal such as "12", "0.5",
// "1e-9" or "2.5E+3". Returns the number of characters consumed through
// `consumed`; throws ParseError (relative to `offset`) on malformed input.
inline BigRational parse_decimal_literal(std::string_view text,
                                         std::size_t *consumed = nullptr,
                                         std::size_t offset = 0) {
  std::size_t i = 0;
  std::string digits;
  long frac_digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
    digits += text[i++];
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      ++frac_digits;
    }
  }
  if (digits.empty())
    throw ParseError("malformed number", offset);
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    std::size_t j = i + 1;
    bool negative = false;
    if (j < text.size() && (text[j] == '+' || text[j] == '-')) {
      negative = text[j] == '-';
      ++j;
    }
    if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j])))
      throw ParseError("malformed exponent in number", offset + j);
    std::string exp_digits;
    while (j < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[j])))
      exp_digits += text[j++];
    if (exp_digits.size() > 6)
      throw ParseError("exponent too large in number", offset + i);
    exponent = std::stol(exp_digits);
    if (negative)
      exponent = -exponent;
    i = j;
  }
  if (consumed)
    *consumed = i;
  BigInteger mantissa(digits, 10);
  long scale = exponent - frac_digits;
  if (scale >= 0)
    return BigRational(mantissa * pow10(static_cast<unsigned long>(scale)));
  return make_rational(mantissa, pow10(static_cast<unsigned long>(-scale)));
}

// Full-string variant accepting an optional leading sign.
inline BigRational parse_rational(std::string_view text) {
  std::size_t start = 0;
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    start = 1;
  }
  std::size_t used = 0;
  BigRational q = parse_decimal_literal(text.substr(start), &used, start);
  if (start + used != text.size())
    throw ParseError("trailing characters in number", start + used);
  return negative ? BigRational(-q) : q;
}

inline std::string to_string(const BigRational &q) { return q.get_str(); }

} // namespace cmsym

#endif
