#ifndef CMSYM_TESTS_COMMON_HPP
#define CMSYM_TESTS_COMMON_HPP

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "cmsym/models.hpp"

namespace cmsym::testing {

inline Symbols syms(std::vector<std::string> names) { return Symbols(std::move(names)); }

inline RatFunc rf(const std::string &text, const Symbols &s) { return parse_expr(text, s); }

inline ::testing::AssertionResult same(const RatFunc &a, const RatFunc &b) {
  if (ratfunc_eq(a, b))
    return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << render_expr(a) << "  !=  " << render_expr(b)
                                       << "  (discrepancy " << detail::render_poly(discrepancy(a, b))
                                       << ")";
}

inline ::testing::AssertionResult same(const RatFunc &a, const std::string &b) {
  return same(a, parse_expr(b, a.symbols()));
}

inline ::testing::AssertionResult same_generator(const Generator &a, const Generator &b) {
  if (a.eta.size() != b.eta.size())
    return ::testing::AssertionFailure() << "dimension mismatch";
  auto r = same(a.xi, b.xi);
  if (!r)
    return r << " in xi";
  for (std::size_t k = 0; k < a.eta.size(); ++k) {
    r = same(a.eta[k], b.eta[k]);
    if (!r)
      return r << " in eta[" << k << "]";
  }
  return ::testing::AssertionSuccess();
}

} // namespace cmsym::testing

#endif
