#ifndef CMSYM_POLY_HPP
#define CMSYM_POLY_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <initializer_list>
#include <utility>
#include <vector>

#include "cmsym/rational.hpp"
#include "cmsym/symbols.hpp"

namespace cmsym {

// Exponent vector aligned with an ambient Symbols list. Ordered graded
// lexicographically: total degree first, then the first symbol dominates.
class Monomial {
public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<std::uint32_t> exps) : exps_(std::move(exps)) {}
  Monomial(std::initializer_list<std::uint32_t> exps) : exps_(exps) {}

  static Monomial unit(std::size_t nvars, std::size_t var, std::uint32_t e = 1) {
    Monomial m(nvars);
    m.exps_[var] = e;
    return m;
  }

  std::size_t size() const noexcept { return exps_.size(); }
  std::uint32_t operator[](std::size_t i) const { return exps_[i]; }
  std::uint32_t &operator[](std::size_t i) { return exps_[i]; }
  const std::vector<std::uint32_t> &exponents() const noexcept { return exps_; }

  std::uint32_t degree() const {
    std::uint32_t d = 0;
    for (auto e : exps_)
      d += e;
    return d;
  }

  bool is_one() const {
    return std::all_of(exps_.begin(), exps_.end(),
                       [](std::uint32_t e) { return e == 0; });
  }

  bool divides(const Monomial &other) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] > other.exps_[i])
        return false;
    return true;
  }

  friend Monomial operator*(const Monomial &a, const Monomial &b) {
    Monomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      r.exps_[i] = a.exps_[i] + b.exps_[i];
    return r;
  }

  // Requires b.divides(a).
  friend Monomial operator/(const Monomial &a, const Monomial &b) {
    Monomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      r.exps_[i] = a.exps_[i] - b.exps_[i];
    return r;
  }

  friend bool operator==(const Monomial &, const Monomial &) = default;

  friend bool operator<(const Monomial &a, const Monomial &b) {
    auto da = a.degree(), db = b.degree();
    if (da != db)
      return da < db;
    // Larger exponent on an earlier symbol means a larger monomial.
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.exps_[i] != b.exps_[i])
        return a.exps_[i] < b.exps_[i];
    return false;
  }

private:
  std::vector<std::uint32_t> exps_;
};

// Sparse multivariate polynomial with exact rational coefficients. No stored
// coefficient is zero.
class MultiPoly {
public:
  using TermMap = std::map<Monomial, BigRational>;

  MultiPoly() = default;
  explicit MultiPoly(Symbols syms) : syms_(std::move(syms)) {}

  static MultiPoly constant(const Symbols &syms, const BigRational &c) {
    MultiPoly p(syms);
    if (c != 0)
      p.terms_.emplace(Monomial(syms.size()), c);
    return p;
  }

  static MultiPoly variable(const Symbols &syms, std::size_t index) {
    MultiPoly p(syms);
    p.terms_.emplace(Monomial::unit(syms.size(), index), BigRational(1));
    return p;
  }

  static MultiPoly variable(const Symbols &syms, std::string_view name) {
    return variable(syms, syms.index_of(name));
  }

  static MultiPoly term(const Symbols &syms, Monomial m, const BigRational &c) {
    MultiPoly p(syms);
    if (c != 0)
      p.terms_.emplace(std::move(m), c);
    return p;
  }

  const Symbols &symbols() const noexcept { return syms_; }
  const TermMap &terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  bool is_zero() const noexcept { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first.is_one());
  }

  BigRational constant_term() const {
    if (!terms_.empty() && terms_.begin()->first.is_one())
      return terms_.begin()->second;
    return 0;
  }

  // Leading term in graded-lex order; polynomial must be nonzero.
  const std::pair<const Monomial, BigRational> &leading() const {
    return *terms_.rbegin();
  }

  std::uint32_t total_degree() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
  }

  std::uint32_t degree_in(std::size_t var) const {
    std::uint32_t d = 0;
    for (const auto &[m, c] : terms_)
      d = std::max(d, m[var]);
    return d;
  }

  bool involves(std::size_t var) const { return degree_in(var) > 0; }

  // Adds c*m into the term map, pruning a cancelled coefficient.
  void add_term(const Monomial &m, const BigRational &c) {
    if (c == 0)
      return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0)
        terms_.erase(it);
    }
  }

  MultiPoly operator-() const {
    MultiPoly r(*this);
    for (auto &[m, c] : r.terms_)
      c = -c;
    return r;
  }

  MultiPoly &operator+=(const MultiPoly &b) {
    require_same(syms_, b.syms_);
    for (const auto &[m, c] : b.terms_)
      add_term(m, c);
    return *this;
  }

  MultiPoly &operator-=(const MultiPoly &b) {
    require_same(syms_, b.syms_);
    for (const auto &[m, c] : b.terms_)
      add_term(m, -c);
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly &b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly &b) { return a -= b; }

  friend MultiPoly operator*(const MultiPoly &a, const MultiPoly &b) {
    require_same(a.syms_, b.syms_);
    MultiPoly r(a.syms_);
    for (const auto &[ma, ca] : a.terms_)
      for (const auto &[mb, cb] : b.terms_)
        r.add_term(ma * mb, ca * cb);
    return r;
  }

  MultiPoly &operator*=(const MultiPoly &b) { return *this = *this * b; }

  MultiPoly scaled(const BigRational &s) const {
    if (s == 0)
      return MultiPoly(syms_);
    MultiPoly r(*this);
    for (auto &[m, c] : r.terms_)
      c *= s;
    return r;
  }

  friend bool operator==(const MultiPoly &a, const MultiPoly &b) {
    return a.syms_ == b.syms_ && a.terms_ == b.terms_;
  }

  // Partial derivative with respect to symbol `var`.
  MultiPoly diff(std::size_t var) const {
    if (var >= syms_.size())
      throw SymbolError("derivative variable out of range");
    MultiPoly r(syms_);
    for (const auto &[m, c] : terms_) {
      if (m[var] == 0)
        continue;
      Monomial dm = m;
      dm[var] -= 1;
      r.add_term(dm, c * m[var]);
    }
    return r;
  }

  MultiPoly diff(std::string_view name) const {
    return diff(syms_.index_of(name));
  }

  // Re-expresses the polynomial over `target`, matching symbols by name.
  // Every symbol that actually occurs must exist in `target`.
  MultiPoly rebase(const Symbols &target) const {
    if (target == syms_)
      return *this;
    std::vector<std::optional<std::size_t>> map(syms_.size());
    for (std::size_t i = 0; i < syms_.size(); ++i)
      map[i] = target.find(syms_[i]);
    MultiPoly r(target);
    for (const auto &[m, c] : terms_) {
      Monomial nm(target.size());
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0)
          continue;
        if (!map[i])
          throw SymbolError("symbol '" + syms_[i] +
                            "' does not exist in the target symbol list");
        nm[*map[i]] = m[i];
      }
      r.terms_.emplace(std::move(nm), c);
    }
    return r;
  }

  // Evaluates with one value per ambient symbol. T must be constructible
  // from a BigRational through `convert`.
  template <typename T, typename Convert>
  T evaluate(std::span<const T> values, Convert convert) const {
    T sum = convert(BigRational(0));
    for (const auto &[m, c] : terms_) {
      T term = convert(c);
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::uint32_t k = 0; k < m[i]; ++k)
          term = term * values[i];
      sum = sum + term;
    }
    return sum;
  }

  BigRational evaluate(std::span<const BigRational> values) const {
    return evaluate<BigRational>(values,
                                 [](const BigRational &q) { return q; });
  }

  // Gcd-free scale normalisation: the leading coefficient becomes 1.
  BigRational leading_coefficient() const {
    return terms_.empty() ? BigRational(0) : terms_.rbegin()->second;
  }

private:
  Symbols syms_;
  TermMap terms_;
};

inline MultiPoly pow(const MultiPoly &base, unsigned n) {
  MultiPoly result = MultiPoly::constant(base.symbols(), 1);
  MultiPoly b = base;
  while (n > 0) {
    if (n & 1u)
      result *= b;
    n >>= 1u;
    if (n > 0)
      b *= b;
  }
  return result;
}

// Exact quotient a / b when b divides a, otherwise nullopt. Uses leading-term
// reduction in graded-lex order; for exact divisibility the remainder always
// reaches zero.
inline std::optional<MultiPoly> divide_exact(const MultiPoly &a,
                                             const MultiPoly &b) {
  require_same(a.symbols(), b.symbols());
  if (b.is_zero())
    throw ZeroDenominatorError("polynomial division by zero");
  MultiPoly quotient(a.symbols());
  if (a.is_zero())
    return quotient;
  if (b.is_constant())
    return a.scaled(1 / b.constant_term());
  const auto &[lead_m, lead_c] = b.leading();
  if (a.total_degree() < b.total_degree())
    return std::nullopt;
  MultiPoly rem = a;
  while (!rem.is_zero()) {
    const auto [rm, rc] = rem.leading();
    if (!lead_m.divides(rm))
      return std::nullopt;
    Monomial qm = rm / lead_m;
    BigRational qc = rc / lead_c;
    quotient.add_term(qm, qc);
    MultiPoly step(a.symbols());
    for (const auto &[m, c] : b.terms())
      step.add_term(m * qm, c * qc);
    rem -= step;
  }
  return quotient;
}

// Splits p by the exponents of the selected variables: each key is a
// monomial over `vars` (in that order), each value the remaining cofactor.
inline std::map<Monomial, MultiPoly>
split_by(const MultiPoly &p, std::span<const std::size_t> vars) {
  std::map<Monomial, MultiPoly> out;
  for (const auto &[m, c] : p.terms()) {
    Monomial key(vars.size());
    Monomial rest = m;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      key[k] = m[vars[k]];
      rest[vars[k]] = 0;
    }
    auto [it, inserted] = out.try_emplace(key, p.symbols());
    it->second.add_term(rest, c);
  }
  return out;
}

inline std::uint32_t degree_in(const Monomial &m,
                               std::span<const std::size_t> vars) {
  std::uint32_t d = 0;
  for (auto v : vars)
    d += m[v];
  return d;
}

// Drops every term whose degree in `vars` exceeds max_degree.
inline MultiPoly truncate(const MultiPoly &p, std::span<const std::size_t> vars,
                          std::uint32_t max_degree) {
  MultiPoly r(p.symbols());
  for (const auto &[m, c] : p.terms())
    if (degree_in(m, vars) <= max_degree)
      r.add_term(m, c);
  return r;
}

} // namespace cmsym

#endif
