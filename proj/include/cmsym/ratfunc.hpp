#ifndef CMSYM_RATFUNC_HPP
#define CMSYM_RATFUNC_HPP

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmsym/poly.hpp"

namespace cmsym {

// Quotient of two polynomials over a shared symbol list. Not kept in lowest
// terms; equality is decided by cross-multiplication (ratfunc_eq). The
// constructor does cheap normalisation only: constant denominators are folded
// into the numerator, exact quotients are taken when the denominator divides
// the numerator, and the denominator is scaled to a unit leading coefficient.
class RatFunc {
public:
  RatFunc() = default;

  explicit RatFunc(MultiPoly num)
      : num_(std::move(num)),
        den_(MultiPoly::constant(num_.symbols(), 1)) {}

  RatFunc(MultiPoly num, MultiPoly den)
      : num_(std::move(num)), den_(std::move(den)) {
    require_same(num_.symbols(), den_.symbols());
    normalize();
  }

  static RatFunc constant(const Symbols &syms, const BigRational &c) {
    return RatFunc(MultiPoly::constant(syms, c));
  }

  static RatFunc zero(const Symbols &syms) { return constant(syms, 0); }
  static RatFunc one(const Symbols &syms) { return constant(syms, 1); }

  static RatFunc variable(const Symbols &syms, std::string_view name) {
    return RatFunc(MultiPoly::variable(syms, name));
  }

  static RatFunc variable(const Symbols &syms, std::size_t index) {
    return RatFunc(MultiPoly::variable(syms, index));
  }

  const MultiPoly &num() const noexcept { return num_; }
  const MultiPoly &den() const noexcept { return den_; }
  const Symbols &symbols() const noexcept { return num_.symbols(); }

  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool involves(std::size_t var) const {
    return num_.involves(var) || den_.involves(var);
  }

  RatFunc operator-() const { return RatFunc(-num_, den_, Trusted{}); }

  friend RatFunc operator+(const RatFunc &a, const RatFunc &b) {
    if (a.is_zero())
      return b;
    if (b.is_zero())
      return a;
    if (a.den_ == b.den_)
      return RatFunc(a.num_ + b.num_, a.den_);
    if (a.den_.is_constant())
      return RatFunc(a.num_ * b.den_ + b.num_, b.den_);
    if (b.den_.is_constant())
      return RatFunc(a.num_ + b.num_ * a.den_, a.den_);
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }

  friend RatFunc operator-(const RatFunc &a, const RatFunc &b) {
    return a + (-b);
  }

  friend RatFunc operator*(const RatFunc &a, const RatFunc &b) {
    require_same(a.symbols(), b.symbols());
    if (a.is_zero() || b.is_zero())
      return zero(a.symbols());
    if (a.den_.is_constant() && b.den_.is_constant())
      return RatFunc(a.num_ * b.num_);
    if (a.den_ == b.num_)
      return RatFunc(a.num_, b.den_);
    if (b.den_ == a.num_)
      return RatFunc(b.num_, a.den_);
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }

  friend RatFunc operator/(const RatFunc &a, const RatFunc &b) {
    if (b.is_zero())
      throw ZeroDenominatorError("division by the zero rational function");
    return a * RatFunc(b.den_, b.num_);
  }

  RatFunc &operator+=(const RatFunc &b) { return *this = *this + b; }
  RatFunc &operator-=(const RatFunc &b) { return *this = *this - b; }
  RatFunc &operator*=(const RatFunc &b) { return *this = *this * b; }

  RatFunc scaled(const BigRational &s) const {
    if (s == 0)
      return zero(symbols());
    return RatFunc(num_.scaled(s), den_, Trusted{});
  }

  // Quotient rule; skips the den' term when the denominator is free of var.
  RatFunc diff(std::size_t var) const {
    MultiPoly dn = num_.diff(var);
    if (!den_.involves(var))
      return RatFunc(std::move(dn), den_);
    MultiPoly dd = den_.diff(var);
    return RatFunc(dn * den_ - num_ * dd, den_ * den_);
  }

  RatFunc diff(std::string_view name) const {
    return diff(symbols().index_of(name));
  }

  RatFunc rebase(const Symbols &target) const {
    return RatFunc(num_.rebase(target), den_.rebase(target), Trusted{});
  }

  BigRational evaluate(std::span<const BigRational> values) const {
    BigRational d = den_.evaluate(values);
    if (d == 0)
      throw ZeroDenominatorError("denominator vanishes at evaluation point");
    return num_.evaluate(values) / d;
  }

  // Structural equality of the stored representation (not ratfunc_eq).
  bool same_representation(const RatFunc &o) const {
    return num_ == o.num_ && den_ == o.den_;
  }

private:
  struct Trusted {};
  RatFunc(MultiPoly num, MultiPoly den, Trusted)
      : num_(std::move(num)), den_(std::move(den)) {}

  void normalize() {
    if (den_.is_zero())
      throw ZeroDenominatorError("rational function with zero denominator");
    if (num_.is_zero()) {
      den_ = MultiPoly::constant(num_.symbols(), 1);
      return;
    }
    if (den_.is_constant()) {
      BigRational c = den_.constant_term();
      if (c != 1)
        num_ = num_.scaled(1 / c);
      den_ = MultiPoly::constant(num_.symbols(), 1);
      return;
    }
    cancel_monomial_content();
    if (den_.is_constant())
      return normalize();
    if (auto q = divide_exact(num_, den_)) {
      num_ = std::move(*q);
      den_ = MultiPoly::constant(num_.symbols(), 1);
      return;
    }
    BigRational lc = den_.leading_coefficient();
    if (lc != 1) {
      num_ = num_.scaled(1 / lc);
      den_ = den_.scaled(1 / lc);
    }
  }

  // Removes the largest monomial dividing every term of num and den.
  void cancel_monomial_content() {
    const std::size_t n = num_.symbols().size();
    Monomial common = num_.terms().begin()->first;
    auto meet = [&](const MultiPoly &p) {
      for (const auto &[m, c] : p.terms())
        for (std::size_t i = 0; i < n; ++i)
          common[i] = std::min(common[i], m[i]);
    };
    meet(num_);
    meet(den_);
    if (common.is_one())
      return;
    auto strip = [&](const MultiPoly &p) {
      MultiPoly r(p.symbols());
      for (const auto &[m, c] : p.terms())
        r.add_term(m / common, c);
      return r;
    };
    num_ = strip(num_);
    den_ = strip(den_);
  }

  MultiPoly num_;
  MultiPoly den_;
};

// Decides a == b by expanding a.num*b.den - b.num*a.den.
inline bool ratfunc_eq(const RatFunc &a, const RatFunc &b) {
  require_same(a.symbols(), b.symbols());
  if (a.den() == b.den())
    return a.num() == b.num();
  return a.num() * b.den() == b.num() * a.den();
}

// Numerator of a - b over the common denominator; zero iff ratfunc_eq.
inline MultiPoly discrepancy(const RatFunc &a, const RatFunc &b) {
  require_same(a.symbols(), b.symbols());
  return a.num() * b.den() - b.num() * a.den();
}

inline RatFunc pow(const RatFunc &base, unsigned n) {
  return RatFunc(pow(base.num(), n), pow(base.den(), n));
}

using Bindings = std::map<std::string, RatFunc>;

namespace detail {

// Result of substituting into a polynomial: numerator over `target` and, for
// each bound source symbol, the power of its binding denominator that divides
// the numerator out.
struct PolySubst {
  MultiPoly num;
  std::vector<std::uint32_t> den_powers;
};

struct SubstPlan {
  const Symbols *source;
  const Symbols *target;
  std::vector<const RatFunc *> binding; // per source symbol, or null
  std::vector<std::size_t> target_index;
  std::vector<std::vector<MultiPoly>> num_pow, den_pow;

  SubstPlan(const Symbols &src, const Symbols &tgt, const Bindings &b)
      : source(&src), target(&tgt), binding(src.size(), nullptr),
        target_index(src.size(), static_cast<std::size_t>(-1)),
        num_pow(src.size()), den_pow(src.size()) {
    for (const auto &[name, value] : b) {
      auto i = src.find(name);
      if (!i)
        throw SymbolError("substitution binds unknown symbol '" + name + "'");
      require_same(value.symbols(), tgt);
      binding[*i] = &value;
    }
    for (std::size_t i = 0; i < src.size(); ++i)
      if (!binding[i])
        if (auto t = tgt.find(src[i]))
          target_index[i] = *t;
  }

  const MultiPoly &power(std::vector<std::vector<MultiPoly>> &cache,
                         const MultiPoly &base, std::size_t var,
                         std::uint32_t e) {
    auto &v = cache[var];
    if (v.empty())
      v.push_back(MultiPoly::constant(*target, 1));
    while (v.size() <= e)
      v.push_back(v.back() * base);
    return v[e];
  }

  PolySubst apply(const MultiPoly &p) {
    const std::size_t n = source->size();
    std::vector<std::uint32_t> maxdeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (binding[i])
        maxdeg[i] = p.degree_in(i);
    MultiPoly out(*target);
    for (const auto &[m, c] : p.terms()) {
      Monomial passthrough(target->size());
      MultiPoly factor = MultiPoly::constant(*target, c);
      for (std::size_t i = 0; i < n; ++i) {
        if (binding[i]) {
          if (m[i] > 0)
            factor *= power(num_pow, binding[i]->num(), i, m[i]);
          if (maxdeg[i] > m[i] && !binding[i]->den().is_constant())
            factor *= power(den_pow, binding[i]->den(), i, maxdeg[i] - m[i]);
        } else if (m[i] > 0) {
          if (target_index[i] == static_cast<std::size_t>(-1))
            throw SymbolError("symbol '" + (*source)[i] +
                              "' does not exist in the target symbol list");
          passthrough[target_index[i]] = m[i];
        }
      }
      if (!passthrough.is_one()) {
        MultiPoly shifted(*target);
        for (const auto &[fm, fc] : factor.terms())
          shifted.add_term(fm * passthrough, fc);
        factor = std::move(shifted);
      }
      out += factor;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (binding[i] && binding[i]->den().is_constant())
        maxdeg[i] = 0;
    return {std::move(out), std::move(maxdeg)};
  }
};

} // namespace detail

// Composes p with the bindings. Bound symbols must belong to p's symbol list;
// unbound symbols are carried over by name into `target`, which is also the
// symbol list of every binding value.
inline RatFunc substitute(const RatFunc &p, const Bindings &bindings,
                          const Symbols &target) {
  detail::SubstPlan plan(p.symbols(), target, bindings);
  auto top = plan.apply(p.num());
  auto bottom = plan.apply(p.den());
  MultiPoly num = std::move(top.num);
  MultiPoly den = std::move(bottom.num);
  for (std::size_t i = 0; i < plan.binding.size(); ++i) {
    if (!plan.binding[i])
      continue;
    auto a = top.den_powers[i], b = bottom.den_powers[i];
    if (b > a)
      num *= plan.power(plan.den_pow, plan.binding[i]->den(), i, b - a);
    else if (a > b)
      den *= plan.power(plan.den_pow, plan.binding[i]->den(), i, a - b);
  }
  if (den.is_zero())
    throw ZeroDenominatorError("substitution makes the denominator vanish");
  return RatFunc(std::move(num), std::move(den));
}

inline RatFunc substitute(const RatFunc &p, const Bindings &bindings) {
  return substitute(p, bindings, p.symbols());
}

inline RatFunc substitute(const MultiPoly &p, const Bindings &bindings,
                          const Symbols &target) {
  return substitute(RatFunc(p), bindings, target);
}

// Coefficients of e with respect to the variables `vars`; the denominator of
// e must be free of them.
inline std::map<Monomial, RatFunc>
coefficients_in(const RatFunc &e, std::span<const std::size_t> vars) {
  for (auto v : vars)
    if (e.den().involves(v))
      throw SymbolError("denominator depends on '" + e.symbols()[v] + "'");
  std::map<Monomial, RatFunc> out;
  for (auto &[key, cof] : split_by(e.num(), vars))
    out.emplace(key, RatFunc(cof, e.den()));
  return out;
}

inline RatFunc truncate(const RatFunc &e, std::span<const std::size_t> vars,
                        std::uint32_t max_degree) {
  for (auto v : vars)
    if (e.den().involves(v))
      throw SymbolError("denominator depends on '" + e.symbols()[v] + "'");
  return RatFunc(truncate(e.num(), vars, max_degree), e.den());
}

} // namespace cmsym

#endif
