#ifndef CMSYM_CENTER_HPP
#define CMSYM_CENTER_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cmsym/odesys.hpp"

namespace cmsym {

class CenterManifoldError : public Error {
public:
  CenterManifoldError(const std::string &what, unsigned degree)
      : Error(what), degree_(degree) {}
  unsigned degree() const noexcept { return degree_; }

private:
  unsigned degree_;
};

// Truncated graph y_hyp = h(x_center). Coefficients are keyed by the
// position of the hyperbolic state in split.hyperbolic and by a monomial over
// the center states (in split.center order). Only degrees 2..order occur.
struct ManifoldApprox {
  Symbols symbols;
  std::vector<std::size_t> center;     // ambient indices of center states
  std::vector<std::size_t> hyperbolic; // ambient indices of hyperbolic states
  unsigned order = 2;
  std::map<std::pair<std::size_t, Monomial>, RatFunc> coeffs;

  std::size_t center_dim() const { return center.size(); }
  std::size_t hyp_dim() const { return hyperbolic.size(); }

  static ManifoldApprox zero(const OdeSystem &sys, const BlockSplit &split, unsigned order) {
    if (order < 2)
      throw InputError("center-manifold order must be at least 2");
    ManifoldApprox h;
    h.symbols = sys.symbols();
    for (auto c : split.center)
      h.center.push_back(sys.state_index(c));
    for (auto c : split.hyperbolic)
      h.hyperbolic.push_back(sys.state_index(c));
    h.order = order;
    return h;
  }

  // Builds h from explicit component expressions (an ansatz); they may only
  // depend on center states, t-free, with degree-2..order terms.
  static ManifoldApprox from_components(const OdeSystem &sys, const BlockSplit &split,
                                        unsigned order, const std::vector<RatFunc> &comps) {
    ManifoldApprox h = zero(sys, split, order);
    if (comps.size() != h.hyp_dim())
      throw InputError("manifold component count does not match hyperbolic dimension");
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const RatFunc c = comps[k].rebase(sys.symbols());
      if (c.involves(OdeSystem::time_index()))
        throw InputError("manifold components may not depend on t");
      for (auto hv : h.hyperbolic)
        if (c.involves(hv))
          throw InputError("manifold components may not depend on hyperbolic states");
      for (auto &[m, coef] : coefficients_in(c, h.center)) {
        if (m.degree() < 2 || m.degree() > order)
          throw InputError("manifold component has a term of degree " +
                           std::to_string(m.degree()) + " outside 2.." +
                           std::to_string(order));
        h.coeffs.emplace(std::make_pair(k, m), coef);
      }
    }
    return h;
  }

  RatFunc component(std::size_t k) const {
    RatFunc sum = RatFunc::zero(symbols);
    for (const auto &[key, c] : coeffs) {
      if (key.first != k)
        continue;
      Monomial full(symbols.size());
      for (std::size_t i = 0; i < center.size(); ++i)
        full[center[i]] = key.second[i];
      sum += c * RatFunc(MultiPoly::term(symbols, full, 1));
    }
    return sum;
  }

  RatFunc coefficient(std::size_t k, const Monomial &m) const {
    auto it = coeffs.find({k, m});
    return it == coeffs.end() ? RatFunc::zero(symbols) : it->second;
  }

  bool is_zero() const {
    for (const auto &[key, c] : coeffs)
      if (!c.is_zero())
        return false;
    return true;
  }

  std::vector<unsigned> nonzero_degrees() const {
    std::vector<unsigned> d;
    for (const auto &[key, c] : coeffs)
      if (!c.is_zero()) {
        unsigned deg = key.second.degree();
        if (std::find(d.begin(), d.end(), deg) == d.end())
          d.push_back(deg);
      }
    std::sort(d.begin(), d.end());
    return d;
  }

  Bindings graph_bindings() const {
    Bindings b;
    for (std::size_t k = 0; k < hyperbolic.size(); ++k)
      b.emplace(symbols[hyperbolic[k]], component(k));
    return b;
  }
};

namespace detail {

// Each center/hyperbolic right-hand side evaluated on y = h(x), truncated.
struct GraphRhs {
  std::vector<RatFunc> center, hyperbolic;
};

inline GraphRhs rhs_on_graph(const OdeSystem &sys, const BlockSplit &split,
                             const ManifoldApprox &h) {
  auto b = h.graph_bindings();
  GraphRhs g;
  for (auto c : split.center)
    g.center.push_back(truncate(substitute(sys.rhs()[c], b), h.center, h.order - 1));
  for (auto c : split.hyperbolic)
    g.hyperbolic.push_back(truncate(substitute(sys.rhs()[c], b), h.center, h.order));
  return g;
}

inline std::vector<Monomial> monomials_of_degree(std::size_t nvars, unsigned degree) {
  std::vector<Monomial> out;
  Monomial m(nvars);
  auto rec = [&](auto &&self, std::size_t i, unsigned left) -> void {
    if (i + 1 == nvars) {
      m[i] = left;
      out.push_back(m);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      m[i] = e;
      self(self, i + 1, left - e);
    }
  };
  if (nvars == 0)
    return out;
  rec(rec, 0, degree);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace detail

// (Mh)(x) = Dh(x)[A x + g(x, h(x))] - B h(x) - j(x, h(x)), truncated at the
// order of h. Uses that the center rows equal A x + g and the hyperbolic rows
// equal B y + j for a system in normal form.
inline std::vector<RatFunc> mh_residual(const OdeSystem &sys, const BlockSplit &split,
                                        const ManifoldApprox &h) {
  auto g = detail::rhs_on_graph(sys, split, h);
  std::vector<RatFunc> res;
  for (std::size_t k = 0; k < h.hyp_dim(); ++k) {
    RatFunc hk = h.component(k);
    RatFunc acc = -g.hyperbolic[k];
    for (std::size_t c = 0; c < h.center_dim(); ++c) {
      RatFunc d = hk.diff(h.center[c]);
      if (!d.is_zero() && !g.center[c].is_zero())
        acc += d * g.center[c];
    }
    res.push_back(truncate(acc, h.center, h.order));
  }
  return res;
}

// Solves (Mh)(x) = 0 degree by degree. At degree d the unknown part h_d enters
// only through the homological operator h_d -> Dh_d A x - B h_d; everything
// else at degree d comes from already-known lower-degree coefficients.
inline ManifoldApprox compute_center_manifold(const OdeSystem &sys, const BlockSplit &split,
                                              unsigned order = 3) {
  ManifoldApprox h = ManifoldApprox::zero(sys, split, order);
  const std::size_t n = h.center_dim(), m = h.hyp_dim();
  const Symbols &syms = sys.symbols();
  std::vector<RatFunc> x;
  for (auto c : h.center)
    x.push_back(RatFunc::variable(syms, c));
  auto ax = split.a_center.apply(x);

  for (unsigned d = 2; d <= order; ++d) {
    ManifoldApprox lower = h;
    lower.order = d;
    auto res = mh_residual(sys, split, lower);

    auto monos = detail::monomials_of_degree(n, d);
    const std::size_t dim = m * monos.size();
    if (dim == 0)
      continue;
    auto row_of = [&](std::size_t k, const Monomial &mono) {
      auto it = std::lower_bound(monos.begin(), monos.end(), mono);
      return k * monos.size() + static_cast<std::size_t>(it - monos.begin());
    };

    std::vector<RatFunc> rhs(dim, RatFunc::zero(syms));
    for (std::size_t k = 0; k < m; ++k)
      for (auto &[mono, c] : coefficients_in(res[k], h.center))
        if (mono.degree() == d)
          rhs[row_of(k, mono)] = -c;

    PolyMatrix op(syms, dim, dim);
    for (std::size_t k = 0; k < m; ++k)
      for (const auto &mono : monos) {
        std::size_t col = row_of(k, mono);
        Monomial full(syms.size());
        for (std::size_t i = 0; i < n; ++i)
          full[h.center[i]] = mono[i];
        RatFunc e(MultiPoly::term(syms, full, 1));
        RatFunc transport = RatFunc::zero(syms);
        for (std::size_t c = 0; c < n; ++c)
          transport += e.diff(h.center[c]) * ax[c];
        for (std::size_t kk = 0; kk < m; ++kk) {
          RatFunc image = RatFunc::zero(syms) - split.a_hyperbolic(kk, k) * e;
          if (kk == k)
            image += transport;
          for (auto &[mm, c] : coefficients_in(image, h.center))
            op(row_of(kk, mm), col) = c;
        }
      }

    std::vector<RatFunc> sol;
    try {
      sol = solve_linear(op, rhs);
    } catch (const SingularMatrixError &) {
      throw CenterManifoldError("homological operator is singular at degree " +
                                    std::to_string(d),
                                d);
    }
    for (std::size_t k = 0; k < m; ++k)
      for (const auto &mono : monos) {
        RatFunc &c = sol[row_of(k, mono)];
        if (!c.is_zero())
          h.coeffs.emplace(std::make_pair(k, mono), std::move(c));
      }
  }
  return h;
}

// System on the center variables: x' = A x + g(x, h(x)), truncated at the
// order of h.
inline OdeSystem reduce_to_center(const OdeSystem &sys, const BlockSplit &split,
                                  const ManifoldApprox &h) {
  auto b = h.graph_bindings();
  std::vector<std::string> names;
  for (auto c : split.center)
    names.push_back(sys.states()[c]);
  Symbols target = OdeSystem::make_symbols(names, sys.params());
  std::vector<RatFunc> rhs;
  for (auto c : split.center)
    rhs.push_back(truncate(substitute(sys.rhs()[c], b), h.center, h.order).rebase(target));
  return OdeSystem(std::move(names), sys.params(), std::move(rhs));
}

} // namespace cmsym

#endif
