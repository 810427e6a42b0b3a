#ifndef CMSYM_SYMMETRY_HPP
#define CMSYM_SYMMETRY_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmsym/center.hpp"

namespace cmsym {

// Infinitesimal generator X = xi d/dt + sum_k eta_k d/dy_k, with every
// component over the ambient symbols of one system.
struct Generator {
  RatFunc xi;
  std::vector<RatFunc> eta;

  const Symbols &symbols() const { return xi.symbols(); }

  static Generator parse(const OdeSystem &sys, std::string_view xi,
                         const std::vector<std::string> &eta) {
    Generator g;
    g.xi = parse_expr(xi, sys.symbols());
    for (const auto &e : eta)
      g.eta.push_back(parse_expr(e, sys.symbols()));
    validate(g, sys);
    return g;
  }

  static void validate(const Generator &g, const OdeSystem &sys) {
    if (g.eta.size() != sys.dim())
      throw InputError("generator has " + std::to_string(g.eta.size()) +
                       " eta components, system has " + std::to_string(sys.dim()) +
                       " states");
    auto check = [&](const RatFunc &e) {
      require_same(e.symbols(), sys.symbols());
      for (std::size_t k = 0; k <= sys.dim(); ++k)
        if (e.den().involves(k))
          throw InputError("generator denominators may only involve parameters");
    };
    check(g.xi);
    for (const auto &e : g.eta)
      check(e);
  }

  Generator rebase(const Symbols &target) const {
    Generator g{xi.rebase(target), {}};
    for (const auto &e : eta)
      g.eta.push_back(e.rebase(target));
    return g;
  }
};

// D_t e = de/dt + sum_j omega_j de/dy_j.
inline RatFunc total_derivative(const RatFunc &e, const OdeSystem &sys) {
  RatFunc acc = e.diff(OdeSystem::time_index());
  for (std::size_t j = 0; j < sys.dim(); ++j) {
    RatFunc d = e.diff(sys.state_index(j));
    if (!d.is_zero())
      acc += sys.rhs()[j] * d;
  }
  return acc;
}

// eta_k^(1) = D_t eta_k - y_k' D_t xi with y' replaced by omega.
inline std::vector<RatFunc> prolong_first(const Generator &x, const OdeSystem &sys) {
  Generator::validate(x, sys);
  RatFunc dxi = total_derivative(x.xi, sys);
  std::vector<RatFunc> out;
  for (std::size_t k = 0; k < sys.dim(); ++k) {
    RatFunc v = total_derivative(x.eta[k], sys);
    if (!dxi.is_zero())
      v -= sys.rhs()[k] * dxi;
    out.push_back(std::move(v));
  }
  return out;
}

struct LscReport {
  std::vector<RatFunc> residuals;
  bool is_symmetry = false;
};

// Linearized symmetry condition X^(1)(y_k' - omega_k) = 0 on solutions:
// residual_k = eta_k^(1) - (xi d omega_k/dt + sum_j eta_j d omega_k/dy_j).
inline LscReport lsc_residual(const Generator &x, const OdeSystem &sys) {
  auto prolonged = prolong_first(x, sys);
  LscReport rep;
  rep.is_symmetry = true;
  for (std::size_t k = 0; k < sys.dim(); ++k) {
    const RatFunc &w = sys.rhs()[k];
    RatFunc applied = RatFunc::zero(sys.symbols());
    RatFunc dt = w.diff(OdeSystem::time_index());
    if (!dt.is_zero())
      applied += x.xi * dt;
    for (std::size_t j = 0; j < sys.dim(); ++j) {
      RatFunc d = w.diff(sys.state_index(j));
      if (!d.is_zero() && !x.eta[j].is_zero())
        applied += x.eta[j] * d;
    }
    RatFunc r = prolonged[k] - applied;
    rep.is_symmetry = rep.is_symmetry && r.is_zero();
    rep.residuals.push_back(std::move(r));
  }
  return rep;
}

// Re-expresses X in the coordinates z of y = T z.
inline Generator pushforward_linear(const Generator &x, const LinearChange &lc) {
  Generator g;
  g.xi = substitute(x.xi, lc.y_of_z, lc.target);
  std::vector<RatFunc> eta;
  for (const auto &e : x.eta)
    eta.push_back(substitute(e, lc.y_of_z, lc.target));
  g.eta = lc.t_inv.apply(eta);
  return g;
}

inline Generator pushforward_linear(const Generator &x, const OdeSystem &sys,
                                    const PolyMatrix &t,
                                    std::vector<std::string> names = {}) {
  Generator::validate(x, sys);
  return pushforward_linear(x, make_linear_change(sys, t, std::move(names)));
}

// Generator with xi = 0 and eta = omega / c; a symmetry of every autonomous
// system for constant c != 0.
inline Generator evolution_generator(const OdeSystem &sys, const RatFunc &c) {
  Generator g{RatFunc::zero(sys.symbols()), {}};
  for (const auto &w : sys.rhs())
    g.eta.push_back(w / c);
  return g;
}

inline Generator linear_combination(const BigRational &alpha, const Generator &x,
                                    const BigRational &beta, const Generator &y) {
  Generator g{x.xi.scaled(alpha) + y.xi.scaled(beta), {}};
  for (std::size_t k = 0; k < x.eta.size(); ++k)
    g.eta.push_back(x.eta[k].scaled(alpha) + y.eta[k].scaled(beta));
  return g;
}

// If a = lambda * b componentwise for some lambda free of t and the states,
// returns lambda.
inline std::optional<RatFunc> proportional(const Generator &a, const Generator &b,
                                           std::size_t nstates) {
  std::vector<const RatFunc *> ca{&a.xi}, cb{&b.xi};
  for (std::size_t k = 0; k < a.eta.size(); ++k) {
    ca.push_back(&a.eta[k]);
    cb.push_back(&b.eta[k]);
  }
  if (ca.size() != cb.size())
    return std::nullopt;
  std::optional<RatFunc> lambda;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (cb[i]->is_zero() != ca[i]->is_zero())
      return std::nullopt;
    if (cb[i]->is_zero())
      continue;
    if (!lambda) {
      lambda = *ca[i] / *cb[i];
      for (std::size_t k = 0; k <= nstates; ++k)
        if (lambda->involves(k))
          return std::nullopt;
    } else if (!ratfunc_eq(*ca[i], *lambda * *cb[i])) {
      return std::nullopt;
    }
  }
  if (!lambda)
    lambda = RatFunc::one(a.symbols());
  return lambda;
}

struct Lemma4Report {
  bool invariant = false;
  std::vector<RatFunc> residual; // one per hyperbolic state
};

namespace detail {

inline Generator on_graph(const Generator &x, const ManifoldApprox &h) {
  auto b = h.graph_bindings();
  Generator g{truncate(substitute(x.xi, b), h.center, h.order), {}};
  for (const auto &e : x.eta)
    g.eta.push_back(truncate(substitute(e, b), h.center, h.order));
  return g;
}

} // namespace detail

// psi(x, h(x)) - Dh(x) phi(x, h(x)) through the order of h, where phi and
// psi are the center and hyperbolic components of X.
inline Lemma4Report lemma4_check(const Generator &x, const OdeSystem &sys,
                                 const BlockSplit &split, const ManifoldApprox &h) {
  Generator::validate(x, sys);
  Generator g = detail::on_graph(x, h);
  Lemma4Report rep;
  rep.invariant = true;
  for (std::size_t k = 0; k < h.hyp_dim(); ++k) {
    RatFunc acc = g.eta[split.hyperbolic[k]];
    RatFunc hk = h.component(k);
    for (std::size_t c = 0; c < h.center_dim(); ++c) {
      RatFunc d = hk.diff(h.center[c]);
      const RatFunc &phi = g.eta[split.center[c]];
      if (!d.is_zero() && !phi.is_zero())
        acc -= d * phi;
    }
    RatFunc r = truncate(acc, h.center, h.order);
    rep.invariant = rep.invariant && r.is_zero();
    rep.residual.push_back(std::move(r));
  }
  return rep;
}

class Lemma4Violation : public Error {
public:
  using Error::Error;
};

// Generator induced on the center manifold: xi(x, h(x)) and the center
// components phi(x, h(x)), over the reduced system's symbols.
inline Generator restrict_to_center(const Generator &x, const OdeSystem &sys,
                                    const BlockSplit &split, const ManifoldApprox &h) {
  if (!lemma4_check(x, sys, split, h).invariant)
    throw Lemma4Violation("generator does not leave the center manifold invariant");
  Generator g = detail::on_graph(x, h);
  std::vector<std::string> names;
  for (auto c : split.center)
    names.push_back(sys.states()[c]);
  Symbols target = OdeSystem::make_symbols(names, sys.params());
  Generator r{g.xi.rebase(target), {}};
  for (auto c : split.center)
    r.eta.push_back(g.eta[c].rebase(target));
  return r;
}

} // namespace cmsym

#endif
