#ifndef CMSYM_ODESYS_HPP
#define CMSYM_ODESYS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "cmsym/eval.hpp"
#include "cmsym/expr.hpp"
#include "cmsym/matrix.hpp"

namespace cmsym {

inline constexpr const char *time_symbol = "t";

// Autonomous system y' = rhs(y) with polynomial right-hand sides whose
// coefficients are rational in the parameters. Ambient symbols are ordered
// [t, states..., params...].
class OdeSystem {
public:
  OdeSystem() = default;

  OdeSystem(std::vector<std::string> states, std::vector<std::string> params,
            std::vector<RatFunc> rhs)
      : states_(std::move(states)), params_(std::move(params)),
        syms_(make_symbols(states_, params_)) {
    if (rhs.size() != states_.size())
      throw InputError("right-hand side count does not match state count");
    rhs_.reserve(rhs.size());
    for (auto &r : rhs)
      rhs_.push_back(r.symbols() == syms_ ? std::move(r) : r.rebase(syms_));
    validate();
  }

  static Symbols make_symbols(const std::vector<std::string> &states,
                              const std::vector<std::string> &params) {
    std::vector<std::string> names{time_symbol};
    names.insert(names.end(), states.begin(), states.end());
    names.insert(names.end(), params.begin(), params.end());
    return Symbols(std::move(names));
  }

  static OdeSystem parse(std::vector<std::string> states,
                         std::vector<std::string> params,
                         const std::vector<std::string> &rhs) {
    Symbols syms = make_symbols(states, params);
    std::vector<RatFunc> r;
    for (const auto &s : rhs)
      r.push_back(parse_expr(s, syms));
    return OdeSystem(std::move(states), std::move(params), std::move(r));
  }

  const std::vector<std::string> &states() const noexcept { return states_; }
  const std::vector<std::string> &params() const noexcept { return params_; }
  const Symbols &symbols() const noexcept { return syms_; }
  const std::vector<RatFunc> &rhs() const noexcept { return rhs_; }
  std::size_t dim() const noexcept { return states_.size(); }

  static constexpr std::size_t time_index() { return 0; }
  std::size_t state_index(std::size_t k) const { return 1 + k; }
  std::size_t param_index(std::size_t k) const { return 1 + states_.size() + k; }

  std::vector<std::size_t> state_vars() const {
    std::vector<std::size_t> v;
    for (std::size_t k = 0; k < dim(); ++k)
      v.push_back(state_index(k));
    return v;
  }

  // Same system with extra parameter symbols appended (e.g. ansatz
  // coefficients that later expressions refer to).
  OdeSystem with_extra_params(const std::vector<std::string> &extra) const {
    auto p = params_;
    p.insert(p.end(), extra.begin(), extra.end());
    return OdeSystem(states_, std::move(p), rhs_);
  }

  OdeSystem with_params(std::vector<std::string> params) const {
    return OdeSystem(states_, std::move(params), rhs_);
  }

private:
  void validate() const {
    for (std::size_t k = 0; k < rhs_.size(); ++k) {
      const auto &r = rhs_[k];
      if (r.num().involves(time_index()) || r.den().involves(time_index()))
        throw InputError("right-hand side of '" + states_[k] +
                         "' depends on t; only autonomous systems are supported");
      for (std::size_t j = 0; j < dim(); ++j)
        if (r.den().involves(state_index(j)))
          throw InputError("right-hand side of '" + states_[k] +
                           "' has state '" + states_[j] + "' in a denominator");
    }
  }

  std::vector<std::string> states_, params_;
  Symbols syms_;
  std::vector<RatFunc> rhs_;
};

inline RatFunc at_origin(const RatFunc &e, const OdeSystem &sys) {
  auto vars = sys.state_vars();
  return truncate(e, vars, 0);
}

// Entry (i, j) = d rhs_i / d y_j at y = 0.
inline PolyMatrix jacobian_origin(const OdeSystem &sys) {
  const std::size_t n = sys.dim();
  PolyMatrix j(sys.symbols(), n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      j(r, c) = at_origin(sys.rhs()[r].diff(sys.state_index(c)), sys);
  return j;
}

struct LinearSplit {
  PolyMatrix linear;              // A
  std::vector<RatFunc> nonlinear; // N = rhs - A y
};

inline std::vector<RatFunc> state_vector(const OdeSystem &sys) {
  std::vector<RatFunc> y;
  for (std::size_t k = 0; k < sys.dim(); ++k)
    y.push_back(RatFunc::variable(sys.symbols(), sys.state_index(k)));
  return y;
}

inline LinearSplit linear_nonlinear_split(const OdeSystem &sys) {
  PolyMatrix a = jacobian_origin(sys);
  auto ay = a.apply(state_vector(sys));
  std::vector<RatFunc> n;
  for (std::size_t k = 0; k < sys.dim(); ++k)
    n.push_back(sys.rhs()[k] - ay[k]);
  return {std::move(a), std::move(n)};
}

inline std::vector<std::string> default_state_names(std::size_t n) {
  static const char *base[] = {"u", "v", "w"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i)
    names.push_back(i < 3 ? std::string(base[i]) : "z" + std::to_string(i + 1));
  return names;
}

// Linear substitution y = T z between two ambient symbol lists.
struct LinearChange {
  Symbols source, target;
  PolyMatrix t, t_inv; // over target
  Bindings y_of_z;
  std::vector<std::string> new_states;
  std::vector<std::string> params;
};

inline LinearChange make_linear_change(const OdeSystem &sys, const PolyMatrix &t,
                                       std::vector<std::string> names = {}) {
  const std::size_t n = sys.dim();
  if (t.rows() != n || t.cols() != n)
    throw InputError("transformation matrix must be " + std::to_string(n) + "x" +
                     std::to_string(n));
  if (names.empty())
    names = default_state_names(n);
  if (names.size() != n)
    throw InputError("new state name count does not match state count");
  LinearChange lc;
  lc.source = sys.symbols();
  lc.target = OdeSystem::make_symbols(names, sys.params());
  lc.new_states = names;
  lc.params = sys.params();
  try {
    lc.t = t.rebase(lc.target);
  } catch (const SymbolError &) {
    throw InputError("transformation matrix may only depend on parameters");
  }
  for (const auto &e : lc.t.entries())
    for (std::size_t k = 0; k <= n; ++k)
      if (e.involves(k))
        throw InputError("transformation matrix may only depend on parameters");
  lc.t_inv = matrix_inverse(lc.t);
  std::vector<RatFunc> z;
  for (std::size_t k = 0; k < n; ++k)
    z.push_back(RatFunc::variable(lc.target, 1 + k));
  auto y = lc.t.apply(z);
  for (std::size_t k = 0; k < n; ++k)
    lc.y_of_z.emplace(sys.states()[k], y[k]);
  return lc;
}

// New system in z with rhs_new(z) = T^-1 rhs_old(T z).
inline OdeSystem change_coordinates(const OdeSystem &sys, const LinearChange &lc) {
  std::vector<RatFunc> old;
  for (const auto &r : sys.rhs())
    old.push_back(substitute(r, lc.y_of_z, lc.target));
  return OdeSystem(lc.new_states, lc.params, lc.t_inv.apply(old));
}

inline OdeSystem change_coordinates(const OdeSystem &sys, const PolyMatrix &t,
                                    std::vector<std::string> names = {}) {
  return change_coordinates(sys, make_linear_change(sys, t, std::move(names)));
}

// Partition of the states into center and hyperbolic coordinates together
// with the corresponding diagonal blocks of the linear part.
struct BlockSplit {
  std::vector<std::size_t> center;     // state indices
  std::vector<std::size_t> hyperbolic; // state indices
  PolyMatrix a_center;
  PolyMatrix a_hyperbolic;
};

inline BlockSplit make_split(const OdeSystem &sys, std::vector<std::size_t> center,
                             std::vector<std::size_t> hyperbolic) {
  std::vector<int> seen(sys.dim(), 0);
  for (auto i : center) {
    if (i >= sys.dim())
      throw InputError("split index out of range");
    ++seen[i];
  }
  for (auto i : hyperbolic) {
    if (i >= sys.dim())
      throw InputError("split index out of range");
    ++seen[i];
  }
  for (std::size_t i = 0; i < sys.dim(); ++i)
    if (seen[i] != 1)
      throw InputError("split must assign state '" + sys.states()[i] +
                       "' to exactly one block");
  PolyMatrix j = jacobian_origin(sys);
  BlockSplit s;
  s.a_center = j.block(center, center);
  s.a_hyperbolic = j.block(hyperbolic, hyperbolic);
  s.center = std::move(center);
  s.hyperbolic = std::move(hyperbolic);
  return s;
}

inline BlockSplit make_split(const OdeSystem &sys, const std::vector<std::string> &center,
                             const std::vector<std::string> &hyperbolic) {
  auto index = [&](const std::string &name) {
    for (std::size_t k = 0; k < sys.dim(); ++k)
      if (sys.states()[k] == name)
        return k;
    throw SymbolError("unknown state '" + name + "' in split");
  };
  std::vector<std::size_t> c, h;
  for (const auto &n : center)
    c.push_back(index(n));
  for (const auto &n : hyperbolic)
    h.push_back(index(n));
  return make_split(sys, std::move(c), std::move(h));
}

struct NormalFormReport {
  bool block_diagonal = true;
  bool nonlinear_flat = true;
  bool eigenvalues_separated = true;
  std::vector<std::string> violations;
  std::vector<RatFunc> center_diagonal, hyperbolic_diagonal;
  PolyMatrix a_center, a_hyperbolic;

  bool passed() const {
    return block_diagonal && nonlinear_flat && eigenvalues_separated;
  }
};

inline constexpr double default_eigen_tolerance = 1e-9;

namespace detail {

inline Eigen::VectorXcd numeric_eigenvalues(const PolyMatrix &m, const ParamBinding &b) {
  const std::size_t n = m.rows();
  Eigen::MatrixXd a(n, n);
  std::vector<std::size_t> unused;
  for (std::size_t v = 0; v < m.symbols().size(); ++v) {
    bool used = false;
    for (const auto &e : m.entries())
      used = used || e.involves(v);
    if (!used)
      unused.push_back(v);
  }
  auto values = bind_values(m.symbols(), b, unused);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = CompiledRatFunc(m(i, j))(values);
  if (n == 0)
    return Eigen::VectorXcd(0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues();
}

} // namespace detail

// (a) the linear part is block diagonal for the split, (b) the nonlinear
// remainder vanishes with its first partials at the origin, (c) at each
// numeric parameter sample the center block has |Re| <= tol and the
// hyperbolic block |Re| > tol.
inline NormalFormReport check_normal_form(const OdeSystem &sys, const BlockSplit &split,
                                          const std::vector<ParamBinding> &samples = {},
                                          double tol_eig = default_eigen_tolerance) {
  NormalFormReport rep;
  auto ls = linear_nonlinear_split(sys);
  const auto &a = ls.linear;
  auto cross = [&](const std::vector<std::size_t> &rows, const std::vector<std::size_t> &cols) {
    for (auto r : rows)
      for (auto c : cols)
        if (!a(r, c).is_zero()) {
          rep.block_diagonal = false;
          rep.violations.push_back("cross-block linear entry d" + sys.states()[r] + "'/d" +
                                   sys.states()[c] + " = " + render_expr(a(r, c)));
        }
  };
  cross(split.center, split.hyperbolic);
  cross(split.hyperbolic, split.center);

  auto vars = sys.state_vars();
  for (std::size_t k = 0; k < sys.dim(); ++k) {
    RatFunc low = truncate(ls.nonlinear[k], vars, 1);
    if (!low.is_zero()) {
      rep.nonlinear_flat = false;
      rep.violations.push_back("nonlinear part of " + sys.states()[k] +
                               " has constant or linear terms: " + render_expr(low));
    }
  }

  rep.a_center = a.block(split.center, split.center);
  rep.a_hyperbolic = a.block(split.hyperbolic, split.hyperbolic);
  for (std::size_t i = 0; i < split.center.size(); ++i)
    rep.center_diagonal.push_back(rep.a_center(i, i));
  for (std::size_t i = 0; i < split.hyperbolic.size(); ++i)
    rep.hyperbolic_diagonal.push_back(rep.a_hyperbolic(i, i));

  for (std::size_t s = 0; s < samples.size(); ++s) {
    auto ec = detail::numeric_eigenvalues(rep.a_center, samples[s]);
    for (Eigen::Index i = 0; i < ec.size(); ++i)
      if (std::abs(ec[i].real()) > tol_eig) {
        rep.eigenvalues_separated = false;
        rep.violations.push_back("sample " + std::to_string(s) +
                                 ": center eigenvalue with nonzero real part " +
                                 std::to_string(ec[i].real()));
      }
    auto eh = detail::numeric_eigenvalues(rep.a_hyperbolic, samples[s]);
    for (Eigen::Index i = 0; i < eh.size(); ++i)
      if (std::abs(eh[i].real()) <= tol_eig) {
        rep.eigenvalues_separated = false;
        rep.violations.push_back("sample " + std::to_string(s) +
                                 ": hyperbolic eigenvalue with zero real part " +
                                 std::to_string(eh[i].real()));
      }
  }
  return rep;
}

} // namespace cmsym

#endif
