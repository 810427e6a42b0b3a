#ifndef CMSYM_IO_HPP
#define CMSYM_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmsym/center.hpp"
#include "cmsym/symmetry.hpp"

namespace cmsym::io {

using nlohmann::json;

inline json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw InputError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  out << text;
}

namespace detail {

inline const json &field(const json &j, const char *key, const std::string &what) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(what + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::string as_string(const json &j, const std::string &what) {
  if (j.is_string())
    return j.get<std::string>();
  if (j.is_number_integer())
    return std::to_string(j.get<long long>());
  throw InputError(what + ": expected an expression string");
}

inline std::vector<std::string> string_list(const json &j, const std::string &what) {
  if (!j.is_array())
    throw InputError(what + ": expected an array of names");
  std::vector<std::string> out;
  for (const auto &e : j) {
    if (!e.is_string())
      throw InputError(what + ": expected an array of names");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Entries of an object keyed by state name, in state order.
inline std::vector<std::string> per_state(const json &obj, const std::vector<std::string> &states,
                                          const std::string &what) {
  if (!obj.is_object())
    throw InputError(what + ": expected an object keyed by state name");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(states.begin(), states.end(), it.key()) == states.end())
      throw SymbolError(what + ": '" + it.key() + "' is not a state");
  std::vector<std::string> out;
  for (const auto &s : states) {
    if (!obj.contains(s))
      throw InputError(what + ": missing entry for state '" + s + "'");
    out.push_back(as_string(obj.at(s), what));
  }
  return out;
}

} // namespace detail

// {"states": [...], "params": [...], "rhs": {"y1": "<expr>", ...}}
inline OdeSystem system_from_json(const json &j) {
  auto states = detail::string_list(detail::field(j, "states", "system"), "system states");
  std::vector<std::string> params;
  if (j.contains("params"))
    params = detail::string_list(j.at("params"), "system params");
  auto rhs = detail::per_state(detail::field(j, "rhs", "system"), states, "system rhs");
  return OdeSystem::parse(std::move(states), std::move(params), rhs);
}

inline json system_to_json(const OdeSystem &sys) {
  json rhs = json::object();
  for (std::size_t k = 0; k < sys.dim(); ++k)
    rhs[sys.states()[k]] = render_expr(sys.rhs()[k]);
  return {{"states", sys.states()}, {"params", sys.params()}, {"rhs", rhs}};
}

inline OdeSystem load_system(const std::string &path) {
  return system_from_json(read_json(path));
}

// {"xi": "<expr>", "eta": {"y1": "<expr>", ...}}
inline Generator generator_from_json(const json &j, const OdeSystem &sys) {
  std::string xi = detail::as_string(detail::field(j, "xi", "generator"), "generator xi");
  auto eta = detail::per_state(detail::field(j, "eta", "generator"), sys.states(),
                               "generator eta");
  return Generator::parse(sys, xi, eta);
}

inline json generator_to_json(const Generator &g, const std::vector<std::string> &states) {
  json eta = json::object();
  for (std::size_t k = 0; k < states.size(); ++k)
    eta[states[k]] = render_expr(g.eta[k]);
  return {{"xi", render_expr(g.xi)}, {"eta", eta}};
}

inline Generator load_generator(const std::string &path, const OdeSystem &sys) {
  return generator_from_json(read_json(path), sys);
}

// {"rows": [["<expr>", ...], ...]} over the parameter symbols of sys.
inline PolyMatrix matrix_from_json(const json &j, const OdeSystem &sys) {
  const json &rows = detail::field(j, "rows", "matrix");
  if (!rows.is_array() || rows.empty())
    throw InputError("matrix: 'rows' must be a non-empty array");
  const std::size_t n = rows.size();
  std::size_t m = 0;
  for (const auto &r : rows) {
    if (!r.is_array())
      throw InputError("matrix: each row must be an array");
    if (m == 0)
      m = r.size();
    else if (r.size() != m)
      throw InputError("matrix: rows have different lengths");
  }
  PolyMatrix out(sys.symbols(), n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      out(i, k) = parse_expr(detail::as_string(rows[i][k], "matrix entry"), sys.symbols());
  return out;
}

inline json matrix_to_json(const PolyMatrix &m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k)
      r.push_back(render_expr(m(i, k)));
    rows.push_back(r);
  }
  return {{"rows", rows}};
}

inline PolyMatrix load_matrix(const std::string &path, const OdeSystem &sys) {
  return matrix_from_json(read_json(path), sys);
}

// Centre-manifold map: {"order": N, "h": {"<hyperbolic state>": "<expr>"}}.
inline json manifold_to_json(const ManifoldApprox &h) {
  json comp = json::object();
  for (std::size_t k = 0; k < h.hyp_dim(); ++k)
    comp[h.symbols[h.hyperbolic[k]]] = render_expr(h.component(k));
  return {{"order", h.order}, {"h", comp}};
}

inline ManifoldApprox manifold_from_json(const json &j, const OdeSystem &sys,
                                         const BlockSplit &split) {
  const json &order = detail::field(j, "order", "manifold");
  if (!order.is_number_unsigned())
    throw InputError("manifold: 'order' must be a positive integer");
  std::vector<std::string> names;
  for (auto k : split.hyperbolic)
    names.push_back(sys.states()[k]);
  auto exprs = detail::per_state(detail::field(j, "h", "manifold"), names, "manifold h");
  std::vector<RatFunc> comps;
  for (const auto &e : exprs)
    comps.push_back(parse_expr(e, sys.symbols()));
  return ManifoldApprox::from_components(sys, split, order.get<unsigned>(), comps);
}

inline std::string dump(const json &j) { return j.dump(2) + "\n"; }

} // namespace cmsym::io

#endif
