#ifndef CMSYM_MODELS_HPP
#define CMSYM_MODELS_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cmsym/numerics.hpp"

namespace cmsym::models {

// Quasi-chemical growth/death kinetics: M -> M*, M* -> 2M* + A,
// A + M* -> (sensitized) -> D, M* -> D. G = k2 - k4, eps = k3 / 10^9.
inline OdeSystem full_model() {
  return OdeSystem::parse({"M", "Mstar", "A", "D"}, {"k1", "k2", "k3", "k4"},
                          {"-k1*M",
                           "k1*M + Mstar*((k2 - k4) - 1e-9*k3*A)",
                           "Mstar*(k2 - 1e-9*k3*A)",
                           "Mstar*(k4 + 1e-9*k3*A)"});
}

// First three rows of the full model with G and eps as free parameters.
inline OdeSystem reduced_model_sym() {
  return OdeSystem::parse({"y1", "y2", "y3"}, {"k1", "k2", "G", "eps"},
                          {"-k1*y1", "k1*y1 + G*y2 - eps*y2*y3", "k2*y2 - eps*y2*y3"});
}

inline OdeSystem reduced_model_g0() {
  return OdeSystem::parse({"y1", "y2", "y3"}, {"k1", "k2", "eps"},
                          {"-k1*y1", "k1*y1 - eps*y2*y3", "k2*y2 - eps*y2*y3"});
}

// Dynamics on the G = 0 center manifold (the uv-plane).
inline OdeSystem center_system_g0() {
  return OdeSystem::parse({"u", "v"}, {"k1", "k2", "eps"},
                          {"k2*v - eps*u*v", "-eps*u*v"});
}

// The same dynamics after u = y3, v = y2, states ordered (y2, y3).
inline OdeSystem center_system_g0_original_names() {
  return OdeSystem::parse({"y2", "y3"}, {"k1", "k2", "eps"},
                          {"-eps*y2*y3", "k2*y2 - eps*y2*y3"});
}

enum class CaseTag { g_nonzero, g_zero };

inline std::string case_name(CaseTag t) { return t == CaseTag::g_nonzero ? "gnz" : "g0"; }

inline CaseTag parse_case(const std::string &s) {
  if (s == "gnz" || s == "G_nonzero")
    return CaseTag::g_nonzero;
  if (s == "g0" || s == "G_zero")
    return CaseTag::g_zero;
  throw InputError("unknown case '" + s + "' (expected g0 or gnz)");
}

// Generator written as expression strings: xi then one eta per state.
struct GeneratorText {
  std::string xi;
  std::vector<std::string> eta;
};

struct PaperCase {
  CaseTag tag{};
  OdeSystem system;               // original coordinates y1, y2, y3
  PolyMatrix t;                   // y = T (u, v, w)
  std::vector<std::string> center_names, hyperbolic_names;
  OdeSystem normal_form;          // tabulated normal form
  std::vector<Generator> generators_original; // X1..X6 over system
  std::vector<Generator> generators_normal;   // tabulated X~1..X~6 over normal_form
  std::vector<std::string> labels{"X1", "X2", "X3", "X4", "X5", "X6"};

  BlockSplit split() const { return make_split(normal_form, center_names, hyperbolic_names); }
  // Samples used to check the eigenvalue separation of the normal form.
  std::vector<ParamBinding> samples;
};

namespace detail {

inline PolyMatrix parse_matrix(const std::vector<std::vector<std::string>> &rows,
                               const Symbols &syms) {
  PolyMatrix m(syms, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(i, j) = parse_expr(rows[i][j], syms);
  return m;
}

inline std::vector<Generator> parse_generators(const OdeSystem &sys,
                                               const std::vector<GeneratorText> &gs) {
  std::vector<Generator> out;
  for (const auto &g : gs)
    out.push_back(Generator::parse(sys, g.xi, g.eta));
  return out;
}

inline std::string wrap(const std::string &s) { return "(" + s + ")"; }

// Shorthands of the G != 0 tables.
inline const std::string gnz_f = "(-eps/G*(v - k1*w)*(k2*v + G*(u + k2*w)))";
inline const std::string gnz_j = "(v - k1*w)";
inline const std::string gnz_l = "(u + k2/G*v + k2*w)";
inline const std::string gnz_m = "(-1/eps*(G + k1)*w)";

// Shorthands of the G = 0 tables; *0 variants have w = 0.
inline const std::string g0_g = "(-eps*(v - w)*(u + k2/k1*w))";
inline const std::string g0_n = "(eps*k2*w*(-v + w) + k1*(k2*v + eps*u*(-v + w)))";
inline const std::string g0_p = "((v - w)*(u + k2/k1*w))";
inline const std::string g0_n0 = "(k1*(k2*v + eps*u*(-v)))";
inline const std::string g0_p0 = "((v)*(u))";

} // namespace detail

inline PaperCase paper_case(CaseTag tag) {
  using namespace detail;
  PaperCase pc;
  pc.tag = tag;
  if (tag == CaseTag::g_nonzero) {
    pc.system = reduced_model_sym();
    Symbols ps = OdeSystem::make_symbols({}, pc.system.params());
    pc.t = parse_matrix({{"0", "0", "G + k1"}, {"0", "1", "-k1"}, {"1", "k2/G", "k2"}}, ps);
    pc.center_names = {"u"};
    pc.hyperbolic_names = {"v", "w"};
    const std::string &f = gnz_f, &j = gnz_j, &l = gnz_l, &m = gnz_m;
    pc.normal_form = OdeSystem::parse({"u", "v", "w"}, pc.system.params(),
                                      {"(1 - k2/G)*" + f, "G*v + " + f, "-k1*w"});
    pc.generators_original = parse_generators(
        pc.system,
        {{"1", {"0", "0", "0"}},
         {"y2",
          {"-k1*y1*y2", "k1*y1*y2 + G*y2^2 - eps*y2^2*y3", "k2*y2^2 - eps*y2^2*y3"}},
         {"y3",
          {"-k1*y1*y3", "k1*y1*y3 + G*y2*y3 - eps*y2*y3^2", "k2*y2*y3 - eps*y2*y3^2"}},
         {"0", {"-y1", "y1 + G/k1*y2 - eps/k1*y2*y3", "k2/k1*y2 - eps/k1*y2*y3"}},
         {"1/k1*t",
          {"-t*y1", "t*y1 + G/k1*t*y2 - eps/k1*t*y2*y3", "k2/k1*t*y2 - eps/k1*t*y2*y3"}},
         {"-1/eps*y1",
          {"k1/eps*y1^2", "-k1/eps*y1^2 - G/eps*y1*y2 + y1*y2*y3",
           "-k2/eps*y1*y2 + y1*y2*y3"}}});
    pc.generators_normal = parse_generators(
        pc.normal_form,
        {{"1", {"0", "0", "0"}},
         {j, {"1/G*(G - k2)*" + j + "*" + f, j + "*(G*v + " + f + ")", "-k1*w*" + j}},
         {l, {"1/G*(G - k2)*" + l + "*" + f, l + "*(G*v + " + f + ")", "-k1*w*" + l}},
         {"0", {"1/(G*k1)*(G - k2)*" + f, "1/k1*(G*v + " + f + ")", "-w"}},
         {"t/k1", {"t/(G*k1)*(G - k2)*" + f, "t/k1*(G*v + " + f + ")", "-t*w"}},
         {m, {"1/G*(G - k2)*" + m + "*" + f, m + "*(G*v + " + f + ")", "-k1*w*" + m}}});
    pc.samples = {{{"k1", 1.0}, {"k2", 4.0}, {"G", 3.0}, {"eps", 1e-7}},
                  {{"k1", 1.0}, {"k2", 1.0}, {"G", -3.0}, {"eps", 1e-7}},
                  {{"k1", 2.5}, {"k2", 0.5}, {"G", 0.25}, {"eps", 2e-9}}};
  } else {
    pc.system = reduced_model_g0();
    Symbols ps = OdeSystem::make_symbols({}, pc.system.params());
    pc.t = parse_matrix({{"0", "0", "1"}, {"0", "1", "-1"}, {"1", "0", "k2/k1"}}, ps);
    pc.center_names = {"u", "v"};
    pc.hyperbolic_names = {"w"};
    const std::string &g = g0_g, &n = g0_n, &p = g0_p;
    pc.normal_form = OdeSystem::parse({"u", "v", "w"}, pc.system.params(),
                                      {"k2*v + " + g, g, "-k1*w"});
    pc.generators_original = parse_generators(
        pc.system,
        {{"1", {"0", "0", "0"}},
         {"y2", {"-k1*y1*y2", "k1*y1*y2 - eps*y2^2*y3", "k2*y2^2 - eps*y2^2*y3"}},
         {"y3", {"-k1*y1*y3", "k1*y1*y3 - eps*y2*y3^2", "k2*y2*y3 - eps*y2*y3^2"}},
         {"0", {"k1/eps*y1", "-k1/eps*y1 + y2*y3", "-k2/eps*y2 + y2*y3"}},
         {"-1/eps*t", {"k1/eps*t*y1", "-k1/eps*t*y1 + t*y2*y3", "-k2/eps*t*y2 + t*y2*y3"}},
         {"-1/eps*y1",
          {"k1/eps*y1^2", "-k1/eps*y1^2 + y1*y2*y3", "-k2/eps*y1*y2 + y1*y2*y3"}}});
    const std::string vw = "(v - w)", uw = "(u + k2/k1*w)";
    pc.generators_normal = parse_generators(
        pc.normal_form,
        {{"1", {"0", "0", "0"}},
         {vw, {"1/k1*" + vw + "*" + n, "-eps*" + vw + "*" + p, "-k1*" + vw + "*w"}},
         {uw, {"1/k1*" + uw + "*" + n, "-eps*" + uw + "*" + p, "-k1*" + uw + "*w"}},
         {"0", {"-1/(eps*k1)*" + n, p, "k1/eps*w"}},
         {"-t/eps", {"-1/(eps*k1)*t*" + n, "t*" + p, "k1/eps*t*w"}},
         {"-1/eps*w", {"-1/(eps*k1)*w*" + n, "w*" + p, "k1/eps*w^2"}}});
    pc.samples = {{{"k1", 1.0}, {"k2", 4.0}, {"eps", 1e-7}},
                  {{"k1", 3.0}, {"k2", 0.5}, {"eps", 1e-9}}};
  }
  return pc;
}

// Tabulated generators inherited by the G = 0 center manifold, labelled
// X^2..X^5. Components are (xi, eta_u, eta_v) written over (u, v, w) exactly
// as printed; restricted_table() evaluates them at w = 0.
inline std::vector<GeneratorText> restricted_table_text() {
  using namespace detail;
  const std::string &n0 = g0_n0, &p0 = g0_p0, &p = g0_p;
  return {{"v", {"1/k1*v*" + n0, "-eps*v*" + p0}},
          {"u", {"1/k1*u*" + n0, "-eps*u*" + p}},
          {"0", {"-1/(eps*k1)*" + n0, p0}},
          {"-1/eps*t", {"-1/(eps*k1)*t*" + n0, "t*" + p0}}};
}

inline std::vector<Generator> restricted_table() {
  OdeSystem reduced = center_system_g0();
  Symbols wide = OdeSystem::make_symbols({"u", "v", "w"}, reduced.params());
  Bindings w0{{"w", RatFunc::zero(reduced.symbols())}};
  std::vector<Generator> out;
  for (const auto &g : restricted_table_text()) {
    Generator x{substitute(parse_expr(g.xi, wide), w0, reduced.symbols()), {}};
    for (const auto &e : g.eta)
      x.eta.push_back(substitute(parse_expr(e, wide), w0, reduced.symbols()));
    Generator::validate(x, reduced);
    out.push_back(std::move(x));
  }
  return out;
}

// The same four generators as printed in the original names (y2, y3).
inline std::vector<Generator> restricted_table_original_names() {
  OdeSystem s = center_system_g0_original_names();
  return detail::parse_generators(
      s, {{"y2", {"k2*y2^2 - eps*y2^2*y3", "-eps*y2^2*y3"}},
          {"y3", {"k2*y2*y3 - eps*y2*y3^2", "-eps*y2*y3^2"}},
          {"0", {"-k2/eps*y2 + y2*y3", "y2*y3"}},
          {"-1/eps*t", {"-k2/eps*t*y2 + t*y2*y3", "t*y2*y3"}}});
}

// Tabulated centre-manifold residual expansions for the generic ansatz; the
// ansatz coefficients are extra parameters appended to the normal form.
struct AnsatzExpansion {
  OdeSystem system;                     // normal form with coefficient params
  std::vector<std::string> components;  // h, one per hyperbolic state
  std::vector<std::string> expected;    // tabulated (Mh)(x), same order
};

inline AnsatzExpansion ansatz_expansion(CaseTag tag) {
  PaperCase pc = paper_case(tag);
  AnsatzExpansion a;
  if (tag == CaseTag::g_nonzero) {
    a.system = pc.normal_form.with_extra_params({"a", "b", "c", "d"});
    a.components = {"a*u^2 + b*u^3", "c*u^2 + d*u^3"};
    a.expected = {"-G*a*u^2 + (-G*b - eps*a + k1*eps*c)*u^3", "k1*c*u^2 + k1*d*u^3"};
  } else {
    a.system = pc.normal_form.with_extra_params({"a", "b", "c", "d", "e", "f", "j"});
    a.components = {"a*u^2 + b*v^2 + c*u*v + d*u^3 + e*v^3 + f*u^2*v + j*u*v^2"};
    a.expected = {"(2*a*k2 + c*k1)*u*v + (a*k1)*u^2 + (c*k2 + b*k1)*v^2 + (d*k1)*u^3"
                  " + (j*k2 + e*k1)*v^3 + (3*d*k2 - 2*a*eps - c*eps + f*k1)*u^2*v"
                  " + (2*f*k2 - c*eps - 2*b*eps + j*k1)*u*v^2"};
  }
  return a;
}

// ---------------------------------------------------------------------------
// Scenarios of the full model.

enum class Shape { peak_then_decline, unrestrained_growth, bounded_limit };

struct Scenario {
  std::string name;
  ParamBinding binding;
  std::vector<double> ic;
  double t_end = 50.0;
  std::string description;
};

inline constexpr double inoculum = 1e4;

inline std::vector<Scenario> scenarios() {
  auto make = [](std::string name, double k1, double k2, double k3, double k4,
                 std::string description) {
    return Scenario{std::move(name),
                    {{"k1", k1}, {"k2", k2}, {"k3", k3}, {"k4", k4}},
                    {inoculum, 0.0, 0.0, 0.0},
                    50.0,
                    std::move(description)};
  };
  return {make("paper-G0", 1, 4, 100, 4, "Mstar -> 0, A -> constant"),
          make("ross-k3zero-Gpos", 1, 4, 0, 1, "unrestrained growth of Mstar and A"),
          make("ross-k3pos-Gpos", 1, 4, 100, 1, "Mstar peaks then declines, A bounded"),
          make("ross-k3zero-Gneg", 1, 1, 0, 4, "A rises to a limit, Mstar -> 0")};
}

inline Scenario find_scenario(const std::string &name) {
  for (auto &s : scenarios())
    if (s.name == name)
      return s;
  throw InputError("unknown model '" + name + "'");
}

namespace shape {

inline std::vector<double> column(const NumericTrajectory &tr, std::size_t k) {
  std::vector<double> c(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i)
    c[i] = tr.state(i)[k];
  return c;
}

// Maximum strictly inside (t0, t_end) and final value below 1% of it.
inline bool peaks_then_declines(const NumericTrajectory &tr, std::size_t k) {
  auto c = column(tr, k);
  auto it = std::max_element(c.begin(), c.end());
  std::size_t i = static_cast<std::size_t>(it - c.begin());
  if (i == 0 || i + 1 == c.size() || !(*it > 0))
    return false;
  return std::abs(c.back()) < 0.01 * *it;
}

// |y(t_end) - y(0.9 t_end)| < 1e-3 |y(t_end)|.
inline bool approaches_constant(const NumericTrajectory &tr, std::size_t k) {
  double t1 = tr.times.back(), t0 = tr.times.front();
  double y1 = tr.final_state()[k];
  double y9 = tr.interpolate(t0 + 0.9 * (t1 - t0))[k];
  return std::abs(y1 - y9) < 1e-3 * std::abs(y1);
}

// Strictly increasing over the final decile and y(t_end) > 10 y(t_end / 2).
inline bool unrestrained_growth(const NumericTrajectory &tr, std::size_t k) {
  double t1 = tr.times.back(), t0 = tr.times.front();
  double cut = t0 + 0.9 * (t1 - t0);
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.times[i] < cut)
      continue;
    double y = tr.state(i)[k];
    if (!(y > prev))
      return false;
    prev = y;
  }
  double half = tr.interpolate(t0 + 0.5 * (t1 - t0))[k];
  return tr.final_state()[k] > 10 * half;
}

inline bool bounded_above(const NumericTrajectory &tr, std::size_t k, double limit) {
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.state(i)[k] > limit)
      return false;
  return true;
}

} // namespace shape

struct ShapeCheck {
  std::string name;
  bool passed = false;
};

// The qualitative predicates expected of each built-in scenario.
inline std::vector<ShapeCheck> check_scenario(const Scenario &s, const NumericTrajectory &tr,
                                              double atol = 1e-12) {
  constexpr std::size_t mstar = 1, a = 2;
  const double k2 = s.binding.at("k2"), eps = 1e-9 * s.binding.at("k3");
  std::vector<ShapeCheck> out;
  auto add = [&](std::string n, bool ok) { out.push_back({std::move(n), ok}); };
  if (s.name == "paper-G0") {
    add("Mstar peaks then declines", shape::peaks_then_declines(tr, mstar));
    add("A approaches a constant", shape::approaches_constant(tr, a));
    add("A <= k2/eps", shape::bounded_above(tr, a, k2 / eps + atol));
  } else if (s.name == "ross-k3zero-Gpos") {
    add("Mstar grows without bound", shape::unrestrained_growth(tr, mstar));
    add("A grows without bound", shape::unrestrained_growth(tr, a));
  } else if (s.name == "ross-k3pos-Gpos") {
    add("Mstar peaks then declines", shape::peaks_then_declines(tr, mstar));
    add("A <= k2/eps", shape::bounded_above(tr, a, k2 / eps + atol));
  } else if (s.name == "ross-k3zero-Gneg") {
    add("A approaches a constant", shape::approaches_constant(tr, a));
    add("Mstar peaks then declines", shape::peaks_then_declines(tr, mstar));
  }
  return out;
}

// Conserved along u' = k2 v - eps u v, v' = -eps u v while eps u < k2:
// H(u, v) = v - u - (k2/eps) ln(k2 - eps u).
inline ScalarFunction first_integral_g0(double k2, double eps) {
  return [k2, eps](double, std::span<const double> y) {
    double arg = k2 - eps * y[0];
    if (!(arg > 0))
      throw NumericError("first integral undefined: k2 - eps*u <= 0");
    return y[1] - y[0] - (k2 / eps) * std::log(arg);
  };
}

} // namespace cmsym::models

#endif
