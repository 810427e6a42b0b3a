#ifndef CMSYM_CLI_HPP
#define CMSYM_CLI_HPP

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmsym/io.hpp"
#include "cmsym/models.hpp"

namespace cmsym::cli {

enum ExitCode : int { ok = 0, assertion_false = 1, input_error = 2, numeric_error = 3 };

namespace detail {

inline std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string &s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string &text, const std::string &what) {
  std::string s = trim(text);
  char *end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw InputError("invalid number '" + text + "' for " + what);
  return v;
}

inline std::vector<double> parse_doubles(const std::string &s, const std::string &what) {
  std::vector<double> out;
  for (const auto &item : split_list(s))
    out.push_back(parse_double(item, what));
  return out;
}

// "k1=1,k2=4.5,eps=1e-7"
inline ParamBinding parse_params(const std::string &s) {
  ParamBinding b;
  for (const auto &item : split_list(s)) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InputError("parameter binding '" + item + "' is not of the form name=value");
    std::string name = trim(item.substr(0, eq));
    if (name.empty())
      throw InputError("parameter binding '" + item + "' has an empty name");
    b[name] = parse_double(item.substr(eq + 1), "parameter '" + name + "'");
  }
  return b;
}

// "u|v,w" -> center {u}, hyperbolic {v, w}.
inline BlockSplit parse_split(const OdeSystem &sys, const std::string &s) {
  auto bar = s.find('|');
  if (bar == std::string::npos || s.find('|', bar + 1) != std::string::npos)
    throw InputError("split '" + s + "' must have the form c1,c2|h1,h2");
  return make_split(sys, split_list(s.substr(0, bar)), split_list(s.substr(bar + 1)));
}

inline std::string split_text(const OdeSystem &sys, const BlockSplit &sp) {
  std::string s;
  for (std::size_t i = 0; i < sp.center.size(); ++i)
    s += (i ? "," : "") + sys.states()[sp.center[i]];
  s += "|";
  for (std::size_t i = 0; i < sp.hyperbolic.size(); ++i)
    s += (i ? "," : "") + sys.states()[sp.hyperbolic[i]];
  return s;
}

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string join(const std::vector<std::string> &v, const std::string &sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? sep : "") + v[i];
  return s;
}

inline void print_system(std::ostream &out, const OdeSystem &sys, const std::string &indent) {
  for (std::size_t k = 0; k < sys.dim(); ++k)
    out << indent << sys.states()[k] << "' = " << render_expr(sys.rhs()[k]) << "\n";
}

inline void print_generator(std::ostream &out, const Generator &g,
                            const std::vector<std::string> &states, const std::string &indent) {
  out << indent << "xi = " << render_expr(g.xi) << "\n";
  for (std::size_t k = 0; k < states.size(); ++k)
    out << indent << "eta[" << states[k] << "] = " << render_expr(g.eta[k]) << "\n";
}

inline void emit(const std::optional<std::string> &path, std::ostream &out,
                 const std::string &text) {
  if (path && !path->empty())
    io::write_text(*path, text);
  else
    out << text;
}

// Parameter samples for the eigenvalue test: the --params binding if any.
inline std::vector<ParamBinding> samples_of(const std::string &params) {
  if (params.empty())
    return {};
  return {parse_params(params)};
}

} // namespace detail

struct Options {
  std::string system, matrix, split, params, ic, point, out, dir, model, kase, manifold,
      reduced_out, names, tol_text;
  std::vector<std::string> generators;
  unsigned order = 3;
  double t_end = 50.0, rtol = 1e-9, atol = 1e-12, gamma = 0.0, tol = 1e-6;
  std::size_t samples = 0;
  unsigned substeps = 1;
  bool check = false;
};

namespace commands {

using detail::num;

inline int analyze(const Options &o, std::ostream &out) {
  OdeSystem sys = io::load_system(o.system);
  out << "states: " << detail::join(sys.states()) << "\n";
  out << "params: " << detail::join(sys.params()) << "\n";
  PolyMatrix j = jacobian_origin(sys);
  out << "jacobian at origin:\n";
  for (std::size_t r = 0; r < j.rows(); ++r) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < j.cols(); ++c)
      row.push_back(render_expr(j(r, c)));
    out << "  [" << detail::join(row) << "]\n";
  }
  BlockSplit sp;
  if (!o.split.empty()) {
    sp = detail::parse_split(sys, o.split);
  } else {
    std::vector<std::size_t> c, h;
    for (std::size_t k = 0; k < sys.dim(); ++k)
      (j(k, k).is_zero() ? c : h).push_back(k);
    sp = make_split(sys, c, h);
    out << "suggested split (zero diagonal entries are center): ";
  }
  out << "split: " << detail::split_text(sys, sp) << "\n";
  auto rep = check_normal_form(sys, sp, detail::samples_of(o.params));
  auto flag = [](bool b) { return b ? "yes" : "no"; };
  out << "block diagonal: " << flag(rep.block_diagonal) << "\n";
  out << "nonlinear part flat at origin: " << flag(rep.nonlinear_flat) << "\n";
  out << "eigenvalues separated: " << flag(rep.eigenvalues_separated)
      << (o.params.empty() ? " (no --params sample given)" : "") << "\n";
  for (const auto &v : rep.violations)
    out << "  violation: " << v << "\n";
  out << "normal form: " << (rep.passed() ? "PASS" : "FAIL") << "\n";
  return rep.passed() ? ok : assertion_false;
}

inline int transform(const Options &o, std::ostream &out) {
  OdeSystem sys = io::load_system(o.system);
  PolyMatrix t = io::load_matrix(o.matrix, sys);
  std::vector<std::string> names = detail::split_list(o.names);
  OdeSystem res;
  try {
    res = change_coordinates(sys, t, names);
  } catch (const SingularMatrixError &e) {
    throw InputError(std::string("transformation matrix is not invertible: ") + e.what());
  }
  detail::emit(o.out, out, io::dump(io::system_to_json(res)));
  return ok;
}

inline std::string reduced_summary(const OdeSystem &red) {
  std::vector<std::string> eqs;
  for (std::size_t k = 0; k < red.dim(); ++k)
    eqs.push_back(red.states()[k] + "' = " + render_expr(red.rhs()[k]));
  return detail::join(eqs);
}

inline int center_manifold(const Options &o, std::ostream &out) {
  OdeSystem sys = io::load_system(o.system);
  BlockSplit sp = detail::parse_split(sys, o.split);
  auto h = compute_center_manifold(sys, sp, o.order);
  auto red = reduce_to_center(sys, sp, h);
  std::string ord = std::to_string(o.order);
  if (h.is_zero()) {
    out << "h = 0 through order " << ord << "; reduced: " << reduced_summary(red) << "\n";
  } else {
    std::vector<std::string> comps;
    for (std::size_t k = 0; k < h.hyp_dim(); ++k)
      comps.push_back(sys.states()[sp.hyperbolic[k]] + " = " + render_expr(h.component(k)));
    out << "h != 0 through order " << ord << ": " << detail::join(comps)
        << "; reduced: " << reduced_summary(red) << "\n";
    auto nz = h.nonzero_degrees();
    std::vector<std::string> zero;
    for (unsigned d = 2; d <= o.order; ++d)
      if (std::find(nz.begin(), nz.end(), d) == nz.end())
        zero.push_back(std::to_string(d));
    out << "vanishing degrees: " << (zero.empty() ? "none" : detail::join(zero)) << "\n";
  }
  if (!o.out.empty())
    io::write_text(o.out, io::dump(io::manifold_to_json(h)));
  if (!o.reduced_out.empty())
    io::write_text(o.reduced_out, io::dump(io::system_to_json(red)));
  return ok;
}

inline int check_symmetry(const Options &o, std::ostream &out) {
  if (o.generators.empty())
    throw InputError("at least one --generator is required");
  OdeSystem sys = io::load_system(o.system);
  std::vector<Generator> gens;
  for (const auto &g : o.generators)
    gens.push_back(io::load_generator(g, sys));
  bool all = true;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    auto rep = lsc_residual(gens[i], sys);
    out << (rep.is_symmetry ? "PASS " : "FAIL ") << o.generators[i] << "\n";
    if (!rep.is_symmetry)
      for (std::size_t k = 0; k < sys.dim(); ++k)
        if (!rep.residuals[k].is_zero())
          out << "  residual[" << sys.states()[k] << "] = " << render_expr(rep.residuals[k])
              << "\n";
    all = all && rep.is_symmetry;
  }
  return all ? ok : assertion_false;
}

inline int lemma4(const Options &o, std::ostream &out) {
  OdeSystem sys = io::load_system(o.system);
  BlockSplit sp = detail::parse_split(sys, o.split);
  ManifoldApprox h = o.manifold.empty()
                         ? compute_center_manifold(sys, sp, o.order)
                         : io::manifold_from_json(io::read_json(o.manifold), sys, sp);
  if (o.generators.empty())
    throw InputError("at least one --generator is required");
  std::vector<std::string> center;
  for (auto c : sp.center)
    center.push_back(sys.states()[c]);
  bool all = true;
  for (const auto &path : o.generators) {
    Generator g = io::load_generator(path, sys);
    auto rep = lemma4_check(g, sys, sp, h);
    out << (rep.invariant ? "PASS " : "FAIL ") << path << " (invariant through order "
        << h.order << ")\n";
    if (rep.invariant) {
      out << "  restricted:\n";
      detail::print_generator(out, restrict_to_center(g, sys, sp, h), center, "    ");
    } else {
      for (std::size_t k = 0; k < rep.residual.size(); ++k)
        if (!rep.residual[k].is_zero())
          out << "  residual[" << sys.states()[sp.hyperbolic[k]]
              << "] = " << render_expr(rep.residual[k]) << "\n";
    }
    all = all && rep.invariant;
  }
  return all ? ok : assertion_false;
}

inline int simulate(const Options &o, std::ostream &out) {
  OdeSystem sys;
  ParamBinding binding;
  std::vector<double> ic;
  double t_end = o.t_end;
  std::optional<models::Scenario> scenario;
  if (!o.model.empty() && !o.system.empty())
    throw InputError("give either --model or --system, not both");
  if (!o.model.empty()) {
    scenario = models::find_scenario(o.model);
    sys = models::full_model();
    binding = scenario->binding;
    ic = scenario->ic;
  } else if (!o.system.empty()) {
    sys = io::load_system(o.system);
  } else {
    throw InputError("one of --model or --system is required");
  }
  for (const auto &[k, v] : detail::parse_params(o.params))
    binding[k] = v;
  if (!o.ic.empty())
    ic = detail::parse_doubles(o.ic, "--ic");
  if (ic.empty())
    throw InputError("--ic is required for --system");
  auto tr = integrate_adaptive(sys, binding, ic, t_end, o.rtol, o.atol);
  std::ostringstream csv;
  write_csv(csv, tr, sys.states(), o.samples);
  if (o.out.empty()) {
    out << csv.str();
    return ok;
  }
  io::write_text(o.out, csv.str());
  out << "wrote " << o.out << ": " << tr.size() << " accepted steps, " << tr.rejected
      << " rejected\n";
  bool all = true;
  if (scenario) {
    models::Scenario s = *scenario;
    s.binding = binding;
    for (const auto &c : models::check_scenario(s, tr, o.atol)) {
      out << "shape " << (c.passed ? "PASS" : "FAIL") << ": " << c.name << "\n";
      all = all && c.passed;
    }
  }
  return (o.check && !all) ? assertion_false : ok;
}

inline int flow(const Options &o, std::ostream &out) {
  OdeSystem sys = io::load_system(o.system);
  if (o.generators.size() != 1)
    throw InputError("exactly one --generator is required");
  Generator g = io::load_generator(o.generators[0], sys);
  auto pt = detail::parse_doubles(o.point, "--point");
  if (pt.size() != sys.dim() + 1)
    throw InputError("--point needs t followed by " + std::to_string(sys.dim()) +
                     " state values");
  FlowPoint p{pt[0], std::vector<double>(pt.begin() + 1, pt.end())};
  auto r = flow_generator(g, detail::parse_params(o.params), p, o.gamma, o.substeps);
  out << "t";
  for (const auto &s : sys.states())
    out << "," << s;
  out << "\n" << num(r.t);
  for (double v : r.y)
    out << "," << num(v);
  out << "\n";
  return ok;
}

inline int invariance(const Options &o, std::ostream &out, std::ostream &err) {
  OdeSystem sys = io::load_system(o.system);
  if (o.generators.size() != 1)
    throw InputError("exactly one --generator is required");
  Generator g = io::load_generator(o.generators[0], sys);
  auto ic = detail::parse_doubles(o.ic, "--ic");
  InvarianceOptions opt;
  opt.t_end = o.t_end;
  opt.samples = o.samples ? o.samples : 64;
  opt.rtol = o.rtol;
  opt.atol = o.atol;
  opt.flow.substeps = o.substeps;
  auto rep = solution_invariance(sys, g, detail::parse_params(o.params), ic, o.gamma, opt);
  if (!rep.verified_symbolically)
    err << "WARNING: generator fails the linearized symmetry condition\n";
  out << "gamma = " << num(rep.gamma) << "\n";
  out << "compared points = " << rep.deviations.size() << "\n";
  out << "monotone = " << (rep.monotone ? "yes" : "no") << "\n";
  out << "max_rel_deviation = " << num(rep.max_rel_deviation) << "\n";
  bool pass = rep.max_rel_deviation <= o.tol;
  out << (pass ? "PASS" : "FAIL") << " (tol " << num(o.tol) << ")\n";
  return pass ? ok : assertion_false;
}

inline int model_export(const Options &o, std::ostream &out) {
  namespace fs = std::filesystem;
  auto pc = models::paper_case(models::parse_case(o.kase));
  fs::create_directories(o.dir);
  auto path = [&](const std::string &name) { return (fs::path(o.dir) / name).string(); };
  io::write_text(path("system.json"), io::dump(io::system_to_json(pc.system)));
  io::write_text(path("matrix.json"), io::dump(io::matrix_to_json(pc.t)));
  io::write_text(path("normal_form.json"), io::dump(io::system_to_json(pc.normal_form)));
  std::vector<std::string> files{"system.json", "matrix.json", "normal_form.json"};
  for (std::size_t i = 0; i < pc.generators_original.size(); ++i) {
    std::string a = "X" + std::to_string(i + 1) + ".json";
    std::string b = "Xtilde" + std::to_string(i + 1) + ".json";
    io::write_text(path(a),
                   io::dump(io::generator_to_json(pc.generators_original[i], pc.system.states())));
    io::write_text(path(b), io::dump(io::generator_to_json(pc.generators_normal[i],
                                                           pc.normal_form.states())));
    files.push_back(a);
    files.push_back(b);
  }
  std::string split = detail::join(pc.center_names, ",") + "|" +
                      detail::join(pc.hyperbolic_names, ",");
  io::json manifest{{"case", models::case_name(pc.tag)}, {"split", split}, {"files", files}};
  io::write_text(path("case.json"), io::dump(manifest));
  out << "exported case " << models::case_name(pc.tag) << " to " << o.dir << " ("
      << files.size() + 1 << " files; split " << split << ")\n";
  return ok;
}

} // namespace commands

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  Options o;
  CLI::App app{"Center-manifold and Lie-symmetry toolkit for polynomial ODE systems", "cmsym"};
  app.require_subcommand(1);

  auto add_tol = [&](CLI::App *c) {
    c->add_option("--rtol", o.rtol, "relative tolerance")->check(CLI::PositiveNumber);
    c->add_option("--atol", o.atol, "absolute tolerance")->check(CLI::PositiveNumber);
  };

  auto *an = app.add_subcommand("analyze", "Jacobian at the origin and normal-form report");
  an->add_option("--system", o.system, "system file")->required();
  an->add_option("--split", o.split, "center|hyperbolic state lists, e.g. u|v,w");
  an->add_option("--params", o.params, "numeric sample for the eigenvalue test");

  auto *tr = app.add_subcommand("transform", "linear change of coordinates y = T z");
  tr->add_option("--system", o.system)->required();
  tr->add_option("--matrix", o.matrix)->required();
  tr->add_option("--names", o.names, "new state names, comma separated");
  tr->add_option("--out", o.out, "output system file (stdout if omitted)");

  auto *cm = app.add_subcommand("center-manifold", "order-by-order center manifold");
  cm->add_option("--system", o.system)->required();
  cm->add_option("--split", o.split)->required();
  cm->add_option("--order", o.order, "truncation order N >= 2")->check(CLI::Range(2u, 64u));
  cm->add_option("--out", o.out, "write the h map here");
  cm->add_option("--reduced", o.reduced_out, "write the reduced system here");

  auto *cs = app.add_subcommand("check-symmetry", "linearized symmetry condition");
  cs->add_option("--system", o.system)->required();
  cs->add_option("--generator", o.generators)->required();

  auto *l4 = app.add_subcommand("lemma4", "center-manifold invariance under a generator");
  l4->add_option("--system", o.system)->required();
  l4->add_option("--split", o.split)->required();
  l4->add_option("--generator", o.generators)->required();
  l4->add_option("--order", o.order)->check(CLI::Range(2u, 64u));
  l4->add_option("--manifold", o.manifold, "h map file instead of computing h");

  auto *si = app.add_subcommand("simulate", "adaptive integration to CSV");
  si->add_option("--model", o.model, "built-in scenario name");
  si->add_option("--system", o.system);
  si->add_option("--params", o.params);
  si->add_option("--ic", o.ic, "initial state, comma separated");
  si->add_option("--t-end", o.t_end)->check(CLI::PositiveNumber);
  si->add_option("--samples", o.samples, "dense samples instead of accepted steps");
  si->add_option("--out", o.out, "CSV file (stdout if omitted)");
  si->add_flag("--check", o.check, "exit 1 when a scenario shape predicate fails");
  add_tol(si);

  auto *fl = app.add_subcommand("flow", "integrate a generator's one-parameter flow");
  fl->add_option("--system", o.system)->required();
  fl->add_option("--generator", o.generators)->required();
  fl->add_option("--gamma", o.gamma)->required();
  fl->add_option("--point", o.point, "t followed by the state")->required();
  fl->add_option("--params", o.params);
  fl->add_option("--substeps", o.substeps)->check(CLI::Range(1u, 1000000u));

  auto *iv = app.add_subcommand("invariance", "numerical solution-set invariance test");
  iv->add_option("--system", o.system)->required();
  iv->add_option("--generator", o.generators)->required();
  iv->add_option("--gamma", o.gamma)->required();
  iv->add_option("--ic", o.ic)->required();
  iv->add_option("--params", o.params);
  iv->add_option("--tol", o.tol)->check(CLI::NonNegativeNumber);
  iv->add_option("--t-end", o.t_end)->check(CLI::PositiveNumber);
  iv->add_option("--samples", o.samples);
  iv->add_option("--substeps", o.substeps)->check(CLI::Range(1u, 1000000u));
  add_tol(iv);

  auto *mo = app.add_subcommand("model", "built-in models");
  mo->require_subcommand(1);
  auto *ex = mo->add_subcommand("export", "write a built-in case as system/generator files");
  ex->add_option("--case", o.kase, "g0 or gnz")->required();
  ex->add_option("--dir", o.dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError &e) {
    err << "ERROR " << input_error << ": " << e.what() << "\n";
    return input_error;
  }

  auto fail = [&](int code, const std::string &msg) {
    std::string line = msg;
    for (auto &c : line)
      if (c == '\n')
        c = ' ';
    err << "ERROR " << code << ": " << line << "\n";
    return code;
  };
  try {
    if (an->parsed())
      return commands::analyze(o, out);
    if (tr->parsed())
      return commands::transform(o, out);
    if (cm->parsed())
      return commands::center_manifold(o, out);
    if (cs->parsed())
      return commands::check_symmetry(o, out);
    if (l4->parsed())
      return commands::lemma4(o, out);
    if (si->parsed())
      return commands::simulate(o, out);
    if (fl->parsed())
      return commands::flow(o, out);
    if (iv->parsed())
      return commands::invariance(o, out, err);
    if (ex->parsed())
      return commands::model_export(o, out);
  } catch (const InputError &e) {
    return fail(input_error, e.what());
  } catch (const NumericError &e) {
    return fail(numeric_error, e.what());
  } catch (const Lemma4Violation &e) {
    return fail(assertion_false, e.what());
  } catch (const Error &e) {
    return fail(numeric_error, e.what());
  } catch (const std::exception &e) {
    return fail(numeric_error, std::string("internal error: ") + e.what());
  }
  return fail(input_error, "no command given");
}

} // namespace cmsym::cli

#endif
