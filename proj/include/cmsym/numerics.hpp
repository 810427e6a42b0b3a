#ifndef CMSYM_NUMERICS_HPP
#define CMSYM_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cmsym/dopri5.hpp"
#include "cmsym/eval.hpp"
#include "cmsym/symmetry.hpp"

namespace cmsym {

// Numeric right-hand side of a system with its parameters bound.
class CompiledSystem {
public:
  CompiledSystem(const OdeSystem &sys, const ParamBinding &binding) : n_(sys.dim()) {
    std::vector<std::size_t> free{OdeSystem::time_index()};
    for (auto v : sys.state_vars())
      free.push_back(v);
    values_ = bind_values(sys.symbols(), binding, free);
    for (const auto &r : sys.rhs())
      rhs_.emplace_back(r);
  }

  std::size_t dim() const { return n_; }

  void operator()(double t, std::span<const double> y, std::span<double> dy) const {
    values_[0] = t;
    std::copy(y.begin(), y.end(), values_.begin() + 1);
    for (std::size_t k = 0; k < n_; ++k)
      dy[k] = rhs_[k](values_);
  }

  OdeRhs as_rhs() const {
    return [this](double t, std::span<const double> y, std::span<double> dy) {
      (*this)(t, y, dy);
    };
  }

private:
  std::size_t n_;
  mutable std::vector<double> values_;
  std::vector<CompiledRatFunc> rhs_;
};

inline std::vector<double> eval_rhs(const OdeSystem &sys, const ParamBinding &binding,
                                    std::span<const double> state) {
  if (state.size() != sys.dim())
    throw InputError("state length does not match the system dimension");
  CompiledSystem cs(sys, binding);
  std::vector<double> dy(sys.dim());
  cs(0.0, state, dy);
  return dy;
}

inline NumericTrajectory integrate_adaptive(const OdeSystem &sys, const ParamBinding &binding,
                                            std::span<const double> ic, double t_end,
                                            double rtol = 1e-9, double atol = 1e-12) {
  if (ic.size() != sys.dim())
    throw InputError("initial condition length does not match the system dimension");
  CompiledSystem cs(sys, binding);
  IntegratorOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  return integrate_dopri5(cs.as_rhs(), 0.0, ic, t_end, opt);
}

struct FlowPoint {
  double t = 0.0;
  std::vector<double> y;
};

struct FlowOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  unsigned substeps = 1; // maximum step is |gamma| / substeps
};

// Numeric generator flow: d(t^, y^)/d gamma = (xi, eta)(t^, y^) from
// gamma = 0; the generator's symbols are laid out [t, states..., params...].
class GeneratorFlow {
public:
  GeneratorFlow(const Generator &x, const ParamBinding &binding) : n_(x.eta.size()) {
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k <= n_; ++k)
      free.push_back(k);
    values_ = bind_values(x.symbols(), binding, free);
    xi_ = CompiledRatFunc(x.xi);
    for (const auto &e : x.eta)
      eta_.emplace_back(e);
  }

  FlowPoint operator()(const FlowPoint &p, double gamma, const FlowOptions &opt = {}) const {
    if (p.y.size() != n_)
      throw InputError("flow point dimension does not match the generator");
    if (gamma == 0.0)
      return p;
    const double sign = gamma < 0 ? -1.0 : 1.0;
    OdeRhs f = [&](double, std::span<const double> z, std::span<double> dz) {
      values_[0] = z[0];
      std::copy(z.begin() + 1, z.end(), values_.begin() + 1);
      dz[0] = sign * xi_(values_);
      for (std::size_t k = 0; k < n_; ++k)
        dz[k + 1] = sign * eta_[k](values_);
    };
    std::vector<double> z0{p.t};
    z0.insert(z0.end(), p.y.begin(), p.y.end());
    IntegratorOptions io;
    io.rtol = opt.rtol;
    io.atol = opt.atol;
    io.max_step = std::abs(gamma) / std::max(1u, opt.substeps);
    auto tr = integrate_dopri5(f, 0.0, z0, std::abs(gamma), io);
    auto z = tr.final_state();
    for (double v : z)
      if (!std::isfinite(v))
        throw NumericError("non-finite generator flow");
    return {z[0], std::vector<double>(z.begin() + 1, z.end())};
  }

private:
  std::size_t n_;
  mutable std::vector<double> values_;
  CompiledRatFunc xi_;
  std::vector<CompiledRatFunc> eta_;
};

inline FlowPoint flow_generator(const Generator &x, const ParamBinding &binding,
                                const FlowPoint &point, double gamma,
                                unsigned substeps = 1) {
  FlowOptions opt;
  opt.substeps = substeps;
  return GeneratorFlow(x, binding)(point, gamma, opt);
}

namespace detail {

// States at increasing times (the first may equal t0), integrating segment by
// segment so that every requested time is an accepted step endpoint.
inline std::vector<std::vector<double>> states_at(const OdeRhs &f, std::span<const double> y0,
                                                  double t0, const std::vector<double> &times,
                                                  const IntegratorOptions &io) {
  std::vector<std::vector<double>> out;
  std::vector<double> y(y0.begin(), y0.end());
  double t = t0;
  for (double target : times) {
    const double dt = target - t;
    if (dt > 0 && dt < 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      // below the integrator's step resolution: one Euler step is exact enough
      std::vector<double> dy(y.size());
      f(t, y, dy);
      for (std::size_t k = 0; k < y.size(); ++k)
        y[k] += dt * dy[k];
      t = target;
    } else if (dt > 0) {
      auto seg = integrate_dopri5(f, t, y, target, io);
      auto last = seg.final_state();
      y.assign(last.begin(), last.end());
      t = target;
    }
    out.push_back(y);
  }
  return out;
}

} // namespace detail

struct InvarianceOptions {
  double t_end = 50.0;
  std::size_t samples = 64;
  double rtol = 1e-9;
  double atol = 1e-12;
  FlowOptions flow;
};

struct InvarianceReport {
  double gamma = 0.0;
  double max_rel_deviation = 0.0;
  std::vector<double> sample_times;      // t_i
  std::vector<double> transformed_times; // t^_i
  std::vector<double> deviations;        // per compared point
  bool monotone = true;       // false: comparison limited to the monotone prefix
  bool verified_symbolically = false; // lsc_residual vanished
};

// Maps sampled points of one solution through the generator flow and
// measures how far they are from the solution through the first mapped point.
// Both solutions are integrated exactly onto the compared times.
// Deviation per point: max-norm difference relative to max(|z|_inf, atol).
inline InvarianceReport solution_invariance(const OdeSystem &sys, const Generator &x,
                                            const ParamBinding &binding,
                                            std::span<const double> ic, double gamma,
                                            const InvarianceOptions &opt = {}) {
  InvarianceReport rep;
  rep.gamma = gamma;
  rep.verified_symbolically = lsc_residual(x, sys).is_symmetry;
  if (opt.samples < 2)
    throw InputError("invariance test needs at least two samples");
  CompiledSystem cs(sys, binding);
  IntegratorOptions io;
  io.rtol = opt.rtol;
  io.atol = opt.atol;
  for (std::size_t i = 0; i < opt.samples; ++i)
    rep.sample_times.push_back(opt.t_end * static_cast<double>(i) /
                               static_cast<double>(opt.samples - 1));
  // Samples are step endpoints, so no interpolation error enters the comparison.
  auto ref = detail::states_at(cs.as_rhs(), ic, 0.0, rep.sample_times, io);
  GeneratorFlow flow(x, binding);
  std::vector<FlowPoint> mapped;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    mapped.push_back(flow(FlowPoint{rep.sample_times[i], ref[i]}, gamma, opt.flow));
    rep.transformed_times.push_back(mapped.back().t);
  }
  std::size_t prefix = 1;
  while (prefix < mapped.size() && mapped[prefix].t > mapped[prefix - 1].t)
    ++prefix;
  rep.monotone = prefix == mapped.size();
  if (prefix < 2)
    throw NumericError("transformed sample times are not increasing");
  std::vector<double> targets;
  for (std::size_t i = 0; i < prefix; ++i)
    targets.push_back(mapped[i].t);
  auto second = detail::states_at(cs.as_rhs(), mapped.front().y, targets.front(), targets, io);
  for (std::size_t i = 0; i < prefix; ++i) {
    const auto &z = second[i];
    double diff = 0.0, scale = opt.atol;
    for (std::size_t k = 0; k < z.size(); ++k) {
      diff = std::max(diff, std::abs(mapped[i].y[k] - z[k]));
      scale = std::max(scale, std::abs(z[k]));
    }
    rep.deviations.push_back(diff / scale);
  }
  rep.max_rel_deviation = *std::max_element(rep.deviations.begin(), rep.deviations.end());
  return rep;
}

using ScalarFunction = std::function<double(double, std::span<const double>)>;

// max_i |H(y_i) - H(y_0)| / max(|H(y_0)|, 1) over the accepted steps.
inline double conserved_drift(const NumericTrajectory &traj, const ScalarFunction &h) {
  if (traj.size() == 0)
    throw InputError("empty trajectory");
  double h0 = h(traj.times[0], traj.state(0));
  if (!std::isfinite(h0))
    throw NumericError("conserved quantity is not finite at the initial point");
  double scale = std::max(std::abs(h0), 1.0), drift = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    double v = h(traj.times[i], traj.state(i));
    if (!std::isfinite(v))
      throw NumericError("conserved quantity is not finite at t = " +
                         std::to_string(traj.times[i]));
    drift = std::max(drift, std::abs(v - h0) / scale);
  }
  return drift;
}

// CSV with header t,<names...>; one row per accepted step, or per evenly
// spaced dense sample when samples > 0. 17 significant digits.
inline void write_csv(std::ostream &os, const NumericTrajectory &traj,
                      const std::vector<std::string> &names, std::size_t samples = 0) {
  os << "t";
  for (const auto &n : names)
    os << "," << n;
  os << "\n";
  auto old_flags = os.flags();
  auto old_prec = os.precision(17);
  auto row = [&](double t, std::span<const double> y) {
    os << t;
    for (double v : y)
      os << "," << v;
    os << "\n";
  };
  if (samples == 0) {
    for (std::size_t i = 0; i < traj.size(); ++i)
      row(traj.times[i], traj.state(i));
  } else {
    const double a = traj.times.front(), b = traj.times.back();
    for (std::size_t i = 0; i < samples; ++i) {
      double t = samples == 1 ? a : a + (b - a) * static_cast<double>(i) /
                                            static_cast<double>(samples - 1);
      auto y = traj.interpolate(t);
      row(t, y);
    }
  }
  os.precision(old_prec);
  os.flags(old_flags);
}

} // namespace cmsym

#endif
