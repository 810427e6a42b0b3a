#ifndef CMSYM_DOPRI5_HPP
#define CMSYM_DOPRI5_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "cmsym/error.hpp"

namespace cmsym {

// Time grid plus row-major state matrix of accepted steps. Derivatives at
// every node are kept for cubic Hermite dense output.
struct NumericTrajectory {
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<double> states; // times.size() x dim
  std::vector<double> derivs; // times.size() x dim
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  std::size_t size() const { return times.size(); }

  std::span<const double> state(std::size_t i) const {
    return {states.data() + i * dim, dim};
  }

  std::span<const double> deriv(std::size_t i) const {
    return {derivs.data() + i * dim, dim};
  }

  std::span<const double> final_state() const { return state(size() - 1); }

  // Cubic Hermite interpolation between the bracketing accepted steps.
  std::vector<double> interpolate(double t) const {
    if (times.empty())
      throw NumericError("interpolation on an empty trajectory");
    if (t <= times.front())
      return {state(0).begin(), state(0).end()};
    if (t >= times.back())
      return {final_state().begin(), final_state().end()};
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    double t0 = times[i], h = times[i + 1] - t0;
    double s = (t - t0) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    auto y0 = state(i), y1 = state(i + 1), f0 = deriv(i), f1 = deriv(i + 1);
    std::vector<double> y(dim);
    for (std::size_t k = 0; k < dim; ++k)
      y[k] = h00 * y0[k] + h * h10 * f0[k] + h01 * y1[k] + h * h11 * f1[k];
    return y;
  }
};

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
};

using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

namespace dopri {

// Dormand-Prince 5(4) tableau (Dormand & Prince 1980), FSAL.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI step-size control constants.
inline constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
inline constexpr double order_exp = 0.2 - beta * 0.75;

} // namespace dopri

namespace detail {

inline double error_norm(std::span<const double> err, std::span<const double> y0,
                         std::span<const double> y1, double rtol, double atol) {
  double sum = 0.0;
  for (std::size_t k = 0; k < err.size(); ++k) {
    double sc = atol + rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
    double r = err[k] / sc;
    sum += r * r;
  }
  return err.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(err.size()));
}

inline void check_finite(std::span<const double> y, double t) {
  for (double v : y)
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "non-finite state at t = " << t;
      throw NumericError(os.str());
    }
}

// Starting step from the local Lipschitz estimate (Hairer, Norsett, Wanner).
inline double initial_step(const OdeRhs &f, double t0, std::span<const double> y0,
                           std::span<const double> f0, double span_len,
                           const IntegratorOptions &opt) {
  const std::size_t n = y0.size();
  double d0 = 0, d1 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double sc = opt.atol + opt.rtol * std::abs(y0[k]);
    d0 += (y0[k] / sc) * (y0[k] / sc);
    d1 += (f0[k] / sc) * (f0[k] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min({h0, span_len, opt.max_step});
  std::vector<double> y1(n), f1(n);
  for (std::size_t k = 0; k < n; ++k)
    y1[k] = y0[k] + h0 * f0[k];
  f(t0 + h0, y1, f1);
  double d2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double sc = opt.atol + opt.rtol * std::abs(y0[k]);
    d2 += ((f1[k] - f0[k]) / sc) * ((f1[k] - f0[k]) / sc);
  }
  d2 = std::sqrt(d2 / n) / h0;
  double dm = std::max(d1, d2);
  double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100 * h0, h1, span_len, opt.max_step});
}

} // namespace detail

// Adaptive Dormand-Prince 5(4) from t0 to t_end (> t0). Deterministic for
// fixed inputs.
inline NumericTrajectory integrate_dopri5(const OdeRhs &f, double t0,
                                          std::span<const double> y0, double t_end,
                                          const IntegratorOptions &opt = {}) {
  using namespace dopri;
  if (!(t_end > t0))
    throw InputError("integration end time must exceed the start time");
  if (!(opt.rtol > 0) || !(opt.atol > 0))
    throw InputError("tolerances must be positive");
  const std::size_t n = y0.size();
  NumericTrajectory tr;
  tr.dim = n;
  std::vector<double> y(y0.begin(), y0.end()), fy(n);
  detail::check_finite(y, t0);
  f(t0, y, fy);
  detail::check_finite(fy, t0);
  tr.times.push_back(t0);
  tr.states.insert(tr.states.end(), y.begin(), y.end());
  tr.derivs.insert(tr.derivs.end(), fy.begin(), fy.end());

  std::vector<double> k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), err(n);
  double t = t0;
  double h = detail::initial_step(f, t0, y, fy, t_end - t0, opt);
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (t < t_end) {
    if (++steps > opt.max_steps)
      throw NumericError("step limit exceeded at t = " + std::to_string(t));
    if (t + h > t_end || t_end - (t + h) < 1e-12 * std::abs(t_end))
      h = t_end - t;
    h = std::min(h, opt.max_step);
    if (h < 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os.precision(17);
      os << "step size underflow at t = " << t;
      throw NumericError(os.str());
    }

    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * a21 * fy[i];
    f(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a31 * fy[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a41 * fy[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * fy[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * fy[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                           a65 * k5[i]);
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * fy[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                            a76 * k6[i]);
    f(t + h, ynew, k7);
    for (std::size_t i = 0; i < n; ++i)
      err[i] = h * (e1 * fy[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                    e7 * k7[i]);

    double en = detail::error_norm(err, y, ynew, opt.rtol, opt.atol);
    if (!std::isfinite(en)) {
      ++tr.rejected;
      h *= fac_min;
      last_rejected = true;
      continue;
    }
    if (en <= 1.0) {
      t = (h == t_end - t) ? t_end : t + h;
      y = ynew;
      fy = k7;
      detail::check_finite(y, t);
      tr.times.push_back(t);
      tr.states.insert(tr.states.end(), y.begin(), y.end());
      tr.derivs.insert(tr.derivs.end(), fy.begin(), fy.end());
      ++tr.accepted;
      double fac = en == 0.0 ? fac_max
                             : safety * std::pow(en, -order_exp) * std::pow(err_old, beta);
      fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
      err_old = std::max(en, 1e-4);
      h *= fac;
      last_rejected = false;
    } else {
      ++tr.rejected;
      h *= std::max(fac_min, safety * std::pow(en, -order_exp));
      last_rejected = true;
    }
  }
  return tr;
}

} // namespace cmsym

#endif
