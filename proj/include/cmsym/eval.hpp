#ifndef CMSYM_EVAL_HPP
#define CMSYM_EVAL_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmsym/ratfunc.hpp"

namespace cmsym {

// Parameter symbol -> numeric value.
using ParamBinding = std::map<std::string, double>;

// Double-precision evaluator for a RatFunc, with coefficients converted once.
class CompiledRatFunc {
public:
  CompiledRatFunc() = default;

  explicit CompiledRatFunc(const RatFunc &f)
      : num_(compile(f.num())), den_(compile(f.den())) {}

  double operator()(std::span<const double> values) const {
    double d = eval(den_, values);
    if (d == 0.0)
      throw NumericError("denominator evaluates to zero");
    return eval(num_, values) / d;
  }

private:
  struct Term {
    double coef;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;
  };

  static std::vector<Term> compile(const MultiPoly &p) {
    std::vector<Term> out;
    for (const auto &[m, c] : p.terms()) {
      Term t{c.get_d(), {}};
      for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] > 0)
          t.factors.emplace_back(static_cast<std::uint32_t>(i), m[i]);
      out.push_back(std::move(t));
    }
    return out;
  }

  static double eval(const std::vector<Term> &terms, std::span<const double> x) {
    double sum = 0.0;
    for (const auto &t : terms) {
      double v = t.coef;
      for (auto [i, e] : t.factors) {
        double xi = x[i];
        for (std::uint32_t k = 0; k < e; ++k)
          v *= xi;
      }
      sum += v;
    }
    return sum;
  }

  std::vector<Term> num_, den_;
};

// Numeric values for the listed symbols taken from `binding`; symbols in
// `skip` are left at zero for the caller to fill in.
inline std::vector<double> bind_values(const Symbols &syms, const ParamBinding &binding,
                                       std::span<const std::size_t> skip) {
  std::vector<double> values(syms.size(), 0.0);
  for (std::size_t i = 0; i < syms.size(); ++i) {
    bool skipped = false;
    for (auto s : skip)
      skipped = skipped || s == i;
    if (skipped)
      continue;
    auto it = binding.find(syms[i]);
    if (it == binding.end())
      throw InputError("unbound symbol '" + syms[i] + "'");
    values[i] = it->second;
  }
  return values;
}

} // namespace cmsym

#endif
